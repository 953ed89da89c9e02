// chiralloop - simulate parameter loops around an exceptional point of two
// coupled gain/loss oscillators.
//
//   chiralloop surface [--config F] [--out D] [--resolution N] [--gamma-from V ...]
//   chiralloop evolve  [--config F] [--out D] [--direction cw|ccw] [--init plus|minus]
//   chiralloop sweep   --axis NAME --from V --to V --points N [...]
//   chiralloop verify  [--config F] [--out D] [--tol V]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "chiral/commands.hpp"
#include "chiral/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw chiral::ValidationError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::string direction;
    std::string init;
    bool seedless = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "Configuration file (defaults apply if omitted)");
        app->add_option("--out", out_dir, "Output directory")->capture_default_str();
        app->add_option("--direction", direction, "Override the loop direction")
            ->check(CLI::IsMember({"cw", "ccw"}));
        app->add_option("--init", init, "Override the initial eigenstate")
            ->check(CLI::IsMember({"plus", "minus"}));
        // Nothing here is random; the flag exists so scripts can assert that.
        app->add_flag("--seedless", seedless, "Accepted for compatibility; no RNG is used")
            ->disable_flag_override();
    }

    chiral::RunConfig load() const {
        chiral::RunConfig cfg = chiral::parse_config(config_path.empty() ? "" : read_file(config_path));
        if (direction == "cw") cfg.loop = cfg.loop.with_direction(chiral::Direction::cw);
        if (direction == "ccw") cfg.loop = cfg.loop.with_direction(chiral::Direction::ccw);
        if (init == "plus") cfg.run.initial_label = chiral::Label::plus;
        if (init == "minus") cfg.run.initial_label = chiral::Label::minus;
        cfg.validate();
        return cfg;
    }
};

int report(const chiral::CommandResult& r) {
    (r.exit_code == chiral::kExitOk ? std::cout : std::cerr) << r.message << '\n';
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Encircling an exceptional point with two coupled gain/loss oscillators"};
    app.set_version_flag("--version", chiral::tool_version());
    app.require_subcommand(1);

    Common surface_opts, evolve_opts, sweep_opts, verify_opts;

    auto* surface = app.add_subcommand("surface", "Eigenvalue sheets over a (Gamma, theta) grid");
    surface_opts.attach(surface);
    std::string gamma_from = "0", gamma_to = "2*Omega", theta_from = "0", theta_to = "pi/2";
    std::size_t resolution = 101;
    surface->add_option("--gamma-from", gamma_from)->capture_default_str();
    surface->add_option("--gamma-to", gamma_to)->capture_default_str();
    surface->add_option("--theta-from", theta_from)->capture_default_str();
    surface->add_option("--theta-to", theta_to)->capture_default_str();
    surface->add_option("--resolution", resolution, "Points per axis")->capture_default_str();

    auto* evolve = app.add_subcommand("evolve", "Integrate one loop and classify the final state");
    evolve_opts.attach(evolve);

    auto* sweep = app.add_subcommand("sweep", "NAT delay times along one loop parameter");
    sweep_opts.attach(sweep);
    std::string axis, from, to;
    std::size_t points = 0;
    sweep->add_option("--axis", axis, "a_theta, a_gamma, gamma_0 or omega_c")->required();
    sweep->add_option("--from", from, "First axis value (expression)")->required();
    sweep->add_option("--to", to, "Last axis value (expression)")->required();
    sweep->add_option("--points", points, "Number of axis values")->required();

    auto* verify = app.add_subcommand("verify", "Compare envelope and full mechanical dynamics");
    verify_opts.attach(verify);
    std::string tol = "0.05";
    verify->add_option("--tol", tol, "RMS tolerance")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*surface) {
            const auto cfg = surface_opts.load();
            return report(chiral::cmd_surface(
                cfg,
                {chiral::evaluate_setting(cfg, gamma_from), chiral::evaluate_setting(cfg, gamma_to)},
                {chiral::evaluate_setting(cfg, theta_from), chiral::evaluate_setting(cfg, theta_to)},
                resolution, surface_opts.out_dir));
        }
        if (*evolve) {
            return report(chiral::cmd_evolve(evolve_opts.load(), evolve_opts.out_dir));
        }
        if (*sweep) {
            const auto cfg = sweep_opts.load();
            return report(chiral::cmd_sweep(cfg, chiral::parse_sweep_axis(axis),
                                            chiral::evaluate_setting(cfg, from),
                                            chiral::evaluate_setting(cfg, to), points,
                                            sweep_opts.out_dir));
        }
        if (*verify) {
            const auto cfg = verify_opts.load();
            return report(
                chiral::cmd_verify(cfg, chiral::evaluate_setting(cfg, tol), verify_opts.out_dir));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return chiral::kExitUsage;
    }
    return chiral::kExitUsage;
}
