#include "chiral/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "chiral/errors.hpp"

namespace chiral {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string checksum(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json envelope(const char* command, const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = tool_version();
    j["command"] = command;
    j["config_echo"] = serialize_config(cfg);
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::size_t steps_per_period(const RunConfig& cfg) {
    const double n = std::round(cfg.loop.period() / cfg.integrator.dt);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

// CSV cells may not contain separators.
std::string csv_safe(std::string s) {
    for (char& c : s) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

json report_json(const ChiralityReport& r, double period) {
    json j;
    j["direction"] = to_string(r.direction);
    j["initial_label"] = to_string(r.initial_label);
    j["final_label"] = r.final_label ? json(to_string(*r.final_label)) : json(nullptr);
    j["leading_label"] = to_string(r.leading_label);
    j["verdict"] = to_string(r.verdict);
    j["final_overlap_ratio"] = number_or_null(r.final_overlap_ratio);
    j["period"] = period;
    json events = json::array();
    for (const auto& e : r.nat_events) {
        events.push_back({{"time", e.time},
                          {"preceding_crossing", e.preceding_crossing},
                          {"delay", e.delay},
                          {"delay_over_period", e.delay / period}});
    }
    j["nat_events"] = std::move(events);
    j["nat_error"] = r.nat_error.empty() ? json(nullptr) : json(r.nat_error);
    return j;
}

}  // namespace

const char* tool_version() { return CHIRALLOOP_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string surface_csv(const SurfaceGrid& grid) {
    std::string out = "gamma,theta,re_lp,im_lp,re_lm,im_lm\n";
    for (std::size_t i = 0; i < grid.gammas.size(); ++i) {
        for (std::size_t j = 0; j < grid.thetas.size(); ++j) {
            const auto& e = grid.at(i, j);
            for (double v : {grid.gammas[i], grid.thetas[j], e.plus.real(), e.plus.imag(),
                             e.minus.real()}) {
                out += format_number(v);
                out += ',';
            }
            out += format_number(e.minus.imag());
            out += '\n';
        }
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    const auto riemann = riemann_trajectory(traj);
    std::string out = "t,theta,gamma,re_ax,im_ax,re_ay,im_ay,abs_cp,abs_cm,re_traj,im_traj\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj.samples[k];
        const double row[] = {s.t,
                              s.theta,
                              s.gamma,
                              s.state.a_x.real(),
                              s.state.a_x.imag(),
                              s.state.a_y.real(),
                              s.state.a_y.imag(),
                              std::abs(s.coeffs.plus),
                              std::abs(s.coeffs.minus),
                              riemann[k].value.real(),
                              riemann[k].value.imag()};
        for (std::size_t c = 0; c < std::size(row); ++c) {
            if (c) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SweepResult& r) {
    std::string out = "axis_value,n_nats,t_d_1,t_d_2,chiral_flag,error\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += format_number(r.axis_values[i]);
        out += ',';
        if (r.errors[i].empty()) {
            const auto& d = r.delay_times[i];
            out += std::to_string(r.nat_counts[i]);
            out += ',';
            if (d.size() > 0) out += format_number(d[0]);
            out += ',';
            if (d.size() > 1) out += format_number(d[1]);
            out += ',';
            out += r.chiral_flags[i] ? "1" : "0";
            out += ',';
        } else {
            out += ",,,,";
            out += csv_safe(r.errors[i]);
        }
        out += '\n';
    }
    return out;
}

CommandResult cmd_surface(const RunConfig& cfg, Range gamma_range, Range theta_range,
                          std::size_t resolution, const fs::path& out_dir) {
    cfg.validate();
    if (resolution < 2) throw ValidationError("resolution >= 2 violated");
    const SurfaceGrid grid =
        surface_grid(cfg.system.detuning(), gamma_range, theta_range, resolution, resolution);
    fs::create_directories(out_dir);
    const fs::path path = out_dir / "surface.csv";
    write_file(path, surface_csv(grid));
    return {kExitOk, "wrote " + std::to_string(grid.values.size()) + " rows to " + path.string(),
            {path}};
}

CommandResult cmd_evolve(const RunConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    Trajectory traj;
    ChiralityReport report;
    std::string csv;
    try {
        traj = integrate_envelope(cfg.system, cfg.loop, cfg.run.initial_label, cfg.integrator);
        report = classify_final(traj, cfg.run.tie_ratio);
        if (cfg.run.wants("trajectory")) csv = trajectory_csv(traj);
    } catch (const Error& e) {
        return {kExitIntegrator, std::string("integrator failure: ") + e.what(), {}};
    }

    fs::create_directories(out_dir);
    CommandResult result;
    json j = envelope("evolve", cfg);
    json sums = json::object();
    if (cfg.run.wants("trajectory")) {
        const fs::path path = out_dir / "trajectory.csv";
        write_file(path, csv);
        result.files.push_back(path);
        j["trajectory_path"] = "trajectory.csv";
        sums["trajectory.csv"] = checksum(csv);
    } else {
        j["trajectory_path"] = nullptr;
    }
    j["report"] = report_json(report, cfg.loop.period());
    j["checksums"] = std::move(sums);
    if (cfg.run.wants("report")) {
        const fs::path path = out_dir / "report.json";
        write_file(path, dump(j));
        result.files.push_back(path);
    }

    result.exit_code = report.verdict == Verdict::undetermined ? kExitUndetermined : kExitOk;
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.4g", report.final_overlap_ratio);
    result.message = std::string(to_string(report.direction)) + " from " +
                     to_string(report.initial_label) + ": verdict " + to_string(report.verdict) +
                     ", leading " + to_string(report.leading_label) + " (ratio " + ratio + "), " +
                     std::to_string(report.nat_events.size()) + " NAT(s)";
    return result;
}

CommandResult cmd_sweep(const RunConfig& cfg, SweepAxis axis, double from, double to,
                        std::size_t points, const fs::path& out_dir) {
    cfg.validate();
    if (points < 1) throw ValidationError("points >= 1 violated");
    if (!std::isfinite(from) || !std::isfinite(to)) throw ValidationError("sweep bounds must be finite");

    std::vector<double> values(points);
    for (std::size_t i = 0; i < points; ++i) {
        values[i] = points == 1 ? from
                                : from + (to - from) * (static_cast<double>(i) /
                                                        static_cast<double>(points - 1));
    }
    SweepOptions opts;
    opts.steps_per_period = steps_per_period(cfg);
    const SweepResult r = sweep_delay(cfg.system, cfg.loop, axis, values, cfg.run.initial_label,
                                      cfg.direction(), opts);

    fs::create_directories(out_dir);
    const std::string csv = sweep_csv(r);
    const fs::path csv_path = out_dir / "sweep.csv";
    write_file(csv_path, csv);

    json rows = json::array();
    std::size_t failures = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double period = with_axis_value(cfg.loop, axis, values[i]).period();
        json row;
        row["axis_value"] = r.axis_values[i];
        row["period"] = number_or_null(period);
        if (r.errors[i].empty()) {
            row["n_nats"] = r.nat_counts[i];
            row["delay_times"] = r.delay_times[i];
            json ratios = json::array();
            for (double d : r.delay_times[i]) ratios.push_back(d / period);
            row["delay_over_period"] = std::move(ratios);
            row["no_nat"] = static_cast<bool>(r.no_nat[i]);
            row["chiral"] = static_cast<bool>(r.chiral_flags[i]);
            row["error"] = nullptr;
        } else {
            ++failures;
            row["error"] = r.errors[i];
        }
        rows.push_back(std::move(row));
    }
    json j = envelope("sweep", cfg);
    j["trajectory_path"] = nullptr;
    j["report"] = {{"axis", to_string(axis)},
                   {"direction", to_string(cfg.direction())},
                   {"initial_label", to_string(cfg.run.initial_label)},
                   {"points", std::move(rows)}};
    j["checksums"] = {{"sweep.csv", checksum(csv)}};
    const fs::path json_path = out_dir / "sweep.json";
    write_file(json_path, dump(j));

    CommandResult result;
    result.files = {csv_path, json_path};
    result.exit_code = failures == r.size() ? kExitIntegrator : kExitOk;
    result.message = "swept " + std::string(to_string(axis)) + " over " + std::to_string(r.size()) +
                     " point(s), " + std::to_string(failures) + " failed";
    return result;
}

CommandResult cmd_verify(const RunConfig& cfg, double tol, const fs::path& out_dir) {
    cfg.validate();
    json j = envelope("verify", cfg);
    j["trajectory_path"] = nullptr;
    CommandResult result;
    try {
        const VerificationReport v = verify_envelope_reduction(
            cfg.system, cfg.loop, cfg.run.initial_label, tol, steps_per_period(cfg), cfg.full_dt);
        j["report"] = {{"rms_error", v.rms_error},
                       {"max_error", v.max_error},
                       {"tolerance", v.tolerance},
                       {"samples", v.samples},
                       {"pass", v.pass}};
        result.exit_code = v.pass ? kExitOk : kExitVerifyFail;
        char buf[96];
        std::snprintf(buf, sizeof buf, "rms error %.3e (tolerance %.3e): %s", v.rms_error, tol,
                      v.pass ? "pass" : "fail");
        result.message = buf;
    } catch (const RegimeViolation& e) {
        j["report"] = {{"error", e.what()}};
        result.exit_code = kExitRegime;
        result.message = std::string("regime guard: ") + e.what();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        j["report"] = {{"error", e.what()}};
        result.exit_code = kExitIntegrator;
        result.message = std::string("integrator failure: ") + e.what();
    }
    j["checksums"] = json::object();
    fs::create_directories(out_dir);
    const fs::path path = out_dir / "verify.json";
    write_file(path, dump(j));
    result.files.push_back(path);
    return result;
}

}  // namespace chiral
