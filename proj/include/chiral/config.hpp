// config.hpp - run configuration: a flat key = value format with [system],
// [loop], [integrator] and [run] sections. '#' starts a comment.
//
// Numeric values are expressions (see expression.hpp). Every section may use
// `pi`; rates in [loop] and [integrator] may also use `Omega` and `omega_0`,
// and [integrator] may use the loop period `T`.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/model.hpp"
#include "chiral/schedule.hpp"

namespace chiral {

struct RunSection {
    Label initial_label = Label::plus;
    std::vector<std::string> outputs{"trajectory", "report"};
    double tie_ratio = 10.0;

    bool wants(std::string_view output) const;
    bool operator==(const RunSection&) const = default;
};

struct RunConfig {
    SystemParams system;
    LoopSpec loop;  // the sign of omega_c is the run direction
    IntegratorOptions integrator;
    double full_dt = 0.0;  // step of the full mechanical route
    RunSection run;

    Direction direction() const { return loop.direction(); }
    // Throws ValidationError.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

// Defaults: omega_0 = 2pi*10, Omega = 2pi*0.1, Gamma_0 = Omega, A_Gamma = Omega/30,
// A_theta = pi/30, omega_c = Omega/8, gamma_phase = pi, dt = T/20000,
// full_dt = 2pi/(50 omega_0). Throws ParseError or ValidationError.
RunConfig parse_config(std::string_view text);

// Canonical text: every key present, numbers with 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

// Evaluates a command-line value with the config's symbols (pi, Omega,
// omega_0, T).
double evaluate_setting(const RunConfig& cfg, std::string_view text);

}  // namespace chiral
