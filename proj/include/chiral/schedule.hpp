// schedule.hpp - time-dependent parameter loops in the (theta, Gamma) plane.
//
//   theta(t) = theta_center + (2 A_theta / pi) * integral_0^t sign(cos w_c t') w_c dt'
//   Gamma(t) = Gamma_0 + A_Gamma sin(w_c t + pi/2 + gamma_phase)
//
// theta is a triangle wave with constant angular speed (2 A_theta / pi)|w_c|;
// the loop is counter-clockwise for w_c > 0 and clockwise for w_c < 0.

#pragma once

#include <numbers>
#include <optional>
#include <vector>

namespace chiral {

enum class Direction { cw, ccw };

const char* to_string(Direction d);

struct LoopSpec {
    double gamma_0 = 0.0;   // rad/s
    double a_gamma = 0.0;   // rad/s
    double a_theta = 0.0;   // rad
    double omega_c = 0.0;   // signed loop angular frequency, rad/s
    double theta_center = std::numbers::pi / 4.0;
    // Phase offset of the Gamma modulation. 0 starts the loop at Gamma_0 + A_Gamma;
    // pi starts it at Gamma_0 - A_Gamma.
    double gamma_phase = 0.0;
    int n_periods = 1;

    double period() const;
    double duration() const { return n_periods * period(); }
    Direction direction() const { return omega_c > 0.0 ? Direction::ccw : Direction::cw; }
    LoopSpec with_direction(Direction d) const;

    // Throws ValidationError naming the violated invariant.
    void validate() const;

    bool operator==(const LoopSpec&) const = default;
};

double theta_at(const LoopSpec& spec, double t);
double gamma_at(const LoopSpec& spec, double t);

struct PathSample {
    double t;
    double theta;
    double gamma;
};

// Uniform samples over n_periods * T with both endpoints included; the step is
// shrunk so that it divides the horizon. Throws StepTooCoarse if dt >= T/8.
std::vector<PathSample> sample_path(const LoopSpec& spec, double dt);

// Passage of the path through the exact-PT branch cut (cos 2theta = 0, Gamma < Omega).
struct CutCrossing {
    double time;
    // Whether the occupied state is the loss state right after the crossing.
    // Depends on the trajectory; see analysis::resolve_crossings.
    std::optional<bool> entering_loss;
};

// Crossings in [0, n_periods T), ascending. A start on the cut counts as a
// crossing at t = 0; touching the cut at a turning point does not.
std::vector<CutCrossing> cut_crossings(const LoopSpec& spec, double detuning);

}  // namespace chiral
