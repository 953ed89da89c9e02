// analysis.hpp - observables extracted from envelope trajectories: NAT events
// and delay times, final-state chirality, sheet trajectories and sweeps.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/model.hpp"
#include "chiral/schedule.hpp"

namespace chiral {

// Nonadiabatic transition: |c+| = |c-| with a change of dominance.
struct NatEvent {
    double time;
    double preceding_crossing;  // reference loss-entry time
    double delay;               // time - preceding_crossing, > 0
};

struct NatOptions {
    // A new dominant coefficient must keep dominance for this fraction of T.
    double hysteresis_fraction = 0.01;
    std::size_t min_samples_per_period = 1000;
};

// Fills entering_loss for every crossing: true when the dominant transported
// state is the loss state immediately after the crossing.
std::vector<CutCrossing> resolve_crossings(const Trajectory& traj,
                                           std::span<const CutCrossing> crossings);

// Each event's delay is measured from the latest preceding loss-entry
// crossing, or from t = 0 when the run starts in the loss state. Throws
// NoCrossingReference if neither reference exists.
std::vector<NatEvent> detect_nats(const Trajectory& traj, std::span<const CutCrossing> crossings,
                                  const NatOptions& opts = {});

// Uses cut_crossings(traj.spec, traj.detuning).
std::vector<NatEvent> detect_nats(const Trajectory& traj, const NatOptions& opts = {});

enum class Verdict { chiral, nonchiral, undetermined };

const char* to_string(Verdict v);

inline constexpr double kDefaultTieRatio = 10.0;

// State a loop of the given direction converts every input into.
constexpr Label target_label(Direction d) { return d == Direction::cw ? Label::minus : Label::plus; }

struct ChiralityReport {
    Direction direction = Direction::ccw;
    Label initial_label = Label::plus;
    // Defined only when final_overlap_ratio >= the tie ratio.
    std::optional<Label> final_label;
    // argmax_i |l_i(0)^T Psi(T)| regardless of the tie ratio.
    Label leading_label = Label::plus;
    std::vector<NatEvent> nat_events;
    std::string nat_error;  // set when NAT detection lacked a reference
    double final_overlap_ratio = 1.0;
    // chiral: the run ended in target_label(direction); nonchiral: it ended
    // elsewhere; undetermined: no decade of dominance.
    Verdict verdict = Verdict::undetermined;
};

ChiralityReport classify_final(const Trajectory& traj, const EigenFrame& initial_frame,
                               double tie_ratio = kDefaultTieRatio);

// Frame at t = 0 of the trajectory.
ChiralityReport classify_final(const Trajectory& traj, double tie_ratio = kDefaultTieRatio);

struct RiemannPoint {
    double t;
    cplx value;
};

// (|c-|^2 lambda- + |c+|^2 lambda+) / (|c-|^2 + |c+|^2) at every sample.
std::vector<RiemannPoint> riemann_trajectory(const Trajectory& traj);

enum class SweepAxis { a_theta, a_gamma, gamma_0, omega_c };

const char* to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& name);

// Copy of `spec` with the axis parameter replaced; omega_c keeps the sign of
// the template.
LoopSpec with_axis_value(const LoopSpec& spec, SweepAxis axis, double value);

struct SweepResult {
    SweepAxis axis = SweepAxis::a_theta;
    std::vector<double> axis_values;
    std::vector<std::vector<double>> delay_times;  // empty = no NAT
    std::vector<std::size_t> nat_counts;
    std::vector<bool> no_nat;
    std::vector<bool> chiral_flags;  // leading label == target_label(direction)
    std::vector<std::string> errors;  // empty = point succeeded

    std::size_t size() const { return axis_values.size(); }
};

struct SweepOptions {
    std::size_t steps_per_period = kDefaultStepsPerPeriod;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

// Point failures are recorded in `errors`, never thrown.
SweepResult sweep_delay(const SystemParams& params, const LoopSpec& spec_template, SweepAxis axis,
                        std::span<const double> values, Label init, Direction direction,
                        const SweepOptions& opts = {});

struct ChiralityMatrix {
    // reports[direction][initial label], index 0 = cw / plus.
    std::array<std::array<ChiralityReport, 2>, 2> reports;

    const ChiralityReport& at(Direction d, Label init) const {
        return reports[d == Direction::cw ? 0 : 1][init == Label::plus ? 0 : 1];
    }
    // Every run determinate and CW -> minus, CCW -> plus.
    bool chiral() const;
};

ChiralityMatrix chirality_matrix(const SystemParams& params, const LoopSpec& spec,
                                 std::size_t steps_per_period = kDefaultStepsPerPeriod,
                                 double tie_ratio = kDefaultTieRatio);

}  // namespace chiral
