// dynamics.hpp - envelope and full mechanical integration along a parameter loop.
//
// Two routes to the same physics:
//   * the envelope route integrates i dPsi/dt = H(theta(t), Gamma(t)) Psi for
//     Psi = (A_x, A_y) and records transported eigenframes and coefficients;
//   * the full route integrates the second-order equations
//       x'' + Gx x' + wx^2(t) x + eta(t) y = 0
//       y'' - Gy y' + wy^2(t) y + eta(t) x = 0
//     and is brought back to envelope form by quadrature demodulation.
// Both use fixed-step classical RK4.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "chiral/model.hpp"
#include "chiral/schedule.hpp"

namespace chiral {

// Complex envelopes of the x and y displacement (x = A_x e^{i w0 t} + c.c.).
struct EnvelopeState {
    cplx a_x;
    cplx a_y;

    Eigen::Vector2cd vector() const { return {a_x, a_y}; }
    static EnvelopeState from(const Eigen::Vector2cd& v) { return {v(0), v(1)}; }
};

// Expansion Psi = c+ r+ + c- r- in the transported eigenbasis.
struct Coefficients {
    cplx plus;
    cplx minus;

    cplx operator[](Label l) const { return l == Label::plus ? plus : minus; }
    Label dominant() const { return std::abs(plus) >= std::abs(minus) ? Label::plus : Label::minus; }
};

struct MechState {
    double x;
    double y;
    double vx;
    double vy;
};

enum class Method { rk4_fixed };

inline constexpr std::size_t kDefaultStepsPerPeriod = 20000;
inline constexpr double kRescaleThreshold = 1e100;

struct IntegratorOptions {
    double dt = 0.0;
    Method method = Method::rk4_fixed;
    std::size_t record_stride = 1;

    // dt = T / steps_per_period for the given loop.
    static IntegratorOptions for_loop(const LoopSpec& spec,
                                      std::size_t steps_per_period = kDefaultStepsPerPeriod);

    bool operator==(const IntegratorOptions&) const = default;
};

struct TrajectorySample {
    double t;
    double theta;
    double gamma;
    // Stored state; the physical envelope is state * exp(log_scale).
    EnvelopeState state;
    double log_scale;
    Coefficients coeffs;
    EigenFrame frame;
};

struct Trajectory {
    LoopSpec spec;
    double detuning = 0.0;
    std::vector<TrajectorySample> samples;

    std::size_t size() const { return samples.size(); }
    const TrajectorySample& front() const { return samples.front(); }
    const TrajectorySample& back() const { return samples.back(); }
};

EnvelopeState initial_state(const EigenFrame& frame, Label which);

// c_i = l_i^T Psi (unconjugated transpose).
Coefficients project_coefficients(const EnvelopeState& state, const EigenFrame& frame);

using HamiltonianFn = std::function<Eigen::Matrix2cd(double)>;

// One classical RK4 step of dPsi/dt = -i H(t) Psi.
Eigen::Vector2cd rk4_step(const HamiltonianFn& hamiltonian, double t, double dt,
                          const Eigen::Vector2cd& psi);

// `steps` uniform RK4 steps from t0 to t1 under an arbitrary H(t).
EnvelopeState propagate(const HamiltonianFn& hamiltonian, const EnvelopeState& init,
                        double t0, double t1, std::size_t steps);

// Throws PreconditionViolated (dt guard), BranchTrackingFailed, NonFinite.
Trajectory integrate_envelope(const SystemParams& params, const LoopSpec& spec,
                              const EnvelopeState& init, const IntegratorOptions& opts);

// Starts from the eigenstate `which` of the cold-start frame at t = 0.
Trajectory integrate_envelope(const SystemParams& params, const LoopSpec& spec, Label which,
                              const IntegratorOptions& opts);

struct MechSample {
    double t;
    MechState state;
};

struct FullOptions {
    double dt = 0.0;
    std::size_t record_stride = 1;

    // dt = 2 pi / (50 omega_0).
    static FullOptions for_carrier(double omega_0);
};

// Mechanical state whose quadrature demodulation at t = 0 is exactly `envelope`.
MechState mech_state_from_envelope(const EnvelopeState& envelope, double omega_0);

// Requires dt * omega_0 < 0.2. Throws NonFinite on overflow.
std::vector<MechSample> integrate_full(const SystemParams& params, const LoopSpec& spec,
                                       const MechState& init, const FullOptions& opts);

struct EnvelopeSample {
    double t;
    EnvelopeState state;
};

// A = (x - i x'/w0) / 2 * exp(-i w0 t), then a forward-backward second-order
// Butterworth low-pass at `cutoff` (rad/s). Samples must be uniform with
// rate above 4 w0 / 2pi; throws UndersampledCarrier otherwise.
std::vector<EnvelopeSample> demodulate(std::span<const MechSample> samples, double omega_0,
                                       double cutoff);

struct VerificationReport {
    double rms_error = 0.0;
    double max_error = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

// Runs both routes from consistent initial conditions and compares the
// normalised coefficient magnitudes (|c+|, |c-|) / norm at every envelope
// sample. The full step is the largest divisor of the envelope step not
// above max_full_dt (0 = FullOptions::for_carrier). Throws RegimeViolation
// outside the weak-coupling regime.
VerificationReport verify_envelope_reduction(const SystemParams& params, const LoopSpec& spec,
                                             Label init, double tol,
                                             std::size_t steps_per_period = kDefaultStepsPerPeriod,
                                             double max_full_dt = 0.0);

}  // namespace chiral
