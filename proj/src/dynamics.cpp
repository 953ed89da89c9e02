#include "chiral/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chiral/errors.hpp"

namespace chiral {

namespace {

constexpr cplx I{0.0, 1.0};

template <class Hamiltonian>
Eigen::Vector2cd rk4(const Hamiltonian& h, double t, double dt, const Eigen::Vector2cd& psi) {
    const Eigen::Matrix2cd h0 = h(t);
    const Eigen::Matrix2cd h_mid = h(t + 0.5 * dt);
    const Eigen::Matrix2cd h1 = h(t + dt);
    const Eigen::Vector2cd k1 = -I * (h0 * psi);
    const Eigen::Vector2cd k2 = -I * (h_mid * (psi + 0.5 * dt * k1));
    const Eigen::Vector2cd k3 = -I * (h_mid * (psi + 0.5 * dt * k2));
    const Eigen::Vector2cd k4 = -I * (h1 * (psi + dt * k3));
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool finite(const Eigen::Vector2cd& v) {
    return std::isfinite(v(0).real()) && std::isfinite(v(0).imag()) &&
           std::isfinite(v(1).real()) && std::isfinite(v(1).imag());
}

std::size_t step_count(double horizon, double dt) {
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

}  // namespace

IntegratorOptions IntegratorOptions::for_loop(const LoopSpec& spec, std::size_t steps_per_period) {
    IntegratorOptions opts;
    opts.dt = spec.period() / static_cast<double>(steps_per_period);
    return opts;
}

FullOptions FullOptions::for_carrier(double omega_0) {
    FullOptions opts;
    opts.dt = 2.0 * std::numbers::pi / (omega_0 * 50.0);
    return opts;
}

EnvelopeState initial_state(const EigenFrame& frame, Label which) {
    return EnvelopeState::from(frame.right(which));
}

Coefficients project_coefficients(const EnvelopeState& state, const EigenFrame& frame) {
    const Eigen::Vector2cd psi = state.vector();
    return {frame.l_plus.transpose() * psi, frame.l_minus.transpose() * psi};
}

Eigen::Vector2cd rk4_step(const HamiltonianFn& hamiltonian, double t, double dt,
                          const Eigen::Vector2cd& psi) {
    return rk4(hamiltonian, t, dt, psi);
}

EnvelopeState propagate(const HamiltonianFn& hamiltonian, const EnvelopeState& init, double t0,
                        double t1, std::size_t steps) {
    if (steps == 0) throw PreconditionViolated("propagate needs at least one step");
    Eigen::Vector2cd psi = init.vector();
    const double dt = (t1 - t0) / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        psi = rk4(hamiltonian, t0 + static_cast<double>(k) * dt, dt, psi);
        if (!finite(psi)) throw NonFinite("envelope became non-finite");
    }
    return EnvelopeState::from(psi);
}

Trajectory integrate_envelope(const SystemParams& params, const LoopSpec& spec,
                              const EnvelopeState& init, const IntegratorOptions& opts) {
    params.validate();
    spec.validate();
    if (!(opts.dt > 0.0)) throw PreconditionViolated("dt > 0 violated");
    if (opts.record_stride == 0) throw PreconditionViolated("record_stride > 0 violated");

    const double detuning = params.detuning();
    const double max_rate = 0.5 * std::hypot(detuning, spec.gamma_0 + spec.a_gamma);
    if (opts.dt * max_rate >= 0.1) {
        throw PreconditionViolated("dt * max|lambda| < 0.1 violated (dt = " +
                                   std::to_string(opts.dt) + ")");
    }

    const double horizon = spec.duration();
    const std::size_t steps = step_count(horizon, opts.dt);
    auto time_at = [&](std::size_t k) {
        return horizon * static_cast<double>(k) / static_cast<double>(steps);
    };
    auto hamiltonian = [&](double t) {
        return build_hamiltonian(detuning, gamma_at(spec, t), theta_at(spec, t));
    };

    Trajectory traj;
    traj.spec = spec;
    traj.detuning = detuning;
    traj.samples.reserve(steps / opts.record_stride + 2);

    Eigen::Vector2cd psi = init.vector();
    double log_scale = 0.0;
    EigenFrame frame = eigenframe(detuning, gamma_at(spec, 0.0), theta_at(spec, 0.0));

    auto record = [&](std::size_t k) {
        const double t = time_at(k);
        const EnvelopeState state = EnvelopeState::from(psi);
        traj.samples.push_back({t, theta_at(spec, t), gamma_at(spec, t), state,
                                log_scale + 0.25 * params.rate_imbalance * t,
                                project_coefficients(state, frame), frame});
    };
    record(0);

    for (std::size_t k = 1; k <= steps; ++k) {
        const double t0 = time_at(k - 1);
        const double t1 = time_at(k);
        psi = rk4(hamiltonian, t0, t1 - t0, psi);
        if (!finite(psi)) {
            throw NonFinite("envelope became non-finite at t=" + std::to_string(t1));
        }
        const double peak = std::max(std::abs(psi(0)), std::abs(psi(1)));
        if (peak > kRescaleThreshold) {
            psi /= peak;
            log_scale += std::log(peak);
        }
        try {
            frame = eigenframe(detuning, gamma_at(spec, t1), theta_at(spec, t1), frame);
        } catch (const AmbiguousBranch& e) {
            throw BranchTrackingFailed("branch tracking failed at t=" + std::to_string(t1) +
                                       " (halve dt): " + e.what());
        }
        if (k % opts.record_stride == 0 || k == steps) record(k);
    }
    return traj;
}

Trajectory integrate_envelope(const SystemParams& params, const LoopSpec& spec, Label which,
                              const IntegratorOptions& opts) {
    const EigenFrame start =
        eigenframe(params.detuning(), gamma_at(spec, 0.0), theta_at(spec, 0.0));
    return integrate_envelope(params, spec, initial_state(start, which), opts);
}

MechState mech_state_from_envelope(const EnvelopeState& envelope, double omega_0) {
    return {2.0 * envelope.a_x.real(), 2.0 * envelope.a_y.real(),
            -2.0 * omega_0 * envelope.a_x.imag(), -2.0 * omega_0 * envelope.a_y.imag()};
}

std::vector<MechSample> integrate_full(const SystemParams& params, const LoopSpec& spec,
                                       const MechState& init, const FullOptions& opts) {
    params.validate();
    spec.validate();
    if (!(opts.dt > 0.0)) throw PreconditionViolated("dt > 0 violated");
    if (opts.record_stride == 0) throw PreconditionViolated("record_stride > 0 violated");
    if (opts.dt * params.omega_0() >= 0.2) {
        throw PreconditionViolated("dt * omega_0 < 0.2 violated (carrier unresolved)");
    }

    using State = Eigen::Vector4d;  // x, y, vx, vy
    auto derivative = [&](double t, const State& s) {
        const double gamma = gamma_at(spec, t);
        const double gamma_x = gamma - 0.5 * params.rate_imbalance;
        const double gamma_y = gamma + 0.5 * params.rate_imbalance;
        const EffectiveFrequencies f = effective_frequencies(params, theta_at(spec, t));
        State d;
        d << s(2), s(3),
            -gamma_x * s(2) - f.omega_x * f.omega_x * s(0) - f.eta * s(1),
            gamma_y * s(3) - f.omega_y * f.omega_y * s(1) - f.eta * s(0);
        return d;
    };

    const double horizon = spec.duration();
    const std::size_t steps = step_count(horizon, opts.dt);
    auto time_at = [&](std::size_t k) {
        return horizon * static_cast<double>(k) / static_cast<double>(steps);
    };

    State s;
    s << init.x, init.y, init.vx, init.vy;
    std::vector<MechSample> out;
    out.reserve(steps / opts.record_stride + 2);
    out.push_back({0.0, init});

    for (std::size_t k = 1; k <= steps; ++k) {
        const double t0 = time_at(k - 1);
        const double dt = time_at(k) - t0;
        const State k1 = derivative(t0, s);
        const State k2 = derivative(t0 + 0.5 * dt, s + 0.5 * dt * k1);
        const State k3 = derivative(t0 + 0.5 * dt, s + 0.5 * dt * k2);
        const State k4 = derivative(t0 + dt, s + dt * k3);
        s += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!s.allFinite()) {
            throw NonFinite("mechanical state became non-finite at t=" + std::to_string(time_at(k)));
        }
        if (k % opts.record_stride == 0 || k == steps) {
            out.push_back({time_at(k), {s(0), s(1), s(2), s(3)}});
        }
    }
    return out;
}

VerificationReport verify_envelope_reduction(const SystemParams& params, const LoopSpec& spec,
                                             Label init, double tol,
                                             std::size_t steps_per_period, double max_full_dt) {
    params.validate();
    spec.validate();
    if (!params.weak_coupling()) {
        throw RegimeViolation("Omega/omega_0 = " +
                              std::to_string(params.detuning() / params.omega_0()) +
                              " is not below the weak-coupling limit " +
                              std::to_string(params.weak_coupling_limit));
    }
    if (!(tol > 0.0)) throw ValidationError("tol > 0 violated");

    const double omega_0 = params.omega_0();
    const double detuning = params.detuning();
    const std::size_t env_steps = steps_per_period * static_cast<std::size_t>(spec.n_periods);

    IntegratorOptions env_opts;
    env_opts.dt = spec.duration() / static_cast<double>(env_steps);
    const Trajectory envelope = integrate_envelope(params, spec, init, env_opts);

    // Full steps are an integer subdivision of envelope steps so samples align.
    const double full_cap = max_full_dt > 0.0 ? max_full_dt : FullOptions::for_carrier(omega_0).dt;
    const auto substeps = static_cast<std::size_t>(std::ceil(env_opts.dt / full_cap));
    FullOptions full_opts;
    full_opts.dt = env_opts.dt / static_cast<double>(substeps);
    const auto full = integrate_full(
        params, spec, mech_state_from_envelope(envelope.front().state, omega_0), full_opts);
    const auto demodulated = demodulate(full, omega_0, std::sqrt(detuning * omega_0));

    auto normalised = [](const Coefficients& c) {
        const double p = std::abs(c.plus);
        const double m = std::abs(c.minus);
        const double n = std::hypot(p, m);
        return std::pair{p / n, m / n};
    };

    VerificationReport report;
    report.tolerance = tol;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < envelope.size(); ++k) {
        const auto& sample = envelope.samples[k];
        const auto [ep, em] = normalised(sample.coeffs);
        const auto [fp, fm] = normalised(
            project_coefficients(demodulated[k * substeps].state, sample.frame));
        const double err = std::hypot(ep - fp, em - fm);
        sum_sq += err * err;
        report.max_error = std::max(report.max_error, err);
    }
    report.samples = envelope.size();
    report.rms_error = std::sqrt(sum_sq / static_cast<double>(report.samples));
    report.pass = report.rms_error < tol;
    return report;
}

}  // namespace chiral
