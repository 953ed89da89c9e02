#include "chiral/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "chiral/errors.hpp"

namespace chiral {

namespace {

int dominance_sign(const Coefficients& c) {
    const double d = std::abs(c.plus) - std::abs(c.minus);
    return (d > 0.0) - (d < 0.0);
}

double dominance_gap(const Coefficients& c) { return std::abs(c.plus) - std::abs(c.minus); }

// First sample strictly after t, or size() if none.
std::size_t first_after(const Trajectory& traj, double t) {
    const auto it = std::upper_bound(
        traj.samples.begin(), traj.samples.end(), t,
        [](double value, const TrajectorySample& s) { return value < s.t; });
    return static_cast<std::size_t>(it - traj.samples.begin());
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::chiral: return "chiral";
        case Verdict::nonchiral: return "nonchiral";
        case Verdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::a_theta: return "a_theta";
        case SweepAxis::a_gamma: return "a_gamma";
        case SweepAxis::gamma_0: return "gamma_0";
        case SweepAxis::omega_c: return "omega_c";
    }
    return "a_theta";
}

SweepAxis parse_sweep_axis(const std::string& name) {
    for (auto axis : {SweepAxis::a_theta, SweepAxis::a_gamma, SweepAxis::gamma_0, SweepAxis::omega_c}) {
        if (name == to_string(axis)) return axis;
    }
    throw ValidationError("unknown sweep axis '" + name +
                          "' (expected a_theta, a_gamma, gamma_0 or omega_c)");
}

std::vector<CutCrossing> resolve_crossings(const Trajectory& traj,
                                           std::span<const CutCrossing> crossings) {
    std::vector<CutCrossing> out(crossings.begin(), crossings.end());
    for (auto& crossing : out) {
        const std::size_t i = first_after(traj, crossing.time);
        if (i >= traj.size()) {
            crossing.entering_loss = false;
            continue;
        }
        const auto& s = traj.samples[i];
        crossing.entering_loss = s.coeffs.dominant() != s.frame.gain_label();
    }
    return out;
}

std::vector<NatEvent> detect_nats(const Trajectory& traj, std::span<const CutCrossing> crossings,
                                  const NatOptions& opts) {
    if (traj.size() < 2) throw PreconditionViolated("trajectory needs at least two samples");
    const double periods = static_cast<double>(traj.spec.n_periods);
    if (static_cast<double>(traj.size() - 1) < static_cast<double>(opts.min_samples_per_period) * periods) {
        throw PreconditionViolated("NAT detection needs >= " +
                                   std::to_string(opts.min_samples_per_period) +
                                   " samples per period");
    }

    const auto resolved = resolve_crossings(traj, crossings);
    const double window = opts.hysteresis_fraction * traj.spec.period();
    const auto& samples = traj.samples;

    int current = 0;
    for (const auto& s : samples) {
        current = dominance_sign(s.coeffs);
        if (current != 0) break;
    }

    std::vector<double> times;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const int s = dominance_sign(samples[k].coeffs);
        if (s == 0 || s == current) continue;
        bool persists = true;
        for (std::size_t j = k + 1; j < samples.size() && samples[j].t <= samples[k].t + window; ++j) {
            if (dominance_sign(samples[j].coeffs) == current) {
                persists = false;
                break;
            }
        }
        if (!persists) continue;
        const double d0 = dominance_gap(samples[k - 1].coeffs);
        const double d1 = dominance_gap(samples[k].coeffs);
        const double t0 = samples[k - 1].t;
        const double t1 = samples[k].t;
        times.push_back(d0 == d1 ? t1 : t0 + (t1 - t0) * d0 / (d0 - d1));
        current = s;
    }

    // Fallback reference: the run starts in the loss state.
    const std::size_t after_start = first_after(traj, samples.front().t);
    const bool starts_lossy =
        after_start < samples.size() &&
        samples.front().coeffs.dominant() != samples[after_start].frame.gain_label();

    std::vector<NatEvent> events;
    events.reserve(times.size());
    for (double t : times) {
        std::optional<double> reference;
        for (const auto& c : resolved) {
            if (c.time < t && c.entering_loss.value_or(false)) reference = c.time;
        }
        if (!reference && starts_lossy && t > samples.front().t) reference = samples.front().t;
        if (!reference) throw NoCrossingReference(t);
        events.push_back({t, *reference, t - *reference});
    }
    return events;
}

std::vector<NatEvent> detect_nats(const Trajectory& traj, const NatOptions& opts) {
    const auto crossings = cut_crossings(traj.spec, traj.detuning);
    return detect_nats(traj, crossings, opts);
}

ChiralityReport classify_final(const Trajectory& traj, const EigenFrame& initial_frame,
                               double tie_ratio) {
    if (!(tie_ratio > 1.0)) throw ValidationError("tie_ratio > 1 violated");
    if (traj.size() < 2) throw PreconditionViolated("trajectory needs at least two samples");

    ChiralityReport report;
    report.direction = traj.spec.direction();
    report.initial_label = traj.front().coeffs.dominant();

    const Coefficients final = project_coefficients(traj.back().state, initial_frame);
    const double p = std::abs(final.plus);
    const double m = std::abs(final.minus);
    report.leading_label = p >= m ? Label::plus : Label::minus;
    const double lo = std::min(p, m);
    report.final_overlap_ratio =
        lo > 0.0 ? std::max(p, m) / lo : std::numeric_limits<double>::infinity();

    try {
        report.nat_events = detect_nats(traj);
    } catch (const NoCrossingReference& e) {
        report.nat_error = e.what();
    } catch (const PreconditionViolated& e) {
        report.nat_error = e.what();
    }

    if (report.final_overlap_ratio >= tie_ratio) {
        report.final_label = report.leading_label;
        report.verdict = *report.final_label == target_label(report.direction) ? Verdict::chiral
                                                                               : Verdict::nonchiral;
    }
    return report;
}

ChiralityReport classify_final(const Trajectory& traj, double tie_ratio) {
    return classify_final(traj, traj.front().frame, tie_ratio);
}

std::vector<RiemannPoint> riemann_trajectory(const Trajectory& traj) {
    std::vector<RiemannPoint> out;
    out.reserve(traj.size());
    for (const auto& s : traj.samples) {
        const double ap = std::abs(s.coeffs.plus);
        const double am = std::abs(s.coeffs.minus);
        if (ap < 1e-300 && am < 1e-300) {
            throw ZeroState("both coefficients vanish at t=" + std::to_string(s.t));
        }
        // Normalise before squaring so tiny magnitudes do not underflow.
        const double scale = std::max(ap, am);
        const double wp = (ap / scale) * (ap / scale);
        const double wm = (am / scale) * (am / scale);
        out.push_back({s.t, (wm * s.frame.lambda_minus + wp * s.frame.lambda_plus) / (wp + wm)});
    }
    return out;
}

LoopSpec with_axis_value(const LoopSpec& spec, SweepAxis axis, double value) {
    LoopSpec out = spec;
    switch (axis) {
        case SweepAxis::a_theta: out.a_theta = value; break;
        case SweepAxis::a_gamma: out.a_gamma = value; break;
        case SweepAxis::gamma_0: out.gamma_0 = value; break;
        case SweepAxis::omega_c:
            out.omega_c = (spec.omega_c < 0.0 ? -1.0 : 1.0) * std::abs(value);
            break;
    }
    return out;
}

SweepResult sweep_delay(const SystemParams& params, const LoopSpec& spec_template, SweepAxis axis,
                        std::span<const double> values, Label init, Direction direction,
                        const SweepOptions& opts) {
    if (values.empty()) throw ValidationError("sweep needs at least one axis value");

    const std::size_t n = values.size();
    SweepResult result;
    result.axis = axis;
    result.axis_values.assign(values.begin(), values.end());
    result.delay_times.resize(n);
    result.nat_counts.assign(n, 0);
    result.no_nat.assign(n, false);
    result.chiral_flags.assign(n, false);
    result.errors.resize(n);

    // Each point writes only its own slots, so the output order is the axis order.
    auto run_point = [&](std::size_t i) {
        try {
            const LoopSpec spec =
                with_axis_value(spec_template, axis, values[i]).with_direction(direction);
            spec.validate();
            const Trajectory traj = integrate_envelope(
                params, spec, init, IntegratorOptions::for_loop(spec, opts.steps_per_period));
            const ChiralityReport report = classify_final(traj);
            if (!report.nat_error.empty()) {
                result.errors[i] = report.nat_error;
                return;
            }
            for (const auto& e : report.nat_events) result.delay_times[i].push_back(e.delay);
            result.nat_counts[i] = report.nat_events.size();
            result.no_nat[i] = report.nat_events.empty();
            result.chiral_flags[i] = report.leading_label == target_label(direction);
        } catch (const Error& e) {
            result.errors[i] = e.what();
        }
    };

    std::size_t workers = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) run_point(i);
        return result;
    }
    std::vector<std::future<void>> jobs;
    jobs.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) run_point(i);
        }));
    }
    for (auto& job : jobs) job.get();
    return result;
}

bool ChiralityMatrix::chiral() const {
    for (const auto& row : reports) {
        for (const auto& r : row) {
            if (!r.final_label || *r.final_label != target_label(r.direction)) return false;
        }
    }
    return true;
}

ChiralityMatrix chirality_matrix(const SystemParams& params, const LoopSpec& spec,
                                 std::size_t steps_per_period, double tie_ratio) {
    spec.validate();
    ChiralityMatrix matrix;
    for (auto direction : {Direction::cw, Direction::ccw}) {
        const LoopSpec oriented = spec.with_direction(direction);
        const auto opts = IntegratorOptions::for_loop(oriented, steps_per_period);
        for (auto init : {Label::plus, Label::minus}) {
            const Trajectory traj = integrate_envelope(params, oriented, init, opts);
            matrix.reports[direction == Direction::cw ? 0 : 1][init == Label::plus ? 0 : 1] =
                classify_final(traj, tie_ratio);
        }
    }
    return matrix;
}

}  // namespace chiral
