#include "chiral/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "chiral/errors.hpp"

namespace chiral {

namespace {

constexpr double pi = std::numbers::pi;

// Fraction of the current period elapsed at time t, in [0, 1). Times that are
// a whole number of periods up to rounding map to exactly 0 so that closed
// loops close exactly.
double period_fraction(const LoopSpec& spec, double t) {
    double u = t * std::abs(spec.omega_c) / (2.0 * pi);
    const double nearest = std::round(u);
    if (std::abs(u - nearest) <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, u)) {
        u = nearest;
    }
    return u - std::floor(u);
}

// Unit triangle wave: 0 -> 1 -> 0 -> -1 -> 0 over one period.
double triangle(double s) {
    if (s < 0.25) return 4.0 * s;
    if (s < 0.75) return 2.0 - 4.0 * s;
    return 4.0 * s - 4.0;
}

double sign(double v) { return v > 0.0 ? 1.0 : -1.0; }

}  // namespace

const char* to_string(Direction d) { return d == Direction::cw ? "cw" : "ccw"; }

double LoopSpec::period() const { return 2.0 * pi / std::abs(omega_c); }

LoopSpec LoopSpec::with_direction(Direction d) const {
    LoopSpec copy = *this;
    copy.omega_c = (d == Direction::ccw ? 1.0 : -1.0) * std::abs(omega_c);
    return copy;
}

void LoopSpec::validate() const {
    for (double v : {gamma_0, a_gamma, a_theta, omega_c, theta_center, gamma_phase}) {
        if (!std::isfinite(v)) throw ValidationError("loop parameters must be finite");
    }
    if (!(a_gamma >= 0.0)) throw ValidationError("a_gamma >= 0 violated");
    if (!(a_theta >= 0.0 && a_theta <= pi / 2.0)) {
        throw ValidationError("0 <= a_theta <= pi/2 violated (a_theta = " +
                              std::to_string(a_theta) + ")");
    }
    if (!(gamma_0 - a_gamma >= 0.0)) throw ValidationError("gamma_0 - a_gamma >= 0 violated");
    if (omega_c == 0.0) throw ValidationError("omega_c != 0 violated");
    if (n_periods < 1) throw ValidationError("n_periods >= 1 violated");
}

double theta_at(const LoopSpec& spec, double t) {
    return spec.theta_center +
           spec.a_theta * sign(spec.omega_c) * triangle(period_fraction(spec, t));
}

double gamma_at(const LoopSpec& spec, double t) {
    if (spec.a_gamma == 0.0) return spec.gamma_0;
    // sin(w_c t + pi/2 + phase) == cos(w_c t + phase), evaluated on the reduced phase.
    const double phase = sign(spec.omega_c) * 2.0 * pi * period_fraction(spec, t);
    return spec.gamma_0 + spec.a_gamma * std::cos(phase + spec.gamma_phase);
}

std::vector<PathSample> sample_path(const LoopSpec& spec, double dt) {
    spec.validate();
    if (!(dt > 0.0)) throw PreconditionViolated("dt > 0 violated");
    const double period = spec.period();
    if (dt >= period / 8.0) {
        throw StepTooCoarse("dt must be below T/8 = " + std::to_string(period / 8.0));
    }
    const double horizon = spec.duration();
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    std::vector<PathSample> path;
    path.reserve(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = horizon * static_cast<double>(k) / static_cast<double>(steps);
        path.push_back({t, theta_at(spec, t), gamma_at(spec, t)});
    }
    return path;
}

std::vector<CutCrossing> cut_crossings(const LoopSpec& spec, double detuning) {
    spec.validate();
    if (!(detuning > 0.0)) throw PreconditionViolated("Omega > 0 violated");

    // Quarter-period segments on which theta is linear, as triangle endpoints.
    constexpr std::array<std::pair<double, double>, 4> segments{
        {{0.0, 1.0}, {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}}};

    const double period = spec.period();
    const double amplitude = spec.a_theta * sign(spec.omega_c);
    std::vector<CutCrossing> crossings;

    for (int k = 0; k < spec.n_periods; ++k) {
        for (std::size_t j = 0; j < segments.size(); ++j) {
            const double start = spec.theta_center + amplitude * segments[j].first;
            const double end = spec.theta_center + amplitude * segments[j].second;
            if (start == end) continue;
            const bool starts_at_turn = segments[j].first != 0.0;
            const double lo = std::min(start, end);
            const double hi = std::max(start, end);
            const auto m_lo = static_cast<long>(std::ceil((lo - pi / 4.0) / (pi / 2.0)));
            const auto m_hi = static_cast<long>(std::floor((hi - pi / 4.0) / (pi / 2.0)));
            for (long m = m_lo; m <= m_hi; ++m) {
                const double target = pi / 4.0 + static_cast<double>(m) * (pi / 2.0);
                const double f = (target - start) / (end - start);
                if (f < 0.0 || f >= 1.0) continue;
                if (f == 0.0 && starts_at_turn) continue;
                const double t = (k + (static_cast<double>(j) + f) / 4.0) * period;
                if (gamma_at(spec, t) < detuning) crossings.push_back({t, std::nullopt});
            }
        }
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const CutCrossing& a, const CutCrossing& b) { return a.time < b.time; });
    return crossings;
}

}  // namespace chiral
