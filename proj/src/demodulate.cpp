#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chiral/dynamics.hpp"
#include "chiral/errors.hpp"

namespace chiral {

namespace {

// Second-order Butterworth low-pass (bilinear transform, prewarped).
struct Biquad {
    double b0, b1, b2, a1, a2;

    static Biquad lowpass(double cutoff, double dt) {
        const double k = std::tan(0.5 * cutoff * dt);
        const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
        Biquad q{};
        q.b0 = k * k * norm;
        q.b1 = 2.0 * q.b0;
        q.b2 = q.b0;
        q.a1 = 2.0 * (k * k - 1.0) * norm;
        q.a2 = (1.0 - std::numbers::sqrt2 * k + k * k) * norm;
        return q;
    }

    // Transposed direct form II, state initialised to the steady state of the
    // first input so a constant signal passes through untouched.
    void run(std::vector<cplx>& signal) const {
        if (signal.empty()) return;
        cplx z2 = (b2 - a2) * signal.front();
        cplx z1 = (b1 - a1) * signal.front() + z2;
        for (cplx& v : signal) {
            const cplx x = v;
            const cplx y = b0 * x + z1;
            z1 = b1 * x - a1 * y + z2;
            z2 = b2 * x - a2 * y;
            v = y;
        }
    }
};

void filtfilt(const Biquad& q, std::vector<cplx>& signal) {
    q.run(signal);
    std::reverse(signal.begin(), signal.end());
    q.run(signal);
    std::reverse(signal.begin(), signal.end());
}

}  // namespace

std::vector<EnvelopeSample> demodulate(std::span<const MechSample> samples, double omega_0,
                                       double cutoff) {
    if (samples.size() < 2) throw PreconditionViolated("demodulate needs at least two samples");
    if (!(omega_0 > 0.0)) throw PreconditionViolated("omega_0 > 0 violated");

    const double dt = samples[1].t - samples[0].t;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const double step = samples[k].t - samples[k - 1].t;
        if (!(step > 0.0) || std::abs(step - dt) > 1e-6 * dt) {
            throw PreconditionViolated("demodulate needs uniformly spaced samples");
        }
    }
    // rate > 4 w0 / 2pi  <=>  dt * w0 < pi / 2
    if (dt * omega_0 >= 0.5 * std::numbers::pi) {
        throw UndersampledCarrier("sampling rate " + std::to_string(1.0 / dt) +
                                  " Hz does not exceed 4 x carrier frequency");
    }
    if (!(cutoff > 0.0) || cutoff * dt >= std::numbers::pi) {
        throw PreconditionViolated("low-pass cutoff must lie in (0, Nyquist)");
    }

    std::vector<cplx> ax(samples.size());
    std::vector<cplx> ay(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        const cplx carrier = std::polar(0.5, -omega_0 * s.t);
        ax[k] = cplx{s.state.x, -s.state.vx / omega_0} * carrier;
        ay[k] = cplx{s.state.y, -s.state.vy / omega_0} * carrier;
    }
    const Biquad q = Biquad::lowpass(cutoff, dt);
    filtfilt(q, ax);
    filtfilt(q, ay);

    std::vector<EnvelopeSample> out(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        out[k] = {samples[k].t, {ax[k], ay[k]}};
    }
    return out;
}

}  // namespace chiral
