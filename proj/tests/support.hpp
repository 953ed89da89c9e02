// Shared fixtures for the test binaries.

#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "chiral/model.hpp"
#include "chiral/schedule.hpp"

namespace fixtures {

inline constexpr double pi = std::numbers::pi;

// omega_0 = 2pi*10, Omega = 2pi*0.1.
inline chiral::SystemParams levitated() {
    return chiral::SystemParams::from_carrier(2.0 * pi * 10.0, 2.0 * pi * 0.1);
}

// EP-encircling loop, started on the exact-PT side of the cut.
inline chiral::LoopSpec encircling(double omega, chiral::Direction d,
                                   double omega_c_fraction = 1.0 / 8.0) {
    chiral::LoopSpec s;
    s.gamma_0 = omega;
    s.a_gamma = omega / 30.0;
    s.a_theta = pi / 30.0;
    s.omega_c = omega * omega_c_fraction;
    s.gamma_phase = pi;
    return s.with_direction(d);
}

// Straight path across the cut away from the EP.
inline chiral::LoopSpec straight(double omega, chiral::Direction d) {
    chiral::LoopSpec s;
    s.gamma_0 = 2.0 * omega / 3.0;
    s.a_gamma = 0.0;
    s.a_theta = pi / 6.0;
    s.omega_c = omega / 17.0;
    return s.with_direction(d);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("chiralloop_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Uniform parameter triples away from the EP neighbourhood, where the
// eigenvectors are ill-conditioned by construction.
struct TripleGenerator {
    std::mt19937_64 rng;
    explicit TripleGenerator(std::uint64_t seed) : rng(seed) {}

    struct Triple {
        double omega, gamma, theta;
    };

    Triple next() {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (;;) {
            const double omega = 0.1 + 9.9 * u(rng);
            const double gamma = 3.0 * omega * u(rng);
            const double theta = pi * u(rng);
            const double gap = std::abs(std::sqrt(chiral::eigenvalue_squared(omega, gamma, theta)));
            if (gap >= 1e-3 * omega) return {omega, gamma, theta};
        }
    }
};

}  // namespace fixtures
