#include "chiral/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "chiral/errors.hpp"

namespace chiral {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// theta carries a rounding error of order eps*|theta|; trig values of 2theta
// smaller than that cannot be told apart from zero.
double snap(double value, double theta) {
    const double resolution = 4.0 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(theta));
    return std::abs(value) < resolution ? 0.0 : value;
}

double sin_2theta(double theta) { return snap(std::sin(2.0 * theta), theta); }

EigenFrame make_frame(cplx rho, cplx alpha_principal, int branch) {
    EigenFrame f;
    f.branch_id = branch;
    f.alpha = alpha_principal + static_cast<double>(branch) * pi;
    f.lambda_plus = (branch % 2 == 0) ? rho : -rho;
    f.lambda_minus = -f.lambda_plus;
    const cplx s = std::sin(0.5 * f.alpha);
    const cplx c = std::cos(0.5 * f.alpha);
    f.r_plus << -s, c;
    f.r_minus << c, s;
    f.l_plus = f.r_plus;
    f.l_minus = f.r_minus;
    return f;
}

struct PrincipalBranch {
    cplx rho;    // principal square root of lambda^2
    cplx alpha;  // -i log((x + i y) / rho)
};

PrincipalBranch principal_branch(double detuning, double gamma, double theta) {
    const double c = cos_2theta(theta);
    const double s = sin_2theta(theta);
    const cplx x{0.5 * detuning * c, 0.5 * gamma};
    const cplx y{0.5 * detuning * s, 0.0};
    const cplx rho = std::sqrt(eigenvalue_squared(detuning, gamma, theta));
    const double scale = 0.5 * std::hypot(detuning, gamma);
    if (std::abs(rho) <= 1e-14 * scale || scale == 0.0) {
        throw SingularFrame("eigenbasis is defective at Omega=" + std::to_string(detuning) +
                            ", Gamma=" + std::to_string(gamma) +
                            ", theta=" + std::to_string(theta));
    }
    return {rho, -I * std::log((x + I * y) / rho)};
}

}  // namespace

const char* to_string(Label l) { return l == Label::plus ? "plus" : "minus"; }

const char* to_string(PhaseClass p) {
    switch (p) {
        case PhaseClass::exact_pt: return "exact_pt";
        case PhaseClass::broken_pt: return "broken_pt";
        case PhaseClass::exceptional_point: return "exceptional_point";
        case PhaseClass::generic: return "generic";
    }
    return "generic";
}

void SystemParams::validate() const {
    if (!(omega_x0 > 0.0)) throw ValidationError("omega_x0 > 0 violated");
    if (!(omega_y0 > 0.0)) throw ValidationError("omega_y0 > 0 violated");
    if (!(detuning() >= 0.0)) throw ValidationError("Omega = omega_x0 - omega_y0 >= 0 violated");
    if (!(gamma >= 0.0)) throw ValidationError("gamma >= 0 violated");
    if (!std::isfinite(rate_imbalance)) throw ValidationError("rate_imbalance must be finite");
    if (!(weak_coupling_limit > 0.0)) throw ValidationError("weak_coupling_limit > 0 violated");
}

SystemParams SystemParams::from_carrier(double omega_0, double detuning, double gamma) {
    SystemParams p;
    p.omega_x0 = omega_0 + 0.5 * detuning;
    p.omega_y0 = omega_0 - 0.5 * detuning;
    p.gamma = gamma;
    return p;
}

double cos_2theta(double theta) { return snap(std::cos(2.0 * theta), theta); }

EffectiveFrequencies effective_frequencies(const SystemParams& params, double theta) {
    const double wx2 = params.omega_x0 * params.omega_x0;
    const double wy2 = params.omega_y0 * params.omega_y0;
    const double mean = 0.5 * (wx2 + wy2);
    const double half_diff = 0.5 * (wx2 - wy2);
    const double c = cos_2theta(theta);
    return {std::sqrt(mean + c * half_diff), std::sqrt(mean - c * half_diff),
            half_diff * sin_2theta(theta)};
}

Eigen::Matrix2cd build_hamiltonian(double detuning, double gamma, double theta) {
    const double c = cos_2theta(theta);
    const double s = sin_2theta(theta);
    const cplx diag{0.5 * detuning * c, 0.5 * gamma};  // i G/2 + (W/2) cos 2theta
    const cplx off{-0.5 * detuning * s, 0.0};
    Eigen::Matrix2cd h;
    h << -diag, off, off, diag;
    return h;
}

cplx eigenvalue_squared(double detuning, double gamma, double theta) {
    const double c = cos_2theta(theta);
    return 0.25 * cplx{detuning * detuning - gamma * gamma, 2.0 * detuning * gamma * c};
}

EigenPair eigenvalues(double detuning, double gamma, double theta) {
    // The principal root has Re >= 0, so on a real spectrum it wins the tie.
    const cplx rho = std::sqrt(eigenvalue_squared(detuning, gamma, theta));
    const cplx plus = rho.imag() >= 0.0 ? rho : -rho;
    return {plus, -plus};
}

Label EigenFrame::gain_label() const {
    return lambda_plus.imag() >= lambda_minus.imag() ? Label::plus : Label::minus;
}

EigenFrame eigenframe(double detuning, double gamma, double theta) {
    const auto branch = principal_branch(detuning, gamma, theta);
    const cplx plus = eigenvalues(detuning, gamma, theta).plus;
    const int k = std::abs(plus - branch.rho) <= std::abs(plus + branch.rho) ? 0 : 1;
    return make_frame(branch.rho, branch.alpha, k);
}

EigenFrame eigenframe(double detuning, double gamma, double theta, const EigenFrame& previous) {
    const auto branch = principal_branch(detuning, gamma, theta);
    const double centre = std::round((previous.alpha - branch.alpha).real() / pi);
    const int k0 = static_cast<int>(centre);

    std::array<std::pair<double, int>, 3> candidates{};
    for (int j = 0; j < 3; ++j) {
        const int k = k0 - 1 + j;
        const cplx alpha = branch.alpha + static_cast<double>(k) * pi;
        candidates[j] = {std::abs(alpha - previous.alpha), k};
    }
    std::sort(candidates.begin(), candidates.end());
    if (candidates[1].first - candidates[0].first < 0.25 * pi) {
        throw AmbiguousBranch("alpha branch candidates are " +
                              std::to_string(candidates[0].first) + " and " +
                              std::to_string(candidates[1].first) +
                              " from the predecessor; refine the step");
    }
    return make_frame(branch.rho, branch.alpha, candidates[0].second);
}

std::vector<ExceptionalPoint> ep_locations(double detuning) {
    if (detuning < 0.0) throw ValidationError("Omega >= 0 violated");
    if (detuning == 0.0) throw DegenerateModel("Omega = 0: identical modes carry no EP");
    return {{detuning, pi / 4.0}, {detuning, 3.0 * pi / 4.0}};
}

PhaseClass classify_phase(double detuning, double gamma, double theta, double tol) {
    if (!(tol > 0.0)) throw ValidationError("tol > 0 violated");
    if (std::abs(cos_2theta(theta)) >= tol) return PhaseClass::generic;
    if (std::abs(gamma - detuning) < tol * detuning) return PhaseClass::exceptional_point;
    return gamma < detuning ? PhaseClass::exact_pt : PhaseClass::broken_pt;
}

SurfaceGrid surface_grid(double detuning, Range gamma_range, Range theta_range,
                         std::size_t gamma_points, std::size_t theta_points) {
    if (gamma_points < 2 || theta_points < 2) {
        throw ValidationError("surface resolution must be >= 2 per axis");
    }
    if (!(gamma_range.to > gamma_range.from) || !(theta_range.to > theta_range.from)) {
        throw ValidationError("surface ranges must be non-empty");
    }
    auto linspace = [](Range r, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = r.from + (r.to - r.from) * (static_cast<double>(i) / static_cast<double>(n - 1));
        }
        return v;
    };

    SurfaceGrid grid;
    grid.gammas = linspace(gamma_range, gamma_points);
    grid.thetas = linspace(theta_range, theta_points);
    grid.values.reserve(gamma_points * theta_points);

    auto follow = [&](double gamma, double theta, const EigenPair* previous) {
        const EigenPair cold = eigenvalues(detuning, gamma, theta);
        if (previous == nullptr) return cold;
        const double d_same = std::abs(cold.plus - previous->plus);
        const double d_swap = std::abs(cold.minus - previous->plus);
        const double scale = std::abs(cold.plus) + std::abs(previous->plus);
        if (std::abs(d_same - d_swap) <= 1e-12 * scale) return cold;
        return d_same < d_swap ? cold : EigenPair{cold.minus, cold.plus};
    };

    for (std::size_t i = 0; i < gamma_points; ++i) {
        for (std::size_t j = 0; j < theta_points; ++j) {
            const EigenPair* previous = nullptr;
            if (j > 0) {
                previous = &grid.values.back();
            } else if (i > 0) {
                previous = &grid.values[(i - 1) * theta_points];
            }
            grid.values.push_back(follow(grid.gammas[i], grid.thetas[j], previous));
        }
    }
    return grid;
}

}  // namespace chiral
