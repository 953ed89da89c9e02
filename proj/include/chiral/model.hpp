// model.hpp - effective two-mode non-Hermitian Hamiltonian and its eigensystem.
//
// The x/y mechanical modes of a rotated trap, reduced to their slowly varying
// envelopes, obey  i dPsi/dt = H Psi  with
//
//   H = [ -i G/2 - (W/2) cos 2t      -(W/2) sin 2t        ]
//       [ -(W/2) sin 2t               i G/2 + (W/2) cos 2t ]
//
// (W = detuning Omega, G = gain/loss rate Gamma, t = rotation angle theta).
// The spectrum is lambda = +/- (1/2) sqrt(W^2 - G^2 + 2i W G cos 2t), with a pair
// of exceptional points at G = W, theta = pi/4 and 3pi/4.
//
// Eigenvectors are written in the parallel-transported form
//   r+ = l+ = (-sin(a/2), cos(a/2)),   r- = l- = (cos(a/2), sin(a/2)),
//   tan a = (W/2) sin 2t / ((W/2) cos 2t + i G/2),
// where the complex angle a is kept continuous along a parameter path.

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace chiral {

using cplx = std::complex<double>;

// Gain (+) or loss (-) labelled eigenstate.
enum class Label { plus, minus };

constexpr Label other(Label l) { return l == Label::plus ? Label::minus : Label::plus; }
const char* to_string(Label l);

struct SystemParams {
    double omega_x0 = 0.0;  // rad/s
    double omega_y0 = 0.0;  // rad/s
    double gamma = 0.0;     // common gain/loss rate, rad/s
    // Gamma_y - Gamma_x. Removed from H by the trace gauge and reapplied as a
    // global factor exp(rate_imbalance * t / 4).
    double rate_imbalance = 0.0;
    // Omega/omega_0 must stay below this for the envelope reduction to hold.
    double weak_coupling_limit = 0.1;

    double omega_0() const { return 0.5 * (omega_x0 + omega_y0); }
    double detuning() const { return omega_x0 - omega_y0; }
    bool weak_coupling() const { return detuning() / omega_0() < weak_coupling_limit; }

    // Throws ValidationError naming the violated invariant.
    void validate() const;

    static SystemParams from_carrier(double omega_0, double detuning, double gamma = 0.0);

    bool operator==(const SystemParams&) const = default;
};

struct EffectiveFrequencies {
    double omega_x;  // rad/s
    double omega_y;  // rad/s
    double eta;      // rad^2/s^2
};

// Frequencies and coupling of the x/y modes once the trap is rotated by theta.
EffectiveFrequencies effective_frequencies(const SystemParams& params, double theta);

// cos 2theta, returning exactly zero when theta is within rounding of a cut
// line (pi/4 + k pi/2).
double cos_2theta(double theta);

Eigen::Matrix2cd build_hamiltonian(double detuning, double gamma, double theta);

// (W^2 - G^2 + 2i W G cos 2theta) / 4, the common square of both eigenvalues.
cplx eigenvalue_squared(double detuning, double gamma, double theta);

struct EigenPair {
    cplx plus;
    cplx minus;
};

// Cold-start labelling: plus is the eigenvalue with the larger imaginary part
// (gain); ties on a real spectrum go to the larger real part.
EigenPair eigenvalues(double detuning, double gamma, double theta);

struct EigenFrame {
    cplx lambda_plus;
    cplx lambda_minus;
    cplx alpha;
    Eigen::Vector2cd r_plus;
    Eigen::Vector2cd r_minus;
    Eigen::Vector2cd l_plus;
    Eigen::Vector2cd l_minus;
    // alpha = alpha_principal + branch_id * pi. Odd ids swap the root that
    // plays lambda_plus relative to the principal square root.
    int branch_id = 0;

    const Eigen::Vector2cd& right(Label l) const { return l == Label::plus ? r_plus : r_minus; }
    const Eigen::Vector2cd& left(Label l) const { return l == Label::plus ? l_plus : l_minus; }
    cplx lambda(Label l) const { return l == Label::plus ? lambda_plus : lambda_minus; }
    // Label of the eigenstate that currently has gain (ties -> plus).
    Label gain_label() const;
};

// Eigenframe without history; labels follow the eigenvalues() convention.
// Throws SingularFrame at an exceptional point.
EigenFrame eigenframe(double detuning, double gamma, double theta);

// Eigenframe on the alpha branch nearest to `previous`. Throws AmbiguousBranch
// when the two nearest candidates are within pi/4 of each other.
EigenFrame eigenframe(double detuning, double gamma, double theta, const EigenFrame& previous);

struct ExceptionalPoint {
    double gamma;
    double theta;
};

// EPs within one theta period [0, pi). Throws DegenerateModel for Omega == 0.
std::vector<ExceptionalPoint> ep_locations(double detuning);

enum class PhaseClass { exact_pt, broken_pt, exceptional_point, generic };

const char* to_string(PhaseClass p);

inline constexpr double kDefaultPhaseTolerance = 1e-9;

PhaseClass classify_phase(double detuning, double gamma, double theta,
                          double tol = kDefaultPhaseTolerance);

struct Range {
    double from;
    double to;
};

// Eigenvalue pairs on a gamma x theta grid, gamma-major ("row-major").
struct SurfaceGrid {
    std::vector<double> gammas;
    std::vector<double> thetas;
    std::vector<EigenPair> values;  // values[i * thetas.size() + j]

    const EigenPair& at(std::size_t gamma_index, std::size_t theta_index) const {
        return values[gamma_index * thetas.size() + theta_index];
    }
};

// Continuity-tracked sheets: labels follow the nearest eigenvalue of the
// previous point in the row (the row start follows the previous row start).
SurfaceGrid surface_grid(double detuning, Range gamma_range, Range theta_range,
                         std::size_t gamma_points, std::size_t theta_points);

}  // namespace chiral
