#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "chiral/errors.hpp"
#include "chiral/model.hpp"
#include "chiral/schedule.hpp"
#include "support.hpp"

using namespace chiral;
using fixtures::pi;

namespace {

constexpr cplx I{0.0, 1.0};

// Descending by imaginary part; near-equal imaginary parts (a real
// spectrum up to rounding) fall back to the real part.
void sort_pair(std::array<cplx, 2>& v) {
    const double tie = 1e-12 * (std::abs(v[0]) + std::abs(v[1]));
    if (std::abs(v[0].imag() - v[1].imag()) <= tie ? v[0].real() < v[1].real()
                                                   : v[0].imag() < v[1].imag()) {
        std::swap(v[0], v[1]);
    }
}

std::array<cplx, 2> numeric_eigenvalues(const Eigen::Matrix2cd& h) {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(h);
    std::array<cplx, 2> v{solver.eigenvalues()(0), solver.eigenvalues()(1)};
    sort_pair(v);
    return v;
}

}  // namespace

TEST_CASE("effective_frequencies: identity rotation and the diagonal") {
    const SystemParams p = SystemParams::from_carrier(10.0, 1.0);
    const auto f0 = effective_frequencies(p, 0.0);
    CHECK(f0.omega_x == doctest::Approx(p.omega_x0).epsilon(1e-15));
    CHECK(f0.omega_y == doctest::Approx(p.omega_y0).epsilon(1e-15));
    CHECK(f0.eta == 0.0);

    const auto f45 = effective_frequencies(p, pi / 4.0);
    const double mean = std::sqrt(0.5 * (p.omega_x0 * p.omega_x0 + p.omega_y0 * p.omega_y0));
    CHECK(f45.omega_x == doctest::Approx(mean).epsilon(1e-15));
    CHECK(f45.omega_y == doctest::Approx(mean).epsilon(1e-15));
    CHECK(f45.eta == doctest::Approx(0.5 * (p.omega_x0 * p.omega_x0 - p.omega_y0 * p.omega_y0)));

    CHECK(effective_frequencies(p, pi / 2.0).eta == 0.0);
}

TEST_CASE("effective_frequencies: matches diagonalising the rotated stiffness form") {
    SystemParams p;
    p.omega_x0 = 2.0 * pi * 10.05;
    p.omega_y0 = 2.0 * pi * 9.95;
    const double theta = pi / 8.0;
    const auto f = effective_frequencies(p, theta);

    Eigen::Matrix2d k;
    k << f.omega_x * f.omega_x, f.eta, f.eta, f.omega_y * f.omega_y;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(k);
    const double wx2 = p.omega_x0 * p.omega_x0;
    const double wy2 = p.omega_y0 * p.omega_y0;
    CHECK(solver.eigenvalues()(0) == doctest::Approx(wy2).epsilon(1e-13));
    CHECK(solver.eigenvalues()(1) == doctest::Approx(wx2).epsilon(1e-13));
    // The stiff axis is the x0 axis rotated by theta.
    const Eigen::Vector2d axis = solver.eigenvectors().col(1);
    CHECK(std::abs(axis.dot(Eigen::Vector2d(std::cos(theta), std::sin(theta)))) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("effective_frequencies: rotation preserves the trace") {
    const SystemParams p = SystemParams::from_carrier(5.0, 0.3);
    for (int k = 0; k <= 64; ++k) {
        const auto f = effective_frequencies(p, pi * k / 64.0);
        CHECK(f.omega_x * f.omega_x + f.omega_y * f.omega_y ==
              doctest::Approx(p.omega_x0 * p.omega_x0 + p.omega_y0 * p.omega_y0).epsilon(1e-14));
    }
}

TEST_CASE("build_hamiltonian: special angles") {
    const double w = 2.0, g = 0.5;
    const auto h0 = build_hamiltonian(w, g, 0.0);
    CHECK(h0(0, 0) == -I * g / 2.0 - w / 2.0);
    CHECK(h0(1, 1) == I * g / 2.0 + w / 2.0);
    CHECK(h0(0, 1) == 0.0);
    CHECK(h0(1, 0) == 0.0);

    const auto h45 = build_hamiltonian(w, g, pi / 4.0);
    CHECK(h45(0, 0) == -I * g / 2.0);
    CHECK(h45(1, 1) == I * g / 2.0);
    CHECK(h45(0, 1).real() == doctest::Approx(-w / 2.0).epsilon(1e-15));
    CHECK(h45.trace() == 0.0);
}

TEST_CASE("build_hamiltonian: term-by-term evaluation in extended precision") {
    const long double w = 2.0L * 3.141592653589793238462643383279502884L * 0.1L;
    const long double g = w / 2.0L;
    const long double th = 3.141592653589793238462643383279502884L / 6.0L;
    const long double c = std::cos(2.0L * th);
    const long double s = std::sin(2.0L * th);
    const auto h = build_hamiltonian(static_cast<double>(w), static_cast<double>(g),
                                     static_cast<double>(th));
    const double tol = 1e-15;
    CHECK(std::abs(h(0, 0).real() - static_cast<double>(-w / 2.0L * c)) < tol);
    CHECK(std::abs(h(0, 0).imag() - static_cast<double>(-g / 2.0L)) < tol);
    CHECK(std::abs(h(0, 1).real() - static_cast<double>(-w / 2.0L * s)) < tol);
    CHECK(std::abs(h(1, 0).real() - static_cast<double>(-w / 2.0L * s)) < tol);
    CHECK(std::abs(h(1, 1).real() - static_cast<double>(w / 2.0L * c)) < tol);
    CHECK(std::abs(h(1, 1).imag() - static_cast<double>(g / 2.0L)) < tol);
}

TEST_CASE("build_hamiltonian: PT conjugation maps theta to pi/2 - theta") {
    Eigen::Matrix2cd swap;
    swap << 0, 1, 1, 0;
    fixtures::TripleGenerator gen(11);
    for (int k = 0; k < 200; ++k) {
        const auto t = gen.next();
        const Eigen::Matrix2cd lhs = swap * build_hamiltonian(t.omega, t.gamma, t.theta).conjugate() * swap;
        const Eigen::Matrix2cd rhs = build_hamiltonian(t.omega, t.gamma, pi / 2.0 - t.theta);
        CHECK((lhs - rhs).norm() <= 1e-14 * rhs.norm());
        // Without gain/loss the plain mode exchange already does it.
        const Eigen::Matrix2cd h = build_hamiltonian(t.omega, 0.0, t.theta);
        CHECK((swap * h * swap - build_hamiltonian(t.omega, 0.0, pi / 2.0 - t.theta)).norm() <=
              1e-14 * h.norm());
    }
}

TEST_CASE("eigenvalues: examples") {
    const double w = 2.0 * pi * 0.1;
    const auto ep = eigenvalues(w, w, pi / 4.0);
    CHECK(ep.plus == 0.0);
    CHECK(ep.minus == 0.0);

    const auto herm = eigenvalues(w, 0.0, 0.0);
    CHECK(herm.plus.real() == doctest::Approx(w / 2.0));
    CHECK(herm.plus.imag() == 0.0);
    CHECK(herm.minus == -herm.plus);

    const auto exact = eigenvalues(w, 2.0 * w / 3.0, pi / 4.0);
    const auto oracle = numeric_eigenvalues(build_hamiltonian(w, 2.0 * w / 3.0, pi / 4.0));
    CHECK(std::abs(exact.plus - oracle[0]) < 1e-14);
    CHECK(std::abs(exact.minus - oracle[1]) < 1e-14);
    CHECK(exact.plus.real() == doctest::Approx(std::sqrt(5.0) / 6.0 * w).epsilon(1e-14));
    CHECK(std::abs(exact.plus.imag()) < 1e-15);
}

TEST_CASE("eigenvalues: cold-start labels put gain on plus") {
    fixtures::TripleGenerator gen(3);
    for (int k = 0; k < 1000; ++k) {
        const auto t = gen.next();
        const auto e = eigenvalues(t.omega, t.gamma, t.theta);
        CHECK(e.plus.imag() >= e.minus.imag());
        if (e.plus.imag() == e.minus.imag()) CHECK(e.plus.real() >= e.minus.real());
    }
}

TEST_CASE("eigenvalues: agree with a generic solver on random triples") {
    fixtures::TripleGenerator gen(5);
    for (int k = 0; k < 10000; ++k) {
        const auto t = gen.next();
        const auto e = eigenvalues(t.omega, t.gamma, t.theta);
        const auto n = numeric_eigenvalues(build_hamiltonian(t.omega, t.gamma, t.theta));
        const double scale = std::abs(e.plus);
        // Sort ours the same way before comparing.
        std::array<cplx, 2> mine{e.plus, e.minus};
        sort_pair(mine);
        if (std::abs(mine[0] - n[0]) > 1e-10 * std::max(scale, t.omega) ||
            std::abs(mine[1] - n[1]) > 1e-10 * std::max(scale, t.omega)) {
            FAIL("mismatch at omega=", t.omega, " gamma=", t.gamma, " theta=", t.theta);
        }
    }
}

TEST_CASE("eigenframe: examples") {
    const double w = 1.3;
    const auto f = eigenframe(w, 0.0, pi / 4.0);
    CHECK(std::abs(f.alpha - pi / 2.0) < 1e-15);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK((f.r_plus - Eigen::Vector2cd(-h, h)).norm() < 1e-15);
    CHECK((f.r_minus - Eigen::Vector2cd(h, h)).norm() < 1e-15);

    const auto g = eigenframe(w, 0.0, 0.0);
    CHECK(std::abs(g.alpha) < 1e-15);
    CHECK((g.r_plus - Eigen::Vector2cd(0.0, 1.0)).norm() < 1e-15);
    CHECK((g.r_minus - Eigen::Vector2cd(1.0, 0.0)).norm() < 1e-15);
    CHECK(g.lambda_plus == cplx(w / 2.0, 0.0));
}

TEST_CASE("eigenframe: cold start agrees with eigenvalues()") {
    fixtures::TripleGenerator gen(7);
    for (int k = 0; k < 1000; ++k) {
        const auto t = gen.next();
        const auto f = eigenframe(t.omega, t.gamma, t.theta);
        const auto e = eigenvalues(t.omega, t.gamma, t.theta);
        CHECK(f.lambda_plus == e.plus);
        CHECK(f.lambda_minus == e.minus);
    }
}

TEST_CASE("eigenframe: invariants on random triples") {
    fixtures::TripleGenerator gen(13);
    for (int k = 0; k < 2000; ++k) {
        const auto t = gen.next();
        const auto f = eigenframe(t.omega, t.gamma, t.theta);
        const auto h = build_hamiltonian(t.omega, t.gamma, t.theta);
        const double scale = std::abs(f.lambda_plus);
        CHECK(std::abs(f.lambda_plus + f.lambda_minus) <= 1e-14 * scale);
        const cplx target = eigenvalue_squared(t.omega, t.gamma, t.theta);
        CHECK(std::abs(f.lambda_plus * f.lambda_plus - target) <= 1e-12 * std::abs(target));
        CHECK((h * f.r_plus - f.lambda_plus * f.r_plus).norm() <= 1e-10 * h.norm());
        CHECK((h * f.r_minus - f.lambda_minus * f.r_minus).norm() <= 1e-10 * h.norm());
        CHECK(std::abs(f.l_plus.cwiseProduct(f.r_plus).sum() - 1.0) <= 1e-12);
        CHECK(std::abs(f.l_minus.cwiseProduct(f.r_minus).sum() - 1.0) <= 1e-12);
        CHECK(std::abs(f.l_plus.cwiseProduct(f.r_minus).sum()) <= 1e-12);
        CHECK(std::abs(f.l_minus.cwiseProduct(f.r_plus).sum()) <= 1e-12);
    }
}

TEST_CASE("eigenframe: singular at the EP") {
    CHECK_THROWS_AS(eigenframe(1.0, 1.0, pi / 4.0), SingularFrame);
    CHECK_THROWS_AS(eigenframe(1.0, 1.0, 3.0 * pi / 4.0), SingularFrame);
    CHECK_NOTHROW(eigenframe(1.0, 1.0, pi / 4.0 + 1e-3));
}

TEST_CASE("eigenframe: equidistant predecessor is ambiguous") {
    const auto f = eigenframe(1.0, 0.4, 0.3);
    EigenFrame midway = f;
    midway.alpha = f.alpha + pi / 2.0;
    CHECK_THROWS_AS(eigenframe(1.0, 0.4, 0.3, midway), AmbiguousBranch);
    // A predecessor on an odd branch swaps which root plays lambda_plus.
    EigenFrame shifted = f;
    shifted.alpha = f.alpha + pi;
    const auto g = eigenframe(1.0, 0.4, 0.3, shifted);
    CHECK(g.branch_id == f.branch_id + 1);
    CHECK(std::abs(g.lambda_plus - f.lambda_minus) < 1e-15);
}

TEST_CASE("eigenframe: alpha stays continuous around the encircling loop") {
    const double w = 2.0 * pi * 0.1;
    for (double phase : {0.0, pi}) {
        for (auto dir : {Direction::cw, Direction::ccw}) {
            LoopSpec spec = fixtures::encircling(w, dir);
            spec.gamma_phase = phase;
            const std::size_t n = 2000;
            const double dt = spec.period() / static_cast<double>(n);

            std::vector<cplx> coarse;
            EigenFrame prev = eigenframe(w, gamma_at(spec, 0.0), theta_at(spec, 0.0));
            coarse.push_back(prev.alpha);
            for (std::size_t k = 1; k <= n; ++k) {
                const double t = dt * static_cast<double>(k);
                prev = eigenframe(w, gamma_at(spec, t), theta_at(spec, t), prev);
                coarse.push_back(prev.alpha);
            }

            // Oracle: the same walk resampled ten times more densely.
            EigenFrame dense = eigenframe(w, gamma_at(spec, 0.0), theta_at(spec, 0.0));
            double max_jump = 0.0;
            for (std::size_t k = 1; k <= 10 * n; ++k) {
                const double t = dt * static_cast<double>(k) / 10.0;
                dense = eigenframe(w, gamma_at(spec, t), theta_at(spec, t), dense);
                if (k % 10 == 0) CHECK(std::abs(dense.alpha - coarse[k / 10]) < 1e-9);
            }
            for (std::size_t k = 1; k < coarse.size(); ++k) {
                max_jump = std::max(max_jump, std::abs(coarse[k] - coarse[k - 1]));
            }
            CHECK(max_jump < pi / 2.0);
            // One trip around the EP moves alpha by an odd multiple of pi.
            const double turns = std::round((coarse.back() - coarse.front()).real() / pi);
            CHECK(std::abs(std::fmod(turns, 2.0)) == 1.0);
        }
    }
}

TEST_CASE("ep_locations") {
    const double w = 2.0 * pi * 0.1;
    const auto eps = ep_locations(w);
    REQUIRE(eps.size() == 2);
    CHECK(eps[0].gamma == w);
    CHECK(eps[0].theta == pi / 4.0);
    CHECK(eps[1].gamma == w);
    CHECK(eps[1].theta == 3.0 * pi / 4.0);
    CHECK_THROWS_AS(ep_locations(0.0), DegenerateModel);
    for (const auto& ep : ep_locations(1.0)) {
        const auto e = eigenvalues(1.0, ep.gamma, ep.theta);
        CHECK(std::abs(e.plus - e.minus) < 1e-10);
    }
}

TEST_CASE("classify_phase") {
    const double w = 0.7;
    CHECK(classify_phase(w, 2.0 * w / 3.0, pi / 4.0) == PhaseClass::exact_pt);
    CHECK(classify_phase(w, 2.0 * w, pi / 4.0) == PhaseClass::broken_pt);
    CHECK(classify_phase(w, w, pi / 4.0) == PhaseClass::exceptional_point);
    CHECK(classify_phase(w, w, 3.0 * pi / 4.0) == PhaseClass::exceptional_point);
    CHECK(classify_phase(w, w, 0.3) == PhaseClass::generic);
    CHECK(classify_phase(w, w * (1.0 + 1e-6), pi / 4.0) == PhaseClass::broken_pt);
    // Exact-PT spectra are real.
    for (double g = 0.0; g < w; g += w / 16.0) {
        CHECK(eigenvalues(w, g, pi / 4.0).plus.imag() == 0.0);
    }
}

TEST_CASE("surface_grid: corners away from the EP are pointwise eigenvalues") {
    const double w = 1.0;
    const auto grid = surface_grid(w, {0.0, 0.3}, {0.0, 0.2}, 2, 2);
    REQUIRE(grid.values.size() == 4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const auto e = eigenvalues(w, grid.gammas[i], grid.thetas[j]);
            CHECK(std::abs(grid.at(i, j).plus - e.plus) < 1e-15);
            CHECK(std::abs(grid.at(i, j).minus - e.minus) < 1e-15);
        }
    }
}

TEST_CASE("surface_grid: a grid straddling the EP resolves a small gap") {
    const double w = 1.0;
    const std::size_t n = 37;
    const Range gr{0.55 * w, 1.61 * w};
    const Range tr{0.31, 1.37};
    const auto grid = surface_grid(w, gr, tr, n, n);

    std::size_t bi = 0, bj = 0;
    double best = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double gap = std::abs(grid.at(i, j).plus - grid.at(i, j).minus);
            if (gap < best) best = gap, bi = i, bj = j;
        }
    }
    // Oracle: refine inside the neighbouring cells of the minimum.
    const double dg = (gr.to - gr.from) / (n - 1);
    const double dth = (tr.to - tr.from) / (n - 1);
    double refined = INFINITY, rg = 0.0, rt = 0.0;
    for (int a = -200; a <= 200; ++a) {
        for (int b = -200; b <= 200; ++b) {
            const double g = grid.gammas[bi] + dg * a / 200.0;
            const double th = grid.thetas[bj] + dth * b / 200.0;
            const double gap = 2.0 * std::abs(std::sqrt(eigenvalue_squared(w, g, th)));
            if (gap < refined) refined = gap, rg = g, rt = th;
        }
    }
    CHECK(refined <= best);
    CHECK(std::abs(rg - w) <= dg / 200.0);
    CHECK(std::abs(rt - pi / 4.0) <= dth / 200.0);
    // sqrt-type gap: bounded by the worst case one grid step from the EP.
    CHECK(best <= 2.0 * std::abs(std::sqrt(eigenvalue_squared(w, w + dg, pi / 4.0 + dth))));
}

TEST_CASE("surface_grid: exact-PT slice is real and the EP row closes") {
    const double w = 2.0 * pi * 0.1;
    const auto grid = surface_grid(w, {0.0, 2.0 * w}, {0.0, pi / 2.0}, 101, 101);
    CHECK(grid.gammas[50] == w);
    CHECK(grid.thetas[50] == pi / 4.0);
    CHECK(std::abs(grid.at(50, 50).plus - grid.at(50, 50).minus) < 1e-12 * w);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(std::abs(grid.at(i, 50).plus.imag()) < 1e-12);
        CHECK(std::abs(grid.at(i, 50).minus.imag()) < 1e-12);
    }
    CHECK_THROWS_AS(surface_grid(w, {0.0, w}, {0.0, 1.0}, 1, 5), ValidationError);
}
