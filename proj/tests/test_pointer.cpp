#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "weakval/metrics.hpp"
#include "weakval/pointer.hpp"

using namespace weakval;

namespace {

GaussianPointerState random_state(std::mt19937_64& rng, double width, bool complex_centers) {
    std::uniform_int_distribution<int> n_terms(1, 5);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<GaussianTerm> terms;
    const int n = n_terms(rng);
    for (int i = 0; i < n; ++i) {
        const Complex amp(normal(rng), normal(rng));
        const double re = 2.0 * normal(rng);
        const double im = complex_centers ? 0.3 * normal(rng) : 0.0;
        terms.push_back({amp, Complex(re, im)});
    }
    return normalize(GaussianPointerState(width, std::move(terms)));
}

}  // namespace

TEST_CASE("initial Gaussian is normalized") {
    const GaussianPointerState p = gaussian_initial(1.0);
    CHECK(overlap(p, p).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.normalized);
    CHECK_THROWS_AS(gaussian_initial(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_initial(-1.0), std::invalid_argument);
}

TEST_CASE("overlap of Gaussians separated by 2*Delta") {
    // Oracle first: the quadrature value, then the closed form, against
    // exp(-1/2) from the pairwise kernel.
    const GaussianPointerState p = gaussian_initial(1.0);
    const GaussianPointerState q = shift(p, 2.0);
    const Complex by_quadrature = quadrature_overlap(p, q, default_grid(p, q));
    const Complex by_formula = overlap(p, q);
    const double expected = std::exp(-0.5);
    CHECK(std::abs(by_quadrature - by_formula) < 1e-10);
    CHECK(by_formula.real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(by_formula.imag()) < 1e-15);
}

TEST_CASE("shift by zero is the identity") {
    std::mt19937_64 rng(3);
    const GaussianPointerState p = random_state(rng, 1.3, true);
    const GaussianPointerState q = shift(p, 0.0);
    CHECK(std::abs(overlap(p, q) - overlap(p, p)) < 1e-14);
}

TEST_CASE("shift composition up to global normalization") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const GaussianPointerState p = random_state(rng, 0.8, true);
        const Complex a(normal(rng), 0.2 * normal(rng));
        const Complex b(normal(rng), 0.2 * normal(rng));
        const GaussianPointerState lhs = shift(shift(p, a), b);
        const GaussianPointerState rhs = shift(p, a + b);
        const double n1 = overlap(lhs, lhs).real();
        const double n2 = overlap(rhs, rhs).real();
        CHECK(std::abs(overlap(lhs, rhs)) / std::sqrt(n1 * n2) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("imaginary shift against the two-term post-selected state") {
    // The weak-value-i pointer state N(G(g eps) - i G(-g eps)) sits within
    // (g eps)^2 / (2 sqrt(2) Delta^2) of the imaginary-eigenvalue shift.
    const double ge = 0.1;
    const GaussianPointerState p0 = gaussian_initial(1.0);
    const GaussianPointerState shifted = shift(p0, Complex(0.0, ge));
    const GaussianPointerState two_term = normalize(linear_combination({
        {Complex(1.0, 0.0), shift(p0, ge)},
        {Complex(0.0, -1.0), shift(p0, -ge)},
    }));
    const double d = bures_pure(shifted, two_term);
    CHECK(d == doctest::Approx(ge * ge / (2.0 * std::sqrt(2.0))).epsilon(0.02));
}

TEST_CASE("closed-form overlap matches the quadrature oracle") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 100; ++rep) {
        const double width = (rep % 3 == 0) ? 0.7 : (rep % 3 == 1) ? 1.0 : 1.6;
        const GaussianPointerState a = random_state(rng, width, rep % 2 == 0);
        const GaussianPointerState b = random_state(rng, width, rep % 2 == 0);
        const Complex closed = overlap(a, b);
        const Complex quad = quadrature_overlap(a, b, default_grid(a, b));
        CHECK(std::abs(closed - quad) < 1e-8);
    }
}

TEST_CASE("quadrature normalization and orthogonal pair") {
    const GaussianPointerState p = gaussian_initial(1.0);
    CHECK(std::abs(quadrature_overlap(p, p, default_grid(p, p)) - 1.0) < 1e-10);

    // Gram-Schmidt: q ~ G(1) - <p|G(1)> p is exactly orthogonal to p.
    const GaussianPointerState g1 = shift(p, 1.0);
    const Complex c = overlap(p, g1);
    const GaussianPointerState q = normalize(linear_combination({
        {Complex(1.0, 0.0), g1},
        {-c, p},
    }));
    CHECK(std::abs(overlap(p, q)) < 1e-12);
    CHECK(std::abs(quadrature_overlap(p, q, default_grid(p, q))) < 1e-8);
}

TEST_CASE("insufficient grids are rejected") {
    const GaussianPointerState p = gaussian_initial(1.0);
    const GaussianPointerState q = shift(p, 3.0);
    GridSpec grid = default_grid(p, q);
    GridSpec few = grid;
    few.nodes = 1000;
    CHECK_THROWS_AS(quadrature_overlap(p, q, few), std::invalid_argument);
    GridSpec narrow = grid;
    narrow.lo = -5.0;
    CHECK_THROWS_AS(quadrature_overlap(p, q, narrow), std::invalid_argument);
    CHECK_NOTHROW(quadrature_overlap(p, q, grid));
}

TEST_CASE("width mismatch is rejected") {
    const GaussianPointerState a = gaussian_initial(1.0);
    const GaussianPointerState b = gaussian_initial(2.0);
    CHECK_THROWS_AS(overlap(a, b), std::invalid_argument);
    CHECK_THROWS_AS(bures_pure(a, b), std::invalid_argument);
}

TEST_CASE("spin pointer initial state") {
    const SpinPointerState p = spin_pointer_initial();
    CHECK(p.qubit.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(inner(basis_ket(2, 0), p.qubit)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    // Rotation by g eps = 0.3 about z sits at Bures angle exactly 0.3.
    Vector rotated(2);
    rotated << std::exp(Complex(0.0, -0.3)) / std::sqrt(2.0),
        std::exp(Complex(0.0, 0.3)) / std::sqrt(2.0);
    CHECK(std::abs(bures_pure(p, SpinPointerState(Ket(rotated))) - 0.3) < 1e-12);
}

TEST_CASE("ensemble validation and reorder invariance") {
    const GaussianPointerState p = gaussian_initial(1.0);
    const GaussianPointerState a = shift(p, 0.4);
    const GaussianPointerState b = shift(p, -0.7);
    CHECK_THROWS_AS(PointerEnsemble({{0.5, a}, {0.2, b}}), std::invalid_argument);
    CHECK_THROWS_AS(PointerEnsemble({{-0.1, a}, {1.1, b}}), std::invalid_argument);

    const PointerEnsemble e1({{0.3, a}, {0.7, b}});
    const PointerEnsemble e2({{0.7, b}, {0.3, a}});
    CHECK(bures_pure_mixed(p, e1) == doctest::Approx(bures_pure_mixed(p, e2)).epsilon(1e-14));
}

TEST_CASE("position mean") {
    const GaussianPointerState p = gaussian_initial(1.0);
    CHECK(position_mean(shift(p, 1.7)) == doctest::Approx(1.7).epsilon(1e-13));
    const GaussianPointerState sym = normalize(linear_combination({
        {Complex(1.0, 0.0), shift(p, 0.5)},
        {Complex(1.0, 0.0), shift(p, -0.5)},
    }));
    CHECK(std::abs(position_mean(sym)) < 1e-13);
}

TEST_CASE("momentum moments of the initial Gaussian") {
    CHECK(momentum_second_moment(2.0) == doctest::Approx(1.0 / 16.0));
    CHECK(momentum_fourth_moment(2.0) == doctest::Approx(3.0 / 256.0));
}
