#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "weakval/coupling.hpp"
#include "weakval/metrics.hpp"

using namespace weakval;

namespace {

SpinPointerState rotated_spin(double angle) {
    Vector v(2);
    v << std::exp(Complex(0.0, -angle)) / std::sqrt(2.0),
        std::exp(Complex(0.0, angle)) / std::sqrt(2.0);
    return SpinPointerState(Ket(v));
}

GaussianPointerState random_gaussian(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_terms(1, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<GaussianTerm> terms;
    const int n = n_terms(rng);
    for (int i = 0; i < n; ++i) {
        terms.push_back({Complex(normal(rng), normal(rng)), Complex(normal(rng), 0.2 * normal(rng))});
    }
    return normalize(GaussianPointerState(1.0, std::move(terms)));
}

}  // namespace

TEST_CASE("bures angle endpoints") {
    const GaussianPointerState p = gaussian_initial(1.0);
    CHECK(bures_pure(p, p) == doctest::Approx(0.0));

    CHECK(bures_pure(basis_ket(2, 0), basis_ket(2, 1)) ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
}

TEST_CASE("bures angle between the initial and shifted Gaussians") {
    const double ge = 0.02;
    const GaussianPointerState p = gaussian_initial(1.0);
    const double d = bures_pure(p, shift(p, ge));
    CHECK(std::abs(d - 0.0100) < 1e-6);
}

TEST_CASE("bures angle symmetry, phase invariance and bound") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        const GaussianPointerState a = random_gaussian(rng);
        const GaussianPointerState b = random_gaussian(rng);
        const double dab = bures_pure(a, b);
        CHECK(dab == doctest::Approx(bures_pure(b, a)).epsilon(1e-13));
        CHECK(dab >= 0.0);
        CHECK(dab <= std::numbers::pi / 2 + 1e-12);

        // A global phase leaves the angle unchanged, up to the ~1e-9
        // resolution floor of the extended-precision Gram determinant.
        std::vector<GaussianTerm> terms = a.terms;
        for (auto& t : terms) t.amplitude *= std::exp(Complex(0.0, 1.1));
        CHECK(bures_pure(a, GaussianPointerState(1.0, terms)) < 1e-9);
    }
}

TEST_CASE("pure-mixed distance reductions and reference values") {
    const GaussianPointerState p = gaussian_initial(1.0);
    const GaussianPointerState q = shift(p, 0.6);

    // Single pure component reduces to the pure-pure angle.
    const PointerEnsemble single({{1.0, q}});
    CHECK(bures_pure_mixed(p, single) == doctest::Approx(bures_pure(p, q)).epsilon(1e-13));

    // The eigenvalue-0/2 superposition case at g*eps = 0.02: distance from
    // the eigenvalue-1 pointer is g*eps/(2 Delta) to leading order.
    const double ge = 0.02;
    const PointerEnsemble mixture({{0.5, p}, {0.5, shift(p, 2.0 * ge)}});
    CHECK(std::abs(bures_pure_mixed(shift(p, ge), mixture) - 0.0100) < 1e-4);

    // Pure qubit against the maximally mixed qubit: arccos sqrt(1/2) = pi/4.
    const PointerEnsemble mixed_qubit({{0.5, SpinPointerState(basis_ket(2, 0))},
                                       {0.5, SpinPointerState(basis_ket(2, 1))}});
    CHECK(bures_pure_mixed(spin_pointer_initial(), mixed_qubit) ==
          doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));

    // Spin-pointer expectation case: the distance is exactly g*eps.
    const double ge_spin = 0.05;
    const PointerEnsemble spin_mixture({{0.5, spin_pointer_initial()},
                                        {0.5, rotated_spin(2.0 * ge_spin)}});
    CHECK(std::abs(bures_pure_mixed(rotated_spin(ge_spin), spin_mixture) - ge_spin) < 1e-10);
}

TEST_CASE("visibility relation") {
    CHECK(visibility_from_bures(0.0) == doctest::Approx(1.0));
    CHECK(visibility_from_bures(std::numbers::pi / 2) == doctest::Approx(0.0));
    CHECK(std::abs(bures_from_visibility(0.990) - 0.1415) < 1e-4);

    for (int i = 0; i <= 20; ++i) {
        const double v = i / 20.0;
        CHECK(std::abs(visibility_from_bures(bures_from_visibility(v)) - v) < 1e-12);
    }
    CHECK_THROWS_AS(bures_from_visibility(1.5), std::invalid_argument);
    CHECK_THROWS_AS(bures_from_visibility(-0.2), std::invalid_argument);
    CHECK_THROWS_AS(visibility_from_bures(2.0), std::invalid_argument);
}

TEST_CASE("leading-order weak-case predictions") {
    const double width = 1.0;
    const double ge = 0.02;
    const double b2 = momentum_second_moment(width);
    const double b4 = momentum_fourth_moment(width);

    CHECK(predicted_bures_weak(Complex(-1.0, 0.0), Complex(1.0, 0.0), b2, b4, ge) ==
          doctest::Approx(ge * ge / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(predicted_bures_weak(Complex(-100.0, 0.0), Complex(100.0, 0.0), b2, b4, ge) ==
          doctest::Approx(100.0 * 101.0 * ge * ge / (4.0 * std::sqrt(2.0))).epsilon(1e-12));

    // Spin pointer: <sigma_z^2> = <sigma_z^4> = 1, vanishing variance.
    CHECK(predicted_bures_weak(Complex(-1.0, 0.0), Complex(1.0, 0.0), 1.0, 1.0, ge) == 0.0);

    CHECK_THROWS_AS(predicted_bures_weak(Complex(1.0, 0.0), Complex(0.0, 0.0), 1.0, 0.5, ge),
                    std::invalid_argument);
}

TEST_CASE("leading-order expectation-case predictions") {
    const double ge = 0.02;
    CHECK(predicted_bures_expectation(1.0, 0.5, ge) == doctest::Approx(ge / 2.0));
    CHECK(predicted_bures_expectation(0.0, 0.5, ge) == 0.0);
    CHECK(predicted_bures_expectation(1.0, 0.0, ge) == 0.0);
    CHECK_THROWS_AS(predicted_bures_expectation(-1.0, 0.5, ge), std::invalid_argument);
}

TEST_CASE("scaling fit on an exact power law") {
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i <= 12; ++i) {
        const double eps = 1e-3 * std::pow(10.0, i / 6.0);
        samples.emplace_back(eps, 3.0 * eps * eps);
    }
    const ScalingFit fit = fit_scaling_exponent(samples);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-6));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.points_used == 13);
}

TEST_CASE("scaling fit excludes sub-floor points and needs three usable ones") {
    std::vector<std::pair<double, double>> samples = {
        {1e-4, 1e-15}, {1e-3, 1e-13}, {1e-2, 1.0}, {1e-1, 2.0}, {1.0, 4.0}};
    const ScalingFit fit = fit_scaling_exponent(samples);
    CHECK(fit.points_used == 3);

    std::vector<std::pair<double, double>> too_few = {{1e-3, 1e-14}, {1e-2, 1.0}, {1e-1, 2.0}};
    CHECK_THROWS_AS(fit_scaling_exponent(too_few), std::invalid_argument);
}

TEST_CASE("measured sweeps reproduce the quadratic and linear exponents") {
    const Operator sz = spin_z_operator(1.0);
    const Operator sz2 = spin_z_operator(2.0);
    Vector post(3), pre(3);
    post << 0.0, -2.0, 1.0;
    pre << 0.0, 1.0, 1.0;
    const PureTSV tsv{Ket(post), Ket(pre)};
    Vector psi_v(5);
    psi_v << 1.0, 0.0, 1.0, 0.0, 0.0;
    const Ket psi = Ket(psi_v).normalized();
    const PointerState p0 = gaussian_initial(1.0);

    std::vector<std::pair<double, double>> weak_samples, exp_samples;
    for (int i = 0; i <= 16; ++i) {
        const double eps = 1e-4 * std::pow(10.0, i / 8.0);
        const CouplingSpec spec(sz, 1.0, eps, GaussianKind{1.0});
        const CouplingSpec spec2(sz2, 1.0, eps, GaussianKind{1.0});
        const auto eig = couple_eigenvalue(1.0, spec, p0);
        const auto weak = couple_postselected(tsv, spec, p0);
        weak_samples.emplace_back(eps, bures_pure(std::get<GaussianPointerState>(eig.pointer),
                                                  std::get<GaussianPointerState>(weak.pointer)));
        const auto eig2 = couple_eigenvalue(1.0, spec2, p0);
        const auto mix = couple_preselected(psi, spec2, p0);
        exp_samples.emplace_back(eps, bures_pure_mixed(std::get<GaussianPointerState>(eig2.pointer),
                                                       std::get<PointerEnsemble>(mix.pointer)));
    }
    CHECK(fit_scaling_exponent(weak_samples).slope == doctest::Approx(2.0).epsilon(0.025));
    CHECK(fit_scaling_exponent(exp_samples).slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("imperfection model") {
    const ImperfectionModel none(0.0);
    CHECK(apply_imperfection(none, 0.2) == doctest::Approx(0.2));

    const ImperfectionModel xi(0.1415);
    CHECK(apply_imperfection(xi, 0.0) == doctest::Approx(0.1415));
    CHECK(apply_imperfection(xi, 0.1) == doctest::Approx(std::sqrt(0.1415 * 0.1415 + 0.01)).epsilon(1e-12));

    CHECK_THROWS_AS(ImperfectionModel(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(ImperfectionModel(2.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_imperfection(xi, -0.1), std::invalid_argument);

    // Monotone in both arguments.
    double prev = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double d = apply_imperfection(xi, 0.05 * i);
        CHECK(d >= prev);
        prev = d;
    }
    prev = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double d = apply_imperfection(ImperfectionModel(0.05 * i), 0.2);
        CHECK(d >= prev);
        prev = d;
    }
}
