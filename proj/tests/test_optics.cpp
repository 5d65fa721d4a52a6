#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "weakval/json_io.hpp"
#include "weakval/optics.hpp"

using namespace weakval;

namespace {

// Lengths in millimeters. The indices are configuration inputs.
CrystalSpec yvo4() {
    return CrystalSpec(4.52, 1.9929, 2.2154, 780e-6, 0.813);
}

}  // namespace

TEST_CASE("normal incidence and vanishing birefringence give no separation") {
    CHECK(beam_separation(yvo4(), 0.0) == doctest::Approx(0.0));

    const CrystalSpec iso(4.52, 2.0, 2.0, 780e-6, 0.813);
    for (int i = -5; i <= 5; ++i) {
        CHECK(std::abs(beam_separation(iso, 0.1 * i)) < 1e-15);
    }
}

TEST_CASE("beam separation is antisymmetric in the tilt angle") {
    const CrystalSpec spec = yvo4();
    for (int i = 1; i <= 8; ++i) {
        const double theta = 0.05 * i;
        CHECK(std::abs(beam_separation(spec, theta) + beam_separation(spec, -theta)) < 1e-12);
    }
}

TEST_CASE("small-angle slope matches central differences") {
    const CrystalSpec spec = yvo4();
    const double analytic = spec.thickness * (1.0 / spec.n_e - 1.0 / spec.n_o);
    const double h = 1e-6;
    const double numeric = (beam_separation(spec, h) - beam_separation(spec, -h)) / (2.0 * h);
    CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("separation at 20 degrees (regression lock)") {
    const double dx = beam_separation(yvo4(), 20.0 * std::numbers::pi / 180.0);
    CHECK(dx == doctest::Approx(-0.07623064935580906).epsilon(1e-12));
}

TEST_CASE("coupling from separation") {
    CHECK(coupling_from_separation(0.0, 0.813).g_epsilon == doctest::Approx(0.0));

    const CouplingStrength c = coupling_from_separation(0.813, 0.813);
    CHECK(c.g_epsilon == doctest::Approx(0.813 / 2.0));
    CHECK(c.ratio == doctest::Approx(0.5));

    CHECK_THROWS_AS(coupling_from_separation(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("tilt-to-coupling map is monotone near normal incidence") {
    const CrystalSpec spec = yvo4();
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double theta = 0.005 * i;
        const double ratio = coupling_from_separation(beam_separation(spec, theta),
                                                      spec.beam_waist).ratio;
        CHECK(ratio < prev);  // strictly decreasing with these indices
        prev = ratio;
    }
}

TEST_CASE("crystal config validation and JSON") {
    CHECK_THROWS_AS(CrystalSpec(0.0, 1.9929, 2.2154, 780e-6, 0.813), std::invalid_argument);
    CHECK_THROWS_AS(CrystalSpec(4.52, 0.9, 2.2154, 780e-6, 0.813), std::invalid_argument);
    CHECK_THROWS_AS(CrystalSpec(4.52, 1.9929, 2.2154, 780e-6, 0.0), std::invalid_argument);

    const Json config{{"d_mm", 4.52}, {"n_o", 1.9929}, {"n_e", 2.2154},
                      {"wavelength_nm", 780.0}, {"waist_um", 813.0}};
    const CrystalSpec spec = crystal_from_json(config);
    CHECK(spec.thickness == doctest::Approx(4.52));
    CHECK(spec.beam_waist == doctest::Approx(0.813));
    CHECK(spec.delta() == doctest::Approx(0.4065));
    CHECK(spec.wavelength == doctest::Approx(780e-6));
}
