#pragma once

// Distances and derived quantities: Bures angles between pure states and
// between a pure state and a mixture, the visibility relation, analytic
// leading-order distance predictions, the experimental imperfection model,
// and log-log scaling fits.

#include <utility>
#include <vector>

#include "weakval/pointer.hpp"
#include "weakval/qstate.hpp"

namespace weakval {

// Distances below this are treated as numerically indistinguishable from
// zero when fitting scaling exponents.
constexpr double kNoiseFloor = 1e-12;

/// Bures angle arccos|<p1|p2>| between pure states, in [0, pi/2].
///
/// Small angles are recovered without evaluating arccos near 1: kets use the
/// orthogonal-residual norm (resolves ~1e-12 rad), Gaussian states an
/// extended-precision Gram determinant (resolves ~1e-9 rad, the square root
/// of the long-double epsilon).
double bures_pure(const Ket& p1, const Ket& p2);
double bures_pure(const GaussianPointerState& p1, const GaussianPointerState& p2);
double bures_pure(const SpinPointerState& p1, const SpinPointerState& p2);
double bures_pure(const PointerState& p1, const PointerState& p2);

/// Bures angle arccos sqrt(<p|rho|p>) between a pure state and a mixture,
/// with <p|rho|p> = sum_k prob_k |<p|comp_k>|^2.
double bures_pure_mixed(const GaussianPointerState& p, const PointerEnsemble& ens);
double bures_pure_mixed(const SpinPointerState& p, const PointerEnsemble& ens);
double bures_pure_mixed(const PointerState& p, const PointerEnsemble& ens);

/// V = cos(D) for D in [0, pi/2], and its inverse. Exact round-trip.
double visibility_from_bures(double bures_angle);
double bures_from_visibility(double visibility);

/// Leading-order distance between the pointer coupled to a weak value and the
/// pointer coupled to a numerically equal eigenvalue a:
///     D = |(A^2)_w - a^2| * sqrt(<B^4> - <B^2>^2) * (g eps)^2 / 2.
/// Returns 0 when the B-moment variance vanishes (the next order dominates).
/// Throws if b4 < b2^2 - 1e-12 (inconsistent moments).
double predicted_bures_weak(Complex a2_w, Complex a, double b2, double b4, double g_epsilon);

/// Leading-order distance for a pre-selected-only system:
///     D = dA * dB * g eps.
double predicted_bures_expectation(double delta_a, double delta_b, double g_epsilon);

/// Least-squares line through (log eps, log D). Natural logs; the intercept
/// is ln of the power-law coefficient.
struct ScalingFit {
    double slope;
    double intercept;
    double r_squared;
    int points_used;
};

/// Fits the scaling exponent from (epsilon, distance) samples. Points with
/// distance <= 1e-12 are excluded; at least 3 usable points are required.
ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& samples);

/// Fixed pointer shift of amplitude xi into a direction orthogonal to the
/// intended one, the model for optical imperfections.
struct ImperfectionModel {
    double xi;

    explicit ImperfectionModel(double xi_);
};

/// D = sqrt(xi^2 + D_ideal^2). Monotone in both arguments.
double apply_imperfection(const ImperfectionModel& model, double d_ideal);

}  // namespace weakval
