#pragma once

// Pointer-state representations.
//
// The continuous pointer is kept exactly as a finite superposition of
// width-Delta Gaussians with (possibly complex) centers,
//
//     psi(Q) = sum_t amp_t * N(Q - c_t),   N(x) = (2*pi)^(-1/4) Delta^(-1/2) exp(-x^2 / (4 Delta^2)),
//
// for which overlaps have the closed form
//
//     <N(.-c1)|N(.-c2)> = exp(-(conj(c1) - c2)^2 / (8 Delta^2)).
//
// A complex center c = x + i*y is a position shift x combined with a momentum
// boost y/(2 Delta^2); such states are no longer unit-norm and are normalized
// by dividing by the square root of the closed-form self-overlap. A uniform
// trapezoid grid provides an independent numerical oracle for the overlaps.

#include <complex>
#include <variant>
#include <vector>

#include "weakval/qstate.hpp"

namespace weakval {

// Amplitudes with modulus below this are dropped when superpositions are
// combined, keeping term lists finite under repeated algebra.
constexpr double kTermPruneTol = 1e-14;
constexpr double kSelfOverlapTol = 1e-10;

struct GaussianTerm {
    Complex amplitude;
    Complex center;
};

struct GaussianPointerState {
    double width;  // Delta
    std::vector<GaussianTerm> terms;
    bool normalized = false;

    GaussianPointerState(double width_, std::vector<GaussianTerm> terms_, bool normalized_ = false);
};

/// The width-Delta Gaussian centered at Q = 0, unit norm.
GaussianPointerState gaussian_initial(double width);

/// <p1|p2> via the closed-form pairwise Gaussian overlap; bilinear in the
/// term amplitudes. Throws if the widths differ.
Complex overlap(const GaussianPointerState& p1, const GaussianPointerState& p2);

/// Every term center increased by c. A real shift leaves amplitudes (and the
/// normalization flag) untouched; a complex shift changes the norm, so the
/// result is renormalized.
GaussianPointerState shift(const GaussianPointerState& p, Complex c);

/// Scale to unit self-overlap.
GaussianPointerState normalize(const GaussianPointerState& p);

/// sum_k coeff_k * p_k as one (un-normalized) state. All widths must agree;
/// coincident centers are merged and negligible amplitudes pruned.
GaussianPointerState linear_combination(const std::vector<std::pair<Complex, GaussianPointerState>>& parts);

/// <Q> of a (not necessarily normalized) state, from the closed-form first
/// moment <N(.-a)|Q|N(.-b)> = overlap * (conj(a) + b)/2.
double position_mean(const GaussianPointerState& p);

/// Momentum moments of the initial width-Delta Gaussian:
/// <P^2> = 1/(4 Delta^2), <P^4> = 3/(16 Delta^4).
double momentum_second_moment(double width);
double momentum_fourth_moment(double width);

/// Uniform grid for the trapezoid oracle. Valid grids cover at least 12*Delta
/// beyond the extreme real centers of both states and carry >= 4096 nodes.
struct GridSpec {
    double lo;
    double hi;
    int nodes;
};

/// Smallest valid grid for the pair (12*Delta padding, 4096 nodes).
GridSpec default_grid(const GaussianPointerState& p1, const GaussianPointerState& p2);

/// Trapezoid-rule overlap oracle. The integrand decays like
/// exp(-Q^2 / (2 Delta^2)), so the 12*Delta padding leaves a ~1e-31 tail and
/// the error is dominated by grid aliasing, far below 1e-10 for valid grids.
/// Throws on grids violating the coverage or node-count requirements.
Complex quadrature_overlap(const GaussianPointerState& p1, const GaussianPointerState& p2,
                           const GridSpec& grid);

/// A two-level pointer. The qubit is stored normalized; basis order (|up>, |down>).
struct SpinPointerState {
    Ket qubit;

    explicit SpinPointerState(Ket q);
};

/// |up_x> = (|up> + |down>)/sqrt(2), the state of maximal sensitivity to a
/// sigma_z coupling.
SpinPointerState spin_pointer_initial();

Complex overlap(const SpinPointerState& p1, const SpinPointerState& p2);

using PointerState = std::variant<GaussianPointerState, SpinPointerState>;

Complex overlap(const PointerState& p1, const PointerState& p2);

/// A probabilistic mixture of pointer states. Probabilities must lie in
/// (0, 1] and sum to 1 within 1e-10.
struct PointerEnsemble {
    struct Component {
        double probability;
        PointerState state;
    };
    std::vector<Component> components;

    explicit PointerEnsemble(std::vector<Component> comps);
};

namespace detail {

/// Self- and cross-Gram sums of two equal-width states, accumulated in
/// extended precision. Bures angles between nearly identical states need the
/// determinant n1*n2 - |cross|^2, which cancels catastrophically in double.
struct GramSums {
    long double n1;
    long double n2;
    std::complex<long double> cross;
};

GramSums overlap_gram(const GaussianPointerState& p1, const GaussianPointerState& p2);

}  // namespace detail

}  // namespace weakval
