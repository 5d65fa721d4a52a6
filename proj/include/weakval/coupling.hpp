#pragma once

// Pointer evolution under the impulsive coupling H = g A B.
//
// The unitary exp(-i g eps A B) is applied exactly by spectral decomposition
// of A: diagonalize, evolve the pointer per eigenvalue, recombine with the
// selection amplitudes. For a Gaussian pointer B is the conjugate momentum P
// (eigenvalue a shifts the pointer by g*eps*a); for a spin pointer B is
// sigma_z (eigenvalue a multiplies the |up>/|down> amplitudes by
// exp(-+ i g eps a)).

#include <optional>
#include <variant>

#include "weakval/pointer.hpp"
#include "weakval/qstate.hpp"
#include "weakval/tsv.hpp"

namespace weakval {

// Selection branches with post-selection probability below this underflow.
constexpr double kProbabilityFloor = 1e-14;

struct GaussianKind {
    double width;  // Delta
};
struct SpinKind {};
using PointerKind = std::variant<GaussianKind, SpinKind>;

struct CouplingSpec {
    Operator observable;  // A; must be Hermitian
    double g;
    double epsilon;  // >= 0; epsilon = 0 returns the initial pointer everywhere
    PointerKind pointer_kind;

    CouplingSpec(Operator observable_, double g_, double epsilon_, PointerKind kind_);

    double g_epsilon() const { return g * epsilon; }
};

struct CouplingOutcome {
    std::variant<GaussianPointerState, SpinPointerState, PointerEnsemble> pointer;
    // Present iff a post-selection occurred; the squared norm of the
    // unnormalized projected state (equals |<phi|psi>|^2 at epsilon = 0).
    std::optional<double> postselect_probability;
};

/// One merged eigenvalue of a Hermitian observable with its projector.
struct EigenBranch {
    double value;
    Matrix projector;
};

/// Eigendecomposition with degenerate eigenvalues merged.
std::vector<EigenBranch> hermitian_eigen_branches(const Operator& a);

/// Pointer after coupling to a system with (possibly hypothetical, possibly
/// complex) eigenvalue a. Complex a makes the evolution non-Hermitian; the
/// result is renormalized.
CouplingOutcome couple_eigenvalue(Complex a, const CouplingSpec& spec, const PointerState& p0);

/// Pointer mixture after coupling to a pre-selected-only system: one
/// component per eigenvalue a_k of A with probability |<a_k|psi>|^2
/// (components below 1e-14 dropped, degenerate eigenvalues merged).
CouplingOutcome couple_preselected(const Ket& psi, const CouplingSpec& spec, const PointerState& p0);

/// Normalized pointer state  N <phi| exp(-i g eps A B) |psi> |p0>  after
/// post-selection, with its probability. Throws if the probability
/// underflows.
CouplingOutcome couple_postselected(const PureTSV& tsv, const CouplingSpec& spec, const PointerState& p0);

/// Same for a generalized two-state vector. The probability follows the
/// composite-system convention: pre state sum_k alpha_k |psi_k>|k> and post
/// state sum_k |phi_k>|k> / sqrt(N), both unit-normalized.
CouplingOutcome couple_postselected(const GeneralizedTSV& tsv, const CouplingSpec& spec,
                                    const PointerState& p0);

/// Building block shared by the post-selected couplings: the normalized
/// pointer branch  <post| exp(-i g eps A B) |pre> |p0>  together with its
/// squared-norm weight, or nullopt when the branch is negligible. No overlap
/// floor is applied, so branches with orthogonal selections are legal.
std::optional<std::pair<PointerState, double>> postselected_branch(const Ket& post, const Ket& pre,
                                                                   const CouplingSpec& spec,
                                                                   const PointerState& p0);

/// The shift-rule prediction Phi(Q) = Phi_0(Q - g eps A_w): the initial
/// pointer shifted by g*eps*A_w (renormalized for complex A_w).
GaussianPointerState shift_rule_prediction(const GaussianPointerState& p0, Complex a_w,
                                           double g_epsilon);

/// Finite-strength spin-spin measurement: spin-1 system pre-selected in
/// (|-1> + |0>)/sqrt(2), coupled to a spin pointer |up_x> through S_z sigma_z
/// for a duration with integrated strength g*tau, then post-selected on
/// (100|-1> - 101|0>)/sqrt(20201) (the weak-value-100 selection).
struct FiniteStrengthResult {
    Ket joint_state;               // system (x) pointer spin just before post-selection
    SpinPointerState pointer_after;
    double rotation_angle;         // theta: half the relative |up>/|down> phase, in (-pi/2, pi/2]
    double pointer_reading;        // theta / (g tau); eigenvalue-calibrated readout
    Complex weak_value;            // from the reduced forward density matrix and the post selection
    double postselect_probability;
};

/// Builds the scenario by generic unitary evolution and projection. At
/// g_tau = 0 the pointer reading is defined by its analytic limit (the weak
/// value 100).
FiniteStrengthResult finite_strength_scenario(double g_tau);

/// Closed forms for the same scenario, kept as an independent route:
/// pointer [(100 e^{i g tau} - 101)|up> + (100 e^{-i g tau} - 101)|down>] /
/// sqrt(40402 - 40400 cos(g tau)) and weak value
/// 201/(40402 - 40400 cos(g tau)) - 1/2.
SpinPointerState finite_strength_pointer_closed_form(double g_tau);
Complex finite_strength_weak_value_closed_form(double g_tau);

/// The selection kets of the finite-strength scenario.
Ket finite_strength_preselection();
Ket finite_strength_postselection();

}  // namespace weakval
