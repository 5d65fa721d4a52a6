#pragma once

// The three-ancilla preparation of a genuinely mixed two-state vector and its
// weak-value oracle, plus the verification-measurement trick that turns a
// finite-strength coupling record into a generalized two-state vector.
//
// Tensor ordering throughout is (S, A1) for system states, (A2, A3) for the
// entangled ancilla pair and (A1, A3) for the post-selection residue, with
// the first factor most significant, matching tensor().

#include "weakval/coupling.hpp"
#include "weakval/pointer.hpp"
#include "weakval/qstate.hpp"
#include "weakval/tsv.hpp"

namespace weakval {

/// Specification of the mixed-selection circuit: pre mixture {p_k, |psi_k>},
/// post mixture {p~_i, |phi_i>}, and the dimension N of the entangled ancilla
/// pair (N >= number of post states). Kets are normalized at construction;
/// probability vectors must each sum to 1 within 1e-10.
struct MixedTSVCircuit {
    std::vector<double> p;
    std::vector<Ket> psi;
    std::vector<double> p_tilde;
    std::vector<Ket> phi;
    int ancilla_dim;

    MixedTSVCircuit(std::vector<double> p_, std::vector<Ket> psi_, std::vector<double> p_tilde_,
                    std::vector<Ket> phi_, int ancilla_dim_);

    int system_dim() const { return psi.front().dim(); }
};

/// The explicit states of the protocol:
///  - pre_entangled:  |Psi>_{S,A1}  = sum_k sqrt(p_k) |psi_k>|k>
///  - bell_pair:      |Xi>_{A2,A3}  = sum_i |i>|i> / sqrt(N)
///  - upsilon:        |Y>_{A1,A3}   = N' sum_{i,k} sqrt(p~_i p_k) <phi_i|psi_k> |k>|i>
///  - omega:          the backward evolving state of (S, A1), stored as the
///                    ket whose conjugate is the bra:
///                    N'' sum_{i,k} p~_i sqrt(p_k) <phi_i|psi_k> |phi_i>|k>
/// upsilon and omega are unit-normalized. Throws when the pre and post
/// supports are orthogonal (vanishing upsilon).
struct CircuitStates {
    Ket pre_entangled;
    Ket bell_pair;
    Ket upsilon;
    Ket omega;
};

CircuitStates build_circuit_states(const MixedTSVCircuit& c);

/// The density-matrix pair (rho_pre, rho_post) the circuit prepares.
MixedTSV mixed_tsv_from_circuit(const MixedTSVCircuit& c);

/// Weak value of A through the ancilla construction: (A (x) I)_w of the pure
/// two-state vector (omega, pre_entangled). Agrees with weak_value_mixed of
/// the circuit's density-matrix pair.
Complex mixed_weak_value_via_ancillas(const MixedTSVCircuit& c, const Operator& a);

/// Pointer state after coupling to the mixed two-state vector, realized
/// operationally: couple the pointer to (S, A1) through A (x) I between
/// preparation and post-selection, then average over the post-selected
/// branch. The result is a mixture with one component per (post i, pre k)
/// branch.
PointerEnsemble couple_mixed_tsv(const MixedTSVCircuit& c, const CouplingSpec& spec,
                                 const PointerState& p0);

/// Expands a composite pure two-state vector on system (x) ancilla into the
/// system-level generalized two-state vector: terms alpha_k <w_k| |v_k> with
/// |v_k> = (I (x) <k|) |pre>, |w_k> = (I (x) <k|) |post| and alpha_k the
/// product of the slice norms. Slices with negligible norm are dropped.
GeneralizedTSV generalized_from_composite(const Ket& post, const Ket& pre, int system_dim,
                                          int ancilla_dim);

/// The naive (and generally wrong) reduced-matrix pair of a generalized
/// two-state vector: rho_post = sum_k |phi_k><phi_k| / N and
/// rho_pre = sum_k |alpha_k|^2 |psi_k><psi_k|, normalized to unit trace.
MixedTSV reduced_mixed_tsv(const GeneralizedTSV& tsv);

/// The verification-measurement trick for the finite-strength scenario:
/// treating a verification of the final pointer state as the composite
/// post-selection gives a pure two-state vector for system + pointer, whose
/// expansion over the pointer basis is the system's generalized two-state
/// vector at any intermediate time.
GeneralizedTSV derive_generalized_tsv(const FiniteStrengthResult& scenario);

}  // namespace weakval
