#pragma once

// Pre- and post-selected system descriptions and their weak values.
//
// Post-selections are stored as kets; the corresponding bra is the conjugate
// transpose. Weak values are returned as full complex numbers everywhere;
// callers decide whether to take real parts.

#include <vector>

#include "weakval/qstate.hpp"

namespace weakval {

// Below this overlap magnitude the weak value diverges; operations fail
// loudly instead of returning huge values.
constexpr double kOverlapFloor = 1e-12;

/// A pure two-state vector: post-selected ket |phi> (bra is its conjugate)
/// and pre-selected ket |psi>. Kets are normalized at construction.
struct PureTSV {
    Ket post;
    Ket pre;

    PureTSV(Ket post_, Ket pre_);
};

/// A generalized two-state vector: a complex-weighted sum of bra-ket pairs
/// sum_k alpha_k <phi_k| |psi_k>. Term kets are normalized at construction;
/// the weights alpha_k are stored as given.
struct GeneralizedTSV {
    struct Term {
        Complex alpha;
        Ket post;
        Ket pre;
    };
    std::vector<Term> terms;

    explicit GeneralizedTSV(std::vector<Term> terms_);
};

/// A mixed two-state vector (rho_post, rho_pre).
struct MixedTSV {
    DensityMatrix rho_pre;
    DensityMatrix rho_post;

    MixedTSV(DensityMatrix rho_pre_, DensityMatrix rho_post_);
};

/// <phi|A|psi> / <phi|psi>. May be any complex number, including values far
/// outside the spectrum of A. Throws when the selection overlap is below the
/// floor (undefined weak value).
Complex weak_value(const PureTSV& tsv, const Operator& a);

/// sum_k alpha_k <phi_k|A|psi_k> / sum_k alpha_k <phi_k|psi_k>.
Complex weak_value_generalized(const GeneralizedTSV& tsv, const Operator& a);

/// tr(rho_post A rho_pre) / tr(rho_post rho_pre).
Complex weak_value_mixed(const MixedTSV& tsv, const Operator& a);

/// Weak value of A^n (not (A_w)^n; the two differ in general).
Complex weak_value_moment(const PureTSV& tsv, const Operator& a, int n);

}  // namespace weakval
