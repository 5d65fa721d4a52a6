#include "weakval/protocols.hpp"

#include <cmath>
#include <stdexcept>

namespace weakval {

MixedTSVCircuit::MixedTSVCircuit(std::vector<double> p_, std::vector<Ket> psi_,
                                 std::vector<double> p_tilde_, std::vector<Ket> phi_,
                                 int ancilla_dim_)
    : p(std::move(p_)), psi(std::move(psi_)), p_tilde(std::move(p_tilde_)), phi(std::move(phi_)),
      ancilla_dim(ancilla_dim_) {
    if (p.empty() || p.size() != psi.size() || p_tilde.empty() || p_tilde.size() != phi.size()) {
        throw std::invalid_argument("MixedTSVCircuit: probability/state counts do not match");
    }
    if (ancilla_dim < static_cast<int>(phi.size())) {
        throw std::invalid_argument("MixedTSVCircuit: ancilla dimension smaller than the number of post states");
    }
    auto check_probs = [](const std::vector<double>& probs, const char* which) {
        double total = 0.0;
        for (double q : probs) {
            if (q <= 0.0) throw std::invalid_argument(std::string("MixedTSVCircuit: ") + which + " probabilities must be positive");
            total += q;
        }
        if (std::abs(total - 1.0) > 1e-10) {
            throw std::invalid_argument(std::string("MixedTSVCircuit: ") + which + " probabilities must sum to 1");
        }
    };
    check_probs(p, "pre");
    check_probs(p_tilde, "post");
    const int d = psi.front().dim();
    for (auto& k : psi) {
        k = k.normalized();
        if (k.dim() != d) throw std::invalid_argument("MixedTSVCircuit: state dimensions differ");
    }
    for (auto& k : phi) {
        k = k.normalized();
        if (k.dim() != d) throw std::invalid_argument("MixedTSVCircuit: state dimensions differ");
    }
}

CircuitStates build_circuit_states(const MixedTSVCircuit& c) {
    const int d = c.system_dim();
    const int n_pre = static_cast<int>(c.psi.size());
    const int n_post = static_cast<int>(c.phi.size());
    const int big_n = c.ancilla_dim;

    Vector pre = Vector::Zero(static_cast<Eigen::Index>(d) * n_pre);
    for (int k = 0; k < n_pre; ++k) {
        for (int j = 0; j < d; ++j) {
            pre(static_cast<Eigen::Index>(j) * n_pre + k) = std::sqrt(c.p[k]) * c.psi[k].amplitudes(j);
        }
    }

    Vector bell = Vector::Zero(static_cast<Eigen::Index>(big_n) * big_n);
    for (int i = 0; i < big_n; ++i) {
        bell(static_cast<Eigen::Index>(i) * big_n + i) = 1.0 / std::sqrt(static_cast<double>(big_n));
    }

    // Post-selecting (S, A2) on sum_i sqrt(p~_i)|phi_i>|i> leaves (A1, A3) in
    // upsilon; evolving that backward through the entangled pair gives omega.
    Vector upsilon = Vector::Zero(static_cast<Eigen::Index>(n_pre) * big_n);
    Vector omega = Vector::Zero(static_cast<Eigen::Index>(d) * n_pre);
    for (int i = 0; i < n_post; ++i) {
        for (int k = 0; k < n_pre; ++k) {
            const Complex ov = inner(c.phi[i], c.psi[k]);  // <phi_i|psi_k>
            upsilon(static_cast<Eigen::Index>(k) * big_n + i) += std::sqrt(c.p_tilde[i] * c.p[k]) * ov;
            for (int j = 0; j < d; ++j) {
                omega(static_cast<Eigen::Index>(j) * n_pre + k) +=
                    c.p_tilde[i] * std::sqrt(c.p[k]) * ov * c.phi[i].amplitudes(j);
            }
        }
    }
    if (upsilon.norm() < 1e-12) {
        throw std::invalid_argument("build_circuit_states: pre and post supports are orthogonal (vanishing upsilon)");
    }
    return CircuitStates{Ket(std::move(pre)), Ket(std::move(bell)), Ket(upsilon).normalized(),
                         Ket(omega).normalized()};
}

MixedTSV mixed_tsv_from_circuit(const MixedTSVCircuit& c) {
    const int d = c.system_dim();
    Matrix rho_pre = Matrix::Zero(d, d);
    for (size_t k = 0; k < c.psi.size(); ++k) {
        rho_pre += c.p[k] * c.psi[k].amplitudes * c.psi[k].amplitudes.adjoint();
    }
    Matrix rho_post = Matrix::Zero(d, d);
    for (size_t i = 0; i < c.phi.size(); ++i) {
        rho_post += c.p_tilde[i] * c.phi[i].amplitudes * c.phi[i].amplitudes.adjoint();
    }
    return MixedTSV(DensityMatrix(std::move(rho_pre)), DensityMatrix(std::move(rho_post)));
}

Complex mixed_weak_value_via_ancillas(const MixedTSVCircuit& c, const Operator& a) {
    if (a.dim() != c.system_dim()) {
        throw std::invalid_argument("mixed_weak_value_via_ancillas: operator dimension mismatch");
    }
    const CircuitStates states = build_circuit_states(c);
    const PureTSV composite(states.omega, states.pre_entangled);
    return weak_value(composite, tensor(a, identity_operator(static_cast<int>(c.psi.size()))));
}

PointerEnsemble couple_mixed_tsv(const MixedTSVCircuit& c, const CouplingSpec& spec,
                                 const PointerState& p0) {
    std::vector<PointerEnsemble::Component> comps;
    double total = 0.0;
    for (size_t i = 0; i < c.phi.size(); ++i) {
        for (size_t k = 0; k < c.psi.size(); ++k) {
            auto branch = postselected_branch(c.phi[i], c.psi[k], spec, p0);
            if (!branch) continue;
            const double weight = c.p_tilde[i] * c.p[k] * branch->second;
            if (weight < kProbabilityFloor) continue;
            comps.push_back({weight, std::move(branch->first)});
            total += weight;
        }
    }
    if (comps.empty()) {
        throw std::invalid_argument("couple_mixed_tsv: post-selection probability vanishes");
    }
    for (auto& comp : comps) comp.probability /= total;
    return PointerEnsemble(std::move(comps));
}

GeneralizedTSV generalized_from_composite(const Ket& post, const Ket& pre, int system_dim,
                                          int ancilla_dim) {
    if (post.dim() != system_dim * ancilla_dim || pre.dim() != system_dim * ancilla_dim) {
        throw std::invalid_argument("generalized_from_composite: composite dimension mismatch");
    }
    std::vector<GeneralizedTSV::Term> terms;
    for (int k = 0; k < ancilla_dim; ++k) {
        Vector v(system_dim), w(system_dim);
        for (int j = 0; j < system_dim; ++j) {
            v(j) = pre.amplitudes(static_cast<Eigen::Index>(j) * ancilla_dim + k);
            w(j) = post.amplitudes(static_cast<Eigen::Index>(j) * ancilla_dim + k);
        }
        const double nv = v.norm();
        const double nw = w.norm();
        if (nv < 1e-12 || nw < 1e-12) continue;
        terms.push_back({Complex(nw * nv, 0.0), Ket(w / nw), Ket(v / nv)});
    }
    if (terms.empty()) {
        throw std::invalid_argument("generalized_from_composite: all ancilla slices vanish");
    }
    return GeneralizedTSV(std::move(terms));
}

MixedTSV reduced_mixed_tsv(const GeneralizedTSV& tsv) {
    const int d = tsv.terms.front().pre.dim();
    const double n = static_cast<double>(tsv.terms.size());
    Matrix rho_post = Matrix::Zero(d, d);
    Matrix rho_pre = Matrix::Zero(d, d);
    double alpha_norm2 = 0.0;
    for (const auto& t : tsv.terms) {
        rho_post += t.post.amplitudes * t.post.amplitudes.adjoint() / n;
        rho_pre += std::norm(t.alpha) * t.pre.amplitudes * t.pre.amplitudes.adjoint();
        alpha_norm2 += std::norm(t.alpha);
    }
    rho_pre /= alpha_norm2;
    return MixedTSV(DensityMatrix(std::move(rho_pre)), DensityMatrix(std::move(rho_post)));
}

GeneralizedTSV derive_generalized_tsv(const FiniteStrengthResult& scenario) {
    if (scenario.postselect_probability < kProbabilityFloor) {
        throw std::invalid_argument("derive_generalized_tsv: post-selection probability vanishes");
    }
    const Ket post_composite = tensor(finite_strength_postselection(), scenario.pointer_after.qubit);
    return generalized_from_composite(post_composite, scenario.joint_state, 3, 2);
}

}  // namespace weakval
