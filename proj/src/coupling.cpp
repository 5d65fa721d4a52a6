#include "weakval/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace weakval {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_kind(const CouplingSpec& spec, const PointerState& p0) {
    if (std::holds_alternative<GaussianKind>(spec.pointer_kind)) {
        if (!std::holds_alternative<GaussianPointerState>(p0)) {
            throw std::invalid_argument("coupling: spec expects a Gaussian pointer");
        }
        if (std::get<GaussianPointerState>(p0).width != std::get<GaussianKind>(spec.pointer_kind).width) {
            throw std::invalid_argument("coupling: pointer width does not match the spec");
        }
    } else if (!std::holds_alternative<SpinPointerState>(p0)) {
        throw std::invalid_argument("coupling: spec expects a spin pointer");
    }
}

// e^{-i g eps a sigma_z} on an (unnormalized) qubit vector; non-unitary for
// complex a.
Vector evolve_spin_vector(const Vector& v, Complex a, double g_epsilon) {
    Vector out(2);
    out(0) = v(0) * std::exp(-kI * (g_epsilon * a));
    out(1) = v(1) * std::exp(kI * (g_epsilon * a));
    return out;
}

}  // namespace

CouplingSpec::CouplingSpec(Operator observable_, double g_, double epsilon_, PointerKind kind_)
    : observable(std::move(observable_)), g(g_), epsilon(epsilon_), pointer_kind(kind_) {
    if (!observable.hermitian) {
        throw std::invalid_argument("CouplingSpec: observable must be Hermitian");
    }
    if (epsilon < 0.0) {
        throw std::invalid_argument("CouplingSpec: epsilon must be >= 0");
    }
    if (std::holds_alternative<GaussianKind>(pointer_kind) &&
        std::get<GaussianKind>(pointer_kind).width <= 0.0) {
        throw std::invalid_argument("CouplingSpec: Gaussian pointer width must be positive");
    }
}

std::vector<EigenBranch> hermitian_eigen_branches(const Operator& a) {
    if (!a.hermitian) {
        throw std::invalid_argument("hermitian_eigen_branches: observable must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix);
    const Eigen::VectorXd vals = solver.eigenvalues();
    const Matrix vecs = solver.eigenvectors();
    const double tol = 1e-8 * (1.0 + vals.cwiseAbs().maxCoeff());

    std::vector<EigenBranch> branches;
    int i = 0;
    while (i < vals.size()) {
        int j = i;
        while (j + 1 < vals.size() && vals(j + 1) - vals(i) <= tol) ++j;
        Matrix proj = Matrix::Zero(a.dim(), a.dim());
        double mean = 0.0;
        for (int k = i; k <= j; ++k) {
            proj += vecs.col(k) * vecs.col(k).adjoint();
            mean += vals(k);
        }
        branches.push_back({mean / (j - i + 1), std::move(proj)});
        i = j + 1;
    }
    return branches;
}

CouplingOutcome couple_eigenvalue(Complex a, const CouplingSpec& spec, const PointerState& p0) {
    check_kind(spec, p0);
    const double ge = spec.g_epsilon();
    if (std::holds_alternative<GaussianPointerState>(p0)) {
        return {shift(std::get<GaussianPointerState>(p0), ge * a), std::nullopt};
    }
    const Vector v = evolve_spin_vector(std::get<SpinPointerState>(p0).qubit.amplitudes, a, ge);
    return {SpinPointerState(Ket(v)), std::nullopt};
}

CouplingOutcome couple_preselected(const Ket& psi, const CouplingSpec& spec, const PointerState& p0) {
    check_kind(spec, p0);
    if (psi.dim() != spec.observable.dim()) {
        throw std::invalid_argument("couple_preselected: state dimension mismatch");
    }
    const Ket psin = psi.normalized();
    const double ge = spec.g_epsilon();

    std::vector<PointerEnsemble::Component> comps;
    for (const auto& branch : hermitian_eigen_branches(spec.observable)) {
        const double prob = (branch.projector * psin.amplitudes).squaredNorm();
        if (prob < kProbabilityFloor) continue;
        PointerState evolved = std::holds_alternative<GaussianPointerState>(p0)
            ? PointerState(shift(std::get<GaussianPointerState>(p0), ge * branch.value))
            : PointerState(SpinPointerState(Ket(evolve_spin_vector(
                  std::get<SpinPointerState>(p0).qubit.amplitudes, branch.value, ge))));
        comps.push_back({prob, std::move(evolved)});
    }
    return {PointerEnsemble(std::move(comps)), std::nullopt};
}

std::optional<std::pair<PointerState, double>> postselected_branch(const Ket& post, const Ket& pre,
                                                                   const CouplingSpec& spec,
                                                                   const PointerState& p0) {
    check_kind(spec, p0);
    const Ket postn = post.normalized();
    const Ket pren = pre.normalized();
    const double ge = spec.g_epsilon();
    const auto branches = hermitian_eigen_branches(spec.observable);

    if (std::holds_alternative<GaussianPointerState>(p0)) {
        const GaussianPointerState base = normalize(std::get<GaussianPointerState>(p0));
        std::vector<std::pair<Complex, GaussianPointerState>> parts;
        for (const auto& b : branches) {
            const Complex c = postn.amplitudes.dot(b.projector * pren.amplitudes);
            if (std::abs(c) < kTermPruneTol) continue;
            parts.emplace_back(c, shift(base, ge * b.value));
        }
        if (parts.empty()) return std::nullopt;
        const GaussianPointerState combined = linear_combination(parts);
        const double prob = overlap(combined, combined).real();
        if (prob < 1e-28) return std::nullopt;
        return std::make_pair(PointerState(normalize(combined)), prob);
    }

    const Vector& q0 = std::get<SpinPointerState>(p0).qubit.amplitudes;
    Vector combined = Vector::Zero(2);
    for (const auto& b : branches) {
        const Complex c = postn.amplitudes.dot(b.projector * pren.amplitudes);
        combined += c * evolve_spin_vector(q0, b.value, ge);
    }
    const double prob = combined.squaredNorm();
    if (prob < 1e-28) return std::nullopt;
    return std::make_pair(PointerState(SpinPointerState(Ket(combined))), prob);
}

CouplingOutcome couple_postselected(const PureTSV& tsv, const CouplingSpec& spec, const PointerState& p0) {
    auto branch = postselected_branch(tsv.post, tsv.pre, spec, p0);
    if (!branch || branch->second < kProbabilityFloor) {
        throw std::invalid_argument("couple_postselected: post-selection probability underflow");
    }
    return {std::visit([](auto s) { return std::variant<GaussianPointerState, SpinPointerState, PointerEnsemble>(std::move(s)); },
                       branch->first),
            branch->second};
}

CouplingOutcome couple_postselected(const GeneralizedTSV& tsv, const CouplingSpec& spec,
                                    const PointerState& p0) {
    check_kind(spec, p0);
    const double ge = spec.g_epsilon();
    const auto branches = hermitian_eigen_branches(spec.observable);
    const auto n_terms = static_cast<double>(tsv.terms.size());
    double alpha_norm2 = 0.0;
    for (const auto& t : tsv.terms) alpha_norm2 += std::norm(t.alpha);

    // sum_k alpha_k <phi_k| e^{-i g eps A B} |psi_k> |p0>, then normalize by
    // the composite pre/post norms for the probability.
    if (std::holds_alternative<GaussianPointerState>(p0)) {
        const GaussianPointerState base = normalize(std::get<GaussianPointerState>(p0));
        std::vector<std::pair<Complex, GaussianPointerState>> parts;
        for (const auto& t : tsv.terms) {
            for (const auto& b : branches) {
                const Complex c = t.alpha * t.post.amplitudes.dot(b.projector * t.pre.amplitudes);
                if (std::abs(c) < kTermPruneTol) continue;
                parts.emplace_back(c, shift(base, ge * b.value));
            }
        }
        if (parts.empty()) {
            throw std::invalid_argument("couple_postselected: post-selection probability underflow");
        }
        const GaussianPointerState combined = linear_combination(parts);
        const double prob = overlap(combined, combined).real() / (n_terms * alpha_norm2);
        if (prob < kProbabilityFloor) {
            throw std::invalid_argument("couple_postselected: post-selection probability underflow");
        }
        return {normalize(combined), prob};
    }

    const Vector& q0 = std::get<SpinPointerState>(p0).qubit.amplitudes;
    Vector combined = Vector::Zero(2);
    for (const auto& t : tsv.terms) {
        for (const auto& b : branches) {
            const Complex c = t.alpha * t.post.amplitudes.dot(b.projector * t.pre.amplitudes);
            combined += c * evolve_spin_vector(q0, b.value, ge);
        }
    }
    const double prob = combined.squaredNorm() / (n_terms * alpha_norm2);
    if (prob < kProbabilityFloor) {
        throw std::invalid_argument("couple_postselected: post-selection probability underflow");
    }
    return {SpinPointerState(Ket(combined)), prob};
}

GaussianPointerState shift_rule_prediction(const GaussianPointerState& p0, Complex a_w,
                                           double g_epsilon) {
    GaussianPointerState shifted = shift(p0, g_epsilon * a_w);
    return shifted.normalized ? shifted : normalize(shifted);
}

// Scenario constants: spin-1 system, weak-value-100 selections.
Ket finite_strength_preselection() {
    Vector v(3);
    v << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);  // (|0> + |-1>)/sqrt(2)
    return Ket(std::move(v));
}

Ket finite_strength_postselection() {
    Vector v(3);
    v << 0.0, -101.0, 100.0;  // (100|-1> - 101|0>) / sqrt(20201)
    return Ket(std::move(v)).normalized();
}

FiniteStrengthResult finite_strength_scenario(double g_tau) {
    if (g_tau < 0.0) {
        throw std::invalid_argument("finite_strength_scenario: g_tau must be >= 0");
    }
    const Operator sz = spin_z_operator(1.0);
    Matrix sigma_z = Matrix::Zero(2, 2);
    sigma_z(0, 0) = 1.0;
    sigma_z(1, 1) = -1.0;
    const Operator coupling = tensor(sz, Operator(std::move(sigma_z), true));

    // exp(-i g_tau S_z (x) sigma_z) via spectral decomposition.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(coupling.matrix);
    Matrix evolution = Matrix::Zero(6, 6);
    for (int k = 0; k < 6; ++k) {
        evolution += std::exp(-kI * (g_tau * solver.eigenvalues()(k))) * solver.eigenvectors().col(k) *
                     solver.eigenvectors().col(k).adjoint();
    }

    const Ket pre = finite_strength_preselection();
    const Ket post = finite_strength_postselection();
    const Ket joint0 = tensor(pre, Ket(spin_pointer_initial().qubit));
    const Ket joint(Vector(evolution * joint0.amplitudes));

    // Project the system on <post| (x) I.
    Vector ptr = Vector::Zero(2);
    for (int j = 0; j < 3; ++j) {
        for (int m = 0; m < 2; ++m) {
            ptr(m) += std::conj(post.amplitudes(j)) * joint.amplitudes(2 * j + m);
        }
    }
    const double prob = ptr.squaredNorm();
    if (prob < kProbabilityFloor) {
        throw std::invalid_argument("finite_strength_scenario: post-selection probability vanishes");
    }
    const SpinPointerState pointer_after{Ket(ptr)};

    // theta is half the relative phase between |up> and |down>, so the
    // readout theta/(g tau) shows eigenvalues of A directly.
    const Complex up = pointer_after.qubit.amplitudes(0);
    const Complex down = pointer_after.qubit.amplitudes(1);
    const double theta = 0.5 * std::arg(down * std::conj(up));
    const double reading =
        g_tau > 0.0 ? theta / g_tau : finite_strength_weak_value_closed_form(0.0).real();

    const DensityMatrix rho_pre = partial_trace(pure_density(joint), {3, 2}, 0);
    const Complex a_w = weak_value_mixed(MixedTSV(rho_pre, pure_density(post)), sz);

    return FiniteStrengthResult{joint, pointer_after, theta, reading, a_w, prob};
}

SpinPointerState finite_strength_pointer_closed_form(double g_tau) {
    const Complex up = 100.0 * std::exp(kI * g_tau) - 101.0;
    const Complex down = 100.0 * std::exp(-kI * g_tau) - 101.0;
    Vector v(2);
    v << up, down;
    return SpinPointerState(Ket(v / std::sqrt(40402.0 - 40400.0 * std::cos(g_tau))));
}

Complex finite_strength_weak_value_closed_form(double g_tau) {
    return Complex(201.0 / (40402.0 - 40400.0 * std::cos(g_tau)) - 0.5, 0.0);
}

}  // namespace weakval
