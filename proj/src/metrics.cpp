#include "weakval/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weakval {

namespace {

double angle_from_sin_cos(double s, double c) {
    return std::atan2(std::max(0.0, s), std::max(0.0, c));
}

// sin^2 of the Bures angle between two kets, accurate near zero: norm of the
// component of p2 orthogonal to p1.
double ket_sin2(const Ket& a, const Ket& b) {
    const Ket an = a.normalized();
    const Ket bn = b.normalized();
    const Complex c = inner(an, bn);
    const Vector residual = bn.amplitudes - c * an.amplitudes;
    return residual.squaredNorm();
}

double ket_bures(const Ket& a, const Ket& b) {
    const double s2 = ket_sin2(a, b);
    const double c = std::abs(inner(a.normalized(), b.normalized()));
    return angle_from_sin_cos(std::sqrt(std::min(1.0, s2)), c);
}

// sin^2 between two equal-width Gaussian superpositions via the extended
// precision Gram determinant (n1*n2 - |cross|^2) / (n1*n2).
double gaussian_sin2(const GaussianPointerState& a, const GaussianPointerState& b) {
    const detail::GramSums g = detail::overlap_gram(a, b);
    if (g.n1 <= 0.0L || g.n2 <= 0.0L) {
        throw std::invalid_argument("bures_pure: state with vanishing norm");
    }
    const long double det = g.n1 * g.n2 - (g.cross * std::conj(g.cross)).real();
    const long double s2 = det / (g.n1 * g.n2);
    return static_cast<double>(std::max(0.0L, std::min(1.0L, s2)));
}

}  // namespace

double bures_pure(const Ket& p1, const Ket& p2) {
    if (p1.dim() != p2.dim()) {
        throw std::invalid_argument("bures_pure: dimension mismatch");
    }
    return ket_bures(p1, p2);
}

double bures_pure(const GaussianPointerState& p1, const GaussianPointerState& p2) {
    const double s2 = gaussian_sin2(p1, p2);
    return angle_from_sin_cos(std::sqrt(s2), std::sqrt(1.0 - s2));
}

double bures_pure(const SpinPointerState& p1, const SpinPointerState& p2) {
    return ket_bures(p1.qubit, p2.qubit);
}

double bures_pure(const PointerState& p1, const PointerState& p2) {
    if (p1.index() != p2.index()) {
        throw std::invalid_argument("bures_pure: pointer kinds differ");
    }
    if (std::holds_alternative<GaussianPointerState>(p1)) {
        return bures_pure(std::get<GaussianPointerState>(p1), std::get<GaussianPointerState>(p2));
    }
    return bures_pure(std::get<SpinPointerState>(p1), std::get<SpinPointerState>(p2));
}

namespace {

double pure_mixed_impl(const PointerState& p, const PointerEnsemble& ens) {
    // 1 - <p|rho|p> accumulated as sum_k prob_k * sin^2(p, comp_k) so nearly
    // identical components keep their precision.
    long double deficit = 0.0L;
    for (const auto& comp : ens.components) {
        if (comp.state.index() != p.index()) {
            throw std::invalid_argument("bures_pure_mixed: pointer kinds differ");
        }
        double s2;
        if (std::holds_alternative<GaussianPointerState>(p)) {
            s2 = gaussian_sin2(std::get<GaussianPointerState>(p),
                               std::get<GaussianPointerState>(comp.state));
        } else {
            s2 = ket_sin2(std::get<SpinPointerState>(p).qubit,
                          std::get<SpinPointerState>(comp.state).qubit);
        }
        deficit += static_cast<long double>(comp.probability) * s2;
    }
    const double s2 = static_cast<double>(std::max(0.0L, std::min(1.0L, deficit)));
    return angle_from_sin_cos(std::sqrt(s2), std::sqrt(1.0 - s2));
}

}  // namespace

double bures_pure_mixed(const GaussianPointerState& p, const PointerEnsemble& ens) {
    return pure_mixed_impl(PointerState(p), ens);
}

double bures_pure_mixed(const SpinPointerState& p, const PointerEnsemble& ens) {
    return pure_mixed_impl(PointerState(p), ens);
}

double bures_pure_mixed(const PointerState& p, const PointerEnsemble& ens) {
    return pure_mixed_impl(p, ens);
}

double visibility_from_bures(double bures_angle) {
    if (bures_angle < -1e-12 || bures_angle > std::numbers::pi / 2 + 1e-12) {
        throw std::invalid_argument("visibility_from_bures: angle outside [0, pi/2]");
    }
    return std::cos(std::clamp(bures_angle, 0.0, std::numbers::pi / 2));
}

double bures_from_visibility(double visibility) {
    if (visibility < -1e-12 || visibility > 1.0 + 1e-12) {
        throw std::invalid_argument("bures_from_visibility: visibility outside [0, 1]");
    }
    return std::acos(std::clamp(visibility, 0.0, 1.0));
}

double predicted_bures_weak(Complex a2_w, Complex a, double b2, double b4, double g_epsilon) {
    const double variance = b4 - b2 * b2;
    if (variance < -1e-12) {
        throw std::invalid_argument("predicted_bures_weak: inconsistent moments (b4 < b2^2)");
    }
    if (variance <= 0.0) return 0.0;
    return std::abs(a2_w - a * a) * std::sqrt(variance) * g_epsilon * g_epsilon / 2.0;
}

double predicted_bures_expectation(double delta_a, double delta_b, double g_epsilon) {
    if (delta_a < 0.0 || delta_b < 0.0) {
        throw std::invalid_argument("predicted_bures_expectation: uncertainties must be non-negative");
    }
    return delta_a * delta_b * g_epsilon;
}

ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& samples) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& [eps, dist] : samples) {
        if (eps > 0.0 && dist > kNoiseFloor) {
            logs.emplace_back(std::log(eps), std::log(dist));
        }
    }
    const int n = static_cast<int>(logs.size());
    if (n < 3) {
        throw std::invalid_argument("fit_scaling_exponent: fewer than 3 samples above the noise floor");
    }

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : logs) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_scaling_exponent: all epsilons identical");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : logs) {
        const double r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    const double r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return ScalingFit{slope, intercept, r2, n};
}

ImperfectionModel::ImperfectionModel(double xi_) : xi(xi_) {
    if (xi < 0.0 || xi >= std::numbers::pi / 2) {
        throw std::invalid_argument("ImperfectionModel: xi must lie in [0, pi/2)");
    }
}

double apply_imperfection(const ImperfectionModel& model, double d_ideal) {
    if (d_ideal < 0.0 || d_ideal >= std::numbers::pi / 2) {
        throw std::invalid_argument("apply_imperfection: D must lie in [0, pi/2)");
    }
    return std::hypot(model.xi, d_ideal);
}

}  // namespace weakval
