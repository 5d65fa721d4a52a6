#include "weakval/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weakval {

namespace {

// Closed-form overlap of two unit-height basis Gaussians of equal width.
Complex pair_kernel(Complex c1, Complex c2, double width) {
    const Complex d = std::conj(c1) - c2;
    return std::exp(-d * d / (8.0 * width * width));
}

std::complex<long double> pair_kernel_l(std::complex<long double> c1, std::complex<long double> c2,
                                        long double width) {
    const std::complex<long double> d = std::conj(c1) - c2;
    return std::exp(-d * d / (8.0L * width * width));
}

void check_same_width(const GaussianPointerState& p1, const GaussianPointerState& p2) {
    if (p1.width != p2.width) {
        throw std::invalid_argument("overlap: pointer widths differ");
    }
}

}  // namespace

GaussianPointerState::GaussianPointerState(double width_, std::vector<GaussianTerm> terms_,
                                           bool normalized_)
    : width(width_), terms(std::move(terms_)), normalized(normalized_) {
    if (width <= 0.0) {
        throw std::invalid_argument("GaussianPointerState: width must be positive");
    }
    bool any = false;
    for (const auto& t : terms) {
        if (std::abs(t.amplitude) > 0.0) any = true;
    }
    if (!any) {
        throw std::invalid_argument("GaussianPointerState: needs at least one nonzero term");
    }
}

GaussianPointerState gaussian_initial(double width) {
    return GaussianPointerState(width, {{Complex(1.0, 0.0), Complex(0.0, 0.0)}}, true);
}

Complex overlap(const GaussianPointerState& p1, const GaussianPointerState& p2) {
    check_same_width(p1, p2);
    Complex sum = 0.0;
    for (const auto& a : p1.terms) {
        for (const auto& b : p2.terms) {
            sum += std::conj(a.amplitude) * b.amplitude * pair_kernel(a.center, b.center, p1.width);
        }
    }
    return sum;
}

detail::GramSums detail::overlap_gram(const GaussianPointerState& p1, const GaussianPointerState& p2) {
    check_same_width(p1, p2);
    const long double w = p1.width;
    auto lift = [](Complex z) {
        return std::complex<long double>(static_cast<long double>(z.real()),
                                         static_cast<long double>(z.imag()));
    };
    GramSums out{0.0L, 0.0L, {0.0L, 0.0L}};
    auto self = [&](const GaussianPointerState& p) {
        std::complex<long double> s = 0.0L;
        for (const auto& a : p.terms) {
            for (const auto& b : p.terms) {
                s += std::conj(lift(a.amplitude)) * lift(b.amplitude) *
                     pair_kernel_l(lift(a.center), lift(b.center), w);
            }
        }
        return s.real();
    };
    out.n1 = self(p1);
    out.n2 = self(p2);
    for (const auto& a : p1.terms) {
        for (const auto& b : p2.terms) {
            out.cross += std::conj(lift(a.amplitude)) * lift(b.amplitude) *
                         pair_kernel_l(lift(a.center), lift(b.center), w);
        }
    }
    return out;
}

GaussianPointerState normalize(const GaussianPointerState& p) {
    const double n2 = overlap(p, p).real();
    if (n2 < 1e-28) {
        throw std::invalid_argument("normalize: state has vanishing norm");
    }
    const double scale = 1.0 / std::sqrt(n2);
    std::vector<GaussianTerm> terms = p.terms;
    for (auto& t : terms) t.amplitude *= scale;
    return GaussianPointerState(p.width, std::move(terms), true);
}

GaussianPointerState shift(const GaussianPointerState& p, Complex c) {
    std::vector<GaussianTerm> terms = p.terms;
    for (auto& t : terms) t.center += c;
    if (c.imag() == 0.0) {
        return GaussianPointerState(p.width, std::move(terms), p.normalized);
    }
    return normalize(GaussianPointerState(p.width, std::move(terms), false));
}

GaussianPointerState linear_combination(const std::vector<std::pair<Complex, GaussianPointerState>>& parts) {
    if (parts.empty()) {
        throw std::invalid_argument("linear_combination: empty part list");
    }
    const double width = parts.front().second.width;
    std::vector<GaussianTerm> terms;
    for (const auto& [coeff, state] : parts) {
        if (state.width != width) {
            throw std::invalid_argument("linear_combination: pointer widths differ");
        }
        for (const auto& t : state.terms) {
            const Complex amp = coeff * t.amplitude;
            auto match = std::find_if(terms.begin(), terms.end(), [&](const GaussianTerm& u) {
                return std::abs(u.center - t.center) <= 1e-15 * (1.0 + std::abs(t.center));
            });
            if (match != terms.end()) {
                match->amplitude += amp;
            } else {
                terms.push_back({amp, t.center});
            }
        }
    }
    std::erase_if(terms, [](const GaussianTerm& t) { return std::abs(t.amplitude) < kTermPruneTol; });
    if (terms.empty()) {
        throw std::invalid_argument("linear_combination: all terms cancelled");
    }
    return GaussianPointerState(width, std::move(terms), false);
}

double position_mean(const GaussianPointerState& p) {
    Complex num = 0.0;
    Complex den = 0.0;
    for (const auto& a : p.terms) {
        for (const auto& b : p.terms) {
            const Complex k = std::conj(a.amplitude) * b.amplitude * pair_kernel(a.center, b.center, p.width);
            den += k;
            num += k * 0.5 * (std::conj(a.center) + b.center);
        }
    }
    if (std::abs(den) < 1e-28) {
        throw std::invalid_argument("position_mean: state has vanishing norm");
    }
    return (num / den).real();
}

double momentum_second_moment(double width) {
    return 1.0 / (4.0 * width * width);
}

double momentum_fourth_moment(double width) {
    return 3.0 / (16.0 * width * width * width * width);
}

GridSpec default_grid(const GaussianPointerState& p1, const GaussianPointerState& p2) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto* p : {&p1, &p2}) {
        for (const auto& t : p->terms) {
            const double x = t.center.real();
            lo = first ? x : std::min(lo, x);
            hi = first ? x : std::max(hi, x);
            first = false;
        }
    }
    const double pad = 12.0 * p1.width;
    return GridSpec{lo - pad, hi + pad, 4096};
}

Complex quadrature_overlap(const GaussianPointerState& p1, const GaussianPointerState& p2,
                           const GridSpec& grid) {
    check_same_width(p1, p2);
    const GridSpec need = default_grid(p1, p2);
    // Tiny slack so a grid built from default_grid is always accepted.
    const double slack = 1e-9 * p1.width;
    if (grid.nodes < 4096 || grid.lo > need.lo + slack || grid.hi < need.hi - slack) {
        throw std::invalid_argument("quadrature_overlap: grid does not cover +-12*Delta around all centers or has too few nodes");
    }

    const double width = p1.width;
    const double norm = std::pow(2.0 * std::numbers::pi, -0.25) / std::sqrt(width);
    auto eval = [&](const GaussianPointerState& p, double q) {
        Complex v = 0.0;
        for (const auto& t : p.terms) {
            const Complex x = q - t.center;
            v += t.amplitude * norm * std::exp(-x * x / (4.0 * width * width));
        }
        return v;
    };

    const double h = (grid.hi - grid.lo) / (grid.nodes - 1);
    Complex sum = 0.0;
    for (int i = 0; i < grid.nodes; ++i) {
        const double q = grid.lo + h * i;
        const double w = (i == 0 || i == grid.nodes - 1) ? 0.5 : 1.0;
        sum += w * std::conj(eval(p1, q)) * eval(p2, q);
    }
    return sum * h;
}

SpinPointerState::SpinPointerState(Ket q) : qubit(std::move(q)) {
    if (qubit.dim() != 2) {
        throw std::invalid_argument("SpinPointerState: qubit must be 2-dimensional");
    }
    qubit = qubit.normalized();
}

SpinPointerState spin_pointer_initial() {
    Vector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return SpinPointerState(Ket(std::move(v)));
}

Complex overlap(const SpinPointerState& p1, const SpinPointerState& p2) {
    return inner(p1.qubit, p2.qubit);
}

Complex overlap(const PointerState& p1, const PointerState& p2) {
    if (p1.index() != p2.index()) {
        throw std::invalid_argument("overlap: pointer kinds differ");
    }
    if (std::holds_alternative<GaussianPointerState>(p1)) {
        return overlap(std::get<GaussianPointerState>(p1), std::get<GaussianPointerState>(p2));
    }
    return overlap(std::get<SpinPointerState>(p1), std::get<SpinPointerState>(p2));
}

PointerEnsemble::PointerEnsemble(std::vector<Component> comps) : components(std::move(comps)) {
    if (components.empty()) {
        throw std::invalid_argument("PointerEnsemble: needs at least one component");
    }
    double total = 0.0;
    for (const auto& c : components) {
        if (c.probability <= 0.0 || c.probability > 1.0 + kSelfOverlapTol) {
            throw std::invalid_argument("PointerEnsemble: probabilities must lie in (0, 1]");
        }
        total += c.probability;
    }
    if (std::abs(total - 1.0) > kSelfOverlapTol) {
        throw std::invalid_argument("PointerEnsemble: probabilities must sum to 1");
    }
}

}  // namespace weakval
