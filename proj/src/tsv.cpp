#include "weakval/tsv.hpp"

#include <cmath>
#include <stdexcept>

namespace weakval {

PureTSV::PureTSV(Ket post_, Ket pre_) : post(post_.normalized()), pre(pre_.normalized()) {
    if (post.dim() != pre.dim()) {
        throw std::invalid_argument("PureTSV: pre and post dimensions differ");
    }
    if (std::abs(inner(post, pre)) <= kOverlapFloor) {
        throw std::invalid_argument("PureTSV: selection overlap below floor, weak values undefined");
    }
}

GeneralizedTSV::GeneralizedTSV(std::vector<Term> terms_) : terms(std::move(terms_)) {
    if (terms.empty()) {
        throw std::invalid_argument("GeneralizedTSV: needs at least one term");
    }
    const int d = terms.front().post.dim();
    Complex denom = 0.0;
    for (auto& t : terms) {
        t.post = t.post.normalized();
        t.pre = t.pre.normalized();
        if (t.post.dim() != d || t.pre.dim() != d) {
            throw std::invalid_argument("GeneralizedTSV: term dimensions differ");
        }
        denom += t.alpha * inner(t.post, t.pre);
    }
    if (std::abs(denom) <= kOverlapFloor) {
        throw std::invalid_argument("GeneralizedTSV: selection overlap below floor, weak values undefined");
    }
}

MixedTSV::MixedTSV(DensityMatrix rho_pre_, DensityMatrix rho_post_)
    : rho_pre(std::move(rho_pre_)), rho_post(std::move(rho_post_)) {
    if (rho_pre.dim() != rho_post.dim()) {
        throw std::invalid_argument("MixedTSV: dimensions differ");
    }
    const Complex t = (rho_post.matrix * rho_pre.matrix).trace();
    if (t.real() <= kOverlapFloor) {
        throw std::invalid_argument("MixedTSV: tr(rho_post rho_pre) below floor, weak values undefined");
    }
}

Complex weak_value(const PureTSV& tsv, const Operator& a) {
    if (a.dim() != tsv.pre.dim()) {
        throw std::invalid_argument("weak_value: operator dimension mismatch");
    }
    const Complex den = inner(tsv.post, tsv.pre);
    if (std::abs(den) <= kOverlapFloor) {
        throw std::invalid_argument("weak_value: undefined weak value (vanishing overlap)");
    }
    return tsv.post.amplitudes.dot(a.matrix * tsv.pre.amplitudes) / den;
}

Complex weak_value_generalized(const GeneralizedTSV& tsv, const Operator& a) {
    Complex num = 0.0;
    Complex den = 0.0;
    for (const auto& t : tsv.terms) {
        if (a.dim() != t.pre.dim()) {
            throw std::invalid_argument("weak_value_generalized: operator dimension mismatch");
        }
        num += t.alpha * t.post.amplitudes.dot(a.matrix * t.pre.amplitudes);
        den += t.alpha * inner(t.post, t.pre);
    }
    if (std::abs(den) <= kOverlapFloor) {
        throw std::invalid_argument("weak_value_generalized: undefined weak value (vanishing denominator)");
    }
    return num / den;
}

Complex weak_value_mixed(const MixedTSV& tsv, const Operator& a) {
    if (a.dim() != tsv.rho_pre.dim()) {
        throw std::invalid_argument("weak_value_mixed: operator dimension mismatch");
    }
    const Complex den = (tsv.rho_post.matrix * tsv.rho_pre.matrix).trace();
    if (std::abs(den) <= kOverlapFloor) {
        throw std::invalid_argument("weak_value_mixed: undefined weak value (vanishing trace overlap)");
    }
    return (tsv.rho_post.matrix * a.matrix * tsv.rho_pre.matrix).trace() / den;
}

Complex weak_value_moment(const PureTSV& tsv, const Operator& a, int n) {
    if (n < 1) {
        throw std::invalid_argument("weak_value_moment: n must be >= 1");
    }
    Matrix power = a.matrix;
    for (int i = 1; i < n; ++i) power = power * a.matrix;
    return weak_value(tsv, Operator(std::move(power), false));
}

}  // namespace weakval
