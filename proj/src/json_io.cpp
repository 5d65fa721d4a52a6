#include "weakval/json_io.hpp"

#include <stdexcept>

namespace weakval {

Json complex_to_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("json: complex values are [re, im] pairs");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

Json ket_to_json(const Ket& k) {
    Json arr = Json::array();
    for (int i = 0; i < k.dim(); ++i) arr.push_back(complex_to_json(k.amplitudes(i)));
    return arr;
}

Ket ket_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("json: a ket is a nonempty array of [re, im] pairs");
    }
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return Ket(std::move(v));
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index jcol = 0; jcol < m.cols(); ++jcol) row.push_back(complex_to_json(m(i, jcol)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("json: a matrix is a nonempty array of rows");
    }
    const auto rows = j.size();
    const auto cols = j[0].size();
    Matrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw std::invalid_argument("json: ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
        }
    }
    return m;
}

Json pointer_to_json(const GaussianPointerState& p) {
    Json terms = Json::array();
    for (const auto& t : p.terms) {
        terms.push_back(Json{{"amp", complex_to_json(t.amplitude)}, {"center", complex_to_json(t.center)}});
    }
    return Json{{"delta", p.width}, {"terms", std::move(terms)}};
}

Json pointer_to_json(const SpinPointerState& p) {
    return Json{{"qubit", ket_to_json(p.qubit)}};
}

Json pointer_to_json(const PointerState& p) {
    return std::visit([](const auto& s) { return pointer_to_json(s); }, p);
}

PointerState pointer_from_json(const Json& j) {
    if (j.contains("qubit")) {
        return SpinPointerState(ket_from_json(j.at("qubit")));
    }
    if (!j.contains("delta") || !j.contains("terms")) {
        throw std::invalid_argument("json: pointer state needs either {qubit} or {delta, terms}");
    }
    std::vector<GaussianTerm> terms;
    for (const auto& t : j.at("terms")) {
        terms.push_back({complex_from_json(t.at("amp")), complex_from_json(t.at("center"))});
    }
    GaussianPointerState state(j.at("delta").get<double>(), std::move(terms));
    const double self = overlap(state, state).real();
    state.normalized = std::abs(self - 1.0) <= kSelfOverlapTol;
    return state;
}

Json ensemble_to_json(const PointerEnsemble& e) {
    Json comps = Json::array();
    for (const auto& c : e.components) {
        comps.push_back(Json{{"probability", c.probability}, {"state", pointer_to_json(c.state)}});
    }
    return Json{{"components", std::move(comps)}};
}

PointerEnsemble ensemble_from_json(const Json& j) {
    std::vector<PointerEnsemble::Component> comps;
    for (const auto& c : j.at("components")) {
        comps.push_back({c.at("probability").get<double>(), pointer_from_json(c.at("state"))});
    }
    return PointerEnsemble(std::move(comps));
}

Json tsv_to_json(const PureTSV& t) {
    return Json{{"pre", ket_to_json(t.pre)}, {"post", ket_to_json(t.post)}};
}

PureTSV pure_tsv_from_json(const Json& j) {
    return PureTSV(ket_from_json(j.at("post")), ket_from_json(j.at("pre")));
}

Json tsv_to_json(const GeneralizedTSV& t) {
    Json terms = Json::array();
    for (const auto& term : t.terms) {
        terms.push_back(Json{{"alpha", complex_to_json(term.alpha)},
                             {"post", ket_to_json(term.post)},
                             {"pre", ket_to_json(term.pre)}});
    }
    return Json{{"terms", std::move(terms)}};
}

GeneralizedTSV generalized_tsv_from_json(const Json& j) {
    std::vector<GeneralizedTSV::Term> terms;
    for (const auto& t : j.at("terms")) {
        terms.push_back({complex_from_json(t.at("alpha")), ket_from_json(t.at("post")),
                         ket_from_json(t.at("pre"))});
    }
    return GeneralizedTSV(std::move(terms));
}

Json tsv_to_json(const MixedTSV& t) {
    return Json{{"rho_pre", matrix_to_json(t.rho_pre.matrix)},
                {"rho_post", matrix_to_json(t.rho_post.matrix)}};
}

MixedTSV mixed_tsv_from_json(const Json& j) {
    return MixedTSV(DensityMatrix(matrix_from_json(j.at("rho_pre"))),
                    DensityMatrix(matrix_from_json(j.at("rho_post"))));
}

Json circuit_to_json(const MixedTSVCircuit& c) {
    Json psi = Json::array();
    for (const auto& k : c.psi) psi.push_back(ket_to_json(k));
    Json phi = Json::array();
    for (const auto& k : c.phi) phi.push_back(ket_to_json(k));
    return Json{{"p", c.p}, {"psi", std::move(psi)}, {"p_tilde", c.p_tilde},
                {"phi", std::move(phi)}, {"N", c.ancilla_dim}};
}

MixedTSVCircuit circuit_from_json(const Json& j) {
    std::vector<Ket> psi, phi;
    for (const auto& k : j.at("psi")) psi.push_back(ket_from_json(k));
    for (const auto& k : j.at("phi")) phi.push_back(ket_from_json(k));
    const int n = j.contains("N") ? j.at("N").get<int>() : static_cast<int>(phi.size());
    return MixedTSVCircuit(j.at("p").get<std::vector<double>>(), std::move(psi),
                           j.at("p_tilde").get<std::vector<double>>(), std::move(phi), n);
}

Operator operator_from_json(const Json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "spin_z") return spin_z_operator(j.at("s").get<double>());
    if (type == "polarization") return polarization_operator();
    if (type == "matrix") {
        const bool hermitian = j.value("hermitian", true);
        return Operator(matrix_from_json(j.at("matrix")), hermitian);
    }
    throw std::invalid_argument("json: unknown observable type '" + type + "'");
}

CrystalSpec crystal_from_json(const Json& j) {
    return CrystalSpec(j.at("d_mm").get<double>(), j.at("n_o").get<double>(),
                       j.at("n_e").get<double>(), j.at("wavelength_nm").get<double>() * 1e-6,
                       j.at("waist_um").get<double>() * 1e-3);
}

}  // namespace weakval
