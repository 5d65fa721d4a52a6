#pragma once

// JSON (de)serialization for the CLI and config files.
//
// Conventions: complex numbers are [re, im] pairs; kets are arrays of such
// pairs; matrices are arrays of rows. Pointer states are
//   {"delta": w, "terms": [{"amp": [re, im], "center": [re, im]}]}   or
//   {"qubit": [[re, im], [re, im]]}.
// Ordered JSON keeps emitted key order deterministic.

#include <json.hpp>

#include "weakval/optics.hpp"
#include "weakval/pointer.hpp"
#include "weakval/protocols.hpp"
#include "weakval/qstate.hpp"
#include "weakval/tsv.hpp"

namespace weakval {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

Json ket_to_json(const Ket& k);
Ket ket_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json pointer_to_json(const GaussianPointerState& p);
Json pointer_to_json(const SpinPointerState& p);
Json pointer_to_json(const PointerState& p);
PointerState pointer_from_json(const Json& j);

Json ensemble_to_json(const PointerEnsemble& e);
PointerEnsemble ensemble_from_json(const Json& j);

Json tsv_to_json(const PureTSV& t);
PureTSV pure_tsv_from_json(const Json& j);

Json tsv_to_json(const GeneralizedTSV& t);
GeneralizedTSV generalized_tsv_from_json(const Json& j);

Json tsv_to_json(const MixedTSV& t);
MixedTSV mixed_tsv_from_json(const Json& j);

Json circuit_to_json(const MixedTSVCircuit& c);
MixedTSVCircuit circuit_from_json(const Json& j);

/// Observables: {"type": "spin_z", "s": 1} | {"type": "polarization"} |
/// {"type": "matrix", "matrix": [...], "hermitian": true}.
Operator operator_from_json(const Json& j);

/// Crystal config {d_mm, n_o, n_e, wavelength_nm, waist_um}; lengths are
/// normalized to millimeters in the returned spec.
CrystalSpec crystal_from_json(const Json& j);

}  // namespace weakval
