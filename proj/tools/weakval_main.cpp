// Command-line front end: weak values, couplings, distances, sweeps, the
// scenario registry and the mixed-selection protocol, with CSV/JSON output.
//
// Exit codes: 0 all checks passed, 1 check failure (or I/O failure),
// 2 usage error (bad flags, unknown scenario, malformed config).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "weakval/coupling.hpp"
#include "weakval/csv.hpp"
#include "weakval/json_io.hpp"
#include "weakval/metrics.hpp"
#include "weakval/protocols.hpp"
#include "weakval/scenarios.hpp"

namespace {

using weakval::Json;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config_path;
    std::uint64_t seed = 42;
    std::string out_path;
    std::string format = "csv";
};

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file '" + path + "'");
    Json j;
    f >> j;
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    return j;
}

// --set key=value flag overrides, parsed as JSON when possible.
void apply_overrides(Json& config, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        }
        const std::string key = kv.substr(0, pos);
        const std::string value = kv.substr(pos + 1);
        try {
            config[key] = Json::parse(value);
        } catch (const Json::parse_error&) {
            config[key] = value;  // plain string
        }
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + out_path + "'");
}

// Parses whichever two-state vector kind the JSON carries and returns its
// weak value for the observable.
weakval::Complex weak_value_from_config(const Json& config) {
    const weakval::Operator a = weakval::operator_from_json(config.at("observable"));
    const Json& tsv = config.at("tsv");
    const int power = config.value("power", 1);
    if (tsv.contains("rho_pre")) {
        if (power != 1) throw std::invalid_argument("power > 1 is supported for pure selections only");
        return weak_value_mixed(weakval::mixed_tsv_from_json(tsv), a);
    }
    if (tsv.contains("terms")) {
        if (power != 1) throw std::invalid_argument("power > 1 is supported for pure selections only");
        return weak_value_generalized(weakval::generalized_tsv_from_json(tsv), a);
    }
    return weak_value_moment(weakval::pure_tsv_from_json(tsv), a, power);
}

int cmd_weak_value(const CommonOptions& opts) {
    const Json config = load_config(opts.config_path);
    const weakval::Complex w = weak_value_from_config(config);
    emit(Json{{"weak_value", weakval::complex_to_json(w)}}.dump(2) + "\n", opts.out_path);
    return kExitPass;
}

weakval::CouplingSpec spec_from_config(const Json& config) {
    const weakval::Operator a = weakval::operator_from_json(config.at("observable"));
    const Json& pointer = config.at("pointer");
    const std::string kind = pointer.at("kind").get<std::string>();
    weakval::PointerKind pk;
    if (kind == "gaussian") {
        pk = weakval::GaussianKind{pointer.at("delta").get<double>()};
    } else if (kind == "spin") {
        pk = weakval::SpinKind{};
    } else {
        throw std::invalid_argument("pointer kind must be 'gaussian' or 'spin'");
    }
    return weakval::CouplingSpec(a, config.value("g", 1.0), config.at("epsilon").get<double>(), pk);
}

weakval::PointerState initial_pointer(const Json& config, const weakval::CouplingSpec& spec) {
    if (config.contains("initial")) return weakval::pointer_from_json(config.at("initial"));
    if (std::holds_alternative<weakval::GaussianKind>(spec.pointer_kind)) {
        return weakval::gaussian_initial(std::get<weakval::GaussianKind>(spec.pointer_kind).width);
    }
    return weakval::spin_pointer_initial();
}

int cmd_couple(const CommonOptions& opts) {
    const Json config = load_config(opts.config_path);
    const weakval::CouplingSpec spec = spec_from_config(config);
    const weakval::PointerState p0 = initial_pointer(config, spec);
    const std::string mode = config.at("mode").get<std::string>();

    weakval::CouplingOutcome outcome = [&] {
        if (mode == "eigenvalue") {
            return couple_eigenvalue(weakval::complex_from_json(config.at("eigenvalue")), spec, p0);
        }
        if (mode == "preselected") {
            return couple_preselected(weakval::ket_from_json(config.at("state")), spec, p0);
        }
        if (mode == "postselected") {
            const Json& tsv = config.at("tsv");
            if (tsv.contains("terms")) {
                return couple_postselected(weakval::generalized_tsv_from_json(tsv), spec, p0);
            }
            return couple_postselected(weakval::pure_tsv_from_json(tsv), spec, p0);
        }
        throw std::invalid_argument("mode must be eigenvalue, preselected or postselected");
    }();

    Json out;
    if (std::holds_alternative<weakval::PointerEnsemble>(outcome.pointer)) {
        out["pointer"] = ensemble_to_json(std::get<weakval::PointerEnsemble>(outcome.pointer));
    } else if (std::holds_alternative<weakval::GaussianPointerState>(outcome.pointer)) {
        out["pointer"] = pointer_to_json(std::get<weakval::GaussianPointerState>(outcome.pointer));
    } else {
        out["pointer"] = pointer_to_json(std::get<weakval::SpinPointerState>(outcome.pointer));
    }
    out["postselect_probability"] =
        outcome.postselect_probability ? Json(*outcome.postselect_probability) : Json(nullptr);
    emit(out.dump(2) + "\n", opts.out_path);
    return kExitPass;
}

int cmd_bures(const CommonOptions& opts) {
    const Json config = load_config(opts.config_path);
    double d;
    if (config.contains("ensemble")) {
        d = bures_pure_mixed(weakval::pointer_from_json(config.at("pure")),
                             weakval::ensemble_from_json(config.at("ensemble")));
    } else {
        d = bures_pure(weakval::pointer_from_json(config.at("a")),
                       weakval::pointer_from_json(config.at("b")));
    }
    emit(Json{{"bures_angle", d}, {"visibility", weakval::visibility_from_bures(d)}}.dump(2) + "\n",
         opts.out_path);
    return kExitPass;
}

int cmd_sweep(const CommonOptions& opts) {
    Json config = load_config(opts.config_path);
    const double width = config.value("delta", 1.0);
    const double g = config.value("g", 1.0);
    const auto grid = weakval::geometric_grid(config.value("eps_min", 1e-4),
                                              config.value("eps_max", 1e-2),
                                              config.value("points_per_decade", 8));

    // Defaults: the weak-value-1 selection for the weak branch and the
    // eigenvalue-0/2 superposition for the expectation branch.
    const weakval::Operator a_weak =
        config.contains("observable_weak") ? weakval::operator_from_json(config.at("observable_weak"))
                                           : weakval::spin_z_operator(1.0);
    const weakval::Operator a_exp =
        config.contains("observable_exp") ? weakval::operator_from_json(config.at("observable_exp"))
                                          : weakval::spin_z_operator(2.0);
    const weakval::PureTSV tsv = [&] {
        if (config.contains("tsv")) return weakval::pure_tsv_from_json(config.at("tsv"));
        weakval::Vector post(3), pre(3);
        post << 0.0, -2.0, 1.0;
        pre << 0.0, 1.0, 1.0;
        return weakval::PureTSV(weakval::Ket(post), weakval::Ket(pre));
    }();
    const weakval::Ket psi = [&] {
        if (config.contains("pre_state")) return weakval::ket_from_json(config.at("pre_state"));
        weakval::Vector v(5);
        v << 1.0, 0.0, 1.0, 0.0, 0.0;
        return weakval::Ket(v).normalized();
    }();

    const weakval::Complex a_w = weak_value(tsv, a_weak);
    const weakval::Complex a2_w = weak_value_moment(tsv, a_weak, 2);
    const double da = weakval::uncertainty(a_exp, psi);
    const double db = std::sqrt(weakval::momentum_second_moment(width));
    const double mean = weakval::expectation(a_exp, psi).real();

    std::vector<std::vector<double>> rows(grid.size());
    weakval::parallel_for(static_cast<int>(grid.size()), [&](int i) {
        const double eps = grid[i];
        const weakval::PointerState p0 = weakval::gaussian_initial(width);
        const weakval::CouplingSpec spec_w(a_weak, g, eps, weakval::GaussianKind{width});
        const weakval::CouplingSpec spec_e(a_exp, g, eps, weakval::GaussianKind{width});
        const auto phi_e = std::get<weakval::GaussianPointerState>(
            couple_eigenvalue(a_w, spec_w, p0).pointer);
        const auto phi_w = std::get<weakval::GaussianPointerState>(
            couple_postselected(tsv, spec_w, p0).pointer);
        const auto phi_e2 = std::get<weakval::GaussianPointerState>(
            couple_eigenvalue(mean, spec_e, p0).pointer);
        const auto rho_ex = std::get<weakval::PointerEnsemble>(
            couple_preselected(psi, spec_e, p0).pointer);
        rows[i] = {eps, bures_pure(phi_e, phi_w), bures_pure_mixed(phi_e2, rho_ex),
                   weakval::predicted_bures_weak(a2_w, a_w, weakval::momentum_second_moment(width),
                                                 weakval::momentum_fourth_moment(width), g * eps),
                   weakval::predicted_bures_expectation(da, db, g * eps)};
    });

    std::vector<std::pair<double, double>> weak_samples, exp_samples;
    for (const auto& r : rows) {
        weak_samples.emplace_back(r[0], r[1]);
        exp_samples.emplace_back(r[0], r[2]);
    }
    const weakval::ScalingFit weak_fit = weakval::fit_scaling_exponent(weak_samples);
    const weakval::ScalingFit exp_fit = weakval::fit_scaling_exponent(exp_samples);

    const weakval::Table table{{"epsilon", "D_weak", "D_expectation", "D_pred_weak", "D_pred_exp"},
                               std::move(rows)};
    const Json summary{{"slope_weak", weak_fit.slope},
                       {"slope_expectation", exp_fit.slope},
                       {"r_squared_weak", weak_fit.r_squared},
                       {"r_squared_expectation", exp_fit.r_squared},
                       {"weak_value", weakval::complex_to_json(a_w)}};
    if (opts.format == "json") {
        Json rows_json = Json::array();
        for (const auto& r : table.rows) rows_json.push_back(r);
        emit(Json{{"summary", summary}, {"columns", table.columns}, {"rows", rows_json}}.dump(2) + "\n",
             opts.out_path);
    } else {
        emit(weakval::to_csv(table), opts.out_path);
        std::cerr << summary.dump(2) << "\n";
    }
    return kExitPass;
}

int cmd_scenario(const std::string& name, const CommonOptions& opts,
                 const std::vector<std::string>& overrides) {
    Json config = load_config(opts.config_path);
    apply_overrides(config, overrides);
    const weakval::ScenarioResult result = weakval::run_scenario(name, config, opts.seed);
    emit(result.artifact_text(opts.format), opts.out_path);
    // The summary goes to stdout when the artifact went to a file, else to
    // stderr so the artifact stream stays clean.
    if (opts.out_path.empty()) {
        std::cerr << result.summary.dump(2) << "\n";
    } else {
        std::cout << result.summary.dump(2) << "\n";
    }
    return result.all_passed() ? kExitPass : kExitCheckFailure;
}

int cmd_protocol_mixed_tsv(const CommonOptions& opts) {
    const Json config = load_config(opts.config_path);
    const weakval::MixedTSVCircuit circuit = weakval::circuit_from_json(config.at("circuit"));
    const weakval::Operator a = weakval::operator_from_json(config.at("observable"));

    const weakval::Complex via_formula =
        weak_value_mixed(mixed_tsv_from_circuit(circuit), a);
    const weakval::Complex via_ancillas = mixed_weak_value_via_ancillas(circuit, a);
    const double diff = std::abs(via_formula - via_ancillas);

    const weakval::CircuitStates states = build_circuit_states(circuit);
    Json out{{"weak_value_formula", weakval::complex_to_json(via_formula)},
             {"weak_value_ancillas", weakval::complex_to_json(via_ancillas)},
             {"abs_diff", diff},
             {"states",
              Json{{"pre_entangled", weakval::ket_to_json(states.pre_entangled)},
                   {"bell_pair", weakval::ket_to_json(states.bell_pair)},
                   {"upsilon", weakval::ket_to_json(states.upsilon)},
                   {"omega", weakval::ket_to_json(states.omega)}}}};
    emit(out.dump(2) + "\n", opts.out_path);
    return diff <= 1e-10 ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation of pointer systems weakly coupled to pre- and post-selected quantum systems"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::vector<std::string> overrides;
    std::string scenario_name;

    auto add_common = [&](CLI::App* cmd, bool with_format) {
        cmd->add_option("--config", opts.config_path, "JSON config file");
        cmd->add_option("--seed", opts.seed, "random seed (default 42)");
        cmd->add_option("--out", opts.out_path, "output path (default stdout)");
        if (with_format) {
            cmd->add_option("--format", opts.format, "artifact format: csv or json")
                ->check(CLI::IsMember({"csv", "json"}));
        }
    };

    auto* weak_value_cmd = app.add_subcommand("weak-value", "Weak value of an observable for a pure, generalized or mixed selection");
    add_common(weak_value_cmd, false);
    auto* couple_cmd = app.add_subcommand("couple", "Evolve a pointer under H = g A B for a selection, a pre-selected state or an eigenvalue");
    add_common(couple_cmd, false);
    auto* bures_cmd = app.add_subcommand("bures", "Bures angle between pointer states (pure-pure or pure-mixture)");
    add_common(bures_cmd, false);
    auto* sweep_cmd = app.add_subcommand("sweep", "Distance-vs-epsilon sweep with scaling fits (CSV)");
    add_common(sweep_cmd, true);

    std::string names;
    for (const auto& n : weakval::scenario_names()) names += (names.empty() ? "" : ", ") + n;
    auto* scenario_cmd = app.add_subcommand("scenario", "Run a registered scenario: " + names);
    scenario_cmd->add_option("name", scenario_name, "scenario name")->required();
    scenario_cmd->add_option("--set", overrides, "parameter override key=value (repeatable)");
    add_common(scenario_cmd, true);

    auto* protocol_cmd = app.add_subcommand("protocol", "Selection-protocol tools");
    protocol_cmd->require_subcommand(1);
    auto* mixed_cmd = protocol_cmd->add_subcommand("mixed-tsv", "Three-ancilla mixed selection: weak value via the density-matrix formula and via the explicit circuit");
    add_common(mixed_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (weak_value_cmd->parsed()) return cmd_weak_value(opts);
        if (couple_cmd->parsed()) return cmd_couple(opts);
        if (bures_cmd->parsed()) return cmd_bures(opts);
        if (sweep_cmd->parsed()) return cmd_sweep(opts);
        if (scenario_cmd->parsed()) return cmd_scenario(scenario_name, opts, overrides);
        if (mixed_cmd->parsed()) return cmd_protocol_mixed_tsv(opts);
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitUsage;
}
