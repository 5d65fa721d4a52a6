#pragma once

// Scenario registry: each scenario reproduces one of the modeled situations
// (distance hierarchies, scaling sweeps, the interference experiment model,
// the finite-strength measurement, the mixed-selection oracle) as a CSV table
// plus a JSON summary with internal pass/fail checks. Output is
// deterministic for a fixed parameter set and seed.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "weakval/csv.hpp"
#include "weakval/json_io.hpp"

namespace weakval {

struct ScenarioCheck {
    std::string name;
    bool passed;
    std::string detail;
};

struct ScenarioResult {
    std::string name;
    Table table;
    Json summary;
    std::vector<ScenarioCheck> checks;

    bool all_passed() const;
    /// The emitted artifact: the CSV table, or for format "json" the summary
    /// together with the rows.
    std::string artifact_text(const std::string& format) const;
};

std::vector<std::string> scenario_names();

/// Runs a registered scenario. `params` is a JSON object of scenario
/// parameters; unknown keys are rejected. Throws std::invalid_argument for
/// unknown scenarios or malformed parameters.
ScenarioResult run_scenario(const std::string& name, const Json& params, std::uint64_t seed);

/// Index-parallel loop used by sweep drivers. The WEAKVAL_THREADS environment
/// variable caps the worker count; results must be written to disjoint slots,
/// which keeps output independent of the execution order.
void parallel_for(int count, const std::function<void(int)>& body);

/// eps_min * 10^(i/points_per_decade) up to eps_max (inclusive).
std::vector<double> geometric_grid(double eps_min, double eps_max, int points_per_decade);

}  // namespace weakval
