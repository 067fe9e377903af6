#pragma once

#include <string>
#include <vector>

#include "neumann/checks.hpp"
#include "neumann/geometry.hpp"

namespace neumann {

// One entry of the "jobs" list. Statement jobs run every listed statement at
// every (point, time) pair on one shared path batch per pair.
struct JobSpec {
    enum class Type { Statement, VariableBound, LevyGromov, EstimateII };

    Type type = Type::Statement;
    std::vector<std::string> statements;  // Statement: S2..S7; VariableBound: G2/G3
    std::string f;
    std::vector<Vec> points;
    std::vector<double> times;
    double K1 = 0.0, K2 = 0.0;  // VariableBound: constant bound fields
    Vec v{0.0, 1.0};            // EstimateII: tangent vector
    double p = 2.0;             // EstimateII: moment order
    bool stationary = false;    // LevyGromov: also emit the stationary (4.1) row
};

struct ExperimentConfig {
    ManifoldModel model{Shape::half_line(), DriftSpec::zero()};
    CheckOptions opt;  // sim + pde resolutions + (K, sigma) overrides
    std::vector<JobSpec> jobs;
    Vec start{0.0, 0.0};   // simulate subcommand: start point
    double horizon = 1.0;  // simulate subcommand: time horizon
};

// Parse + validate. Every error is a ConfigError naming the offending field
// (e.g. "field 'model.shape': unknown shape 'pentagon'").
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RunResult {
    std::vector<InequalityReport> rows;
    std::vector<IIEstimate> ii;

    int count(Verdict v) const;
};

// Executes the listed job types in declaration order (pass an empty filter to
// run everything). Each check is internally parallel; rows come out in a
// deterministic order.
RunResult run_jobs(const ExperimentConfig& cfg, const std::vector<JobSpec::Type>& only = {});

}  // namespace neumann
