#pragma once

#include <string>

#include <json.hpp>

#include "lrdseq/config.hpp"

namespace lrdseq {

// Structured experiment output: a JSON summary (quantiles, fitted
// slopes, pass/fail of the declared shape checks, provenance), the raw
// per-replication CSV (every number traceable to (seed, replication)),
// and a log-log plot-data CSV. Timing lives in the manifest only so the
// CSV bytes are a pure function of (config, seed).
struct ExperimentReport {
    nlohmann::json summary;
    std::string raw_csv;
    std::string plot_csv;
    bool pass = true;
};

struct RankInfo {
    int m = 0;
    bool from_override = false;
    double D = 0.0;
    std::vector<double> witness_x;
    double witness_value = 0.0;

    nlohmann::json to_json() const;
};

// Family rank on the configured grid (or the override), then the
// admissibility gate D < 1/m. Throws RankConditionViolated
// when the gate fails or no rank <= qmax exists.
RankInfo resolve_rank(const Config& cfg, const EvaluationGrid& grid);

// jobs <= 0 uses the hardware concurrency. Results are independent of
// the job count.
ExperimentReport run_reduction_experiment(const Config& cfg, int jobs = 1);
ExperimentReport run_limit_experiment(const Config& cfg, int jobs = 1);
ExperimentReport run_moment_bound_experiment(const Config& cfg, int jobs = 1);
ExperimentReport run_variance_bound_experiment(const Config& cfg, int jobs = 1);
ExperimentReport run_partition_check(const Config& cfg);

ExperimentReport run_experiment(const std::string& kind, const Config& cfg, int jobs = 1);

} // namespace lrdseq
