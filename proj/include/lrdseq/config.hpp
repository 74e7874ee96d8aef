#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrdseq/chaining.hpp"
#include "lrdseq/coefficients.hpp"
#include "lrdseq/covariance.hpp"
#include "lrdseq/grid.hpp"
#include "lrdseq/subordinator.hpp"

namespace lrdseq {

// One JSON document (schema 1) drives every command; see README for the
// field reference. Validation failures throw ConfigError naming the
// offending field.
struct Config {
    nlohmann::json raw; // verbatim, with the effective seed substituted

    CovarianceModel model;
    Subordinator G;
    QuadSpec quad;
    std::uint64_t master_seed = 1;

    int qmax = 6;
    double rank_tol = 1e-7;
    std::optional<int> rank_override;

    // grid
    std::optional<EvaluationGrid> explicit_grid;
    int grid_points_per_dim = 33;
    int t_count = 11;

    // experiment block
    std::string kind;
    std::vector<long> N_ladder;
    int replications = 0;
    std::vector<double> epsilons;
    std::vector<double> x_slice;
    int reference_multiplier = 4;
    // "plain": independent replications (default). "stratified_h1":
    // condition each replication's path on a stratified value of the
    // normalized H_1 partial sum (exact Gaussian conditioning), removing
    // the Gaussian-core sampling noise from the empirical distribution so
    // KS trends are visible at desk-scale replication counts. p = 1 only.
    std::string replication_design = "plain";
    std::vector<double> box_probabilities{0.5, 0.05, 0.005};
    double n_over_N = 0.5;
    int partition_K = 4;
    int probe_points = 200;
    int probe_x_count = 50;
    int check_pairs = 100;
    std::optional<SubordinationMode> lambda_mode;

    // simulate block
    long simulate_N = 0;
    bool emit_subordinated = false;

    EvaluationGrid resolve_grid() const;
    SubordinationMode resolved_lambda_mode() const {
        if (lambda_mode) return *lambda_mode;
        return model.p == 1 ? SubordinationMode::univariate
                            : SubordinationMode::multivariate;
    }
};

Config parse_config(const nlohmann::json& doc,
                    std::optional<std::uint64_t> seed_override = std::nullopt);
Config load_config(const std::string& path,
                   std::optional<std::uint64_t> seed_override = std::nullopt);

} // namespace lrdseq
