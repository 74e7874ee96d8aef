#include "lrdseq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "lrdseq/empirical.hpp"
#include "lrdseq/errors.hpp"
#include "lrdseq/hermite.hpp"
#include "lrdseq/io.hpp"
#include "lrdseq/normal.hpp"
#include "lrdseq/parallel.hpp"
#include "lrdseq/rng.hpp"
#include "lrdseq/sampling.hpp"
#include "lrdseq/stats.hpp"

namespace lrdseq {

namespace {

int effective_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Reference-sample seeds live on a disjoint counter block so they never
// collide with replication seeds of any R.
constexpr std::uint64_t kReferenceStreamOffset = 1ULL << 32;

nlohmann::json provenance(const Config& cfg) {
    nlohmann::json j;
    j["artifact_version"] = kArtifactVersion;
    j["config_hash"] = config_hash(cfg.raw);
    j["master_seed"] = cfg.master_seed;
    // dependence diagnostic: smallest block b with psi(b k) <= 1 for
    // every probed lag (0 = none within the caps)
    j["psi_block"] = smallest_psi_block(cfg.model, 1024, 256);
    return j;
}

double dN_for(const Config& cfg, int m, long N) {
    return normalization(
        [&cfg](long k) { return cfg.model.autocovariance(1, 1, k); }, m, N);
}

std::string ladder_plot_csv(const std::vector<long>& ladder,
                            const std::vector<double>& stat,
                            const char* stat_name) {
    CsvWriter plot({"log_N", std::string("log_") + stat_name});
    for (std::size_t i = 0; i < ladder.size(); ++i)
        plot.add_row({format_double(std::log(static_cast<double>(ladder[i]))),
                      format_double(std::log(stat[i]))});
    return plot.str();
}

} // namespace

nlohmann::json RankInfo::to_json() const {
    nlohmann::json j;
    j["m"] = m;
    j["from_override"] = from_override;
    j["D"] = D;
    j["admissible"] = D < 1.0 / m;
    j["one_over_m"] = 1.0 / m;
    if (!witness_x.empty()) {
        j["witness_x"] = nlohmann::json::array();
        for (double v : witness_x)
            j["witness_x"].push_back(std::isfinite(v) ? nlohmann::json(v)
                                                      : nlohmann::json(v > 0 ? "inf" : "-inf"));
        j["witness_value"] = witness_value;
    }
    return j;
}

RankInfo resolve_rank(const Config& cfg, const EvaluationGrid& grid) {
    RankInfo info;
    info.D = cfg.model.D;
    if (cfg.rank_override) {
        info.m = *cfg.rank_override;
        info.from_override = true;
    } else {
        const auto rank = hermite_rank_family(cfg.G, grid, cfg.qmax, cfg.rank_tol, cfg.quad);
        if (rank.exceeded)
            throw RankConditionViolated(
                "family Hermite rank exceeds qmax = " + std::to_string(cfg.qmax) +
                " on the configured grid");
        info.m = rank.family_rank;
        info.witness_x = rank.witness_x;
        info.witness_value = rank.witness_value;
    }
    if (info.m < 1) throw RankConditionViolated("Hermite rank must be >= 1");
    if (!(cfg.model.D < 1.0 / info.m))
        throw RankConditionViolated(
            "rank condition violated: D = " + std::to_string(cfg.model.D) +
            " is not < 1/m = " + std::to_string(1.0 / info.m) +
            " (m = " + std::to_string(info.m) + ")");
    return info;
}

// ---- reduction -----------------------------------------------------------

ExperimentReport run_reduction_experiment(const Config& cfg, int jobs) {
    const EvaluationGrid grid = cfg.resolve_grid();
    const RankInfo rank = resolve_rank(cfg, grid);
    const int m = rank.m;

    const auto table = coefficient_table(cfg.G, grid, m, cfg.quad);
    DistributionTable F;
    F.F = table.F;
    const LeadingTermSpec spec = make_leading_spec(table, m);

    const long maxN = cfg.N_ladder.back();
    PathSampler sampler(cfg.model, maxN);
    std::vector<double> dN(cfg.N_ladder.size());
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        dN[i] = dN_for(cfg, m, cfg.N_ladder[i]);

    const int R = cfg.replications;
    // stats[i][r]: one statistic per ladder entry per replication
    std::vector<std::vector<double>> stats(cfg.N_ladder.size(),
                                           std::vector<double>(static_cast<std::size_t>(R)));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(R));
    parallel_for(R, effective_jobs(jobs), [&](long r) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
        seeds[static_cast<std::size_t>(r)] = seed;
        const GaussianPath path = sampler.sample(seed);
        const Eigen::MatrixXd Y = subordinate(cfg.G, path);
        for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
            const long N = cfg.N_ladder[i];
            const Eigen::MatrixXd Xp = path.values.topRows(N);
            const Eigen::MatrixXd Yp = Y.topRows(N);
            const auto res = reduction_statistic(Xp, Yp, spec, grid, F, dN[i]);
            stats[i][static_cast<std::size_t>(r)] = res.max_stat;
        }
    });

    CsvWriter raw({"N", "replication", "seed", "max_stat"});
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        for (int r = 0; r < R; ++r)
            raw.add_row({std::to_string(cfg.N_ladder[i]), std::to_string(r),
                         std::to_string(seeds[static_cast<std::size_t>(r)]),
                         format_double(stats[i][static_cast<std::size_t>(r)])});

    std::vector<double> medians(cfg.N_ladder.size());
    nlohmann::json per_N = nlohmann::json::array();
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
        medians[i] = sample_median(stats[i]);
        nlohmann::json entry;
        entry["N"] = cfg.N_ladder[i];
        entry["d_N"] = dN[i];
        entry["median"] = medians[i];
        entry["q25"] = sample_quantile(stats[i], 0.25);
        entry["q75"] = sample_quantile(stats[i], 0.75);
        entry["mean"] = sample_mean(stats[i]);
        nlohmann::json tail;
        for (double eps : cfg.epsilons) {
            int exceed = 0;
            for (double v : stats[i])
                if (v > eps) ++exceed;
            tail[format_double(eps)] = static_cast<double>(exceed) / R;
        }
        entry["P_exceeds"] = tail;
        per_N.push_back(entry);
    }

    bool decreasing = true;
    for (std::size_t i = 1; i < medians.size(); ++i)
        decreasing = decreasing && medians[i] < medians[i - 1];

    SlopeFit fit;
    if (cfg.N_ladder.size() >= 2) {
        std::vector<double> logN, logMed;
        for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
            logN.push_back(std::log(static_cast<double>(cfg.N_ladder[i])));
            logMed.push_back(std::log(medians[i]));
        }
        fit = fit_slope(logN, logMed);
    }

    ExperimentReport report;
    report.summary["experiment"] = "reduction";
    report.summary["rank"] = rank.to_json();
    report.summary["replications"] = R;
    report.summary["per_N"] = per_N;
    report.summary["decay_slope"] = fit.slope;
    report.summary["decay_slope_se"] = fit.stderr_slope;
    report.summary["medians_strictly_decreasing"] = decreasing;
    report.summary["provenance"] = provenance(cfg);
    report.pass = decreasing;
    report.summary["pass"] = report.pass;
    report.raw_csv = raw.str();
    report.plot_csv = ladder_plot_csv(cfg.N_ladder, medians, "median_stat");
    return report;
}

// ---- limit ---------------------------------------------------------------

ExperimentReport run_limit_experiment(const Config& cfg, int jobs) {
    const EvaluationGrid grid = cfg.resolve_grid();
    const RankInfo rank = resolve_rank(cfg, grid);
    const int m = rank.m;

    std::vector<double> x = cfg.x_slice;
    if (x.empty())
        throw ConfigError("config field `experiment.x_slice`: required for the limit kind");
    if (static_cast<int>(x.size()) != cfg.G.q())
        throw ConfigError("config field `experiment.x_slice`: dimension must equal q");

    const double Fx = distribution_value(cfg.G, x, cfg.quad).value;
    const auto indices = multi_indices_of_order(cfg.model.p, m);
    std::vector<double> factors;
    for (const auto& idx : indices)
        factors.push_back(hermite_coefficient(cfg.G, x, idx, cfg.quad).value /
                          multi_factorial(idx));

    const long maxN = cfg.N_ladder.back();
    PathSampler sampler(cfg.model, maxN);
    std::vector<double> dN(cfg.N_ladder.size());
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        dN[i] = dN_for(cfg, m, cfg.N_ladder[i]);

    const bool stratified = cfg.replication_design == "stratified_h1";
    if (stratified && (cfg.model.p != 1 || sampler.factor().used_ldlt))
        throw ConfigError(
            "config field `experiment.replication_design`: stratified_h1 requires "
            "p = 1 with a strictly positive definite covariance");

    // Unit directions c_N with c_N . z = d_N^{-1} sum_j X_j for the prefix
    // path X = L_N z; replacing that projection by a stratified normal
    // quantile is exact Gaussian conditioning.
    std::vector<Eigen::VectorXd> h1_dirs;
    if (stratified) {
        for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
            const long N = cfg.N_ladder[i];
            Eigen::VectorXd c = sampler.factor().transform.topLeftCorner(N, N).transpose() *
                                Eigen::VectorXd::Ones(N);
            h1_dirs.push_back(c / c.norm());
        }
    }

    const int R = cfg.replications;
    std::vector<std::vector<double>> stats(cfg.N_ladder.size(),
                                           std::vector<double>(static_cast<std::size_t>(R)));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(R));
    parallel_for(R, effective_jobs(jobs), [&](long r) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
        seeds[static_cast<std::size_t>(r)] = seed;
        if (stratified) {
            NormalSampler normals(seed);
            Eigen::VectorXd z(maxN);
            for (long j = 0; j < maxN; ++j) z(j) = normals.next();
            const double quantile =
                normal_quantile((static_cast<double>(r) + 0.5) / R);
            for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
                const long N = cfg.N_ladder[i];
                const auto& c = h1_dirs[i];
                Eigen::VectorXd zc = z.head(N);
                zc += (quantile - c.dot(zc)) * c;
                const Eigen::VectorXd path =
                    sampler.factor().transform.topLeftCorner(N, N) * zc;
                long count = 0;
                for (long j = 0; j < N; ++j) {
                    const auto y = cfg.G.evaluate(std::vector<double>{path(j)});
                    bool below = true;
                    for (int d = 0; d < cfg.G.q() && below; ++d)
                        below = y[static_cast<std::size_t>(d)] <= x[static_cast<std::size_t>(d)];
                    if (below) ++count;
                }
                stats[i][static_cast<std::size_t>(r)] =
                    (static_cast<double>(count) - static_cast<double>(N) * Fx) / dN[i];
            }
            return;
        }
        const GaussianPath path = sampler.sample(seed);
        const Eigen::MatrixXd Y = subordinate(cfg.G, path);
        for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
            const long N = cfg.N_ladder[i];
            long count = 0;
            for (long j = 0; j < N; ++j) {
                bool below = true;
                for (int d = 0; d < cfg.G.q() && below; ++d) below = Y(j, d) <= x[static_cast<std::size_t>(d)];
                if (below) ++count;
            }
            stats[i][static_cast<std::size_t>(r)] =
                (static_cast<double>(count) - static_cast<double>(N) * Fx) / dN[i];
        }
    });

    // Reference marginal: exact normal for (p, m) = (1, 1), otherwise the
    // same functional simulated at M = multiplier * max N.
    const bool normal_reference = (cfg.model.p == 1 && m == 1);
    std::vector<double> reference_sample;
    double sigma = 0.0;
    if (normal_reference) {
        sigma = std::abs(factors[0]); // J_1(x) / 1!
    } else {
        const long M = cfg.reference_multiplier * maxN;
        PathSampler ref_sampler(cfg.model, M);
        const double dM = dN_for(cfg, m, M);
        reference_sample.resize(static_cast<std::size_t>(R));
        parallel_for(R, effective_jobs(jobs), [&](long r) {
            const std::uint64_t seed = derive_seed(
                cfg.master_seed, kReferenceStreamOffset + static_cast<std::uint64_t>(r));
            const GaussianPath path = ref_sampler.sample(seed);
            std::vector<double> hsum(indices.size(), 0.0);
            for (long j = 0; j < M; ++j) {
                for (std::size_t ii = 0; ii < indices.size(); ++ii) {
                    double prod = 1.0;
                    for (int d = 0; d < cfg.model.p; ++d)
                        prod *= hermite(indices[ii][static_cast<std::size_t>(d)], path.values(j, d));
                    hsum[ii] += prod;
                }
            }
            double acc = 0.0;
            for (std::size_t ii = 0; ii < indices.size(); ++ii)
                acc += factors[ii] * hsum[ii];
            reference_sample[static_cast<std::size_t>(r)] = acc / dM;
        });
    }

    std::vector<double> ks(cfg.N_ladder.size());
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
        if (normal_reference) {
            if (sigma > 0.0) {
                ks[i] = ks_distance(stats[i], [sigma](double v) {
                    return normal_cdf(v / sigma);
                });
            } else {
                // degenerate limit at 0
                double worst = 0.0;
                for (double v : stats[i]) worst = std::max(worst, std::abs(v));
                ks[i] = worst;
            }
        } else {
            ks[i] = ks_distance_two_sample(stats[i], reference_sample);
        }
    }

    CsvWriter raw({"N", "replication", "seed", "normalized_RN"});
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        for (int r = 0; r < R; ++r)
            raw.add_row({std::to_string(cfg.N_ladder[i]), std::to_string(r),
                         std::to_string(seeds[static_cast<std::size_t>(r)]),
                         format_double(stats[i][static_cast<std::size_t>(r)])});

    bool decreasing = true;
    for (std::size_t i = 1; i < ks.size(); ++i) decreasing = decreasing && ks[i] < ks[i - 1];

    nlohmann::json per_N = nlohmann::json::array();
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
        nlohmann::json entry;
        entry["N"] = cfg.N_ladder[i];
        entry["d_N"] = dN[i];
        entry["ks_distance"] = ks[i];
        entry["sample_sd"] = std::sqrt(sample_variance(stats[i]));
        per_N.push_back(entry);
    }

    ExperimentReport report;
    report.summary["experiment"] = "limit";
    report.summary["rank"] = rank.to_json();
    report.summary["replications"] = R;
    report.summary["reference"] = normal_reference
                                      ? nlohmann::json{{"type", "normal"}, {"sigma", sigma}}
                                      : nlohmann::json{{"type", "self_consistency"},
                                                       {"M", cfg.reference_multiplier * maxN}};
    report.summary["F_at_slice"] = Fx;
    report.summary["replication_design"] = cfg.replication_design;
    report.summary["per_N"] = per_N;
    report.summary["ks_decreasing"] = decreasing;
    report.summary["final_ks"] = ks.back();
    report.summary["provenance"] = provenance(cfg);
    report.pass = decreasing;
    report.summary["pass"] = report.pass;
    report.raw_csv = raw.str();
    report.plot_csv = ladder_plot_csv(cfg.N_ladder, ks, "ks");
    return report;
}

// ---- moment bound --------------------------------------------------------

namespace {

struct MomentBox {
    std::vector<double> lo, hi;
    double probability = 0.0;
    std::vector<double> jfactors; // J_l(A)/prod l! per order-m index
};

// Boxes drawn from the quality-k product partitions of the chaining
// scheme, picked to land closest (in log probability) to the requested
// targets.
std::vector<MomentBox> select_boxes(const Config& cfg, int m,
                                    const std::vector<std::vector<int>>& indices) {
    const LambdaSpec lambda = build_lambda(cfg.G, m, cfg.resolved_lambda_mode());
    const int q = cfg.G.q();
    // cap the cell enumeration at 2^(K q) <= 2^16
    const int K = std::max(1, std::min({cfg.partition_K + 6, 12, 16 / q}));
    const PartitionScheme scheme = build_scheme(lambda, K);

    std::vector<MomentBox> cells;
    for (int k = 1; k <= K; ++k) {
        // product cells of the level-(k,...,k) partition
        std::vector<std::size_t> idx(static_cast<std::size_t>(q), 0);
        const std::size_t cells_per_dim = (static_cast<std::size_t>(1) << k);
        while (true) {
            MomentBox box;
            box.lo.resize(static_cast<std::size_t>(q));
            box.hi.resize(static_cast<std::size_t>(q));
            for (int d = 0; d < q; ++d) {
                const auto& pts = scheme.points[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)];
                box.lo[static_cast<std::size_t>(d)] = pts[idx[static_cast<std::size_t>(d)]];
                box.hi[static_cast<std::size_t>(d)] = pts[idx[static_cast<std::size_t>(d)] + 1];
            }
            box.probability = box_probability(cfg.G, box.lo, box.hi);
            if (box.probability > 1e-12) cells.push_back(box);
            int d = q - 1;
            while (d >= 0 && idx[static_cast<std::size_t>(d)] == cells_per_dim - 1) {
                idx[static_cast<std::size_t>(d)] = 0;
                --d;
            }
            if (d < 0) break;
            ++idx[static_cast<std::size_t>(d)];
        }
    }

    std::vector<MomentBox> picked;
    for (double target : cfg.box_probabilities) {
        const MomentBox* best = nullptr;
        double best_dist = kInf;
        for (const auto& cell : cells) {
            const double dist = std::abs(std::log(cell.probability) - std::log(target));
            if (dist < best_dist) {
                best_dist = dist;
                best = &cell;
            }
        }
        if (!best) throw Error("moment experiment: no partition cell available");
        MomentBox box = *best;
        for (const auto& idx : indices)
            box.jfactors.push_back(
                hermite_coefficient_box(cfg.G, box.lo, box.hi, idx, cfg.quad).value /
                multi_factorial(idx));
        picked.push_back(std::move(box));
    }
    return picked;
}

} // namespace

ExperimentReport run_moment_bound_experiment(const Config& cfg, int jobs) {
    const EvaluationGrid grid = cfg.resolve_grid();
    const RankInfo rank = resolve_rank(cfg, grid);
    const int m = rank.m;
    const auto indices = multi_indices_of_order(cfg.model.p, m);
    const auto boxes = select_boxes(cfg, m, indices);

    const long maxN = cfg.N_ladder.back();
    PathSampler sampler(cfg.model, maxN);
    std::vector<double> dN(cfg.N_ladder.size());
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        dN[i] = dN_for(cfg, m, cfg.N_ladder[i]);

    const int R = std::max(cfg.replications, 1);
    // squares[i][b][r]
    std::vector<std::vector<std::vector<double>>> squares(
        cfg.N_ladder.size(),
        std::vector<std::vector<double>>(boxes.size(),
                                         std::vector<double>(static_cast<std::size_t>(R))));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(R));
    parallel_for(R, effective_jobs(jobs), [&](long r) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
        seeds[static_cast<std::size_t>(r)] = seed;
        const GaussianPath path = sampler.sample(seed);
        const Eigen::MatrixXd Y = subordinate(cfg.G, path);
        for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
            const long N = cfg.N_ladder[i];
            const long n = std::max<long>(
                1, static_cast<long>(std::floor(cfg.n_over_N * static_cast<double>(N) + 1e-9)));
            std::vector<double> hsum(indices.size(), 0.0);
            std::vector<long> counts(boxes.size(), 0);
            for (long j = 0; j < n; ++j) {
                for (std::size_t ii = 0; ii < indices.size(); ++ii) {
                    double prod = 1.0;
                    for (int d = 0; d < cfg.model.p; ++d)
                        prod *= hermite(indices[ii][static_cast<std::size_t>(d)], path.values(j, d));
                    hsum[ii] += prod;
                }
                for (std::size_t b = 0; b < boxes.size(); ++b) {
                    bool inside = true;
                    for (int d = 0; d < cfg.G.q() && inside; ++d) {
                        const double y = Y(j, d);
                        inside = y > boxes[b].lo[static_cast<std::size_t>(d)] &&
                                 y <= boxes[b].hi[static_cast<std::size_t>(d)];
                    }
                    if (inside) ++counts[b];
                }
            }
            for (std::size_t b = 0; b < boxes.size(); ++b) {
                double lead = 0.0;
                for (std::size_t ii = 0; ii < indices.size(); ++ii)
                    lead += boxes[b].jfactors[ii] * hsum[ii];
                const double S = (static_cast<double>(counts[b]) -
                                  static_cast<double>(n) * boxes[b].probability - lead) /
                                 dN[i];
                squares[i][b][static_cast<std::size_t>(r)] = S * S;
            }
        }
    });

    CsvWriter raw({"N", "box", "replication", "seed", "S_squared"});
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        for (std::size_t b = 0; b < boxes.size(); ++b)
            for (int r = 0; r < R; ++r)
                raw.add_row({std::to_string(cfg.N_ladder[i]), std::to_string(b),
                             std::to_string(r),
                             std::to_string(seeds[static_cast<std::size_t>(r)]),
                             format_double(squares[i][b][static_cast<std::size_t>(r)])});

    nlohmann::json per_N = nlohmann::json::array();
    bool ordered_everywhere = true;
    bool nonincreasing = true;
    std::vector<double> first_box_means(cfg.N_ladder.size());
    std::vector<std::vector<double>> means(cfg.N_ladder.size(),
                                           std::vector<double>(boxes.size()));
    std::vector<std::vector<double>> ses(cfg.N_ladder.size(),
                                         std::vector<double>(boxes.size()));
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            means[i][b] = sample_mean(squares[i][b]);
            ses[i][b] = std::sqrt(sample_variance(squares[i][b]) / R);
            nlohmann::json cell;
            cell["probability"] = boxes[b].probability;
            cell["mean_S_squared"] = means[i][b];
            cell["se"] = ses[i][b];
            cell["ratio_to_P"] = means[i][b] / boxes[b].probability;
            row.push_back(cell);
        }
        // boxes are ordered by decreasing target probability
        for (std::size_t b = 1; b < boxes.size(); ++b)
            ordered_everywhere =
                ordered_everywhere && means[i][b] < means[i][b - 1];
        first_box_means[i] = means[i][0];
        nlohmann::json entry;
        entry["N"] = cfg.N_ladder[i];
        entry["n"] = static_cast<long>(
            std::floor(cfg.n_over_N * static_cast<double>(cfg.N_ladder[i]) + 1e-9));
        entry["boxes"] = row;
        per_N.push_back(entry);
    }
    for (std::size_t i = 1; i < cfg.N_ladder.size(); ++i)
        for (std::size_t b = 0; b < boxes.size(); ++b)
            nonincreasing = nonincreasing &&
                            means[i][b] <= means[i - 1][b] + 2.0 * (ses[i][b] + ses[i - 1][b]);

    ExperimentReport report;
    report.summary["experiment"] = "moment";
    report.summary["rank"] = rank.to_json();
    report.summary["replications"] = R;
    report.summary["n_over_N"] = cfg.n_over_N;
    nlohmann::json boxes_json = nlohmann::json::array();
    for (const auto& box : boxes) {
        nlohmann::json bj;
        bj["lo"] = box.lo;
        bj["hi"] = box.hi;
        bj["probability"] = box.probability;
        boxes_json.push_back(bj);
    }
    report.summary["boxes"] = boxes_json;
    report.summary["per_N"] = per_N;
    report.summary["ordered_with_probability"] = ordered_everywhere;
    report.summary["nonincreasing_in_N"] = nonincreasing;
    report.summary["provenance"] = provenance(cfg);
    report.pass = ordered_everywhere && nonincreasing;
    report.summary["pass"] = report.pass;
    report.raw_csv = raw.str();
    report.plot_csv = ladder_plot_csv(cfg.N_ladder, first_box_means, "ES2_box0");
    return report;
}

// ---- variance bound ------------------------------------------------------

ExperimentReport run_variance_bound_experiment(const Config& cfg, int jobs) {
    int m;
    RankInfo rank;
    if (cfg.rank_override) {
        rank.m = m = *cfg.rank_override;
        rank.from_override = true;
        rank.D = cfg.model.D;
        if (!(cfg.model.D < 1.0 / m))
            throw RankConditionViolated("rank condition violated for override m");
    } else {
        const EvaluationGrid grid = cfg.resolve_grid();
        rank = resolve_rank(cfg, grid);
        m = rank.m;
    }
    const auto indices = multi_indices_of_order(cfg.model.p, m);

    const long maxN = cfg.N_ladder.back();
    PathSampler sampler(cfg.model, maxN);
    std::vector<double> dN(cfg.N_ladder.size());
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        dN[i] = dN_for(cfg, m, cfg.N_ladder[i]);

    const int R = std::max(cfg.replications, 1);
    std::vector<std::vector<std::vector<double>>> squares(
        cfg.N_ladder.size(),
        std::vector<std::vector<double>>(indices.size(),
                                         std::vector<double>(static_cast<std::size_t>(R))));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(R));
    parallel_for(R, effective_jobs(jobs), [&](long r) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
        seeds[static_cast<std::size_t>(r)] = seed;
        const GaussianPath path = sampler.sample(seed);
        std::vector<double> hsum(indices.size(), 0.0);
        std::size_t ladder_pos = 0;
        for (long j = 0; j < maxN; ++j) {
            for (std::size_t ii = 0; ii < indices.size(); ++ii) {
                double prod = 1.0;
                for (int d = 0; d < cfg.model.p; ++d)
                    prod *= hermite(indices[ii][static_cast<std::size_t>(d)], path.values(j, d));
                hsum[ii] += prod;
            }
            while (ladder_pos < cfg.N_ladder.size() && j + 1 == cfg.N_ladder[ladder_pos]) {
                for (std::size_t ii = 0; ii < indices.size(); ++ii)
                    squares[ladder_pos][ii][static_cast<std::size_t>(r)] = hsum[ii] * hsum[ii];
                ++ladder_pos;
            }
        }
    });

    CsvWriter raw({"N", "multi_index", "replication", "seed", "sum_squared"});
    auto index_name = [](const std::vector<int>& idx) {
        std::string s;
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (d) s.push_back('|');
            s += std::to_string(idx[d]);
        }
        return s;
    };
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i)
        for (std::size_t ii = 0; ii < indices.size(); ++ii)
            for (int r = 0; r < R; ++r)
                raw.add_row({std::to_string(cfg.N_ladder[i]), index_name(indices[ii]),
                             std::to_string(r),
                             std::to_string(seeds[static_cast<std::size_t>(r)]),
                             format_double(squares[i][ii][static_cast<std::size_t>(r)])});

    nlohmann::json per_N = nlohmann::json::array();
    std::vector<double> max_ratio(cfg.N_ladder.size(), 0.0);
    for (std::size_t i = 0; i < cfg.N_ladder.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t ii = 0; ii < indices.size(); ++ii) {
            const double mean = sample_mean(squares[i][ii]);
            const double ratio = mean / (dN[i] * dN[i]);
            max_ratio[i] = std::max(max_ratio[i], ratio);
            nlohmann::json cell;
            cell["multi_index"] = indices[ii];
            cell["ratio_to_dN2"] = ratio;
            cell["se"] =
                std::sqrt(sample_variance(squares[i][ii]) / R) / (dN[i] * dN[i]);
            row.push_back(cell);
        }
        nlohmann::json entry;
        entry["N"] = cfg.N_ladder[i];
        entry["d_N2"] = dN[i] * dN[i];
        entry["indices"] = row;
        per_N.push_back(entry);
    }
    const bool bounded = max_ratio.back() <= 2.0 * max_ratio.front();

    ExperimentReport report;
    report.summary["experiment"] = "variance";
    report.summary["rank"] = rank.to_json();
    report.summary["replications"] = R;
    report.summary["per_N"] = per_N;
    report.summary["bounded_ratios"] = bounded;
    report.summary["provenance"] = provenance(cfg);
    report.pass = bounded;
    report.summary["pass"] = report.pass;
    report.raw_csv = raw.str();
    report.plot_csv = ladder_plot_csv(cfg.N_ladder, max_ratio, "max_ratio");
    return report;
}

// ---- partition check -----------------------------------------------------

ExperimentReport run_partition_check(const Config& cfg) {
    const EvaluationGrid grid = cfg.resolve_grid();
    const RankInfo rank = resolve_rank(cfg, grid);
    const int m = rank.m;
    const SubordinationMode mode = cfg.resolved_lambda_mode();
    const int q = cfg.G.q();
    if (q > 4) throw CapExceeded("partition-check: q must be <= 4");

    const LambdaSpec lambda = build_lambda(cfg.G, m, mode);
    const int K = cfg.partition_K;
    const PartitionScheme scheme = build_scheme(lambda, K);

    nlohmann::json summary;
    summary["experiment"] = "partition-check";
    summary["rank"] = rank.to_json();
    summary["lambda_total"] = lambda.total;
    summary["K"] = K;
    bool pass = true;

    // quality counts (exact combinatorics, p bounded by the cap)
    {
        const auto grouped = enumerate_partitions(q, K);
        nlohmann::json counts = nlohmann::json::array();
        bool ok = true;
        long long total = 0;
        for (int k = 1; k <= K; ++k) {
            const long long expected = partitions_of_quality(q, k);
            const long long actual =
                static_cast<long long>(grouped[static_cast<std::size_t>(k - 1)].size());
            ok = ok && expected == actual;
            total += actual;
            counts.push_back({{"quality", k}, {"count", actual}, {"expected", expected}});
        }
        long long total_expected = 1;
        for (int i = 0; i < q; ++i) total_expected *= (K + 1);
        total_expected -= 1;
        ok = ok && total == total_expected;
        summary["quality_counts"] = counts;
        summary["total_partitions"] = total;
        summary["counts_match"] = ok;
        pass = pass && ok;
    }

    // increment bound and nesting on the chaining points
    {
        bool increments_ok = true;
        bool nesting_ok = true;
        for (int d = 0; d < q; ++d) {
            for (int k = 1; k <= K; ++k) {
                const auto& pts = scheme.points[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)];
                const auto& table = lambda.dims[static_cast<std::size_t>(d)];
                const double bound = lambda.total * std::pow(2.0, -k) +
                                     1e-9 * (1.0 + lambda.total);
                for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                    const double left_limit = table.left_value(pts[i + 1]);
                    const double at_point = table.value(pts[i]);
                    if (left_limit - at_point > bound) increments_ok = false;
                }
                if (k < K) {
                    const auto& finer =
                        scheme.points[static_cast<std::size_t>(d)][static_cast<std::size_t>(k + 1)];
                    for (std::size_t i = 0; i < pts.size(); ++i)
                        if (pts[i] != finer[2 * i]) nesting_ok = false;
                }
            }
        }
        summary["increment_bound_holds"] = increments_ok;
        summary["nesting_holds"] = nesting_ok;
        pass = pass && increments_ok && nesting_ok;
    }

    // decomposition probes (disjointness + union, brute force)
    {
        SplitMix64 gen(derive_seed(cfg.master_seed, 0xDEC0DEULL));
        int violations = 0;
        const int probes_per_dim = std::max(8, cfg.probe_points / std::max(1, q - 1));
        for (int trial = 0; trial < cfg.probe_x_count; ++trial) {
            std::vector<double> x(static_cast<std::size_t>(q));
            for (int d = 0; d < q; ++d)
                x[static_cast<std::size_t>(d)] =
                    lambda.dims[static_cast<std::size_t>(d)].generalized_inverse(
                        gen.next_unit() * lambda.total);
            const Decomposition dec = decompose(x, K, scheme);
            for (int probe = 0; probe < probes_per_dim * q * 40; ++probe) {
                std::vector<double> y(static_cast<std::size_t>(q));
                for (int d = 0; d < q; ++d)
                    y[static_cast<std::size_t>(d)] =
                        lambda.dims[static_cast<std::size_t>(d)].generalized_inverse(
                            gen.next_unit() * lambda.total) +
                        (gen.next_unit() - 0.5) * 0.25;
                int hits = 0;
                for (const auto& box : dec.boxes) {
                    bool inside = true;
                    for (int d = 0; d < q && inside; ++d)
                        inside = y[static_cast<std::size_t>(d)] > box.lo[static_cast<std::size_t>(d)] &&
                                 y[static_cast<std::size_t>(d)] <= box.hi[static_cast<std::size_t>(d)];
                    if (inside) ++hits;
                }
                bool in_quadrant = true;
                for (int d = 0; d < q && in_quadrant; ++d)
                    in_quadrant = y[static_cast<std::size_t>(d)] <= dec.a_corner[static_cast<std::size_t>(d)];
                if (hits != (in_quadrant ? 1 : 0)) ++violations;
            }
        }
        summary["decomposition_probe_violations"] = violations;
        pass = pass && violations == 0;
    }

    // increment domination on random grid pairs
    {
        SplitMix64 gen(derive_seed(cfg.master_seed, 0xD0));
        std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
        for (int i = 0; i < cfg.check_pairs; ++i) {
            std::vector<double> a(static_cast<std::size_t>(q)), b(static_cast<std::size_t>(q));
            for (int d = 0; d < q; ++d) {
                const auto& xs = grid.x_points[static_cast<std::size_t>(d)];
                double u = xs[static_cast<std::size_t>(gen.next() % xs.size())];
                double v = xs[static_cast<std::size_t>(gen.next() % xs.size())];
                a[static_cast<std::size_t>(d)] = std::min(u, v);
                b[static_cast<std::size_t>(d)] = std::max(u, v);
            }
            pairs.emplace_back(std::move(a), std::move(b));
        }
        const DominationReport dom =
            lambda_domination_report(cfg.G, m, lambda, pairs, 1e-6, cfg.quad);
        summary["domination_pairs"] = dom.pairs;
        summary["domination_violations"] = dom.violations;
        summary["domination_worst_margin"] = dom.worst_margin;
        pass = pass && dom.violations == 0;
    }

    // per-dimension chaining points at the configured quality, for export
    nlohmann::json points_json = nlohmann::json::array();
    for (int d = 0; d < q; ++d) {
        nlohmann::json levels = nlohmann::json::array();
        for (int k = 0; k <= K; ++k) {
            nlohmann::json pts = nlohmann::json::array();
            for (double v : scheme.points[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)])
                pts.push_back(std::isfinite(v) ? nlohmann::json(v)
                                               : nlohmann::json(v > 0 ? "inf" : "-inf"));
            levels.push_back(pts);
        }
        points_json.push_back(levels);
    }
    summary["chaining_points"] = points_json;
    summary["provenance"] = provenance(cfg);
    summary["pass"] = pass;

    ExperimentReport report;
    report.summary = std::move(summary);
    report.pass = pass;

    CsvWriter raw({"quality", "count"});
    for (int k = 1; k <= K; ++k)
        raw.add_row({std::to_string(k),
                     std::to_string(partitions_of_quality(q, k))});
    report.raw_csv = raw.str();
    CsvWriter plot({"quality", "count"});
    for (int k = 1; k <= K; ++k)
        plot.add_row({std::to_string(k),
                      std::to_string(partitions_of_quality(q, k))});
    report.plot_csv = plot.str();
    return report;
}

ExperimentReport run_experiment(const std::string& kind, const Config& cfg, int jobs) {
    if (kind == "reduction") return run_reduction_experiment(cfg, jobs);
    if (kind == "limit") return run_limit_experiment(cfg, jobs);
    if (kind == "moment") return run_moment_bound_experiment(cfg, jobs);
    if (kind == "variance") return run_variance_bound_experiment(cfg, jobs);
    if (kind == "partition-check") return run_partition_check(cfg);
    throw ConfigError("unknown experiment kind \"" + kind + "\"");
}

} // namespace lrdseq
