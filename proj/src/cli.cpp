#include "lrdseq/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "lrdseq/coefficients.hpp"
#include "lrdseq/config.hpp"
#include "lrdseq/errors.hpp"
#include "lrdseq/experiments.hpp"
#include "lrdseq/io.hpp"
#include "lrdseq/sampling.hpp"

namespace lrdseq {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
};

void write_manifest(const fs::path& path, const Config& cfg, const std::string& kind,
                    const std::vector<std::string>& outputs, double wall_seconds) {
    RunManifest manifest;
    manifest.config = cfg.raw;
    manifest.hash = config_hash(cfg.raw);
    manifest.master_seed = cfg.master_seed;
    manifest.experiment_kind = kind;
    manifest.outputs = outputs;
    manifest.wall_seconds = wall_seconds;
    write_file_atomic(path, manifest.to_json().dump(2) + "\n");
}

int cmd_simulate(const CommonOpts& opts) {
    const Config cfg = load_config(opts.config_path, opts.seed);
    if (cfg.simulate_N < 1)
        throw ConfigError("config field `simulate.N`: required for the simulate command");
    const GaussianPath path = sample_path(cfg.model, cfg.simulate_N, cfg.master_seed);

    std::vector<std::string> header{"j"};
    for (int i = 1; i <= cfg.model.p; ++i) header.push_back("x" + std::to_string(i));
    const bool with_y = cfg.emit_subordinated;
    Eigen::MatrixXd Y;
    if (with_y) {
        Y = subordinate(cfg.G, path);
        for (int k = 1; k <= cfg.G.q(); ++k) header.push_back("y" + std::to_string(k));
    }
    CsvWriter csv(header);
    for (long j = 0; j < cfg.simulate_N; ++j) {
        std::vector<std::string> row{std::to_string(j + 1)};
        for (int i = 0; i < cfg.model.p; ++i) row.push_back(format_double(path.values(j, i)));
        if (with_y)
            for (int k = 0; k < cfg.G.q(); ++k) row.push_back(format_double(Y(j, k)));
        csv.add_row(std::move(row));
    }

    const fs::path out = opts.out.empty() ? fs::path("paths.csv") : fs::path(opts.out);
    write_file_atomic(out, csv.str());
    write_manifest(out.string() + ".manifest.json", cfg, "simulate", {out.string()}, 0.0);
    std::printf("wrote %s (%ld rows)\n", out.string().c_str(), cfg.simulate_N);
    return 0;
}

int cmd_rank(const CommonOpts& opts) {
    const Config cfg = load_config(opts.config_path, opts.seed);
    const EvaluationGrid grid = cfg.resolve_grid();
    const RankResult family =
        hermite_rank_family(cfg.G, grid, cfg.qmax, cfg.rank_tol, cfg.quad);

    nlohmann::json report;
    report["schema"] = 1;
    report["family_rank"] = family.exceeded ? nlohmann::json("exceeds_qmax")
                                            : nlohmann::json(family.family_rank);
    report["qmax"] = cfg.qmax;
    report["tol"] = family.tol_used;
    if (!family.exceeded) {
        report["witness_x"] = nlohmann::json::array();
        for (double v : family.witness_x)
            report["witness_x"].push_back(
                std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(v > 0 ? "inf" : "-inf"));
        report["witness_index"] = family.witness_index;
        report["witness_value"] = family.witness_value;
    }

    // per-component family ranks over the marginal grids
    nlohmann::json comps = nlohmann::json::array();
    for (int j = 0; j < cfg.G.q(); ++j) {
        Subordinator single;
        single.p = cfg.G.p;
        single.components = {cfg.G.components[static_cast<std::size_t>(j)]};
        EvaluationGrid marginal;
        marginal.x_points = {grid.x_points[static_cast<std::size_t>(j)]};
        marginal.t_points = grid.t_points;
        const RankResult r =
            hermite_rank_family(single, marginal, cfg.qmax, cfg.rank_tol, cfg.quad);
        nlohmann::json cj;
        cj["component"] = j + 1;
        cj["kind"] = component_kind_name(cfg.G.components[static_cast<std::size_t>(j)]);
        cj["family_rank"] =
            r.exceeded ? nlohmann::json("exceeds_qmax") : nlohmann::json(r.family_rank);
        comps.push_back(cj);
    }
    report["components"] = comps;
    report["config_hash"] = config_hash(cfg.raw);

    std::printf("family rank: %s\n",
                family.exceeded ? "exceeds qmax" : std::to_string(family.family_rank).c_str());
    if (!family.exceeded) {
        std::printf("  witness x = (");
        for (std::size_t d = 0; d < family.witness_x.size(); ++d)
            std::printf("%s%s", d ? ", " : "", format_double(family.witness_x[d]).c_str());
        std::printf("), J = %.8g\n", family.witness_value);
    }
    std::printf("component ranks:\n");
    for (const auto& cj : comps)
        std::printf("  %d (%s): %s\n", cj["component"].get<int>(),
                    cj["kind"].get<std::string>().c_str(), cj["family_rank"].dump().c_str());

    const fs::path dir = opts.out.empty() ? fs::path(".") : fs::path(opts.out);
    const fs::path out = dir / ("rank_" + config_hash(cfg.raw) + ".json");
    write_file_atomic(out, report.dump(2) + "\n");
    write_manifest(dir / ("rank_" + config_hash(cfg.raw) + ".manifest.json"), cfg, "rank",
                   {out.string()}, 0.0);
    return 0;
}

int cmd_coeffs(const CommonOpts& opts) {
    const Config cfg = load_config(opts.config_path, opts.seed);
    const EvaluationGrid grid = cfg.resolve_grid();
    const HermiteCoeffTable table = coefficient_table(cfg.G, grid, cfg.qmax, cfg.quad);

    std::vector<std::string> header;
    for (int d = 1; d <= cfg.G.q(); ++d) header.push_back("x" + std::to_string(d));
    for (int d = 1; d <= cfg.G.p; ++d) header.push_back("l" + std::to_string(d));
    header.push_back("value");
    header.push_back("err");
    CsvWriter csv(header);
    const std::size_t lattice = grid.lattice_size();
    const std::vector<int> zero_index(static_cast<std::size_t>(cfg.G.p), 0);
    for (std::size_t flat = 0; flat < lattice; ++flat) {
        const auto pt = grid.point_at(flat);
        auto emit = [&](const std::vector<int>& l, double value, double err) {
            std::vector<std::string> row;
            for (double v : pt) row.push_back(format_double(v));
            for (int li : l) row.push_back(std::to_string(li));
            row.push_back(format_double(value));
            row.push_back(format_double(err));
            csv.add_row(std::move(row));
        };
        emit(zero_index, table.F[flat], 0.0); // distribution slot
        for (std::size_t i = 0; i < table.indices.size(); ++i)
            emit(table.indices[i], table.coeffs[flat][i].value, table.coeffs[flat][i].error);
    }

    const fs::path dir = opts.out.empty() ? fs::path(".") : fs::path(opts.out);
    const fs::path out = dir / ("coeffs_" + config_hash(cfg.raw) + ".csv");
    write_file_atomic(out, csv.str());
    write_manifest(dir / ("coeffs_" + config_hash(cfg.raw) + ".manifest.json"), cfg,
                   "coeffs", {out.string()}, 0.0);
    std::printf("wrote %s (%zu rows)\n", out.string().c_str(), csv.rows());
    return 0;
}

int cmd_experiment(const std::string& kind, const CommonOpts& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const Config cfg = load_config(opts.config_path, opts.seed);
    const ExperimentReport report = run_experiment(kind, cfg, opts.jobs);

    const std::string hash = config_hash(cfg.raw);
    const fs::path dir = opts.out.empty() ? fs::path(".") : fs::path(opts.out);
    const std::string stem = kind + "_" + hash;
    const fs::path json_path = dir / (stem + ".json");
    const fs::path csv_path = dir / (stem + ".csv");
    const fs::path plot_path = dir / (stem + "_plot.csv");

    write_file_atomic(json_path, report.summary.dump(2) + "\n");
    write_file_atomic(csv_path, report.raw_csv);
    write_file_atomic(plot_path, report.plot_csv);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / (stem + ".manifest.json"), cfg, kind,
                   {json_path.string(), csv_path.string(), plot_path.string()}, wall);

    std::printf("%s: %s (%.1fs)\n", kind.c_str(), report.pass ? "pass" : "FAIL", wall);
    std::printf("  summary: %s\n  raw: %s\n", json_path.string().c_str(),
                csv_path.string().c_str());
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"sequential empirical processes of long-range dependent subordinated "
                 "Gaussian vectors"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&opts](CLI::App* cmd, bool with_jobs) {
        cmd->add_option("--config", opts.config_path, "JSON config file")->required();
        cmd->add_option("--out", opts.out, "output path (file for simulate, directory otherwise)");
        cmd->add_option("--seed", opts.seed, "override the manifest master seed");
        if (with_jobs)
            cmd->add_option("--jobs", opts.jobs, "parallel replication cap (0 = hardware)");
    };

    auto* simulate = app.add_subcommand("simulate", "sample Gaussian paths to CSV");
    add_common(simulate, false);
    auto* rank = app.add_subcommand("rank", "Hermite rank report");
    add_common(rank, false);
    auto* coeffs = app.add_subcommand("coeffs", "Hermite coefficient table CSV");
    add_common(coeffs, false);
    auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiments");
    std::string kind;
    experiment
        ->add_option("kind", kind, "reduction|limit|moment|variance|partition-check")
        ->required();
    add_common(experiment, true);

    std::vector<const char*> argv;
    argv.push_back("lrdseq");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (rank->parsed()) return cmd_rank(opts);
        if (coeffs->parsed()) return cmd_coeffs(opts);
        if (experiment->parsed()) return cmd_experiment(kind, opts);
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const RankConditionViolated& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return 3;
    } catch (const NotPositiveDefinite& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return 3;
    } catch (const SizeCapExceeded& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return 3;
    } catch (const QuadratureNotConverged& e) {
        std::fprintf(stderr, "numeric non-convergence: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace lrdseq
