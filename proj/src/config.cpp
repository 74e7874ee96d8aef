#include "lrdseq/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lrdseq/errors.hpp"

namespace lrdseq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigError("config field `" + field + "`: " + why);
}

const json& require(const json& j, const std::string& field, const char* key) {
    if (!j.contains(key)) fail(field + "." + key, "missing");
    return j.at(key);
}

double get_number(const json& j, const std::string& field) {
    // accept "inf"/"-inf" strings for extended reals
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        fail(field, "expected a number or \"inf\"/\"-inf\"");
    }
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

double req_number(const json& j, const std::string& field, const char* key) {
    return get_number(require(j, field, key), field + "." + key);
}

long req_integer(const json& j, const std::string& field, const char* key) {
    const json& v = require(j, field, key);
    if (!v.is_number_integer()) fail(field + "." + key, "expected an integer");
    return v.get<long>();
}

CovarianceModel parse_model(const json& j) {
    CovarianceModel model;
    model.p = static_cast<int>(req_integer(j, "model", "p"));
    model.D = req_number(j, "model", "D");
    if (!(model.D > 0.0 && model.D < 1.0)) fail("model.D", "must lie in (0,1)");

    const std::string kind = require(j, "model", "kind").get<std::string>();
    if (kind == "fgn")
        model.kind = LagLaw::fgn;
    else if (kind == "pure_power")
        model.kind = LagLaw::pure_power;
    else
        fail("model.kind", "must be \"fgn\" or \"pure_power\"");

    model.L.kind = SlowlyVarying::Kind::constant;
    model.L.param = 1.0;
    if (j.contains("slowly_varying")) {
        const json& sv = j.at("slowly_varying");
        const std::string type = require(sv, "model.slowly_varying", "type").get<std::string>();
        if (type == "constant") {
            model.L.kind = SlowlyVarying::Kind::constant;
            model.L.param = req_number(sv, "model.slowly_varying", "c");
        } else if (type == "log_power") {
            model.L.kind = SlowlyVarying::Kind::log_power;
            model.L.param = req_number(sv, "model.slowly_varying", "a");
        } else {
            fail("model.slowly_varying.type", "must be \"constant\" or \"log_power\"");
        }
    }

    model.cross = Eigen::MatrixXd::Identity(model.p, model.p);
    if (j.contains("cross")) {
        const json& cross = j.at("cross");
        if (!cross.is_array() || static_cast<int>(cross.size()) != model.p)
            fail("model.cross", "must be a p x p array");
        for (int r = 0; r < model.p; ++r) {
            const json& row = cross.at(r);
            if (!row.is_array() || static_cast<int>(row.size()) != model.p)
                fail("model.cross", "must be a p x p array");
            for (int c = 0; c < model.p; ++c)
                model.cross(r, c) = get_number(row.at(c), "model.cross");
        }
    }
    if (j.contains("max_Np")) model.max_Np = req_integer(j, "model", "max_Np");

    try {
        model.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config field `model`: ") + e.what());
    }
    return model;
}

Component parse_component(const json& j, int p, const std::string& field) {
    const std::string type = require(j, field, "type").get<std::string>();
    auto coord_of = [&]() {
        const long c = req_integer(j, field, "coord");
        if (c < 1 || c > p) fail(field + ".coord", "must be in [1, p]");
        return static_cast<int>(c - 1); // stored 0-based
    };
    if (type == "identity") return IdentityComp{coord_of()};
    if (type == "square") return SquareComp{coord_of()};
    if (type == "abs") return AbsComp{coord_of()};
    if (type == "poly") {
        PolyComp comp;
        comp.coord = coord_of();
        const json& coeffs = require(j, field, "coeffs");
        if (!coeffs.is_array() || coeffs.empty()) fail(field + ".coeffs", "expected a nonempty array");
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            comp.coeffs.push_back(get_number(coeffs.at(i), field + ".coeffs"));
        return comp;
    }
    if (type == "indicator") {
        IndicatorComp comp;
        comp.coord = coord_of();
        const json& ivs = require(j, field, "intervals");
        if (!ivs.is_array()) fail(field + ".intervals", "expected an array of [lo, hi]");
        std::vector<Interval> parts;
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            const json& iv = ivs.at(i);
            if (!iv.is_array() || iv.size() != 2)
                fail(field + ".intervals", "each entry must be [lo, hi]");
            parts.push_back({get_number(iv.at(0), field + ".intervals"),
                             get_number(iv.at(1), field + ".intervals")});
        }
        comp.set = IntervalSet::from_parts(std::move(parts));
        return comp;
    }
    if (type == "linear") {
        LinearComp comp;
        const json& w = require(j, field, "weights");
        if (!w.is_array() || static_cast<int>(w.size()) != p)
            fail(field + ".weights", "must be an array of length p");
        for (std::size_t i = 0; i < w.size(); ++i)
            comp.weights.push_back(get_number(w.at(i), field + ".weights"));
        return comp;
    }
    fail(field + ".type", "unknown component kind \"" + type + "\"");
}

Subordinator parse_subordinator(const json& j, int model_p) {
    Subordinator G;
    G.p = static_cast<int>(req_integer(j, "subordinator", "p"));
    if (G.p != model_p) fail("subordinator.p", "must equal model.p");
    const json& comps = require(j, "subordinator", "components");
    if (!comps.is_array() || comps.empty())
        fail("subordinator.components", "expected a nonempty array");
    for (std::size_t i = 0; i < comps.size(); ++i)
        G.components.push_back(parse_component(
            comps.at(i), G.p, "subordinator.components[" + std::to_string(i) + "]"));
    G.validate();
    return G;
}

} // namespace

EvaluationGrid Config::resolve_grid() const {
    if (explicit_grid) return *explicit_grid;
    return make_default_grid(G, grid_points_per_dim, t_count);
}

Config parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override) {
    Config cfg;
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    if (!doc.contains("schema") || !doc.at("schema").is_number_integer() ||
        doc.at("schema").get<int>() != 1)
        fail("schema", "must be the integer 1");

    cfg.model = parse_model(require(doc, "", "model"));
    cfg.G = parse_subordinator(require(doc, "", "subordinator"), cfg.model.p);

    if (doc.contains("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer())
            fail("seed", "expected an integer");
        cfg.master_seed = s.get<std::uint64_t>();
    }
    if (seed_override) cfg.master_seed = *seed_override;

    if (doc.contains("quadrature")) {
        const json& q = doc.at("quadrature");
        if (q.contains("abs_tol")) cfg.quad.abs_tol = req_number(q, "quadrature", "abs_tol");
        if (q.contains("rel_tol")) cfg.quad.rel_tol = req_number(q, "quadrature", "rel_tol");
        if (q.contains("max_panels"))
            cfg.quad.max_panels = static_cast<int>(req_integer(q, "quadrature", "max_panels"));
        if (q.contains("qmc_points"))
            cfg.quad.qmc_points = static_cast<int>(req_integer(q, "quadrature", "qmc_points"));
    }

    if (doc.contains("hermite")) {
        const json& h = doc.at("hermite");
        if (h.contains("qmax")) cfg.qmax = static_cast<int>(req_integer(h, "hermite", "qmax"));
        if (h.contains("tol")) cfg.rank_tol = req_number(h, "hermite", "tol");
        if (h.contains("rank_override"))
            cfg.rank_override = static_cast<int>(req_integer(h, "hermite", "rank_override"));
        if (cfg.qmax < 1) fail("hermite.qmax", "must be >= 1");
    }

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        if (g.contains("points_per_dim"))
            cfg.grid_points_per_dim = static_cast<int>(req_integer(g, "grid", "points_per_dim"));
        if (g.contains("t_count"))
            cfg.t_count = static_cast<int>(req_integer(g, "grid", "t_count"));
        if (g.contains("explicit_x")) {
            const json& ex = g.at("explicit_x");
            if (!ex.is_array() || static_cast<int>(ex.size()) != cfg.G.q())
                fail("grid.explicit_x", "must be an array of q point lists");
            EvaluationGrid grid;
            for (std::size_t d = 0; d < ex.size(); ++d) {
                std::vector<double> pts{-kInf};
                for (const auto& v : ex.at(d))
                    pts.push_back(get_number(v, "grid.explicit_x"));
                pts.push_back(kInf);
                std::sort(pts.begin(), pts.end());
                pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
                grid.x_points.push_back(std::move(pts));
            }
            grid.t_points = default_t_points(cfg.t_count);
            if (g.contains("t_points")) {
                grid.t_points.clear();
                for (const auto& v : g.at("t_points"))
                    grid.t_points.push_back(get_number(v, "grid.t_points"));
            }
            try {
                grid.validate();
            } catch (const Error& e) {
                fail("grid.explicit_x", e.what());
            }
            cfg.explicit_grid = grid;
        }
    }

    if (doc.contains("experiment")) {
        const json& e = doc.at("experiment");
        cfg.kind = require(e, "experiment", "kind").get<std::string>();
        if (cfg.kind != "reduction" && cfg.kind != "limit" && cfg.kind != "moment" &&
            cfg.kind != "variance" && cfg.kind != "partition-check")
            fail("experiment.kind", "unknown kind \"" + cfg.kind + "\"");
        if (e.contains("N_ladder")) {
            for (const auto& v : e.at("N_ladder")) {
                if (!v.is_number_integer()) fail("experiment.N_ladder", "expected integers");
                cfg.N_ladder.push_back(v.get<long>());
            }
            for (std::size_t i = 1; i < cfg.N_ladder.size(); ++i)
                if (cfg.N_ladder[i] <= cfg.N_ladder[i - 1])
                    fail("experiment.N_ladder", "must be strictly increasing");
        }
        if (e.contains("replications"))
            cfg.replications = static_cast<int>(req_integer(e, "experiment", "replications"));
        if (e.contains("epsilons"))
            for (const auto& v : e.at("epsilons"))
                cfg.epsilons.push_back(get_number(v, "experiment.epsilons"));
        if (e.contains("x_slice"))
            for (const auto& v : e.at("x_slice"))
                cfg.x_slice.push_back(get_number(v, "experiment.x_slice"));
        if (e.contains("reference_multiplier"))
            cfg.reference_multiplier =
                static_cast<int>(req_integer(e, "experiment", "reference_multiplier"));
        if (e.contains("replication_design")) {
            cfg.replication_design = e.at("replication_design").get<std::string>();
            if (cfg.replication_design != "plain" &&
                cfg.replication_design != "stratified_h1")
                fail("experiment.replication_design",
                     "must be \"plain\" or \"stratified_h1\"");
        }
        if (e.contains("box_probabilities")) {
            cfg.box_probabilities.clear();
            for (const auto& v : e.at("box_probabilities"))
                cfg.box_probabilities.push_back(get_number(v, "experiment.box_probabilities"));
        }
        if (e.contains("n_over_N")) {
            cfg.n_over_N = req_number(e, "experiment", "n_over_N");
            if (!(cfg.n_over_N > 0.0 && cfg.n_over_N <= 1.0))
                fail("experiment.n_over_N", "must lie in (0,1]");
        }
        if (e.contains("partition_K"))
            cfg.partition_K = static_cast<int>(req_integer(e, "experiment", "partition_K"));
        if (e.contains("probe_points"))
            cfg.probe_points = static_cast<int>(req_integer(e, "experiment", "probe_points"));
        if (e.contains("probe_x_count"))
            cfg.probe_x_count = static_cast<int>(req_integer(e, "experiment", "probe_x_count"));
        if (e.contains("check_pairs"))
            cfg.check_pairs = static_cast<int>(req_integer(e, "experiment", "check_pairs"));
        if (e.contains("mode")) {
            const std::string mode = e.at("mode").get<std::string>();
            if (mode == "univariate")
                cfg.lambda_mode = SubordinationMode::univariate;
            else if (mode == "multivariate")
                cfg.lambda_mode = SubordinationMode::multivariate;
            else
                fail("experiment.mode", "must be \"univariate\" or \"multivariate\"");
        }

        const bool distributional = cfg.kind == "reduction" || cfg.kind == "limit";
        if (distributional && cfg.replications < 50)
            fail("experiment.replications", "distributional experiments need >= 50");
        if (cfg.kind != "partition-check" && cfg.N_ladder.empty())
            fail("experiment.N_ladder", "missing");
    }

    if (doc.contains("simulate")) {
        const json& s = doc.at("simulate");
        cfg.simulate_N = req_integer(s, "simulate", "N");
        if (cfg.simulate_N < 1) fail("simulate.N", "must be >= 1");
        if (s.contains("emit_subordinated"))
            cfg.emit_subordinated = s.at("emit_subordinated").get<bool>();
    }

    cfg.raw = doc;
    cfg.raw["seed"] = cfg.master_seed; // effective seed participates in the hash
    return cfg;
}

Config load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, seed_override);
}

} // namespace lrdseq
