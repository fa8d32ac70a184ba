#include "gadsel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <json.hpp>

#include "gadsel/errors.hpp"
#include "gadsel/util.hpp"

namespace gadsel {

namespace {

const char* kVersion = "gadsel 0.1.0";

void require_keys(const IniFile& ini, const std::string& section,
                  const std::set<std::string>& allowed) {
    for (const auto& k : ini.keys(section))
        if (!allowed.count(k))
            throw ConfigError("unknown key '" + k + "' in [" + section + "]");
}

std::vector<Dimension> parse_grid_section(const IniFile& ini,
                                          const std::string& section) {
    std::vector<Dimension> dims;
    for (const auto& key : ini.keys(section)) {
        if (key.ends_with(".kind")) continue;
        Dimension d;
        d.name = key;
        std::string kind = ini.get_or(section, key + ".kind",
                                      key == "K" ? "integer" : "real");
        if (kind == "integer")
            d.kind = Dimension::Kind::integer;
        else if (kind == "real")
            d.kind = Dimension::Kind::real;
        else
            throw ConfigError("dimension kind must be real or integer, got '" +
                              kind + "'");
        d.values = ini.get_double_list(section, key);
        std::sort(d.values.begin(), d.values.end());
        dims.push_back(std::move(d));
    }
    if (dims.empty())
        throw ConfigError("grid section [" + section + "] declares no dimensions");
    return dims;
}

void validate_grid_matches_kind(const std::vector<Dimension>& dims,
                                DetectorKind kind,
                                const std::string& section) {
    std::vector<std::string> names;
    for (const auto& d : dims) names.push_back(d.name);
    std::sort(names.begin(), names.end());
    const std::vector<std::string> want =
        kind == DetectorKind::generative_ae
            ? std::vector<std::string>{"alpha"}
            : std::vector<std::string>{"K", "alpha"};
    if (names != want)
        throw ConfigError("[" + section + "] must declare exactly the " +
                          to_string(kind) + " dimensions");
}

std::string seed_label_of(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(IniFile::parse_file(path));
}

ExperimentConfig parse_experiment_config(const IniFile& ini) {
    ExperimentConfig cfg;

    for (const auto& s : ini.section_names()) {
        if (s == "experiment" || s == "dataset" || s == "injection" ||
            s == "detector" || s == "grid" || s == "search" || s == "smbo")
            continue;
        if (s.starts_with("grid.")) continue;
        throw ConfigError("unknown section [" + s + "]");
    }

    require_keys(ini, "experiment", {"label", "output_dir"});
    cfg.label = ini.get_or("experiment", "label", "experiment");
    cfg.output_dir = ini.get_or("experiment", "output_dir", "");

    require_keys(ini, "dataset",
                 {"mode", "n", "d", "communities", "intra_p", "inter_p",
                  "seed", "edges", "attributes", "labels"});
    std::string mode = ini.get_or("dataset", "mode", "synthetic");
    if (mode == "synthetic") {
        cfg.dataset.mode = DatasetConfig::Mode::synthetic;
        cfg.dataset.synth.n =
            static_cast<std::size_t>(ini.get_int_or("dataset", "n", 100));
        cfg.dataset.synth.d =
            static_cast<std::size_t>(ini.get_int_or("dataset", "d", 8));
        cfg.dataset.synth.communities = static_cast<std::size_t>(
            ini.get_int_or("dataset", "communities", 4));
        cfg.dataset.synth.intra_p =
            ini.get_double_or("dataset", "intra_p", 0.2);
        cfg.dataset.synth.inter_p =
            ini.get_double_or("dataset", "inter_p", 0.01);
        cfg.dataset.synth.seed =
            static_cast<std::uint64_t>(ini.get_int_or("dataset", "seed", 0));
    } else if (mode == "files") {
        cfg.dataset.mode = DatasetConfig::Mode::files;
        cfg.dataset.edge_path = ini.get("dataset", "edges");
        cfg.dataset.attribute_path = ini.get("dataset", "attributes");
        cfg.dataset.label_path = ini.get_or("dataset", "labels", "");
    } else {
        throw ConfigError("dataset mode must be synthetic or files");
    }

    if (ini.has_section("injection")) {
        require_keys(ini, "injection",
                     {"cliques", "clique_size", "contextual", "candidate_pool",
                      "seed"});
        cfg.inject = true;
        cfg.injection.clique_count =
            static_cast<std::size_t>(ini.get_int_or("injection", "cliques", 0));
        cfg.injection.clique_size = static_cast<std::size_t>(
            ini.get_int_or("injection", "clique_size", 15));
        cfg.injection.contextual_count = static_cast<std::size_t>(
            ini.get_int_or("injection", "contextual", 0));
        cfg.injection.candidate_pool = static_cast<std::size_t>(
            ini.get_int_or("injection", "candidate_pool", 50));
        cfg.injection.seed =
            static_cast<std::uint64_t>(ini.get_int_or("injection", "seed", 0));
    }

    require_keys(ini, "detector",
                 {"kind", "epochs", "learning_rate", "hidden_dim", "embed_dim",
                  "dense_node_ceiling", "scoring_rounds", "rwr_restart",
                  "time_budget_sec", "underfit_threshold", "underfit_window"});
    try {
        cfg.kind = detector_kind_from_string(ini.get("detector", "kind"));
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    cfg.training.epochs =
        static_cast<std::size_t>(ini.get_int_or("detector", "epochs", 100));
    cfg.training.learning_rate =
        ini.get_double_or("detector", "learning_rate", 1e-3);
    cfg.training.hidden_dim =
        static_cast<std::size_t>(ini.get_int_or("detector", "hidden_dim", 64));
    cfg.training.embed_dim =
        static_cast<std::size_t>(ini.get_int_or("detector", "embed_dim", 32));
    cfg.training.dense_node_ceiling = static_cast<std::size_t>(
        ini.get_int_or("detector", "dense_node_ceiling", 4000));
    cfg.training.scoring_rounds = static_cast<std::size_t>(
        ini.get_int_or("detector", "scoring_rounds", 16));
    cfg.training.rwr_restart =
        ini.get_double_or("detector", "rwr_restart", 0.5);
    cfg.training.time_budget_sec =
        ini.get_double_or("detector", "time_budget_sec", 0.0);
    cfg.training.underfit_threshold =
        ini.get_double_or("detector", "underfit_threshold", 1e-2);
    cfg.training.underfit_window = static_cast<std::size_t>(
        ini.get_int_or("detector", "underfit_window", 400));

    cfg.grid = parse_grid_section(ini, "grid");
    validate_grid_matches_kind(cfg.grid, cfg.kind, "grid");
    for (const auto& s : ini.section_names()) {
        if (!s.starts_with("grid.")) continue;
        auto dims = parse_grid_section(ini, s);
        validate_grid_matches_kind(dims, cfg.kind, s);
        cfg.levels[s.substr(5)] = std::move(dims);
    }

    require_keys(ini, "search",
                 {"mode", "variant", "assumed_ratio", "seeds", "granularity",
                  "parallel_trials"});
    std::string smode = ini.get_or("search", "mode", "grid");
    if (smode == "grid")
        cfg.mode = ExperimentConfig::SearchMode::grid;
    else if (smode == "smbo")
        cfg.mode = ExperimentConfig::SearchMode::smbo;
    else
        throw ConfigError("search mode must be grid or smbo");
    try {
        cfg.variant = csm_variant_from_string(
            ini.get_or("search", "variant", "improved"));
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    cfg.assumed_ratio = ini.get_double_or("search", "assumed_ratio", 0.05);
    if (cfg.assumed_ratio <= 0 || cfg.assumed_ratio >= 0.5)
        throw ConfigError("assumed_ratio must lie in (0, 0.5)");
    for (double s : ini.get_double_list("search", "seeds")) {
        if (s < 0 || s != std::floor(s))
            throw ConfigError("seeds must be non-negative integers");
        cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    cfg.granularity_label = ini.get_or("search", "granularity", "base");
    cfg.parallel_trials = ini.get_bool_or("search", "parallel_trials", true);

    if (ini.has_section("smbo")) {
        require_keys(ini, "smbo",
                     {"init", "budget", "pool", "length_scale", "signal_var",
                      "jitter"});
        cfg.smbo.init_j =
            static_cast<std::size_t>(ini.get_int_or("smbo", "init", 5));
        cfg.smbo.budget =
            static_cast<std::size_t>(ini.get_int_or("smbo", "budget", 15));
        cfg.smbo.pool_size =
            static_cast<std::size_t>(ini.get_int_or("smbo", "pool", 32));
        cfg.smbo.gp.length_scale =
            ini.get_double_or("smbo", "length_scale", 0.3);
        cfg.smbo.gp.signal_var = ini.get_double_or("smbo", "signal_var", 1.0);
        cfg.smbo.gp.jitter = ini.get_double_or("smbo", "jitter", 1e-6);
    }

    return cfg;
}

std::optional<DetectorOutput> TrialCache::find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void TrialCache::store(const std::string& key, const DetectorOutput& out) {
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(key, out);
}

std::size_t TrialCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
}

std::string TrialCache::make_key(std::uint64_t graph_hash, DetectorKind kind,
                                 const std::string& config_string,
                                 std::uint64_t seed) {
    return std::to_string(graph_hash) + "|" + to_string(kind) + "|" +
           config_string + "|" + std::to_string(seed);
}

AttributedGraph prepare_dataset(const ExperimentConfig& cfg) {
    AttributedGraph g =
        cfg.dataset.mode == DatasetConfig::Mode::synthetic
            ? generate_synthetic(cfg.dataset.synth)
            : load_graph(cfg.dataset.edge_path, cfg.dataset.attribute_path,
                         cfg.dataset.label_path);
    if (cfg.inject) {
        auto result = inject(g, cfg.injection);
        return std::move(result.graph);
    }
    return g;
}

HyperparameterSpace build_space(const std::vector<Dimension>& dims) {
    return HyperparameterSpace(dims);
}

std::vector<SeedRun> run_search_phase(const ExperimentConfig& cfg,
                                      const AttributedGraph& g,
                                      TrialCache* cache) {
    const AttributedGraph stripped = g.without_labels();
    const NormalizedAdjacency adj = normalized_adjacency(stripped);
    const HyperparameterSpace space = build_space(cfg.grid);
    const std::size_t n = stripped.node_count();
    const std::size_t k = choose_k(n, cfg.assumed_ratio);
    if (cfg.variant == CsmVariant::original && 2 * k > n)
        throw ConfigError("original csm variant needs k <= n/2");
    const std::uint64_t ghash = stripped.content_hash();

    std::vector<SeedRun> runs;
    runs.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) {
        TrialEvaluator evaluate = [&](const Configuration& c,
                                      std::uint64_t s) -> DetectorOutput {
            std::string key = TrialCache::make_key(
                ghash, cfg.kind, space.config_string(c), s);
            if (cache)
                if (auto hit = cache->find(key)) return *hit;
            DetectorSpec spec;
            spec.kind = cfg.kind;
            spec.hp = c;
            spec.training = cfg.training;
            spec.seed = s;
            DetectorOutput out = run_detector(space, spec, stripped, adj);
            if (cache) cache->store(key, out);
            return out;
        };
        SearchOptions opts;
        opts.variant = cfg.variant;
        opts.k = k;
        opts.seed = seed;
        opts.parallel_trials = cfg.parallel_trials;
        SearchResult res =
            cfg.mode == ExperimentConfig::SearchMode::grid
                ? grid_search(space, evaluate, opts)
                : smbo_search(space, evaluate, opts, cfg.smbo);
        SeedRun run;
        run.seed = seed;
        run.search = std::move(res);
        runs.push_back(std::move(run));
    }
    return runs;
}

ExperimentResult report_phase(const ExperimentConfig& cfg,
                              const AttributedGraph& g,
                              std::vector<SeedRun> runs) {
    const auto& labels = g.labels();  // ground truth enters here, not before
    const HyperparameterSpace space = build_space(cfg.grid);
    const std::size_t k = choose_k(g.node_count(), cfg.assumed_ratio);

    for (auto& run : runs) {
        std::vector<double> aucs;
        for (auto& t : run.search.trials) {
            if (t.status != TrialStatus::ok) continue;
            t.auc = roc_auc(t.scores, labels);
            aucs.push_back(*t.auc);
        }
        auto bi = best_trial_index(run.search.trials);
        if (!bi) throw SearchError("all trials failed");
        double csm_auc = *run.search.trials[*bi].auc;

        SweepSummary& s = run.summary;
        s.detector = to_string(cfg.kind);
        s.seed_label = seed_label_of(run.seed);
        s.k = k;
        s.variant = cfg.variant;
        s.best_config = space.config_string(run.search.best);
        s.csm_auc = csm_auc;
        s.min_auc = *std::min_element(aucs.begin(), aucs.end());
        s.median_auc = median_of(aucs);
        s.max_auc = *std::max_element(aucs.begin(), aucs.end());
        s.variation = performance_variation(aucs);
        s.gain_min = gain_over_min(csm_auc, aucs);
        s.gain_median = gain_over_median(csm_auc, aucs);
        s.gain_max = gain_over_max(csm_auc, aucs);
        s.aucs = std::move(aucs);
    }

    ExperimentResult result;
    result.graph_hash = g.content_hash();

    SweepSummary agg;
    agg.detector = to_string(cfg.kind);
    agg.seed_label = "mean";
    agg.k = k;
    agg.variant = cfg.variant;
    auto mean_over_runs = [&](auto field) {
        double acc = 0;
        for (const auto& r : runs) acc += field(r.summary);
        return acc / static_cast<double>(runs.size());
    };
    agg.csm_auc = mean_over_runs([](const SweepSummary& s) { return s.csm_auc; });
    agg.min_auc = mean_over_runs([](const SweepSummary& s) { return s.min_auc; });
    agg.median_auc =
        mean_over_runs([](const SweepSummary& s) { return s.median_auc; });
    agg.max_auc = mean_over_runs([](const SweepSummary& s) { return s.max_auc; });
    agg.variation =
        mean_over_runs([](const SweepSummary& s) { return s.variation; });
    agg.gain_min =
        mean_over_runs([](const SweepSummary& s) { return s.gain_min; });
    agg.gain_median =
        mean_over_runs([](const SweepSummary& s) { return s.gain_median; });
    agg.gain_max =
        mean_over_runs([](const SweepSummary& s) { return s.gain_max; });

    result.seeds = std::move(runs);
    result.aggregate = std::move(agg);
    result.trials_csv = trials_csv_content(cfg, space, result.seeds);
    result.summary_csv = summary_csv_content(result.seeds, result.aggregate);
    result.manifest_json = manifest_json_content(cfg, g);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                TrialCache* cache) {
    AttributedGraph g = prepare_dataset(cfg);
    auto runs = run_search_phase(cfg, g, cache);
    ExperimentResult result = report_phase(cfg, g, std::move(runs));
    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        write_text_file(cfg.output_dir + "/trials.csv", result.trials_csv);
        write_text_file(cfg.output_dir + "/summary.csv", result.summary_csv);
        write_text_file(cfg.output_dir + "/manifest.json",
                        result.manifest_json);
    }
    return result;
}

std::vector<KsensRow> k_sensitivity(const ExperimentConfig& cfg,
                                    const std::vector<double>& ratios) {
    if (cfg.mode != ExperimentConfig::SearchMode::grid)
        throw ConfigError(
            "k-sensitivity requires grid search (smbo trajectories depend "
            "on k, so trials could not be reused)");
    if (ratios.empty()) throw ConfigError("no ratios given");
    for (double r : ratios)
        if (r <= 0 || r >= 0.5)
            throw ConfigError("ratios must lie in (0, 0.5)");

    AttributedGraph g = prepare_dataset(cfg);
    TrialCache cache;
    std::vector<KsensRow> rows;
    for (double ratio : ratios) {
        ExperimentConfig c2 = cfg;
        c2.assumed_ratio = ratio;
        c2.output_dir.clear();
        auto runs = run_search_phase(c2, g, &cache);
        auto res = report_phase(c2, g, std::move(runs));
        for (const auto& run : res.seeds)
            rows.push_back({ratio, run.summary.seed_label, run.summary.k,
                            run.summary.best_config, run.summary.csm_auc});
        rows.push_back({ratio, "mean", res.aggregate.k, "",
                        res.aggregate.csm_auc});
    }

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        std::string csv = "ratio,seed,k,best_config,csm_auc\n";
        for (const auto& r : rows)
            csv += format_double(r.ratio) + "," + r.seed_label + "," +
                   std::to_string(r.k) + "," + r.best_config + "," +
                   format_double(r.csm_auc) + "\n";
        write_text_file(cfg.output_dir + "/ksens.csv", csv);
    }
    return rows;
}

std::vector<GranularityRow> granularity_sweep(
    const ExperimentConfig& cfg, const std::vector<std::string>& levels) {
    if (levels.size() < 1) throw ConfigError("no granularity levels given");
    std::vector<std::pair<std::string, std::vector<Dimension>>> grids;
    for (const auto& name : levels) {
        if (name == "base") {
            grids.emplace_back(name, cfg.grid);
        } else {
            auto it = cfg.levels.find(name);
            if (it == cfg.levels.end())
                throw ConfigError("no [grid." + name + "] section in config");
            grids.emplace_back(name, it->second);
        }
    }
    // Every level must nest inside the next (same dimensions, subset values).
    for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
        const auto& a = grids[i].second;
        const auto& b = grids[i + 1].second;
        for (const auto& da : a) {
            auto match = std::find_if(b.begin(), b.end(), [&](const Dimension& db) {
                return db.name == da.name;
            });
            if (match == b.end())
                throw ValidationError("level '" + grids[i + 1].first +
                                      "' lacks dimension '" + da.name + "'");
            for (double v : da.values)
                if (!std::binary_search(match->values.begin(),
                                        match->values.end(), v))
                    throw ValidationError(
                        "granularity levels are not nested: value " +
                        format_double(v) + " of '" + da.name +
                        "' missing from level '" + grids[i + 1].first + "'");
        }
        if (a.size() != b.size())
            throw ValidationError("granularity levels declare different dimensions");
    }

    AttributedGraph g = prepare_dataset(cfg);
    TrialCache cache;
    std::vector<GranularityRow> rows;
    for (const auto& [name, dims] : grids) {
        ExperimentConfig c2 = cfg;
        c2.grid = dims;
        c2.granularity_label = name;
        c2.output_dir.clear();
        auto runs = run_search_phase(c2, g, &cache);
        auto res = report_phase(c2, g, std::move(runs));
        double t_mean = 0, auc_mean = 0;
        for (const auto& run : res.seeds) {
            auto bi = best_trial_index(run.search.trials);
            double best_t = *run.search.trials[*bi].t_value;
            rows.push_back({name, run.summary.seed_label, best_t,
                            run.summary.csm_auc});
            t_mean += best_t;
            auc_mean += run.summary.csm_auc;
        }
        t_mean /= static_cast<double>(res.seeds.size());
        auc_mean /= static_cast<double>(res.seeds.size());
        rows.push_back({name, "mean", t_mean, auc_mean});
    }

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        std::string csv = "level,seed,best_t,csm_auc\n";
        for (const auto& r : rows)
            csv += r.level + "," + r.seed_label + "," + format_double(r.best_t) +
                   "," + format_double(r.csm_auc) + "\n";
        write_text_file(cfg.output_dir + "/granularity.csv", csv);
    }
    return rows;
}

CrossResult cross_detector_study(const std::vector<ExperimentConfig>& cfgs,
                                 const std::string& output_dir) {
    if (cfgs.size() < 3)
        throw ValidationError(
            "cross-detector study needs at least three configurations");

    CrossResult out;
    std::optional<std::uint64_t> dataset_hash;
    std::vector<double> ts, aucs;
    for (const auto& cfg : cfgs) {
        ExperimentConfig c2 = cfg;
        c2.output_dir.clear();
        AttributedGraph g = prepare_dataset(c2);
        std::uint64_t h = g.content_hash();
        if (!dataset_hash)
            dataset_hash = h;
        else if (*dataset_hash != h)
            throw ValidationError(
                "cross-detector study requires one shared dataset");
        auto runs = run_search_phase(c2, g, nullptr);
        auto res = report_phase(c2, g, std::move(runs));

        double t_mean = 0;
        for (const auto& run : res.seeds) {
            auto bi = best_trial_index(run.search.trials);
            t_mean += *run.search.trials[*bi].t_value;
        }
        t_mean /= static_cast<double>(res.seeds.size());
        CrossEntry e;
        e.label = cfg.label;
        e.best_t_mean = t_mean;
        e.csm_auc_mean = res.aggregate.csm_auc;
        out.entries.push_back(e);
        ts.push_back(t_mean);
        aucs.push_back(res.aggregate.csm_auc);
    }

    bool finite = std::all_of(ts.begin(), ts.end(),
                              [](double v) { return std::isfinite(v); });
    if (!finite) {
        out.r_defined = false;
        out.note =
            "correlation undefined (non-finite T); diagnostic only: T values "
            "are not comparable across heterogeneous detectors";
    } else {
        try {
            out.r = pearson(ts, aucs);
            out.r_defined = true;
            out.note =
                "diagnostic only: T values are not comparable across "
                "heterogeneous detectors and should not drive detector "
                "selection";
        } catch (const ValidationError&) {
            out.r_defined = false;
            out.note =
                "correlation undefined (constant input); diagnostic only: T "
                "values are not comparable across heterogeneous detectors";
        }
    }

    if (!output_dir.empty()) {
        std::filesystem::create_directories(output_dir);
        std::string csv = "label,best_t_mean,csm_auc_mean\n";
        for (const auto& e : out.entries)
            csv += e.label + "," + format_double(e.best_t_mean) + "," +
                   format_double(e.csm_auc_mean) + "\n";
        write_text_file(output_dir + "/cross.csv", csv);
        nlohmann::json j;
        j["pearson_r"] =
            out.r_defined ? nlohmann::json(out.r) : nlohmann::json(nullptr);
        j["note"] = out.note;
        write_text_file(output_dir + "/cross_summary.json", j.dump(2) + "\n");
    }
    return out;
}

std::string trials_csv_content(const ExperimentConfig& cfg,
                               const HyperparameterSpace& space,
                               const std::vector<SeedRun>& runs) {
    std::string out = "detector,seed";
    for (const auto& d : space.dims()) out += "," + d.name;
    out += ",status,t,auc\n";
    for (const auto& run : runs) {
        for (const auto& t : run.search.trials) {
            out += to_string(cfg.kind) + "," + std::to_string(run.seed);
            for (std::size_t l = 0; l < space.dim_count(); ++l) {
                out += ",";
                if (space.dim(l).kind == Dimension::Kind::integer)
                    out += std::to_string(
                        static_cast<long long>(t.config.values[l]));
                else
                    out += format_double(t.config.values[l]);
            }
            out += "," + status_code(t.status);
            out += ",";
            if (t.t_value) out += format_double(*t.t_value);
            out += ",";
            if (t.auc) out += format_double(*t.auc);
            out += "\n";
        }
    }
    return out;
}

namespace {
std::string summary_row(const SweepSummary& s) {
    return s.detector + "," + s.seed_label + "," + std::to_string(s.k) + "," +
           to_string(s.variant) + "," + s.best_config + "," +
           format_double(s.csm_auc) + "," + format_double(s.min_auc) + "," +
           format_double(s.median_auc) + "," + format_double(s.max_auc) + "," +
           format_double(s.variation) + "," + format_double(s.gain_min) + "," +
           format_double(s.gain_median) + "," + format_double(s.gain_max) +
           "\n";
}
}  // namespace

std::string summary_csv_content(const std::vector<SeedRun>& runs,
                                const SweepSummary& aggregate) {
    std::string out =
        "detector,seed,k,variant,best_config,csm_auc,min_auc,median_auc,"
        "max_auc,variation,gain_min,gain_median,gain_max\n";
    for (const auto& run : runs) out += summary_row(run.summary);
    out += summary_row(aggregate);
    return out;
}

std::string manifest_json_content(const ExperimentConfig& cfg,
                                  const AttributedGraph& g) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["label"] = cfg.label;

    nlohmann::json ds;
    if (cfg.dataset.mode == DatasetConfig::Mode::synthetic) {
        ds["mode"] = "synthetic";
        ds["n"] = cfg.dataset.synth.n;
        ds["d"] = cfg.dataset.synth.d;
        ds["communities"] = cfg.dataset.synth.communities;
        ds["intra_p"] = cfg.dataset.synth.intra_p;
        ds["inter_p"] = cfg.dataset.synth.inter_p;
        ds["seed"] = cfg.dataset.synth.seed;
    } else {
        ds["mode"] = "files";
        ds["edges"] = cfg.dataset.edge_path;
        ds["attributes"] = cfg.dataset.attribute_path;
        if (!cfg.dataset.label_path.empty())
            ds["labels"] = cfg.dataset.label_path;
    }
    j["dataset"] = ds;

    if (cfg.inject) {
        j["injection"] = {{"cliques", cfg.injection.clique_count},
                          {"clique_size", cfg.injection.clique_size},
                          {"contextual", cfg.injection.contextual_count},
                          {"candidate_pool", cfg.injection.candidate_pool},
                          {"seed", cfg.injection.seed}};
        j["injection_mode"] = "single_graph_shared_across_seeds";
    }

    j["detector"] = {{"kind", to_string(cfg.kind)},
                     {"epochs", cfg.training.epochs},
                     {"learning_rate", cfg.training.learning_rate},
                     {"hidden_dim", cfg.training.hidden_dim},
                     {"embed_dim", cfg.training.embed_dim},
                     {"dense_node_ceiling", cfg.training.dense_node_ceiling},
                     {"scoring_rounds", cfg.training.scoring_rounds},
                     {"rwr_restart", cfg.training.rwr_restart},
                     {"time_budget_sec", cfg.training.time_budget_sec},
                     {"underfit_threshold", cfg.training.underfit_threshold},
                     {"underfit_window", cfg.training.underfit_window}};

    nlohmann::json grid;
    for (const auto& d : cfg.grid)
        grid[d.name] = {{"kind", d.kind == Dimension::Kind::integer
                                     ? "integer"
                                     : "real"},
                        {"values", d.values}};
    j["grid"] = grid;
    if (!cfg.levels.empty()) {
        nlohmann::json levels;
        for (const auto& [name, dims] : cfg.levels) {
            nlohmann::json lg;
            for (const auto& d : dims) lg[d.name] = d.values;
            levels[name] = lg;
        }
        j["granularity_levels"] = levels;
    }

    j["search"] = {{"mode", cfg.mode == ExperimentConfig::SearchMode::grid
                                ? "grid"
                                : "smbo"},
                   {"variant", to_string(cfg.variant)},
                   {"assumed_ratio", cfg.assumed_ratio},
                   {"granularity", cfg.granularity_label},
                   {"parallel_trials", cfg.parallel_trials}};
    if (cfg.mode == ExperimentConfig::SearchMode::smbo)
        j["smbo"] = {{"init", cfg.smbo.init_j},
                     {"budget", cfg.smbo.budget},
                     {"pool", cfg.smbo.pool_size},
                     {"length_scale", cfg.smbo.gp.length_scale},
                     {"signal_var", cfg.smbo.gp.signal_var},
                     {"jitter", cfg.smbo.gp.jitter}};

    j["seeds"] = cfg.seeds;

    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(g.content_hash()));
    j["graph"] = {{"nodes", g.node_count()},
                  {"edges", g.edges().size()},
                  {"attr_dim", g.attr_dim()},
                  {"hash", hash_hex},
                  {"labeled", g.has_labels()}};

    return j.dump(2) + "\n";
}

std::string render_report(const std::string& summary_csv_path) {
    std::ifstream in(summary_csv_path);
    if (!in) throw ConfigError("cannot open " + summary_csv_path);
    std::vector<std::vector<std::string>> table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto comma = line.find(',', pos);
            auto end = comma == std::string::npos ? line.size() : comma;
            row.push_back(line.substr(pos, end - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        table.push_back(std::move(row));
    }
    if (table.empty()) throw ConfigError("empty summary file");

    std::vector<std::size_t> widths;
    for (const auto& row : table) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t i = 0; i < table[r].size(); ++i) {
            if (i) out << "  ";
            out << table[r][i]
                << std::string(widths[i] - table[r][i].size(), ' ');
        }
        out << "\n";
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t w : widths) total += w + 2;
            out << std::string(total > 2 ? total - 2 : total, '-') << "\n";
        }
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

}  // namespace gadsel
