// Command-line front end: inject / sweep / smbo / ksens / granularity /
// cross / report. Exit codes: 0 success, 2 config error, 3 all trials
// failed.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gadsel/errors.hpp"
#include "gadsel/harness.hpp"
#include "gadsel/util.hpp"

namespace {

using namespace gadsel;

ExperimentConfig load_cfg(const std::string& path, const std::string& out) {
    ExperimentConfig cfg = load_experiment_config(path);
    if (!out.empty()) cfg.output_dir = out;
    return cfg;
}

int cmd_inject(const std::string& config_path, const std::string& out) {
    ExperimentConfig cfg = load_cfg(config_path, out);
    if (!cfg.inject)
        throw ConfigError("inject needs an [injection] section in the config");
    if (cfg.output_dir.empty())
        throw ConfigError("inject needs an output directory");
    AttributedGraph base =
        cfg.dataset.mode == DatasetConfig::Mode::synthetic
            ? generate_synthetic(cfg.dataset.synth)
            : load_graph(cfg.dataset.edge_path, cfg.dataset.attribute_path,
                         cfg.dataset.label_path);
    InjectionResult result = inject(base, cfg.injection);
    std::filesystem::create_directories(cfg.output_dir);
    save_graph(result.graph, cfg.output_dir + "/edges.txt",
               cfg.output_dir + "/attributes.csv",
               cfg.output_dir + "/labels.txt");
    write_text_file(cfg.output_dir + "/injection_manifest.json",
                    injection_manifest_json(result, cfg.injection));
    std::cout << "injected " << result.graph.node_count() << " nodes, "
              << result.graph.edges().size() << " edges -> " << cfg.output_dir
              << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out,
            std::optional<ExperimentConfig::SearchMode> force_mode) {
    ExperimentConfig cfg = load_cfg(config_path, out);
    if (force_mode) cfg.mode = *force_mode;
    if (cfg.output_dir.empty()) cfg.output_dir = "out";
    ExperimentResult result = run_experiment(cfg);
    std::cout << "wrote " << cfg.output_dir << "/trials.csv, summary.csv, "
              << "manifest.json\n";
    std::cout << "aggregate csm_auc=" << format_double(result.aggregate.csm_auc)
              << " median_auc=" << format_double(result.aggregate.median_auc)
              << " max_auc=" << format_double(result.aggregate.max_auc)
              << "\n";
    return 0;
}

int cmd_ksens(const std::string& config_path, const std::string& out,
              const std::vector<double>& ratios) {
    ExperimentConfig cfg = load_cfg(config_path, out);
    if (cfg.output_dir.empty()) cfg.output_dir = "out";
    auto rows = k_sensitivity(cfg, ratios);
    std::cout << "wrote " << cfg.output_dir << "/ksens.csv ("
              << rows.size() << " rows)\n";
    return 0;
}

int cmd_granularity(const std::string& config_path, const std::string& out,
                    const std::vector<std::string>& levels) {
    ExperimentConfig cfg = load_cfg(config_path, out);
    if (cfg.output_dir.empty()) cfg.output_dir = "out";
    auto rows = granularity_sweep(cfg, levels);
    std::cout << "wrote " << cfg.output_dir << "/granularity.csv ("
              << rows.size() << " rows)\n";
    return 0;
}

int cmd_cross(const std::vector<std::string>& config_paths,
              const std::string& out) {
    std::vector<ExperimentConfig> cfgs;
    for (const auto& p : config_paths) cfgs.push_back(load_experiment_config(p));
    std::string outdir = out.empty() ? "out" : out;
    CrossResult result = cross_detector_study(cfgs, outdir);
    for (const auto& e : result.entries)
        std::cout << e.label << ": best_t=" << format_double(e.best_t_mean)
                  << " csm_auc=" << format_double(e.csm_auc_mean) << "\n";
    if (result.r_defined)
        std::cout << "pearson r = " << format_double(result.r) << "\n";
    else
        std::cout << "pearson r undefined\n";
    std::cout << "note: " << result.note << "\n";
    return 0;
}

int cmd_report(const std::string& summary_path) {
    std::cout << render_report(summary_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised hyperparameter selection for graph anomaly "
                 "detectors"};
    app.require_subcommand(1);

    std::string config_path, out_dir, summary_path;
    std::vector<std::string> cross_configs, level_names;
    std::vector<double> ratios;

    auto* inject = app.add_subcommand("inject", "plant anomalies, write the "
                                                "labeled graph + manifest");
    inject->add_option("--config", config_path, "experiment config")
        ->required();
    inject->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "grid search over the config's "
                                              "hyperparameter grid");
    sweep->add_option("--config", config_path, "experiment config")
        ->required();
    sweep->add_option("--out", out_dir, "output directory");

    auto* smbo = app.add_subcommand("smbo", "sequential model-based search");
    smbo->add_option("--config", config_path, "experiment config")->required();
    smbo->add_option("--out", out_dir, "output directory");

    auto* ksens = app.add_subcommand("ksens", "re-score cached trials under "
                                              "different assumed ratios");
    ksens->add_option("--config", config_path, "experiment config")
        ->required();
    ksens->add_option("--ratios", ratios, "assumed anomaly ratios")
        ->required()
        ->delimiter(',');
    ksens->add_option("--out", out_dir, "output directory");

    auto* gran = app.add_subcommand("granularity", "compare nested search "
                                                   "grids");
    gran->add_option("--config", config_path, "experiment config")->required();
    gran->add_option("--levels", level_names, "level names (e.g. base,level2)")
        ->required()
        ->delimiter(',');
    gran->add_option("--out", out_dir, "output directory");

    auto* cross = app.add_subcommand("cross", "cross-detector T/AUC "
                                              "correlation study");
    cross->add_option("--config", cross_configs, "experiment configs (>= 3)")
        ->required();
    cross->add_option("--out", out_dir, "output directory");

    auto* report = app.add_subcommand("report", "render a summary.csv");
    report->add_option("--summary", summary_path, "path to summary.csv")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (inject->parsed()) return cmd_inject(config_path, out_dir);
        if (sweep->parsed())
            return cmd_run(config_path, out_dir,
                           gadsel::ExperimentConfig::SearchMode::grid);
        if (smbo->parsed())
            return cmd_run(config_path, out_dir,
                           gadsel::ExperimentConfig::SearchMode::smbo);
        if (ksens->parsed()) return cmd_ksens(config_path, out_dir, ratios);
        if (gran->parsed())
            return cmd_granularity(config_path, out_dir, level_names);
        if (cross->parsed()) return cmd_cross(cross_configs, out_dir);
        if (report->parsed()) return cmd_report(summary_path);
    } catch (const gadsel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const gadsel::SearchError& e) {
        std::cerr << "search error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
