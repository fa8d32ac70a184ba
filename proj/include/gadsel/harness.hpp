#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gadsel/config_file.hpp"
#include "gadsel/csm.hpp"
#include "gadsel/detectors.hpp"
#include "gadsel/graph.hpp"
#include "gadsel/injection.hpp"
#include "gadsel/metrics.hpp"
#include "gadsel/search.hpp"

namespace gadsel {

struct DatasetConfig {
    enum class Mode { synthetic, files };
    Mode mode = Mode::synthetic;
    SyntheticParams synth;
    std::string edge_path, attribute_path, label_path;
};

// Declarative description of one experiment, parsed and validated before
// any compute happens.
struct ExperimentConfig {
    std::string label = "experiment";
    DatasetConfig dataset;
    bool inject = false;
    InjectionPlan injection;
    DetectorKind kind = DetectorKind::generative_ae;
    TrainingParams training;
    std::vector<Dimension> grid;
    std::map<std::string, std::vector<Dimension>> levels;
    enum class SearchMode { grid, smbo };
    SearchMode mode = SearchMode::grid;
    SmboParams smbo;
    CsmVariant variant = CsmVariant::improved;
    double assumed_ratio = 0.05;
    std::vector<std::uint64_t> seeds;
    std::string granularity_label = "base";
    std::string output_dir;
    bool parallel_trials = true;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const IniFile& ini);

// One CSV row of the sweep report; aucs keeps the per-config detail in
// memory for tests and aggregation.
struct SweepSummary {
    std::string detector;
    std::string seed_label;
    std::size_t k = 0;
    CsmVariant variant = CsmVariant::improved;
    std::string best_config;
    double csm_auc = 0, min_auc = 0, median_auc = 0, max_auc = 0;
    double variation = 0, gain_min = 0, gain_median = 0, gain_max = 0;
    std::vector<double> aucs;
};

struct SeedRun {
    std::uint64_t seed = 0;
    SearchResult search;
    SweepSummary summary;  // filled by the report phase
};

struct ExperimentResult {
    std::vector<SeedRun> seeds;
    SweepSummary aggregate;
    std::uint64_t graph_hash = 0;
    std::string trials_csv;
    std::string summary_csv;
    std::string manifest_json;
};

// Cross-run cache of detector outputs keyed by
// (graph hash, detector kind, configuration, seed), so k-sensitivity and
// granularity reruns re-score cached score vectors instead of retraining.
class TrialCache {
public:
    std::optional<DetectorOutput> find(const std::string& key) const;
    void store(const std::string& key, const DetectorOutput& out);
    std::size_t size() const;

    static std::string make_key(std::uint64_t graph_hash, DetectorKind kind,
                                const std::string& config_string,
                                std::uint64_t seed);

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, DetectorOutput> map_;
};

AttributedGraph prepare_dataset(const ExperimentConfig& cfg);
HyperparameterSpace build_space(const std::vector<Dimension>& dims);

// Search phase: detectors, internal evaluation, and search only ever see a
// label-stripped copy of the graph. Ground truth is first read in
// report_phase, which joins AUCs onto the finished trial records.
std::vector<SeedRun> run_search_phase(const ExperimentConfig& cfg,
                                      const AttributedGraph& g,
                                      TrialCache* cache = nullptr);
ExperimentResult report_phase(const ExperimentConfig& cfg,
                              const AttributedGraph& g,
                              std::vector<SeedRun> runs);

// prepare + search + report; writes trials.csv, summary.csv, manifest.json
// into output_dir unless it is empty.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                TrialCache* cache = nullptr);

struct KsensRow {
    double ratio = 0;
    std::string seed_label;
    std::size_t k = 0;
    std::string best_config;
    double csm_auc = 0;
};

// Re-scores cached trials under each assumed anomaly ratio (grid mode only).
std::vector<KsensRow> k_sensitivity(const ExperimentConfig& cfg,
                                    const std::vector<double>& ratios);

struct GranularityRow {
    std::string level;
    std::string seed_label;
    double best_t = 0;
    double csm_auc = 0;
};

// Runs the search over nested grids, sharing one trial cache.
std::vector<GranularityRow> granularity_sweep(
    const ExperimentConfig& cfg, const std::vector<std::string>& levels);

struct CrossEntry {
    std::string label;
    double best_t_mean = 0;
    double csm_auc_mean = 0;
};

struct CrossResult {
    std::vector<CrossEntry> entries;
    bool r_defined = false;
    double r = 0;
    std::string note;
};

// Correlates best internal-metric values with their AUCs across detectors
// on one shared dataset. The result is a diagnostic only: T values are not
// comparable across heterogeneous detectors.
CrossResult cross_detector_study(const std::vector<ExperimentConfig>& cfgs,
                                 const std::string& output_dir = "");

// Human-readable rendering of a summary.csv.
std::string render_report(const std::string& summary_csv_path);

std::string trials_csv_content(const ExperimentConfig& cfg,
                               const HyperparameterSpace& space,
                               const std::vector<SeedRun>& runs);
std::string summary_csv_content(const std::vector<SeedRun>& runs,
                                const SweepSummary& aggregate);
std::string manifest_json_content(const ExperimentConfig& cfg,
                                  const AttributedGraph& g);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gadsel
