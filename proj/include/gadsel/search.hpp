#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gadsel/csm.hpp"
#include "gadsel/detectors.hpp"
#include "gadsel/gp.hpp"
#include "gadsel/space.hpp"

namespace gadsel {

// One evaluated configuration. t_value is present iff the trial succeeded;
// auc stays empty until the report phase joins ground truth.
struct TrialRecord {
    Configuration config;
    std::uint64_t seed = 0;
    ScoreVector scores;
    std::optional<double> t_value;
    std::optional<double> auc;
    TrialStatus status = TrialStatus::ok;
};

// Runs one detector trial for a configuration; the harness supplies this
// (wrapping the real detectors plus the trial cache), tests supply mocks.
using TrialEvaluator =
    std::function<DetectorOutput(const Configuration&, std::uint64_t seed)>;

struct SearchOptions {
    CsmVariant variant = CsmVariant::improved;
    std::size_t k = 1;
    std::uint64_t seed = 0;        // detector seed, one per search run
    bool parallel_trials = true;   // grid only; SMBO is sequential
};

struct SearchResult {
    Configuration best;
    std::vector<TrialRecord> trials;
};

// Exhaustive search: every configuration evaluated once, best = argmax of
// the internal metric with +-inf sentinels ordered naturally and ties broken
// by the lexicographically smallest configuration. Failed trials are kept in
// the record but excluded from the argmax. Throws SearchError if every trial
// failed.
SearchResult grid_search(const HyperparameterSpace& space,
                         const TrialEvaluator& evaluate,
                         const SearchOptions& opts);

struct SmboParams {
    std::size_t init_j = 5;
    std::size_t budget = 15;
    std::size_t pool_size = 32;
    GpConfig gp;
};

// Sequential model-based optimization: init_j uniform configurations, then
// fit-GP / maximize-EI / evaluate until `budget` evaluations. Never
// re-evaluates a configuration.
SearchResult smbo_search(const HyperparameterSpace& space,
                         const TrialEvaluator& evaluate,
                         const SearchOptions& opts, const SmboParams& params);

// Best ok trial under (T desc, configuration lex asc); nullopt if none ok.
std::optional<std::size_t> best_trial_index(
    const std::vector<TrialRecord>& trials);

// Maps the ok trials' T values onto finite GP targets: +-inf sentinels and
// failed trials are floored/ceiled at 3 ranges beyond the finite values.
std::vector<double> gp_targets(const std::vector<TrialRecord>& trials);

}  // namespace gadsel
