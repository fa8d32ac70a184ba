#include "gadsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "gadsel/errors.hpp"
#include "gadsel/rng.hpp"

namespace gadsel {

namespace {

TrialRecord make_record(const Configuration& c, std::uint64_t seed,
                        DetectorOutput out, CsmVariant variant,
                        std::size_t k) {
    TrialRecord r;
    r.config = c;
    r.seed = seed;
    r.status = out.status;
    if (out.status == TrialStatus::ok) {
        r.t_value = csm(out.scores, k, variant).value;
        r.scores = std::move(out.scores);
    }
    return r;
}

bool better(const TrialRecord& a, const TrialRecord& b) {
    if (*a.t_value != *b.t_value) return *a.t_value > *b.t_value;
    return a.config < b.config;
}

}  // namespace

std::optional<std::size_t> best_trial_index(
    const std::vector<TrialRecord>& trials) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (trials[i].status != TrialStatus::ok) continue;
        if (!best || better(trials[i], trials[*best])) best = i;
    }
    return best;
}

SearchResult grid_search(const HyperparameterSpace& space,
                         const TrialEvaluator& evaluate,
                         const SearchOptions& opts) {
    const std::size_t m = space.size();
    std::vector<TrialRecord> trials(m);
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic) if (opts.parallel_trials)
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
        try {
            Configuration c = space.at(static_cast<std::size_t>(i));
            DetectorOutput out = evaluate(c, opts.seed);
            trials[static_cast<std::size_t>(i)] =
                make_record(c, opts.seed, std::move(out), opts.variant,
                            opts.k);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    auto best = best_trial_index(trials);
    if (!best) throw SearchError("all trials failed");
    return {trials[*best].config, std::move(trials)};
}

std::vector<double> gp_targets(const std::vector<TrialRecord>& trials) {
    double lo = 0.0, hi = 0.0;
    bool any_finite = false;
    for (const auto& t : trials) {
        if (t.status != TrialStatus::ok || !std::isfinite(*t.t_value))
            continue;
        if (!any_finite) {
            lo = hi = *t.t_value;
            any_finite = true;
        } else {
            lo = std::min(lo, *t.t_value);
            hi = std::max(hi, *t.t_value);
        }
    }
    if (!any_finite) {
        lo = -1.0;
        hi = 1.0;
    }
    const double range = hi - lo;
    std::vector<double> out;
    out.reserve(trials.size());
    for (const auto& t : trials) {
        if (t.status != TrialStatus::ok) {
            out.push_back(lo - 3.0 * range);
        } else if (std::isinf(*t.t_value)) {
            out.push_back(*t.t_value > 0 ? hi + 3.0 * range
                                         : lo - 3.0 * range);
        } else {
            out.push_back(*t.t_value);
        }
    }
    return out;
}

SearchResult smbo_search(const HyperparameterSpace& space,
                         const TrialEvaluator& evaluate,
                         const SearchOptions& opts, const SmboParams& params) {
    const std::size_t m = space.size();
    if (params.init_j < 2)
        throw ValidationError("smbo needs init_j >= 2");
    if (params.budget < params.init_j)
        throw ValidationError("smbo budget must cover the initial sample");
    if (params.budget > m)
        throw ValidationError("smbo budget exceeds the grid size");
    if (params.pool_size < 1)
        throw ValidationError("smbo pool size must be >= 1");

    Rng rng(opts.seed ^ 0x534d424f5345ull);  // decoupled from detector seeds
    std::vector<bool> evaluated(m, false);
    std::vector<TrialRecord> trials;
    trials.reserve(params.budget);

    auto run_one = [&](std::size_t index) {
        Configuration c = space.at(index);
        DetectorOutput out = evaluate(c, opts.seed);
        trials.push_back(
            make_record(c, opts.seed, std::move(out), opts.variant, opts.k));
        evaluated[index] = true;
    };

    for (std::size_t idx : rng.sample_without_replacement(m, params.init_j))
        run_one(idx);

    while (trials.size() < params.budget) {
        std::vector<std::size_t> remaining;
        remaining.reserve(m - trials.size());
        for (std::size_t i = 0; i < m; ++i)
            if (!evaluated[i]) remaining.push_back(i);
        if (remaining.empty()) break;

        std::size_t ok_count = 0;
        for (const auto& t : trials)
            if (t.status == TrialStatus::ok) ++ok_count;

        std::size_t chosen;
        if (ok_count < 2) {
            // Not enough signal to fit the surrogate yet; explore uniformly.
            chosen = remaining[static_cast<std::size_t>(
                rng.below(remaining.size()))];
        } else {
            std::vector<Configuration> xs;
            xs.reserve(trials.size());
            for (const auto& t : trials) xs.push_back(t.config);
            Surrogate gp(space, params.gp);
            gp.fit(xs, gp_targets(trials));

            double incumbent = -std::numeric_limits<double>::infinity();
            {
                auto targets = gp_targets(trials);
                for (std::size_t i = 0; i < trials.size(); ++i)
                    if (trials[i].status == TrialStatus::ok)
                        incumbent = std::max(incumbent, targets[i]);
            }

            std::vector<std::size_t> pool;
            if (remaining.size() <= params.pool_size) {
                pool = remaining;
            } else {
                auto picks = rng.sample_without_replacement(
                    remaining.size(), params.pool_size);
                pool.reserve(picks.size());
                for (auto p : picks) pool.push_back(remaining[p]);
                std::sort(pool.begin(), pool.end());
            }

            chosen = pool.front();
            double best_ei = -1.0;
            Configuration best_cfg;
            for (std::size_t idx : pool) {
                Configuration c = space.at(idx);
                auto pred = gp.predict(c);
                double ei =
                    expected_improvement(pred.mean, pred.stddev, incumbent);
                if (ei > best_ei ||
                    (ei == best_ei && c < best_cfg)) {
                    best_ei = ei;
                    best_cfg = c;
                    chosen = idx;
                }
            }
        }
        run_one(chosen);
    }

    auto best = best_trial_index(trials);
    if (!best) throw SearchError("all trials failed");
    return {trials[*best].config, std::move(trials)};
}

}  // namespace gadsel
