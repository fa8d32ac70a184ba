#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "gadsel/errors.hpp"
#include "gadsel/gp.hpp"
#include "gadsel/search.hpp"
#include "gadsel/util.hpp"

using namespace gadsel;

namespace {

// Mock objective: a score vector whose improved-CSM value is a strictly
// increasing function of `lift`. Top-4 scores 1+lift with variance 0.01,
// remaining 36 scores around 0 with variance 0.01.
ScoreVector mock_scores(double lift) {
    ScoreVector s(40);
    for (std::size_t i = 0; i < 4; ++i)
        s[i] = 1.0 + lift + (i % 2 == 0 ? 0.1 : -0.1);
    for (std::size_t i = 4; i < 40; ++i) s[i] = (i % 2 == 0 ? 0.1 : -0.1);
    return s;
}

DetectorOutput mock_output(double lift) {
    DetectorOutput out;
    out.status = TrialStatus::ok;
    out.scores = mock_scores(lift);
    return out;
}

HyperparameterSpace alpha_space(std::vector<double> values) {
    Dimension d;
    d.name = "alpha";
    d.values = std::move(values);
    return HyperparameterSpace({d});
}

HyperparameterSpace contrastive_space_52() {
    Dimension k;
    k.name = "K";
    k.kind = Dimension::Kind::integer;
    k.values = {2, 3, 4, 5};
    Dimension a;
    a.name = "alpha";
    a.values = {0, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 1};
    return HyperparameterSpace({k, a});
}

SearchOptions opts_with_seed(std::uint64_t seed) {
    SearchOptions o;
    o.variant = CsmVariant::improved;
    o.k = 4;
    o.seed = seed;
    o.parallel_trials = false;
    return o;
}

}  // namespace

TEST_CASE("space size, enumeration order and config strings") {
    auto space = contrastive_space_52();
    CHECK(space.size() == 52);
    CHECK(space.dim_count() == 2);
    auto first = space.at(0);
    CHECK(first.values[0] == 2);
    CHECK(first.values[1] == 0);
    auto last = space.at(51);
    CHECK(last.values[0] == 5);
    CHECK(last.values[1] == 1);
    CHECK(space.config_string(space.at(1)) == "K=2;alpha=0.01");
    CHECK(space.contains(first));
    Configuration outside;
    outside.values = {2, 0.42};
    CHECK_FALSE(space.contains(outside));
}

TEST_CASE("space validation") {
    Dimension d;
    d.name = "x";
    d.values = {};
    CHECK_THROWS_AS(HyperparameterSpace({d}), ValidationError);
    d.values = {2, 1};
    CHECK_THROWS_AS(HyperparameterSpace({d}), ValidationError);
    d.values = {1, 1, 2};
    CHECK_THROWS_AS(HyperparameterSpace({d}), ValidationError);
    d.kind = Dimension::Kind::integer;
    d.values = {1.5, 2};
    CHECK_THROWS_AS(HyperparameterSpace({d}), ValidationError);
}

TEST_CASE("expected improvement closed form") {
    CHECK(expected_improvement(3.0, 0.0, 1.0) == 0.0);
    CHECK(expected_improvement(1.0, 1.0, 1.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(expected_improvement(2.0, 1.0, 1.0) ==
          doctest::Approx(1.0833154705876863).epsilon(1e-10));
    CHECK_THROWS_AS(expected_improvement(0, -0.1, 0), ValidationError);
}

TEST_CASE("expected improvement properties") {
    Rng rng(5);
    double prev = expected_improvement(-4.0, 0.7, 0.0);
    for (double eta = -4.0; eta <= 4.0; eta += 0.05) {
        double ei = expected_improvement(eta, 0.7, 0.0);
        CHECK(ei >= 0.0);
        CHECK(ei >= prev - 1e-12);  // nondecreasing in the mean
        prev = ei;
    }
    for (int i = 0; i < 200; ++i) {
        double ei = expected_improvement(rng.uniform(-5, 5), rng.uniform(0, 3),
                                         rng.uniform(-5, 5));
        CHECK(ei >= 0.0);
    }
}

TEST_CASE("gp interpolates its training points") {
    auto space = alpha_space({0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1});
    Surrogate gp(space);
    std::vector<Configuration> xs;
    std::vector<double> ts;
    for (std::size_t i = 0; i < space.size(); i += 2) {
        xs.push_back(space.at(i));
        ts.push_back(std::sin(3.0 * space.at(i).values[0]));
    }
    gp.fit(xs, ts);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto p = gp.predict(xs[i]);
        CHECK(std::abs(p.mean - ts[i]) <= 1e-3);
        CHECK(p.stddev <= 1e-2);
    }
    CHECK(gp.incumbent() ==
          doctest::Approx(*std::max_element(ts.begin(), ts.end())));
}

TEST_CASE("two-point gp: equidistant candidate averages the targets") {
    auto space = alpha_space({0, 0.5, 1});
    Surrogate gp(space);
    Configuration left, right, middle;
    left.values = {0.0};
    right.values = {1.0};
    middle.values = {0.5};
    gp.fit({left, right}, {0.3, 0.9});
    auto p = gp.predict(middle);
    CHECK(p.mean == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("two-point gp matches the explicit 2x2 closed form") {
    auto space = alpha_space({0, 0.25, 0.5, 0.75, 1});
    GpConfig cfg;
    Surrogate gp(space, cfg);
    Configuration a, b, q;
    a.values = {0.0};
    b.values = {0.75};
    q.values = {0.25};
    const double t1 = 0.2, t2 = -0.4;
    gp.fit({a, b}, {t1, t2});

    // independent closed form on min-max-scaled coordinates
    auto kern = [&](double x, double y) {
        double d = x - y;
        return cfg.signal_var *
               std::exp(-d * d / (2 * cfg.length_scale * cfg.length_scale));
    };
    double xa = 0.0, xb = 0.75, xq = 0.25;  // scale: (v - 0) / (1 - 0)
    double k11 = kern(xa, xa) + cfg.jitter, k22 = kern(xb, xb) + cfg.jitter;
    double k12 = kern(xa, xb);
    double det = k11 * k22 - k12 * k12;
    double tbar = 0.5 * (t1 + t2);
    double r1 = t1 - tbar, r2 = t2 - tbar;
    double a1 = (k22 * r1 - k12 * r2) / det;
    double a2 = (-k12 * r1 + k11 * r2) / det;
    double want = tbar + kern(xq, xa) * a1 + kern(xq, xb) * a2;

    auto p = gp.predict(q);
    CHECK(p.mean == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("posterior variance never exceeds prior variance plus jitter") {
    auto space = alpha_space({0, 0.2, 0.4, 0.6, 0.8, 1});
    GpConfig cfg;
    Surrogate gp(space, cfg);
    std::vector<Configuration> xs{space.at(0), space.at(2), space.at(5)};
    gp.fit(xs, {0.1, 0.4, -0.2});
    for (std::size_t i = 0; i < space.size(); ++i) {
        auto p = gp.predict(space.at(i));
        CHECK(p.stddev * p.stddev <= cfg.signal_var + cfg.jitter + 1e-12);
    }
}

TEST_CASE("singular kernel without jitter surfaces as a numerical error") {
    auto space = alpha_space({0, 1});
    GpConfig cfg;
    cfg.jitter = 0.0;
    Surrogate gp(space, cfg);
    Configuration same;
    same.values = {0.0};
    CHECK_THROWS_AS(gp.fit({same, same}, {0.1, 0.2}), NumericalError);
}

TEST_CASE("grid search over a single-config space returns it") {
    auto space = alpha_space({0.4});
    auto res = grid_search(
        space, [](const Configuration&, std::uint64_t) { return mock_output(1.0); },
        opts_with_seed(1));
    CHECK(res.best.values[0] == 0.4);
    CHECK(res.trials.size() == 1);
}

TEST_CASE("grid search finds a planted argmax") {
    auto space = alpha_space({0, 0.5, 1});
    auto evaluate = [](const Configuration& c, std::uint64_t) {
        double a = c.values[0];
        return mock_output(1.0 - (a - 0.5) * (a - 0.5));
    };
    auto res = grid_search(space, evaluate, opts_with_seed(1));
    CHECK(res.best.values[0] == 0.5);
}

TEST_CASE("grid over the contrastive search space runs 52 trials") {
    auto space = contrastive_space_52();
    std::size_t calls = 0;
    auto evaluate = [&](const Configuration& c, std::uint64_t) {
#pragma omp atomic
        ++calls;
        return mock_output(c.values[1]);
    };
    SearchOptions o = opts_with_seed(3);
    o.parallel_trials = true;
    auto res = grid_search(space, evaluate, o);
    CHECK(res.trials.size() == 52);
    CHECK(calls == 52);
    CHECK(res.best.values[1] == 1.0);  // lift grows with alpha
}

TEST_CASE("grid search argmax is exact over random mock objectives") {
    auto space = contrastive_space_52();
    Rng rng(99);
    for (int obj = 0; obj < 100; ++obj) {
        std::uint64_t salt = rng.next_u64();
        auto evaluate = [&](const Configuration& c, std::uint64_t) {
            Fnv1a h;
            h.update_u64(salt);
            for (double v : c.values) h.update_double(v);
            double lift =
                static_cast<double>(h.digest() % 1000) / 500.0;  // [0, 2)
            return mock_output(lift);
        };
        auto res = grid_search(space, evaluate, opts_with_seed(obj));
        double best_t = -1e300;
        Configuration best_cfg;
        for (const auto& t : res.trials) {
            CHECK(t.status == TrialStatus::ok);
            if (*t.t_value > best_t ||
                (*t.t_value == best_t && t.config < best_cfg)) {
                best_t = *t.t_value;
                best_cfg = t.config;
            }
        }
        CHECK(res.best == best_cfg);
        auto bi = best_trial_index(res.trials);
        CHECK(*res.trials[*bi].t_value == best_t);
    }
}

TEST_CASE("failed trials are retained but excluded from the argmax") {
    auto space = alpha_space({0, 0.5, 1});
    auto evaluate = [](const Configuration& c, std::uint64_t) {
        if (c.values[0] == 1.0) {
            DetectorOutput out;
            out.status = TrialStatus::failed_nan;
            return out;
        }
        return mock_output(c.values[0]);  // 0.5 wins among ok trials
    };
    auto res = grid_search(space, evaluate, opts_with_seed(1));
    CHECK(res.trials.size() == 3);
    CHECK(res.best.values[0] == 0.5);
    CHECK(res.trials[2].status == TrialStatus::failed_nan);
    CHECK_FALSE(res.trials[2].t_value.has_value());

    auto all_fail = [](const Configuration&, std::uint64_t) {
        DetectorOutput out;
        out.status = TrialStatus::failed_oom;
        return out;
    };
    CHECK_THROWS_AS(grid_search(space, all_fail, opts_with_seed(1)),
                    SearchError);
}

TEST_CASE("smbo with budget = M reproduces the grid optimum") {
    auto space = contrastive_space_52();
    auto evaluate = [](const Configuration& c, std::uint64_t) {
        double a = c.values[1], k = c.values[0];
        return mock_output(2.0 - (a - 0.6) * (a - 0.6) - 0.05 * (k - 3) * (k - 3));
    };
    auto grid_res = grid_search(space, evaluate, opts_with_seed(7));

    SmboParams params;
    params.init_j = 5;
    params.budget = space.size();
    params.pool_size = space.size();
    auto smbo_res = smbo_search(space, evaluate, opts_with_seed(7), params);
    CHECK(smbo_res.trials.size() == space.size());
    auto gi = best_trial_index(grid_res.trials);
    auto si = best_trial_index(smbo_res.trials);
    CHECK(*grid_res.trials[*gi].t_value ==
          doctest::Approx(*smbo_res.trials[*si].t_value));
    CHECK(smbo_res.best == grid_res.best);
}

TEST_CASE("smbo respects its budget and never repeats a configuration") {
    auto space = contrastive_space_52();
    auto evaluate = [](const Configuration& c, std::uint64_t) {
        return mock_output(c.values[1]);
    };
    SmboParams params;
    params.init_j = 4;
    params.budget = 17;
    params.pool_size = 8;
    auto res = smbo_search(space, evaluate, opts_with_seed(5), params);
    CHECK(res.trials.size() == 17);
    std::set<std::vector<double>> seen;
    for (const auto& t : res.trials) CHECK(seen.insert(t.config.values).second);
}

TEST_CASE("smbo with budget 15 reaches 95% of the 52-point maximum") {
    auto space = contrastive_space_52();
    auto evaluate = [](const Configuration& c, std::uint64_t) {
        double a = c.values[1], k = c.values[0];
        return mock_output(1.5 - 2.0 * (a - 0.6) * (a - 0.6) -
                           0.1 * (k - 4) * (k - 4));
    };
    auto grid_res = grid_search(space, evaluate, opts_with_seed(1));
    auto gi = best_trial_index(grid_res.trials);
    double grid_max = *grid_res.trials[*gi].t_value;

    SmboParams params;
    params.init_j = 5;
    params.budget = 15;
    params.pool_size = 32;
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto res = smbo_search(space, evaluate, opts_with_seed(seed), params);
        auto si = best_trial_index(res.trials);
        if (*res.trials[*si].t_value >= 0.95 * grid_max) ++good;
    }
    CHECK(good >= 4);
}

TEST_CASE("smbo parameter validation") {
    auto space = alpha_space({0, 0.5, 1});
    auto evaluate = [](const Configuration&, std::uint64_t) {
        return mock_output(1.0);
    };
    SmboParams p;
    p.init_j = 1;
    CHECK_THROWS_AS(smbo_search(space, evaluate, opts_with_seed(1), p),
                    ValidationError);
    p.init_j = 2;
    p.budget = 1;
    CHECK_THROWS_AS(smbo_search(space, evaluate, opts_with_seed(1), p),
                    ValidationError);
    p.budget = 9;  // > M
    CHECK_THROWS_AS(smbo_search(space, evaluate, opts_with_seed(1), p),
                    ValidationError);
    p.budget = 3;
    p.pool_size = 0;
    CHECK_THROWS_AS(smbo_search(space, evaluate, opts_with_seed(1), p),
                    ValidationError);
}

TEST_CASE("both searchers are deterministic for fixed seeds") {
    auto space = contrastive_space_52();
    auto evaluate = [](const Configuration& c, std::uint64_t seed) {
        Fnv1a h;
        h.update_u64(seed);
        for (double v : c.values) h.update_double(v);
        return mock_output(static_cast<double>(h.digest() % 97) / 50.0);
    };
    SmboParams params;
    params.init_j = 4;
    params.budget = 12;
    params.pool_size = 10;
    auto r1 = smbo_search(space, evaluate, opts_with_seed(11), params);
    auto r2 = smbo_search(space, evaluate, opts_with_seed(11), params);
    REQUIRE(r1.trials.size() == r2.trials.size());
    for (std::size_t i = 0; i < r1.trials.size(); ++i) {
        CHECK(r1.trials[i].config == r2.trials[i].config);
        CHECK(*r1.trials[i].t_value == *r2.trials[i].t_value);
    }
    auto g1 = grid_search(space, evaluate, opts_with_seed(11));
    auto g2 = grid_search(space, evaluate, opts_with_seed(11));
    CHECK(g1.best == g2.best);
}

TEST_CASE("gp targets floor failed trials and map sentinels finite") {
    std::vector<TrialRecord> trials(4);
    trials[0].status = TrialStatus::ok;
    trials[0].t_value = 1.0;
    trials[1].status = TrialStatus::ok;
    trials[1].t_value = 3.0;
    trials[2].status = TrialStatus::failed_nan;
    trials[3].status = TrialStatus::ok;
    trials[3].t_value = std::numeric_limits<double>::infinity();
    auto targets = gp_targets(trials);
    CHECK(targets[0] == 1.0);
    CHECK(targets[1] == 3.0);
    CHECK(targets[2] == doctest::Approx(1.0 - 3.0 * 2.0));  // min - 3*range
    CHECK(targets[3] == doctest::Approx(3.0 + 3.0 * 2.0));  // max + 3*range
}
