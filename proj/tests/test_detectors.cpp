#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gadsel/detectors.hpp"
#include "gadsel/errors.hpp"
#include "gadsel/injection.hpp"
#include "gadsel/metrics.hpp"

using namespace gadsel;

namespace {

AttributedGraph small_test_graph(std::uint64_t seed) {
    SyntheticParams p;
    p.n = 30;
    p.d = 6;
    p.communities = 3;
    p.intra_p = 0.35;
    p.inter_p = 0.05;
    p.seed = seed;
    return generate_synthetic(p);
}

TrainingParams quick_training() {
    TrainingParams tp;
    tp.epochs = 8;
    tp.hidden_dim = 10;
    tp.embed_dim = 6;
    tp.scoring_rounds = 4;
    return tp;
}

std::vector<std::size_t> ranking(const ScoreVector& s) {
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    });
    return idx;
}

}  // namespace

TEST_CASE("score finalization averages rounds and validates") {
    CHECK(finalize_scores({{1, 3}, {3, 5}}) == ScoreVector{2, 4});
    CHECK(finalize_scores({{0.5, 0.25}}) == ScoreVector{0.5, 0.25});
    CHECK_THROWS_AS(
        finalize_scores({{1.0, std::numeric_limits<double>::quiet_NaN()}}),
        ValidationError);
    CHECK_THROWS_AS(finalize_scores({}), ValidationError);
    CHECK_THROWS_AS(finalize_scores({{1, 2}, {1, 2, 3}}), ShapeError);
}

TEST_CASE("ego-net sampling returns min(K, reachable) nodes with the target") {
    // Two components: a path 0-1-2-3 and an isolated pair 4-5.
    AttributedGraph g(6, {{0, 1}, {1, 2}, {2, 3}, {4, 5}},
                      std::vector<double>(6, 1.0), 1);
    auto nbrs = adjacency_lists(g);
    Rng rng(3);
    for (std::size_t k : {2, 3, 4, 6}) {
        auto ego = rwr_ego_net(nbrs, 0, k, 0.5, rng);
        CHECK(ego.size() == std::min<std::size_t>(k, 4));
        CHECK(ego[0] == 0);
        std::set<std::uint32_t> uniq(ego.begin(), ego.end());
        CHECK(uniq.size() == ego.size());
        for (auto v : ego) CHECK(v <= 3);  // never crosses components
    }
    auto pair_ego = rwr_ego_net(nbrs, 4, 5, 0.5, rng);
    CHECK(pair_ego.size() == 2);
    CHECK(pair_ego[0] == 4);

    AttributedGraph isolated(3, {}, {1, 2, 3}, 1);
    auto iso_nbrs = adjacency_lists(isolated);
    auto iso_ego = rwr_ego_net(iso_nbrs, 2, 4, 0.5, rng);
    CHECK(iso_ego == std::vector<std::uint32_t>{2});
}

TEST_CASE("generative detector is deterministic per seed") {
    auto g = small_test_graph(1);
    auto adj = normalized_adjacency(g);
    auto tp = quick_training();
    auto a = train_generative(g, adj, {0.7}, tp, 42);
    auto b = train_generative(g, adj, {0.7}, tp, 42);
    REQUIRE(a.status == TrialStatus::ok);
    CHECK(a.scores == b.scores);
    auto c = train_generative(g, adj, {0.7}, tp, 43);
    CHECK(a.scores != c.scores);
}

TEST_CASE("contrastive detector is deterministic per seed") {
    auto g = small_test_graph(2);
    auto tp = quick_training();
    auto a = train_contrastive(g, {0.5, 3}, tp, 7);
    auto b = train_contrastive(g, {0.5, 3}, tp, 7);
    REQUIRE(a.status == TrialStatus::ok);
    CHECK(a.scores == b.scores);
}

TEST_CASE("generative alpha endpoints rank by the surviving error term") {
    auto g = small_test_graph(3);
    auto adj = normalized_adjacency(g);
    auto tp = quick_training();

    for (double alpha : {1.0, 0.0}) {
        GenerativeModel model(g, adj, {alpha}, tp, 11);
        for (std::size_t e = 0; e < tp.epochs; ++e) model.train_epoch();
        auto scores = model.infer_scores();
        auto [attr_err, struct_err] = model.score_components();
        const auto& surviving = alpha == 1.0 ? attr_err : struct_err;
        CHECK(ranking(scores) == ranking(surviving));
    }
}

TEST_CASE("alpha outside [0,1] and K bounds are rejected") {
    auto g = small_test_graph(4);
    auto adj = normalized_adjacency(g);
    auto tp = quick_training();
    CHECK_THROWS_AS(train_generative(g, adj, {1.5}, tp, 1), ValidationError);
    CHECK_THROWS_AS(train_contrastive(g, {0.5, 1}, tp, 1), ValidationError);
    CHECK_THROWS_AS(train_contrastive(g, {0.5, 30}, tp, 1), ValidationError);
}

TEST_CASE("generative detector refuses graphs above the dense ceiling") {
    auto g = small_test_graph(5);
    auto adj = normalized_adjacency(g);
    auto tp = quick_training();
    tp.dense_node_ceiling = 10;
    auto out = train_generative(g, adj, {0.5}, tp, 1);
    CHECK(out.status == TrialStatus::failed_oom);
    CHECK(out.scores.empty());
}

TEST_CASE("planted clique outscores the background at alpha = 0") {
    // Sparse background, one dense clique: clique degrees dwarf the rest.
    SyntheticParams p;
    p.n = 120;
    p.d = 4;
    p.communities = 1;
    p.intra_p = 0.03;
    p.inter_p = 0.0;
    TrainingParams tp = quick_training();
    tp.epochs = 30;
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        p.seed = seed;
        auto base = generate_synthetic(p);
        InjectionPlan plan;
        plan.clique_count = 1;
        plan.clique_size = 10;
        plan.seed = seed;
        auto injected = inject(base, plan);
        auto stripped = injected.graph.without_labels();
        auto adj = normalized_adjacency(stripped);
        auto out = train_generative(stripped, adj, {0.0}, tp, seed);
        REQUIRE(out.status == TrialStatus::ok);
        const auto& labels = injected.graph.labels();
        double clique_mean = 0, background_mean = 0;
        std::size_t nc = 0, nb = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i]) {
                clique_mean += out.scores[i];
                ++nc;
            } else {
                background_mean += out.scores[i];
                ++nb;
            }
        }
        if (clique_mean / double(nc) > background_mean / double(nb)) ++wins;
    }
    CHECK(wins >= 4);
}

TEST_CASE("generative alpha sweep separates best from worst AUC") {
    SyntheticParams p;
    p.n = 120;
    p.d = 8;
    p.communities = 4;
    p.intra_p = 0.25;
    p.inter_p = 0.01;
    TrainingParams tp = quick_training();
    tp.epochs = 25;
    const std::vector<double> alphas{0.01, 0.25, 0.5, 0.75, 1.0};
    int positive = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        p.seed = seed;
        auto base = generate_synthetic(p);
        InjectionPlan plan;
        plan.clique_count = 1;
        plan.clique_size = 4;
        plan.contextual_count = 3;
        plan.candidate_pool = 20;
        plan.seed = seed + 100;
        auto injected = inject(base, plan);
        auto stripped = injected.graph.without_labels();
        auto adj = normalized_adjacency(stripped);
        double best = -1, worst = 2;
        for (double a : alphas) {
            auto out = train_generative(stripped, adj, {a}, tp, seed);
            REQUIRE(out.status == TrialStatus::ok);
            double auc = roc_auc(out.scores, injected.graph.labels());
            best = std::max(best, auc);
            worst = std::min(worst, auc);
        }
        if (best > worst) ++positive;
    }
    CHECK(positive >= 4);
}

TEST_CASE("contrastive grid shows positive performance variation") {
    SyntheticParams p;
    p.n = 60;
    p.d = 6;
    p.communities = 3;
    p.intra_p = 0.3;
    p.inter_p = 0.02;
    p.seed = 5;
    auto base = generate_synthetic(p);
    InjectionPlan plan;
    plan.clique_count = 1;
    plan.clique_size = 3;
    plan.contextual_count = 2;
    plan.candidate_pool = 10;
    plan.seed = 9;
    auto injected = inject(base, plan);
    auto stripped = injected.graph.without_labels();
    TrainingParams tp = quick_training();
    tp.epochs = 10;
    std::vector<double> aucs;
    for (double a : {0.0, 0.5, 1.0})
        for (std::size_t k : {2, 3}) {
            auto out = train_contrastive(stripped, {a, k}, tp, 3);
            REQUIRE(out.status == TrialStatus::ok);
            aucs.push_back(roc_auc(out.scores, injected.graph.labels()));
        }
    CHECK(performance_variation(aucs) > 0.0);
}

namespace {

template <typename BuildLoss>
double max_rel_fd_error(std::vector<Parameter*> params, BuildLoss build,
                        double eps = 1e-5) {
    for (Parameter* p : params) std::fill(p->grad.begin(), p->grad.end(), 0.0);
    {
        Tape tape;
        Tensor loss = build(tape);
        tape.backward(loss);
    }
    double worst = 0.0;
    for (Parameter* p : params) {
        for (std::size_t i = 0; i < p->values.size(); ++i) {
            double keep = p->values[i];
            p->values[i] = keep + eps;
            double up;
            {
                Tape t;
                up = build(t).scalar();
            }
            p->values[i] = keep - eps;
            double down;
            {
                Tape t;
                down = build(t).scalar();
            }
            p->values[i] = keep;
            double fd = (up - down) / (2 * eps);
            worst = std::max(worst, std::abs(p->grad[i] - fd) /
                                        std::max(1.0, std::abs(fd)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("generative training loss passes a finite-difference check") {
    auto g = small_test_graph(6);
    auto adj = normalized_adjacency(g);
    TrainingParams tp = quick_training();
    GenerativeModel model(g, adj, {0.6}, tp, 21);
    CHECK(max_rel_fd_error(model.parameters(), [&](Tape& t) {
              return model.build_loss(t);
          }) <= 1e-4);
}

TEST_CASE("contrastive training loss passes a finite-difference check") {
    auto g = small_test_graph(7);
    TrainingParams tp = quick_training();
    ContrastiveModel model(g, {0.4, 3}, tp, 22);
    auto plan = model.sample_plan();
    CHECK(max_rel_fd_error(model.parameters(), [&](Tape& t) {
              return model.build_loss(t, plan);
          }) <= 1e-4);
}

TEST_CASE("underfit classification looks at the final window") {
    CHECK(is_underfit({1.0, 0.999, 0.9995, 0.9992}, 1e-2, 400));
    CHECK_FALSE(is_underfit({1.0, 0.8, 0.5, 0.2}, 1e-2, 400));
    CHECK_FALSE(is_underfit({0.5}, 1e-2, 400));
    // window shorter than history: only the tail matters
    CHECK(is_underfit({5.0, 1.0, 1.001, 1.002}, 1e-2, 2));
}

TEST_CASE("run_detector validates the declared dimensions") {
    auto g = small_test_graph(8);
    auto adj = normalized_adjacency(g);
    Dimension a;
    a.name = "alpha";
    a.values = {0.5};
    Dimension k;
    k.name = "K";
    k.kind = Dimension::Kind::integer;
    k.values = {3};

    HyperparameterSpace wrong({a, k});
    DetectorSpec spec;
    spec.kind = DetectorKind::generative_ae;
    spec.hp = wrong.at(0);
    spec.training = quick_training();
    CHECK_THROWS_AS(run_detector(wrong, spec, g, adj), ValidationError);

    HyperparameterSpace right({a});
    spec.hp = right.at(0);
    auto out = run_detector(right, spec, g, adj);
    CHECK(out.status == TrialStatus::ok);

    HyperparameterSpace cspace({a, k});
    DetectorSpec cspec;
    cspec.kind = DetectorKind::contrastive_egonet;
    cspec.hp = cspace.at(0);
    cspec.training = quick_training();
    auto cout_ = run_detector(cspace, cspec, g, adj);
    CHECK(cout_.status == TrialStatus::ok);
}

TEST_CASE("wall-clock budget surfaces as OOR") {
    auto g = small_test_graph(9);
    auto adj = normalized_adjacency(g);
    TrainingParams tp = quick_training();
    tp.epochs = 100000;
    tp.time_budget_sec = 0.01;
    auto out = train_generative(g, adj, {0.5}, tp, 1);
    CHECK(out.status == TrialStatus::failed_oor);
}
