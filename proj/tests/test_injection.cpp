#include <doctest.h>

#include <cmath>
#include <set>

#include "gadsel/errors.hpp"
#include "gadsel/injection.hpp"

using namespace gadsel;

namespace {

AttributedGraph empty_graph(std::size_t n, std::size_t d) {
    std::vector<double> attrs(n * d);
    for (std::size_t i = 0; i < attrs.size(); ++i)
        attrs[i] = static_cast<double>(i % 17) * 0.25;
    return AttributedGraph(n, {}, std::move(attrs), d);
}

std::size_t label_count(const AttributedGraph& g) {
    std::size_t c = 0;
    for (auto l : g.labels()) c += l;
    return c;
}

}  // namespace

TEST_CASE("single clique on an empty graph adds exactly a triangle") {
    auto g = empty_graph(10, 2);
    InjectionPlan plan;
    plan.clique_count = 1;
    plan.clique_size = 3;
    plan.seed = 5;
    auto result = inject(g, plan);
    CHECK(result.graph.edges().size() == 3);
    CHECK(label_count(result.graph) == 3);
    REQUIRE(result.cliques.size() == 1);
    for (std::size_t a : result.cliques[0])
        for (std::size_t b : result.cliques[0])
            if (a != b)
                CHECK(result.graph.has_edge(static_cast<std::uint32_t>(a),
                                            static_cast<std::uint32_t>(b)));
}

TEST_CASE("contextual swap with a single candidate is forced") {
    auto g = empty_graph(6, 3);
    InjectionPlan plan;
    plan.contextual_count = 1;
    plan.candidate_pool = 1;
    plan.seed = 11;
    auto result = inject(g, plan);
    REQUIRE(result.contextual.size() == 1);
    const auto& swap = result.contextual[0];
    REQUIRE(swap.candidates.size() == 1);
    CHECK(swap.source == swap.candidates[0]);
    auto got = result.graph.attr_row(swap.node);
    auto want = g.attr_row(swap.source);
    for (std::size_t j = 0; j < g.attr_dim(); ++j) CHECK(got[j] == want[j]);
}

TEST_CASE("label count equals p*q + contextual exactly") {
    auto g = empty_graph(100, 4);
    InjectionPlan plan;
    plan.clique_count = 2;
    plan.clique_size = 5;
    plan.contextual_count = 7;
    plan.candidate_pool = 10;
    plan.seed = 3;
    auto result = inject(g, plan);
    CHECK(label_count(result.graph) == 2 * 5 + 7);

    // structural and contextual sets are disjoint
    std::set<std::size_t> seen;
    for (const auto& clique : result.cliques)
        for (auto v : clique) CHECK(seen.insert(v).second);
    for (const auto& s : result.contextual) CHECK(seen.insert(s.node).second);
}

TEST_CASE("structural injection only adds edges, contextual only attributes") {
    SyntheticParams p;
    p.n = 80;
    p.d = 6;
    p.communities = 4;
    p.intra_p = 0.2;
    p.inter_p = 0.02;
    p.seed = 9;
    auto g = generate_synthetic(p);
    InjectionPlan plan;
    plan.clique_count = 1;
    plan.clique_size = 6;
    plan.contextual_count = 4;
    plan.candidate_pool = 12;
    plan.seed = 21;
    auto result = inject(g, plan);

    for (const auto& e : g.edges()) CHECK(result.graph.has_edge(e.u, e.v));
    CHECK(result.graph.edges().size() >= g.edges().size());

    std::set<std::size_t> contextual_nodes;
    for (const auto& s : result.contextual) contextual_nodes.insert(s.node);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (contextual_nodes.count(i)) continue;
        auto a = g.attr_row(i), b = result.graph.attr_row(i);
        for (std::size_t j = 0; j < g.attr_dim(); ++j) CHECK(a[j] == b[j]);
    }
}

TEST_CASE("contextual swap picks the farthest sampled candidate") {
    SyntheticParams p;
    p.n = 60;
    p.d = 5;
    p.communities = 3;
    p.intra_p = 0.2;
    p.inter_p = 0.02;
    p.seed = 13;
    auto g = generate_synthetic(p);
    InjectionPlan plan;
    plan.contextual_count = 5;
    plan.candidate_pool = 8;
    plan.seed = 17;
    auto result = inject(g, plan);
    for (const auto& s : result.contextual) {
        auto dist = [&](std::size_t a, std::size_t b) {
            double acc = 0;
            auto ra = g.attr_row(a), rb = g.attr_row(b);
            for (std::size_t j = 0; j < g.attr_dim(); ++j) {
                double d = ra[j] - rb[j];
                acc += d * d;
            }
            return std::sqrt(acc);
        };
        // distance from the new attributes back to the pre-injection vector
        // dominates every other sampled candidate
        double chosen = dist(s.node, s.source);
        for (std::size_t c : s.candidates)
            CHECK(chosen >= dist(s.node, c) - 1e-12);
    }
}

TEST_CASE("injection is deterministic in the seed") {
    auto g = empty_graph(50, 3);
    InjectionPlan plan;
    plan.clique_count = 2;
    plan.clique_size = 4;
    plan.contextual_count = 5;
    plan.candidate_pool = 6;
    plan.seed = 99;
    auto r1 = inject(g, plan);
    auto r2 = inject(g, plan);
    CHECK(r1.graph.edges() == r2.graph.edges());
    CHECK(r1.graph.attributes() == r2.graph.attributes());
    CHECK(r1.graph.labels() == r2.graph.labels());
}

TEST_CASE("plan validation") {
    auto g = empty_graph(10, 2);
    InjectionPlan plan;
    plan.clique_count = 3;
    plan.clique_size = 3;
    plan.contextual_count = 3;  // 12 > 10
    CHECK_THROWS_AS(inject(g, plan), CapacityError);

    plan = {};
    plan.clique_count = 1;
    plan.clique_size = 1;  // q must be >= 2
    CHECK_THROWS_AS(inject(g, plan), ValidationError);

    plan = {};
    plan.contextual_count = 1;
    plan.candidate_pool = 0;
    CHECK_THROWS_AS(inject(g, plan), ValidationError);

    plan = {};
    plan.clique_count = 1;
    plan.clique_size = 3;
    auto labeled = inject(g, plan).graph;
    CHECK_THROWS_AS(inject(labeled, plan), ValidationError);
}

TEST_CASE("citation-scale plan hits the documented anomaly ratio") {
    auto g = empty_graph(2708, 2);
    InjectionPlan plan;
    plan.clique_count = 5;
    plan.clique_size = 15;  // 75 structural
    plan.contextual_count = 63;
    plan.candidate_pool = 50;
    plan.seed = 1;
    auto result = inject(g, plan);
    CHECK(label_count(result.graph) == 138);
    double ratio = 138.0 / 2708.0;
    CHECK(ratio == doctest::Approx(0.051).epsilon(0.01));
}

TEST_CASE("manifest records the plan and the split") {
    auto g = empty_graph(30, 2);
    InjectionPlan plan;
    plan.clique_count = 1;
    plan.clique_size = 4;
    plan.contextual_count = 2;
    plan.candidate_pool = 5;
    plan.seed = 2;
    auto result = inject(g, plan);
    auto json = injection_manifest_json(result, plan);
    CHECK(json.find("\"structural\": 4") != std::string::npos);
    CHECK(json.find("\"contextual\": 2") != std::string::npos);
    CHECK(json.find("\"anomaly_count\": 6") != std::string::npos);
}
