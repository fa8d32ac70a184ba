#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gadsel/graph.hpp"

namespace gadsel {

// How many anomalies to plant and how. clique_count cliques of clique_size
// nodes are densified (structural anomalies); contextual_count nodes get
// their attributes replaced by the most distant of candidate_pool sampled
// candidates (contextual anomalies). All selections are disjoint.
struct InjectionPlan {
    std::size_t clique_count = 0;       // p
    std::size_t clique_size = 15;       // q
    std::size_t contextual_count = 0;
    std::size_t candidate_pool = 50;    // c
    std::uint64_t seed = 0;
};

struct ContextualSwap {
    std::size_t node = 0;
    std::size_t source = 0;                 // candidate whose attributes won
    std::vector<std::size_t> candidates;    // all sampled candidates
};

struct InjectionResult {
    AttributedGraph graph;
    std::vector<std::vector<std::size_t>> cliques;
    std::vector<ContextualSwap> contextual;
};

// Plants ground-truth anomalies into an unlabeled graph. Structural
// injection only adds edges; contextual injection only rewrites attribute
// rows. Every injected node is labeled 1, the rest 0.
InjectionResult inject(const AttributedGraph& g, const InjectionPlan& plan);

// JSON record of the plan, the anomaly split, and the injected node ids.
std::string injection_manifest_json(const InjectionResult& result,
                                    const InjectionPlan& plan);

}  // namespace gadsel
