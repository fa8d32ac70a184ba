#include "gadsel/injection.hpp"

#include <cmath>
#include <json.hpp>

#include "gadsel/errors.hpp"
#include "gadsel/rng.hpp"

namespace gadsel {

InjectionResult inject(const AttributedGraph& g, const InjectionPlan& plan) {
    if (g.has_labels())
        throw ValidationError("graph already carries labels");
    const std::size_t n = g.node_count();
    const std::size_t structural = plan.clique_count * plan.clique_size;
    if (plan.clique_count > 0 && plan.clique_size < 2)
        throw ValidationError("clique_size must be >= 2");
    if (plan.contextual_count > 0 && plan.candidate_pool < 1)
        throw ValidationError("candidate_pool must be >= 1");
    if (structural + plan.contextual_count > n)
        throw CapacityError("plan needs " +
                            std::to_string(structural + plan.contextual_count) +
                            " distinct nodes but graph has " +
                            std::to_string(n));

    Rng rng(plan.seed);
    auto picked =
        rng.sample_without_replacement(n, structural + plan.contextual_count);

    std::vector<std::vector<std::size_t>> cliques(plan.clique_count);
    std::size_t cursor = 0;
    for (auto& clique : cliques) {
        clique.assign(picked.begin() + cursor,
                      picked.begin() + cursor + plan.clique_size);
        cursor += plan.clique_size;
    }
    std::vector<std::size_t> contextual_nodes(picked.begin() + cursor,
                                              picked.end());

    std::vector<Edge> edges = g.edges();
    for (const auto& clique : cliques)
        for (std::size_t a = 0; a < clique.size(); ++a)
            for (std::size_t b = a + 1; b < clique.size(); ++b)
                edges.push_back(
                    {static_cast<std::uint32_t>(clique[a]),
                     static_cast<std::uint32_t>(clique[b])});

    const std::size_t d = g.attr_dim();
    std::vector<double> attrs = g.attributes();
    std::vector<ContextualSwap> swaps;
    swaps.reserve(contextual_nodes.size());
    for (std::size_t v : contextual_nodes) {
        ContextualSwap swap;
        swap.node = v;
        // Candidates drawn from all other nodes; the farthest attribute
        // vector (pre-injection) replaces v's. Ties go to the smallest id.
        auto pool = rng.sample_without_replacement(n - 1, plan.candidate_pool);
        for (auto& c : pool)
            if (c >= v) ++c;  // skip v itself
        double best_dist = -1.0;
        std::size_t best = pool.front();
        auto row_v = g.attr_row(v);
        for (std::size_t c : pool) {
            auto row_c = g.attr_row(c);
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double diff = row_v[j] - row_c[j];
                dist += diff * diff;
            }
            if (dist > best_dist || (dist == best_dist && c < best)) {
                best_dist = dist;
                best = c;
            }
        }
        swap.source = best;
        swap.candidates = std::move(pool);
        auto src = g.attr_row(best);
        for (std::size_t j = 0; j < d; ++j) attrs[v * d + j] = src[j];
        swaps.push_back(std::move(swap));
    }

    std::vector<std::uint8_t> labels(n, 0);
    for (const auto& clique : cliques)
        for (std::size_t v : clique) labels[v] = 1;
    for (std::size_t v : contextual_nodes) labels[v] = 1;

    AttributedGraph out(n, std::move(edges), std::move(attrs), d,
                        std::move(labels));
    return InjectionResult{std::move(out), std::move(cliques),
                           std::move(swaps)};
}

std::string injection_manifest_json(const InjectionResult& result,
                                    const InjectionPlan& plan) {
    nlohmann::json j;
    j["plan"] = {{"clique_count", plan.clique_count},
                 {"clique_size", plan.clique_size},
                 {"contextual_count", plan.contextual_count},
                 {"candidate_pool", plan.candidate_pool},
                 {"seed", plan.seed}};
    j["split"] = {{"structural", plan.clique_count * plan.clique_size},
                  {"contextual", result.contextual.size()}};
    j["cliques"] = result.cliques;
    auto contextual = nlohmann::json::array();
    for (const auto& s : result.contextual)
        contextual.push_back({{"node", s.node}, {"source", s.source}});
    j["contextual"] = contextual;
    j["anomaly_count"] =
        plan.clique_count * plan.clique_size + result.contextual.size();
    return j.dump(2) + "\n";
}

}  // namespace gadsel
