#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gadsel/kernels.hpp"

namespace gadsel {

struct Edge {
    std::uint32_t u = 0;  // always u < v
    std::uint32_t v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable attributed graph: symmetric self-loop-free edge set over dense
// integer node ids, a dense row-major attribute matrix, and optional 0/1
// labels. Label reads are counted so the harness can prove that training and
// selection never touch ground truth.
class AttributedGraph {
public:
    // Edges may arrive in any orientation and with duplicates; they are
    // canonicalized to u < v, sorted, deduplicated. Self-loops are rejected.
    AttributedGraph(std::size_t n, std::vector<Edge> edges,
                    std::vector<double> attributes, std::size_t attr_dim,
                    std::optional<std::vector<std::uint8_t>> labels = {});

    std::size_t node_count() const { return n_; }
    std::size_t attr_dim() const { return d_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& attributes() const { return attributes_; }
    std::span<const double> attr_row(std::size_t i) const {
        return {attributes_.data() + i * d_, d_};
    }

    bool has_labels() const { return labels_.has_value(); }
    // Counted access to ground truth; throws if labels are absent.
    const std::vector<std::uint8_t>& labels() const;
    std::uint64_t label_reads() const { return label_reads_->load(); }

    // Copy with the labels dropped (without reading them); for handing to
    // detectors and search, which must never see ground truth.
    AttributedGraph without_labels() const;

    std::vector<std::size_t> degrees() const;
    bool has_edge(std::uint32_t u, std::uint32_t v) const;

    // Hash of (n, d, edges, attributes); labels excluded so a stripped graph
    // and its labeled source share trial-cache entries.
    std::uint64_t content_hash() const;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<Edge> edges_;            // sorted, unique, u < v
    std::vector<double> attributes_;     // n_ x d_ row-major
    std::optional<std::vector<std::uint8_t>> labels_;
    std::shared_ptr<std::atomic<std::uint64_t>> label_reads_;
};

// Sparse D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
// Symmetric, entries in [0, 1]; shared read-only across trials.
struct NormalizedAdjacency {
    kernels::Csr matrix;

    std::size_t size() const { return matrix.rows; }
};

NormalizedAdjacency normalized_adjacency(const AttributedGraph& g);

// --- file formats -----------------------------------------------------------
// Edge file: one edge per line, "i<TAB>j" or "i j". Non-integer ids are
// remapped to dense internal ids in order of first appearance; the mapping
// can be persisted as CSV "external_id,internal_id".
// Attribute file: CSV, row r = node r, no header. Label file: one 0/1 per
// line.
AttributedGraph load_graph(const std::string& edge_path,
                           const std::string& attribute_path,
                           const std::string& label_path = "",
                           const std::string& id_map_out_path = "");

void save_graph(const AttributedGraph& g, const std::string& edge_path,
                const std::string& attribute_path,
                const std::string& label_path = "");

struct SyntheticParams {
    std::size_t n = 100;
    std::size_t d = 8;
    std::size_t communities = 4;
    double intra_p = 0.2;
    double inter_p = 0.01;
    std::uint64_t seed = 0;
};

// Stochastic block model with per-community Gaussian attribute means.
// Pure function of its arguments; never produces labels.
AttributedGraph generate_synthetic(const SyntheticParams& p);

}  // namespace gadsel
