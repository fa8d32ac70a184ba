#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gadsel/graph.hpp"
#include "gadsel/space.hpp"
#include "gadsel/tensor.hpp"

namespace gadsel {

enum class DetectorKind { generative_ae, contrastive_egonet };

DetectorKind detector_kind_from_string(const std::string& s);
std::string to_string(DetectorKind k);

// Mirrors the status cells of large-scale sweep reports: ok, NaN blowup,
// out-of-memory analogue, persistent underfitting, out-of-runtime.
enum class TrialStatus { ok, failed_nan, failed_oom, failed_underfit, failed_oor };

std::string status_code(TrialStatus s);  // "ok", "NAN", "OOM", "UNF", "OOR"

struct TrainingParams {
    std::size_t epochs = 100;
    double learning_rate = 1e-3;
    std::size_t hidden_dim = 64;
    std::size_t embed_dim = 32;
    // The generative detector needs the dense adjacency; above this node
    // count it refuses instead of thrashing.
    std::size_t dense_node_ceiling = 4000;
    std::size_t scoring_rounds = 16;  // contrastive inference rounds
    double rwr_restart = 0.5;
    double time_budget_sec = 0.0;  // 0 = unlimited
    double underfit_threshold = 1e-2;
    std::size_t underfit_window = 400;
};

using ScoreVector = std::vector<double>;

struct DetectorOutput {
    TrialStatus status = TrialStatus::ok;
    ScoreVector scores;  // empty unless status == ok
    std::vector<double> loss_history;
    std::string message;
};

// Shared score finalization: averages per-round scores elementwise and
// rejects non-finite entries.
ScoreVector finalize_scores(const std::vector<ScoreVector>& rounds);

// Loss moved less than `threshold` over the final `window` epochs.
bool is_underfit(const std::vector<double>& loss_history, double threshold,
                 std::size_t window);

struct GenerativeHp {
    double alpha = 0.5;  // attribute- vs structure-reconstruction weight
};

struct ContrastiveHp {
    double alpha = 0.5;           // node-node vs node-subgraph weight
    std::size_t subgraph_size = 4;  // ego-net size K
};

std::vector<std::vector<std::uint32_t>> adjacency_lists(
    const AttributedGraph& g);

// Random walk with restart around `target`, truncated to the first k
// distinct visited nodes. Returns min(k, reachable-set size) nodes with the
// target at position 0.
std::vector<std::uint32_t> rwr_ego_net(
    const std::vector<std::vector<std::uint32_t>>& nbrs, std::uint32_t target,
    std::size_t k, double restart, Rng& rng);

// GCN autoencoder: 2-layer encoder, GCN attribute decoder, inner-product
// structure decoder. Loss alpha * |X - Xhat|^2/(n d) + (1-alpha) *
// |A - Ahat|^2/n^2; per-node score is the same alpha-weighted combination of
// row reconstruction errors.
class GenerativeModel {
public:
    GenerativeModel(const AttributedGraph& g, const NormalizedAdjacency& adj,
                    GenerativeHp hp, const TrainingParams& tp,
                    std::uint64_t seed);

    Tensor build_loss(Tape& tape);
    double train_epoch();
    ScoreVector infer_scores();
    // (attribute row errors, structure row errors) at the current weights.
    std::pair<ScoreVector, ScoreVector> score_components();
    std::vector<Parameter*> parameters();

private:
    const AttributedGraph& g_;
    const NormalizedAdjacency& adj_;
    GenerativeHp hp_;
    TrainingParams tp_;
    std::vector<double> dense_adj_;
    Parameter w_enc1_, w_enc2_, w_dec_;

    struct Forward {
        Tensor x_hat, a_hat, x_const, a_const;
    };
    Forward forward(Tape& tape);
};

// Contrastive ego-net model: one-layer GCN encoder over RWR-sampled
// ego-nets with the target's attributes masked, bilinear discriminators for
// node-node and node-subgraph contrast, negatives drawn from another node's
// ego-net.
class ContrastiveModel {
public:
    ContrastiveModel(const AttributedGraph& g, ContrastiveHp hp,
                     const TrainingParams& tp, std::uint64_t seed);

    struct EgoNet {
        std::vector<std::uint32_t> nodes;  // target first
        kernels::Csr norm_adj;             // normalized induced A + I
    };
    struct EpochPlan {
        std::vector<EgoNet> ego;           // one per node
        std::vector<std::size_t> partner;  // negative source, partner[i] != i
    };

    EpochPlan sample_plan();

    struct NodeLogits {
        Tensor pos_nn, neg_nn, pos_ns, neg_ns;
    };
    std::vector<NodeLogits> build_logits(Tape& tape, const EpochPlan& plan);
    Tensor loss_from_logits(Tape& tape, const std::vector<NodeLogits>& logits);
    Tensor build_loss(Tape& tape, const EpochPlan& plan);

    double train_epoch();
    ScoreVector infer_scores();  // scoring_rounds rounds of neg - pos gaps
    std::vector<Parameter*> parameters();

private:
    const AttributedGraph& g_;
    ContrastiveHp hp_;
    TrainingParams tp_;
    std::vector<std::vector<std::uint32_t>> nbrs_;
    Rng rng_;
    Parameter w_enc_, w_nn_, w_ns_;
};

DetectorOutput train_generative(const AttributedGraph& g,
                                const NormalizedAdjacency& adj,
                                GenerativeHp hp, const TrainingParams& tp,
                                std::uint64_t seed);

DetectorOutput train_contrastive(const AttributedGraph& g, ContrastiveHp hp,
                                 const TrainingParams& tp, std::uint64_t seed);

struct DetectorSpec {
    DetectorKind kind = DetectorKind::generative_ae;
    Configuration hp;
    TrainingParams training;
    std::uint64_t seed = 0;
};

// Validates that the configuration carries exactly the dimensions the kind
// declares ("alpha" / "alpha"+"K"), trains, and applies the underfit rule.
DetectorOutput run_detector(const HyperparameterSpace& space,
                            const DetectorSpec& spec,
                            const AttributedGraph& g,
                            const NormalizedAdjacency& adj);

}  // namespace gadsel
