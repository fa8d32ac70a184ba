#include "gadsel/detectors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gadsel/errors.hpp"

namespace gadsel {

DetectorKind detector_kind_from_string(const std::string& s) {
    if (s == "generative_ae") return DetectorKind::generative_ae;
    if (s == "contrastive_egonet") return DetectorKind::contrastive_egonet;
    throw ValidationError("unknown detector kind '" + s + "'");
}

std::string to_string(DetectorKind k) {
    return k == DetectorKind::generative_ae ? "generative_ae"
                                            : "contrastive_egonet";
}

std::string status_code(TrialStatus s) {
    switch (s) {
        case TrialStatus::ok: return "ok";
        case TrialStatus::failed_nan: return "NAN";
        case TrialStatus::failed_oom: return "OOM";
        case TrialStatus::failed_underfit: return "UNF";
        case TrialStatus::failed_oor: return "OOR";
    }
    return "?";
}

ScoreVector finalize_scores(const std::vector<ScoreVector>& rounds) {
    if (rounds.empty()) throw ValidationError("no scoring rounds");
    const std::size_t n = rounds.front().size();
    ScoreVector out(n, 0.0);
    for (const auto& r : rounds) {
        if (r.size() != n) throw ShapeError("scoring rounds disagree on n");
        for (std::size_t i = 0; i < n; ++i) out[i] += r[i];
    }
    for (auto& v : out) {
        v /= static_cast<double>(rounds.size());
        if (!std::isfinite(v))
            throw ValidationError("non-finite anomaly score");
    }
    return out;
}

bool is_underfit(const std::vector<double>& loss_history, double threshold,
                 std::size_t window) {
    if (loss_history.size() < 2) return false;
    std::size_t w = std::min(window, loss_history.size() - 1);
    double early = loss_history[loss_history.size() - 1 - w];
    double late = loss_history.back();
    return std::abs(early - late) < threshold;
}

std::vector<std::vector<std::uint32_t>> adjacency_lists(
    const AttributedGraph& g) {
    std::vector<std::vector<std::uint32_t>> nbrs(g.node_count());
    for (const auto& e : g.edges()) {
        nbrs[e.u].push_back(e.v);
        nbrs[e.v].push_back(e.u);
    }
    for (auto& v : nbrs) std::sort(v.begin(), v.end());
    return nbrs;
}

std::vector<std::uint32_t> rwr_ego_net(
    const std::vector<std::vector<std::uint32_t>>& nbrs, std::uint32_t target,
    std::size_t k, double restart, Rng& rng) {
    std::vector<std::uint32_t> out{target};
    if (k <= 1 || nbrs[target].empty()) return out;

    // Reachable-set size, capped at k, tells us when the walk may stop.
    std::vector<std::uint32_t> frontier{target};
    std::vector<bool> seen(nbrs.size(), false);
    seen[target] = true;
    std::size_t reachable = 1;
    while (!frontier.empty() && reachable < k) {
        std::vector<std::uint32_t> next;
        for (auto u : frontier)
            for (auto v : nbrs[u])
                if (!seen[v]) {
                    seen[v] = true;
                    ++reachable;
                    next.push_back(v);
                    if (reachable >= k) break;
                }
        frontier = std::move(next);
    }
    const std::size_t want = std::min(k, reachable);

    std::vector<bool> collected(nbrs.size(), false);
    collected[target] = true;
    std::uint32_t cur = target;
    // The walk almost surely reaches `want` distinct nodes; the cap only
    // guards against pathological graphs and falls back to BFS order.
    std::size_t guard = 10000 * k;
    while (out.size() < want && guard-- > 0) {
        if (rng.bernoulli(restart)) {
            cur = target;
            continue;
        }
        const auto& nb = nbrs[cur];
        if (nb.empty()) {
            cur = target;
            continue;
        }
        cur = nb[static_cast<std::size_t>(rng.below(nb.size()))];
        if (!collected[cur]) {
            collected[cur] = true;
            out.push_back(cur);
        }
    }
    if (out.size() < want) {
        for (std::size_t i = 0; i < nbrs.size() && out.size() < want; ++i) {
            auto v = static_cast<std::uint32_t>(i);
            if (seen[v] && !collected[v]) {
                collected[v] = true;
                out.push_back(v);
            }
        }
    }
    return out;
}

// --- generative -------------------------------------------------------------

GenerativeModel::GenerativeModel(const AttributedGraph& g,
                                 const NormalizedAdjacency& adj,
                                 GenerativeHp hp, const TrainingParams& tp,
                                 std::uint64_t seed)
    : g_(g), adj_(adj), hp_(hp), tp_(tp) {
    if (hp.alpha < 0.0 || hp.alpha > 1.0)
        throw ValidationError("alpha must lie in [0,1]");
    const std::size_t n = g.node_count();
    dense_adj_.assign(n * n, 0.0);
    for (const auto& e : g.edges()) {
        dense_adj_[e.u * n + e.v] = 1.0;
        dense_adj_[e.v * n + e.u] = 1.0;
    }
    Rng rng(seed);
    w_enc1_ = glorot_parameter(g.attr_dim(), tp.hidden_dim, rng);
    w_enc2_ = glorot_parameter(tp.hidden_dim, tp.embed_dim, rng);
    w_dec_ = glorot_parameter(tp.embed_dim, g.attr_dim(), rng);
}

GenerativeModel::Forward GenerativeModel::forward(Tape& tape) {
    const std::size_t n = g_.node_count();
    Tensor x = tape.constant({n, g_.attr_dim()}, g_.attributes().data());
    Tensor a = tape.constant({n, n}, dense_adj_.data());
    Tensor h1 = tape.relu(
        tape.matmul(tape.spmm(adj_.matrix, x), tape.leaf(w_enc1_)));
    Tensor z = tape.matmul(tape.spmm(adj_.matrix, h1), tape.leaf(w_enc2_));
    Tensor x_hat = tape.matmul(tape.spmm(adj_.matrix, z), tape.leaf(w_dec_));
    Tensor a_hat = tape.sigmoid(tape.matmul_nt(z, z));
    return Forward{x_hat, a_hat, x, a};
}

Tensor GenerativeModel::build_loss(Tape& tape) {
    const std::size_t n = g_.node_count();
    const std::size_t d = g_.attr_dim();
    auto f = forward(tape);
    // Reconstruction losses are normalized by element count so the two
    // terms live on comparable scales.
    std::optional<Tensor> loss;
    if (hp_.alpha > 0.0) {
        Tensor attr = tape.scale(tape.frobenius_sq(tape.sub(f.x_const, f.x_hat)),
                                 hp_.alpha / static_cast<double>(n * d));
        loss = attr;
    }
    if (hp_.alpha < 1.0) {
        Tensor str = tape.scale(tape.frobenius_sq(tape.sub(f.a_const, f.a_hat)),
                                (1.0 - hp_.alpha) / static_cast<double>(n * n));
        loss = loss ? tape.add(*loss, str) : str;
    }
    return *loss;
}

double GenerativeModel::train_epoch() {
    Tape tape;
    Tensor loss = build_loss(tape);
    tape.backward(loss);
    adam_step(parameters(), tp_.learning_rate);
    return loss.scalar();
}

std::pair<ScoreVector, ScoreVector> GenerativeModel::score_components() {
    Tape tape;
    auto f = forward(tape);
    Tensor attr_err = tape.row_l2_norm(tape.sub(f.x_const, f.x_hat));
    Tensor struct_err = tape.row_l2_norm(tape.sub(f.a_const, f.a_hat));
    const std::size_t n = g_.node_count();
    ScoreVector attr(n), str(n);
    for (std::size_t i = 0; i < n; ++i) {
        attr[i] = attr_err.value(i, 0);
        str[i] = struct_err.value(i, 0);
    }
    return {std::move(attr), std::move(str)};
}

ScoreVector GenerativeModel::infer_scores() {
    auto [attr, str] = score_components();
    const std::size_t n = g_.node_count();
    ScoreVector s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = hp_.alpha * attr[i] + (1.0 - hp_.alpha) * str[i];
    return finalize_scores({s});
}

std::vector<Parameter*> GenerativeModel::parameters() {
    return {&w_enc1_, &w_enc2_, &w_dec_};
}

// --- contrastive ------------------------------------------------------------

ContrastiveModel::ContrastiveModel(const AttributedGraph& g, ContrastiveHp hp,
                                   const TrainingParams& tp,
                                   std::uint64_t seed)
    : g_(g), hp_(hp), tp_(tp), nbrs_(adjacency_lists(g)), rng_(seed) {
    if (hp.alpha < 0.0 || hp.alpha > 1.0)
        throw ValidationError("alpha must lie in [0,1]");
    if (hp.subgraph_size < 2)
        throw ValidationError("subgraph size K must be >= 2");
    if (hp.subgraph_size >= g.node_count())
        throw ValidationError("subgraph size K must be smaller than n");
    w_enc_ = glorot_parameter(g.attr_dim(), tp.embed_dim, rng_);
    w_nn_ = glorot_parameter(tp.embed_dim, tp.embed_dim, rng_);
    w_ns_ = glorot_parameter(tp.embed_dim, tp.embed_dim, rng_);
}

ContrastiveModel::EpochPlan ContrastiveModel::sample_plan() {
    const std::size_t n = g_.node_count();
    EpochPlan plan;
    plan.ego.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        EgoNet& e = plan.ego[i];
        e.nodes = rwr_ego_net(nbrs_, static_cast<std::uint32_t>(i),
                              hp_.subgraph_size, tp_.rwr_restart, rng_);
        const std::size_t m = e.nodes.size();
        // Normalized (A_sub + I) over the induced subgraph.
        std::vector<std::vector<std::size_t>> sub(m);
        for (std::size_t a = 0; a < m; ++a) sub[a].push_back(a);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (g_.has_edge(e.nodes[a], e.nodes[b])) {
                    sub[a].push_back(b);
                    sub[b].push_back(a);
                }
        std::vector<double> inv_sqrt(m);
        for (std::size_t a = 0; a < m; ++a) {
            std::sort(sub[a].begin(), sub[a].end());
            inv_sqrt[a] = 1.0 / std::sqrt(static_cast<double>(sub[a].size()));
        }
        e.norm_adj.rows = e.norm_adj.cols = m;
        e.norm_adj.row_ptr.assign(m + 1, 0);
        for (std::size_t a = 0; a < m; ++a)
            e.norm_adj.row_ptr[a + 1] = e.norm_adj.row_ptr[a] + sub[a].size();
        for (std::size_t a = 0; a < m; ++a)
            for (auto b : sub[a]) {
                e.norm_adj.col.push_back(b);
                e.norm_adj.val.push_back(inv_sqrt[a] * inv_sqrt[b]);
            }
    }
    plan.partner.resize(n);
    for (std::size_t i = 0; i < n; ++i) plan.partner[i] = i;
    rng_.shuffle(plan.partner);
    for (std::size_t i = 0; i < n; ++i)
        if (plan.partner[i] == i)
            std::swap(plan.partner[i], plan.partner[(i + 1) % n]);
    return plan;
}

std::vector<ContrastiveModel::NodeLogits> ContrastiveModel::build_logits(
    Tape& tape, const EpochPlan& plan) {
    const std::size_t n = g_.node_count();
    const std::size_t d = g_.attr_dim();
    Tensor enc = tape.leaf(w_enc_);
    Tensor wnn = tape.leaf(w_nn_);
    Tensor wns = tape.leaf(w_ns_);

    std::vector<Tensor> masked_embed(n), readout(n), self_embed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const EgoNet& e = plan.ego[i];
        const std::size_t m = e.nodes.size();
        std::vector<double> x_sub(m * d, 0.0);
        for (std::size_t a = 1; a < m; ++a) {  // row 0 (target) stays masked
            auto row = g_.attr_row(e.nodes[a]);
            std::copy(row.begin(), row.end(), x_sub.begin() + a * d);
        }
        Tensor xs = tape.constant({m, d}, std::move(x_sub));
        Tensor embeds =
            tape.relu(tape.matmul(tape.spmm(e.norm_adj, xs), enc));
        masked_embed[i] = tape.row(embeds, 0);
        readout[i] = tape.mean_over_rows(embeds);
        Tensor xi = tape.constant({1, d}, g_.attr_row(i).data());
        self_embed[i] = tape.relu(tape.matmul(xi, enc));
    }

    std::vector<NodeLogits> logits(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = plan.partner[i];
        Tensor hn = tape.matmul(masked_embed[i], wnn);
        Tensor hn_neg = tape.matmul(masked_embed[j], wnn);
        Tensor hs = tape.matmul(readout[i], wns);
        Tensor hs_neg = tape.matmul(readout[j], wns);
        logits[i] = {tape.matmul_nt(hn, self_embed[i]),
                     tape.matmul_nt(hn_neg, self_embed[i]),
                     tape.matmul_nt(hs, self_embed[i]),
                     tape.matmul_nt(hs_neg, self_embed[i])};
    }
    return logits;
}

Tensor ContrastiveModel::loss_from_logits(
    Tape& tape, const std::vector<NodeLogits>& logits) {
    const double a = hp_.alpha;
    std::optional<Tensor> nn_sum, ns_sum;
    for (const auto& l : logits) {
        if (a < 1.0) {
            Tensor t = tape.add(tape.softplus(tape.scale(l.pos_nn, -1.0)),
                                tape.softplus(l.neg_nn));
            nn_sum = nn_sum ? tape.add(*nn_sum, t) : t;
        }
        if (a > 0.0) {
            Tensor t = tape.add(tape.softplus(tape.scale(l.pos_ns, -1.0)),
                                tape.softplus(l.neg_ns));
            ns_sum = ns_sum ? tape.add(*ns_sum, t) : t;
        }
    }
    const double norm = 0.5 / static_cast<double>(logits.size());
    std::optional<Tensor> loss;
    if (nn_sum) loss = tape.scale(*nn_sum, (1.0 - a) * norm);
    if (ns_sum) {
        Tensor t = tape.scale(*ns_sum, a * norm);
        loss = loss ? tape.add(*loss, t) : t;
    }
    return *loss;
}

Tensor ContrastiveModel::build_loss(Tape& tape, const EpochPlan& plan) {
    return loss_from_logits(tape, build_logits(tape, plan));
}

double ContrastiveModel::train_epoch() {
    EpochPlan plan = sample_plan();
    Tape tape;
    Tensor loss = build_loss(tape, plan);
    tape.backward(loss);
    adam_step(parameters(), tp_.learning_rate);
    return loss.scalar();
}

namespace {
double stable_sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}
}  // namespace

ScoreVector ContrastiveModel::infer_scores() {
    const std::size_t n = g_.node_count();
    const double a = hp_.alpha;
    std::vector<ScoreVector> rounds;
    rounds.reserve(tp_.scoring_rounds);
    for (std::size_t r = 0; r < tp_.scoring_rounds; ++r) {
        EpochPlan plan = sample_plan();
        Tape tape;
        auto logits = build_logits(tape, plan);
        ScoreVector s(n);
        for (std::size_t i = 0; i < n; ++i) {
            double nn = stable_sigmoid(logits[i].neg_nn.scalar()) -
                        stable_sigmoid(logits[i].pos_nn.scalar());
            double ns = stable_sigmoid(logits[i].neg_ns.scalar()) -
                        stable_sigmoid(logits[i].pos_ns.scalar());
            s[i] = (1.0 - a) * nn + a * ns;
        }
        rounds.push_back(std::move(s));
    }
    return finalize_scores(rounds);
}

std::vector<Parameter*> ContrastiveModel::parameters() {
    return {&w_enc_, &w_nn_, &w_ns_};
}

// --- trial runners ----------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

bool out_of_time(Clock::time_point start, double budget_sec) {
    if (budget_sec <= 0) return false;
    return std::chrono::duration<double>(Clock::now() - start).count() >
           budget_sec;
}

template <typename Model>
DetectorOutput run_training(Model& model, const TrainingParams& tp) {
    DetectorOutput out;
    auto start = Clock::now();
    try {
        for (std::size_t e = 0; e < tp.epochs; ++e) {
            if (out_of_time(start, tp.time_budget_sec)) {
                out.status = TrialStatus::failed_oor;
                out.message = "trial wall-clock budget exceeded";
                return out;
            }
            double loss = model.train_epoch();
            if (!std::isfinite(loss)) {
                out.status = TrialStatus::failed_nan;
                out.message = "non-finite training loss";
                return out;
            }
            out.loss_history.push_back(loss);
        }
        out.scores = model.infer_scores();
        out.status = TrialStatus::ok;
    } catch (const NumericalError& e) {
        out.status = TrialStatus::failed_nan;
        out.scores.clear();
        out.message = e.what();
    } catch (const ValidationError& e) {
        // finalize_scores rejecting non-finite scores
        out.status = TrialStatus::failed_nan;
        out.scores.clear();
        out.message = e.what();
    }
    return out;
}

}  // namespace

DetectorOutput train_generative(const AttributedGraph& g,
                                const NormalizedAdjacency& adj,
                                GenerativeHp hp, const TrainingParams& tp,
                                std::uint64_t seed) {
    if (g.node_count() > tp.dense_node_ceiling) {
        DetectorOutput out;
        out.status = TrialStatus::failed_oom;
        out.message = "graph exceeds the dense adjacency ceiling";
        return out;
    }
    GenerativeModel model(g, adj, hp, tp, seed);
    return run_training(model, tp);
}

DetectorOutput train_contrastive(const AttributedGraph& g, ContrastiveHp hp,
                                 const TrainingParams& tp,
                                 std::uint64_t seed) {
    ContrastiveModel model(g, hp, tp, seed);
    return run_training(model, tp);
}

DetectorOutput run_detector(const HyperparameterSpace& space,
                            const DetectorSpec& spec,
                            const AttributedGraph& g,
                            const NormalizedAdjacency& adj) {
    std::vector<std::string> names;
    for (const auto& d : space.dims()) names.push_back(d.name);
    std::sort(names.begin(), names.end());
    const std::vector<std::string> want =
        spec.kind == DetectorKind::generative_ae
            ? std::vector<std::string>{"alpha"}
            : std::vector<std::string>{"K", "alpha"};
    if (names != want)
        throw ValidationError("configuration dimensions do not match what " +
                              to_string(spec.kind) + " declares");

    DetectorOutput out;
    if (spec.kind == DetectorKind::generative_ae) {
        GenerativeHp hp{space.value_of(spec.hp, "alpha")};
        out = train_generative(g, adj, hp, spec.training, spec.seed);
    } else {
        ContrastiveHp hp{space.value_of(spec.hp, "alpha"),
                         static_cast<std::size_t>(
                             space.value_of(spec.hp, "K"))};
        out = train_contrastive(g, hp, spec.training, spec.seed);
    }
    if (out.status == TrialStatus::ok &&
        is_underfit(out.loss_history, spec.training.underfit_threshold,
                    spec.training.underfit_window)) {
        out.status = TrialStatus::failed_underfit;
        out.scores.clear();
        out.message = "loss stagnated below the underfit threshold";
    }
    return out;
}

}  // namespace gadsel
