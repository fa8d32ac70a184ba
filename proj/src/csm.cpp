#include "gadsel/csm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <json.hpp>

#include "gadsel/errors.hpp"

namespace gadsel {

CsmVariant csm_variant_from_string(const std::string& s) {
    if (s == "original") return CsmVariant::original;
    if (s == "improved") return CsmVariant::improved;
    throw ValidationError("unknown csm variant '" + s + "'");
}

std::string to_string(CsmVariant v) {
    return v == CsmVariant::original ? "original" : "improved";
}

std::string CsmReport::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["mu_top"] = mu_top;
    j["var_top"] = var_top;
    j["mu_rest"] = mu_rest;
    j["var_rest"] = var_rest;
    j["variant"] = to_string(variant);
    j["degenerate"] = degenerate;
    if (std::isinf(value))
        j["value"] = value > 0 ? "inf" : "-inf";
    else
        j["value"] = value;
    return j.dump();
}

std::vector<std::size_t> top_k_indices(const ScoreVector& s, std::size_t k) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    });
    order.resize(k);
    return order;
}

namespace {

struct PoolStats {
    double mean = 0.0;
    double var = 0.0;  // population variance
};

PoolStats pool_stats(const ScoreVector& s, const std::vector<std::size_t>& idx,
                     std::size_t begin, std::size_t end) {
    PoolStats st;
    const auto count = static_cast<double>(end - begin);
    // A constant pool has exactly zero variance; computing it through the
    // mean would leave ~1e-32 residue and break the degenerate rule.
    bool constant = true;
    for (std::size_t i = begin + 1; i < end; ++i)
        if (s[idx[i]] != s[idx[begin]]) {
            constant = false;
            break;
        }
    if (constant) {
        st.mean = s[idx[begin]];
        st.var = 0.0;
        return st;
    }
    for (std::size_t i = begin; i < end; ++i) st.mean += s[idx[i]];
    st.mean /= count;
    for (std::size_t i = begin; i < end; ++i) {
        double d = s[idx[i]] - st.mean;
        st.var += d * d;
    }
    st.var /= count;
    return st;
}

// Assembles the report; a zero denominator becomes an ordered sentinel
// (+inf / -inf / 0 by the numerator's sign) rather than a division by zero.
CsmReport assemble(std::size_t k, PoolStats top, PoolStats rest,
                   double denom_sq, CsmVariant variant) {
    CsmReport r;
    r.k = k;
    r.mu_top = top.mean;
    r.var_top = top.var;
    r.mu_rest = rest.mean;
    r.var_rest = rest.var;
    r.variant = variant;
    double numer = top.mean - rest.mean;
    if (denom_sq <= 0.0) {
        r.degenerate = true;
        if (numer > 0)
            r.value = std::numeric_limits<double>::infinity();
        else if (numer < 0)
            r.value = -std::numeric_limits<double>::infinity();
        else
            r.value = 0.0;
    } else {
        r.value = numer / std::sqrt(denom_sq);
    }
    return r;
}

}  // namespace

CsmReport csm_original(const ScoreVector& s, std::size_t k) {
    const std::size_t n = s.size();
    if (k < 1 || 2 * k > n)
        throw ValidationError("csm_original needs 1 <= k <= n/2");
    auto order = top_k_indices(s, n);
    PoolStats top = pool_stats(s, order, 0, k);
    PoolStats rest = pool_stats(s, order, k, 2 * k);
    double denom_sq = (top.var + rest.var) / static_cast<double>(k);
    return assemble(k, top, rest, denom_sq, CsmVariant::original);
}

CsmReport csm_improved(const ScoreVector& s, std::size_t k) {
    const std::size_t n = s.size();
    if (k < 1 || k >= n)
        throw ValidationError("csm_improved needs 1 <= k < n");
    auto order = top_k_indices(s, n);
    PoolStats top = pool_stats(s, order, 0, k);
    PoolStats rest = pool_stats(s, order, k, n);
    double denom_sq = top.var + rest.var;
    return assemble(k, top, rest, denom_sq, CsmVariant::improved);
}

CsmReport csm(const ScoreVector& s, std::size_t k, CsmVariant variant) {
    return variant == CsmVariant::original ? csm_original(s, k)
                                           : csm_improved(s, k);
}

std::size_t choose_k(std::size_t n, double assumed_ratio) {
    if (assumed_ratio <= 0.0 || assumed_ratio >= 0.5)
        throw ValidationError("assumed anomaly ratio must lie in (0, 0.5)");
    auto k = static_cast<std::size_t>(
        std::llround(assumed_ratio * static_cast<double>(n)));
    return std::max<std::size_t>(1, k);
}

NormalSampler::NormalSampler(double mean, double stddev)
    : mean_(mean), stddev_(stddev) {
    if (stddev <= 0) throw ValidationError("stddev must be positive");
}

double NormalSampler::sample(Rng& rng) const {
    return rng.normal(mean_, stddev_);
}

UniformSampler::UniformSampler(double lo, double hi) : lo_(lo), hi_(hi) {
    if (hi <= lo) throw ValidationError("uniform sampler needs lo < hi");
}

double UniformSampler::sample(Rng& rng) const { return rng.uniform(lo_, hi_); }

double UniformSampler::stddev() const {
    return (hi_ - lo_) / std::sqrt(12.0);
}

ExponentialSampler::ExponentialSampler(double rate) : rate_(rate) {
    if (rate <= 0) throw ValidationError("rate must be positive");
}

double ExponentialSampler::sample(Rng& rng) const {
    return -std::log(1.0 - rng.uniform()) / rate_;
}

BimodalSampler::BimodalSampler(double m1, double s1, double m2, double s2,
                               double weight)
    : m1_(m1), s1_(s1), m2_(m2), s2_(s2), w_(weight) {
    if (s1 <= 0 || s2 <= 0) throw ValidationError("stddev must be positive");
    if (weight <= 0 || weight >= 1)
        throw ValidationError("mixture weight must lie in (0,1)");
}

double BimodalSampler::sample(Rng& rng) const {
    return rng.bernoulli(w_) ? rng.normal(m1_, s1_) : rng.normal(m2_, s2_);
}

double BimodalSampler::mean() const { return w_ * m1_ + (1.0 - w_) * m2_; }

double BimodalSampler::stddev() const {
    double m = mean();
    double second = w_ * (s1_ * s1_ + m1_ * m1_) +
                    (1.0 - w_) * (s2_ * s2_ + m2_ * m2_);
    return std::sqrt(second - m * m);
}

std::pair<double, double> cantelli_check(const TailSampler& dist, double a,
                                         std::size_t trials,
                                         std::uint64_t seed) {
    if (a < 0) throw ValidationError("a must be non-negative");
    if (trials < 10000) throw ValidationError("need at least 1e4 trials");
    if (dist.stddev() <= 0) throw ValidationError("sampler has zero variance");
    Rng rng(seed);
    const double threshold = dist.mean() - a * dist.stddev();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trials; ++i)
        if (dist.sample(rng) <= threshold) ++hits;
    double empirical =
        static_cast<double>(hits) / static_cast<double>(trials);
    double bound = 1.0 / (1.0 + a * a);
    return {empirical, bound};
}

}  // namespace gadsel
