#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gadsel/detectors.hpp"
#include "gadsel/rng.hpp"

namespace gadsel {

enum class CsmVariant { original, improved };

CsmVariant csm_variant_from_string(const std::string& s);
std::string to_string(CsmVariant v);

// Contrast score margin of a score vector: the standardized gap between the
// k highest scores and a reference pool. The original variant compares
// against the next-k scores with a 1/k factor under the root; the improved
// variant compares against all remaining n-k scores without it.
struct CsmReport {
    std::size_t k = 0;
    double mu_top = 0.0;    // mean of the top-k scores
    double var_top = 0.0;   // population variance of the top-k scores
    double mu_rest = 0.0;   // mean of the reference pool
    double var_rest = 0.0;  // population variance of the reference pool
    double value = 0.0;     // +-inf sentinel when degenerate
    CsmVariant variant = CsmVariant::improved;
    bool degenerate = false;

    std::string to_json() const;
};

// Top-k indices by score, ties at the boundary broken by ascending node id.
std::vector<std::size_t> top_k_indices(const ScoreVector& s, std::size_t k);

CsmReport csm_original(const ScoreVector& s, std::size_t k);
CsmReport csm_improved(const ScoreVector& s, std::size_t k);
CsmReport csm(const ScoreVector& s, std::size_t k, CsmVariant variant);

// k = max(1, round(assumed_ratio * n)); assumed_ratio in (0, 0.5).
std::size_t choose_k(std::size_t n, double assumed_ratio);

// Samplers with known true moments, for validating the distribution-free
// tail bound behind the margin metric.
class TailSampler {
public:
    virtual ~TailSampler() = default;
    virtual double sample(Rng& rng) const = 0;
    virtual double mean() const = 0;
    virtual double stddev() const = 0;
};

class NormalSampler : public TailSampler {
public:
    NormalSampler(double mean, double stddev);
    double sample(Rng& rng) const override;
    double mean() const override { return mean_; }
    double stddev() const override { return stddev_; }

private:
    double mean_, stddev_;
};

class UniformSampler : public TailSampler {
public:
    UniformSampler(double lo, double hi);
    double sample(Rng& rng) const override;
    double mean() const override { return 0.5 * (lo_ + hi_); }
    double stddev() const override;

private:
    double lo_, hi_;
};

class ExponentialSampler : public TailSampler {
public:
    explicit ExponentialSampler(double rate);
    double sample(Rng& rng) const override;
    double mean() const override { return 1.0 / rate_; }
    double stddev() const override { return 1.0 / rate_; }

private:
    double rate_;
};

// Mixture of two normals.
class BimodalSampler : public TailSampler {
public:
    BimodalSampler(double m1, double s1, double m2, double s2, double weight);
    double sample(Rng& rng) const override;
    double mean() const override;
    double stddev() const override;

private:
    double m1_, s1_, m2_, s2_, w_;
};

// Draws `trials` samples and estimates P(x <= mu - a * sigma) using the
// sampler's true moments. Returns (empirical frequency, 1 / (1 + a^2)).
std::pair<double, double> cantelli_check(const TailSampler& dist, double a,
                                         std::size_t trials,
                                         std::uint64_t seed);

}  // namespace gadsel
