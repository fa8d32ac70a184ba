#pragma once

#include <vector>

#include "gadsel/space.hpp"

namespace gadsel {

// Surrogate hyperparameters are fixed rather than tuned, so the surrogate
// does not itself introduce a tuning problem.
struct GpConfig {
    double length_scale = 0.3;  // per min-max-scaled dimension
    double signal_var = 1.0;
    double jitter = 1e-6;
};

double normal_pdf(double z);
double normal_cdf(double z);

// Closed-form expected improvement [phi(z) + z * Phi(z)] * sigma with
// z = (mean - incumbent) / sigma, and 0 when sigma == 0.
double expected_improvement(double mean, double sigma, double incumbent);

// Exact GP regression posterior over configuration -> target, RBF kernel on
// min-max-scaled coordinates, prior mean = mean of the observed targets.
class Surrogate {
public:
    Surrogate(const HyperparameterSpace& space, GpConfig cfg = {});

    // Requires at least two evaluated pairs. Throws NumericalError if the
    // kernel matrix stays singular despite jitter.
    void fit(const std::vector<Configuration>& xs,
             const std::vector<double>& targets);

    struct Prediction {
        double mean = 0.0;
        double stddev = 0.0;
    };
    Prediction predict(const Configuration& c) const;

    double incumbent() const { return incumbent_; }
    std::size_t size() const { return xs_scaled_.size(); }

private:
    std::vector<double> scaled(const Configuration& c) const;
    double kernel(const std::vector<double>& a,
                  const std::vector<double>& b) const;

    const HyperparameterSpace* space_;
    GpConfig cfg_;
    std::vector<std::vector<double>> xs_scaled_;
    std::vector<double> chol_;   // lower-triangular factor, row-major
    std::vector<double> alpha_;  // (K + jitter I)^-1 (t - tbar)
    double target_mean_ = 0.0;
    double incumbent_ = 0.0;
};

}  // namespace gadsel
