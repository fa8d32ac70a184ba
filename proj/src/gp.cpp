#include "gadsel/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gadsel/errors.hpp"

namespace gadsel {

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double expected_improvement(double mean, double sigma, double incumbent) {
    if (sigma < 0) throw ValidationError("sigma must be non-negative");
    if (sigma == 0) return 0.0;
    double z = (mean - incumbent) / sigma;
    return (normal_pdf(z) + z * normal_cdf(z)) * sigma;
}

Surrogate::Surrogate(const HyperparameterSpace& space, GpConfig cfg)
    : space_(&space), cfg_(cfg) {}

std::vector<double> Surrogate::scaled(const Configuration& c) const {
    std::vector<double> out(c.values.size());
    for (std::size_t l = 0; l < c.values.size(); ++l) {
        const auto& vals = space_->dim(l).values;
        double lo = vals.front(), hi = vals.back();
        out[l] = hi > lo ? (c.values[l] - lo) / (hi - lo) : 0.5;
    }
    return out;
}

double Surrogate::kernel(const std::vector<double>& a,
                         const std::vector<double>& b) const {
    double sq = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        double d = a[l] - b[l];
        sq += d * d;
    }
    return cfg_.signal_var *
           std::exp(-sq / (2.0 * cfg_.length_scale * cfg_.length_scale));
}

void Surrogate::fit(const std::vector<Configuration>& xs,
                    const std::vector<double>& targets) {
    if (xs.size() != targets.size())
        throw ShapeError("configurations and targets disagree");
    if (xs.size() < 2)
        throw ValidationError("surrogate needs at least two evaluated pairs");
    const std::size_t n = xs.size();
    xs_scaled_.clear();
    xs_scaled_.reserve(n);
    for (const auto& c : xs) xs_scaled_.push_back(scaled(c));

    target_mean_ = 0.0;
    for (double t : targets) target_mean_ += t;
    target_mean_ /= static_cast<double>(n);
    incumbent_ = *std::max_element(targets.begin(), targets.end());

    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double v = kernel(xs_scaled_[i], xs_scaled_[j]);
            if (i == j) v += cfg_.jitter;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }

    // In-place Cholesky of K + jitter I.
    chol_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = k[i * n + j];
            for (std::size_t p = 0; p < j; ++p)
                sum -= chol_[i * n + p] * chol_[j * n + p];
            if (i == j) {
                if (sum <= 0.0)
                    throw NumericalError(
                        "kernel matrix not positive definite despite jitter");
                chol_[i * n + i] = std::sqrt(sum);
            } else {
                chol_[i * n + j] = sum / chol_[j * n + j];
            }
        }
    }

    // alpha = K^-1 (t - tbar) by forward then backward substitution.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = targets[i] - target_mean_;
        for (std::size_t p = 0; p < i; ++p)
            sum -= chol_[i * n + p] * y[p];
        y[i] = sum / chol_[i * n + i];
    }
    alpha_.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double sum = y[i];
        for (std::size_t p = i + 1; p < n; ++p)
            sum -= chol_[p * n + i] * alpha_[p];
        alpha_[i] = sum / chol_[i * n + i];
    }
}

Surrogate::Prediction Surrogate::predict(const Configuration& c) const {
    const std::size_t n = xs_scaled_.size();
    if (n < 2) throw ValidationError("surrogate is not fitted");
    auto x = scaled(c);
    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = kernel(x, xs_scaled_[i]);

    double mean = target_mean_;
    for (std::size_t i = 0; i < n; ++i) mean += ks[i] * alpha_[i];

    // v = L^-1 k*; var = k** - |v|^2, with jitter folded into k**.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = ks[i];
        for (std::size_t p = 0; p < i; ++p) sum -= chol_[i * n + p] * v[p];
        v[i] = sum / chol_[i * n + i];
    }
    double var = cfg_.signal_var + cfg_.jitter;
    for (double vi : v) var -= vi * vi;
    var = std::max(var, 0.0);
    return {mean, std::sqrt(var)};
}

}  // namespace gadsel
