#include "gadsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gadsel/errors.hpp"

namespace gadsel {

double roc_auc(const ScoreVector& s, const std::vector<std::uint8_t>& labels) {
    if (s.size() != labels.size())
        throw ShapeError("scores and labels disagree on n");
    std::size_t pos = 0;
    for (auto l : labels) pos += l;
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw ValidationError("labels must contain both classes");

    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });

    // Average ranks over tie groups; AUC from the positive rank sum.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && s[order[j]] == s[order[i]]) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]]) rank_sum_pos += avg_rank;
        i = j;
    }
    double p = static_cast<double>(pos), q = static_cast<double>(neg);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
}

double performance_variation(const std::vector<double>& aucs) {
    if (aucs.empty()) throw ValidationError("empty AUC list");
    auto [mn, mx] = std::minmax_element(aucs.begin(), aucs.end());
    if (*mx <= 0) throw ValidationError("max AUC must be positive");
    return (*mx - *mn) / *mx;
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of empty list");
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {
double gain(double csm_auc, double ref) {
    if (ref == 0) throw ValidationError("reference AUC is zero");
    return (csm_auc - ref) / ref;
}
}  // namespace

double gain_over_min(double csm_auc, const std::vector<double>& aucs) {
    if (aucs.empty()) throw ValidationError("empty AUC list");
    return gain(csm_auc, *std::min_element(aucs.begin(), aucs.end()));
}

double gain_over_median(double csm_auc, const std::vector<double>& aucs) {
    return gain(csm_auc, median_of(aucs));
}

double gain_over_max(double csm_auc, const std::vector<double>& aucs) {
    if (aucs.empty()) throw ValidationError("empty AUC list");
    return gain(csm_auc, *std::max_element(aucs.begin(), aucs.end()));
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ShapeError("length mismatch");
    if (x.size() < 2) throw ValidationError("need at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0)
        throw ValidationError("correlation undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace gadsel
