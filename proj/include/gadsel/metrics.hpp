#pragma once

#include <cstdint>
#include <vector>

#include "gadsel/detectors.hpp"

namespace gadsel {

// Mann-Whitney ROC-AUC: fraction of (anomaly, normal) pairs ranked
// correctly, ties counted 0.5. O(n log n) via average ranks.
double roc_auc(const ScoreVector& s, const std::vector<std::uint8_t>& labels);

// (max - min) / max over a sweep's AUC values.
double performance_variation(const std::vector<double>& aucs);

double gain_over_min(double csm_auc, const std::vector<double>& aucs);
double gain_over_median(double csm_auc, const std::vector<double>& aucs);
double gain_over_max(double csm_auc, const std::vector<double>& aucs);

// Even-length lists take the mean of the two central values.
double median_of(std::vector<double> values);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gadsel
