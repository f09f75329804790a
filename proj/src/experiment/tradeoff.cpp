// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/experiment/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsemia::experiment {

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("least_squares_slope: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("least_squares_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw std::invalid_argument("least_squares_slope: all x values are equal");
  return sxy / sxx;
}

Tradeoff compute_tradeoff(const TradeoffPoint& dense, std::span<const TradeoffPoint> window) {
  if (window.size() < 2) throw std::invalid_argument("compute_tradeoff: window needs at least two sparsity levels");
  Tradeoff out;
  std::vector<double> acc, def;
  double ratio_sum = 0;
  std::size_t ratio_count = 0;
  for (const auto& p : window) {
    acc.push_back(p.accuracy);
    def.push_back(p.defense);
    out.used.push_back(p.level);
    const double acc_gap = std::abs(p.accuracy - dense.accuracy);
    if (acc_gap == 0 || dense.defense == 0) {
      out.excluded.push_back(p.level);
      continue;
    }
    ratio_sum += std::abs(p.defense - dense.defense) / dense.defense * (dense.accuracy / acc_gap);
    ++ratio_count;
  }
  out.slope = least_squares_slope(acc, def);
  if (ratio_count > 0) out.ratio = ratio_sum / static_cast<double>(ratio_count);
  return out;
}

Tradeoff compute_tradeoff(const ExperimentReport& report, const SparsityWindow& window) {
  const auto dense = std::find_if(report.aggregates.begin(), report.aggregates.end(),
                                  [](const auto& a) { return a.level == kDenseLevel; });
  if (dense == report.aggregates.end()) throw std::invalid_argument("compute_tradeoff: report has no dense level");
  std::vector<TradeoffPoint> points;
  for (const auto& a : report.aggregates) {
    if (a.level == kDenseLevel) continue;
    const double nz = a.nonzero_percent.mean;
    if (nz >= window.min_nonzero_percent && nz <= window.max_nonzero_percent) {
      points.push_back({a.level, a.test_accuracy.mean, a.defense.mean});
    }
  }
  return compute_tradeoff({kDenseLevel, dense->test_accuracy.mean, dense->defense.mean}, points);
}

nlohmann::json to_json(const Tradeoff& tradeoff) {
  nlohmann::json j{{"slope", tradeoff.slope}, {"used", tradeoff.used}, {"excluded", tradeoff.excluded}};
  j["ratio"] = tradeoff.ratio ? nlohmann::json(*tradeoff.ratio) : nlohmann::json(nullptr);
  return j;
}

}  // namespace sparsemia::experiment
