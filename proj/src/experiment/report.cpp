// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/experiment/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>

namespace sparsemia::experiment {

using nlohmann::json;

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1))};
}

bool intervals_disjoint(const Summary& a, const Summary& b) {
  return a.mean + a.std < b.mean - b.std || b.mean + b.std < a.mean - a.std;
}

std::vector<LevelAggregate> aggregate(std::span<const SeedRecord> records) {
  std::vector<std::string> levels;
  for (const auto& r : records) {
    if (std::find(levels.begin(), levels.end(), r.level) == levels.end()) levels.push_back(r.level);
  }
  std::vector<LevelAggregate> out;
  for (const auto& level : levels) {
    std::vector<double> nz, test, train, prec, def;
    for (const auto& r : records) {
      if (r.level != level) continue;
      nz.push_back(r.nonzero_percent);
      test.push_back(r.test_accuracy);
      train.push_back(r.train_accuracy);
      prec.push_back(r.precision);
      def.push_back(r.defense);
    }
    out.push_back({level, nz.size(), summarize(nz), summarize(test), summarize(train), summarize(prec),
                   summarize(def), false});
  }
  const auto dense = std::find_if(out.begin(), out.end(), [](const auto& a) { return a.level == kDenseLevel; });
  if (dense != out.end()) {
    for (auto& a : out) {
      if (&a != &*dense) a.significant = intervals_disjoint(a.defense, dense->defense);
    }
  }
  return out;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least two values");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }
Summary summary_from(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

}  // namespace

json to_json(const ExperimentReport& report) {
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"level", r.level},
                       {"seed", r.seed},
                       {"nonzero_percent", r.nonzero_percent},
                       {"test_accuracy", r.test_accuracy},
                       {"train_accuracy", r.train_accuracy},
                       {"precision", r.precision},
                       {"defense", r.defense},
                       {"discriminator", r.discriminator},
                       {"degenerate_features", r.degenerate_features}});
  }
  json diagnostics = json::array();
  for (const auto& d : report.diagnostics) diagnostics.push_back({{"seed", d.seed}, {"message", d.message}});
  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back({{"level", a.level},
                          {"count", a.count},
                          {"nonzero_percent", summary_json(a.nonzero_percent)},
                          {"test_accuracy", summary_json(a.test_accuracy)},
                          {"train_accuracy", summary_json(a.train_accuracy)},
                          {"precision", summary_json(a.precision)},
                          {"defense", summary_json(a.defense)},
                          {"significant", a.significant}});
  }
  return {{"name", report.name},
          {"seeds", report.seeds},
          {"records", records},
          {"diagnostics", diagnostics},
          {"aggregates", aggregates}};
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport report;
  report.name = j.at("name").get<std::string>();
  report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& r : j.at("records")) {
    report.records.push_back({r.at("level").get<std::string>(), r.at("seed").get<std::uint64_t>(),
                              r.at("nonzero_percent").get<double>(), r.at("test_accuracy").get<double>(),
                              r.at("train_accuracy").get<double>(), r.at("precision").get<double>(),
                              r.at("defense").get<double>(), r.at("discriminator").get<std::string>(),
                              r.at("degenerate_features").get<bool>()});
  }
  for (const auto& d : j.at("diagnostics")) {
    report.diagnostics.push_back({d.at("seed").get<std::uint64_t>(), d.at("message").get<std::string>()});
  }
  for (const auto& a : j.at("aggregates")) {
    report.aggregates.push_back({a.at("level").get<std::string>(), a.at("count").get<std::size_t>(),
                                 summary_from(a.at("nonzero_percent")), summary_from(a.at("test_accuracy")),
                                 summary_from(a.at("train_accuracy")), summary_from(a.at("precision")),
                                 summary_from(a.at("defense")), a.at("significant").get<bool>()});
  }
  return report;
}

void save_report(const std::filesystem::path& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
}

ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return report_from_json(json::parse(in));
}

void write_records_csv(const std::filesystem::path& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "level,seed,nonzero_percent,test_accuracy,train_accuracy,precision,defense,discriminator\n"
      << std::setprecision(17);
  for (const auto& r : report.records) {
    out << r.level << ',' << r.seed << ',' << r.nonzero_percent << ',' << r.test_accuracy << ','
        << r.train_accuracy << ',' << r.precision << ',' << r.defense << ",\"" << r.discriminator << "\"\n";
  }
}

}  // namespace sparsemia::experiment
