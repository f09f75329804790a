// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/experiment/figure.hpp"

#include "sparsemia/experiment/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparsemia::experiment {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 30;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Range {
  double lo = 0;
  double hi = 1;

  void pad() {
    if (hi - lo < 1e-9) {
      lo -= 1;
      hi += 1;
    }
    const double margin = 0.08 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_figure(const ExperimentReport& report) {
  const auto& levels = report.aggregates;
  if (levels.empty()) throw std::invalid_argument("emit_figure: report has no aggregated levels");

  Range xr{1e300, -1e300}, yr{1e300, -1e300};
  for (const auto& a : levels) {
    xr.lo = std::min(xr.lo, a.test_accuracy.mean - a.test_accuracy.std);
    xr.hi = std::max(xr.hi, a.test_accuracy.mean + a.test_accuracy.std);
    yr.lo = std::min(yr.lo, a.defense.mean - a.defense.std);
    yr.hi = std::max(yr.hi, a.defense.mean + a.defense.std);
  }
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(report.name)
      << "</text>\n";

  svg << "<g class=\"axes\" stroke=\"black\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
      << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph << "\"/>\n"
      << "</g>\n<g class=\"ticks\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    svg << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fmt(sx(xv)) << "\" y2=\""
        << kTop + ph + 5 << "\" stroke=\"black\"/>"
        << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << fmt(xv, 1)
        << "</text>\n"
        << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(sy(yv)) << "\" x2=\"" << kLeft << "\" y2=\""
        << fmt(sy(yv)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv, 1)
        << "</text>\n";
  }
  svg << "</g>\n"
      << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">Mean test accuracy (%)</text>\n"
      << "<text transform=\"translate(18," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">Mean defense D = 200 - 2P</text>\n";

  std::vector<double> xs, ys;
  for (const auto& a : levels) {
    xs.push_back(a.test_accuracy.mean);
    ys.push_back(a.defense.mean);
  }
  const bool distinct = std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) != xs.end();
  if (levels.size() >= 2 && distinct) {
    const double slope = least_squares_slope(xs, ys);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    auto line = [&](double x) { return my + slope * (x - mx); };
    svg << "<line class=\"fit\" x1=\"" << fmt(sx(xr.lo)) << "\" y1=\"" << fmt(sy(line(xr.lo))) << "\" x2=\""
        << fmt(sx(xr.hi)) << "\" y2=\"" << fmt(sy(line(xr.hi)))
        << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n"
        << "<text class=\"fit-label\" x=\"" << kLeft + pw - 4 << "\" y=\"" << kTop + 14
        << "\" text-anchor=\"end\" fill=\"gray\">slope " << fmt(slope) << "</text>\n";
  }

  for (const auto& a : levels) {
    const double cx = sx(a.test_accuracy.mean);
    const double cy = sy(a.defense.mean);
    const std::string colour = a.level == kDenseLevel ? "black" : (a.level.rfind("imp", 0) == 0 ? "#1f77b4" : "#d62728");
    svg << "<g class=\"level\" data-level=\"" << escape(a.level) << "\">\n"
        << "<line class=\"errorbar\" x1=\"" << fmt(sx(a.test_accuracy.mean - a.test_accuracy.std)) << "\" y1=\""
        << fmt(cy) << "\" x2=\"" << fmt(sx(a.test_accuracy.mean + a.test_accuracy.std)) << "\" y2=\"" << fmt(cy)
        << "\" stroke=\"" << colour << "\"/>\n"
        << "<line class=\"errorbar\" x1=\"" << fmt(cx) << "\" y1=\"" << fmt(sy(a.defense.mean - a.defense.std))
        << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(sy(a.defense.mean + a.defense.std)) << "\" stroke=\""
        << colour << "\"/>\n"
        << "<circle class=\"marker\" cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"4\" fill=\"" << colour
        << "\"/>\n"
        << "<text class=\"annotation\" x=\"" << fmt(cx + 6) << "\" y=\"" << fmt(cy - 6) << "\">"
        << fmt(a.nonzero_percent.mean, 1) << "%</text>\n"
        << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_figure(const ExperimentReport& report, const std::filesystem::path& path) {
  const std::string svg = render_figure(report);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg;
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

}  // namespace sparsemia::experiment
