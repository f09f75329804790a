// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/data/synthetic.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace sparsemia::data {

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "blobs") return SyntheticKind::blobs;
  if (name == "spirals") return SyntheticKind::spirals;
  throw std::invalid_argument("unknown synthetic dataset kind: " + std::string(name));
}

LabeledDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.samples < 1 || spec.classes < 1 || spec.dims < 2 || spec.noise < 0) {
    throw std::invalid_argument("make_synthetic: invalid parameters");
  }
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double pi = std::numbers::pi;

  LabeledDataset d;
  d.classes = spec.classes;
  d.inputs.resize(spec.dims, spec.samples);
  d.labels.resize(static_cast<std::size_t>(spec.samples));
  for (Index i = 0; i < spec.samples; ++i) {
    const int c = static_cast<int>(i % spec.classes);
    d.labels[static_cast<std::size_t>(i)] = c;
    const double phase = 2.0 * pi * c / spec.classes;
    double x = 0;
    double y = 0;
    if (spec.kind == SyntheticKind::blobs) {
      x = std::cos(phase);
      y = std::sin(phase);
    } else {
      const double t = 0.05 + 0.95 * unit(rng);
      x = t * std::cos(3.0 * pi * t + phase);
      y = t * std::sin(3.0 * pi * t + phase);
    }
    d.inputs(0, i) = x + spec.noise * gauss(rng);
    d.inputs(1, i) = y + spec.noise * gauss(rng);
    for (Index k = 2; k < spec.dims; ++k) d.inputs(k, i) = spec.noise * gauss(rng);
  }
  return d;
}

}  // namespace sparsemia::data
