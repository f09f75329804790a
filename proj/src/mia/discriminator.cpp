// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/mia/discriminator.hpp"

#include "sparsemia/nn/layers.hpp"
#include "sparsemia/nn/loss.hpp"
#include "sparsemia/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sparsemia::mia {

std::string DiscriminatorSpec::describe() const {
  std::ostringstream out;
  out << "hidden=[";
  for (std::size_t i = 0; i < hidden.size(); ++i) out << (i ? "," : "") << hidden[i];
  out << "] lr=" << learning_rate;
  return out.str();
}

std::vector<DiscriminatorSpec> DiscriminatorOptions::grid() const {
  std::vector<DiscriminatorSpec> out;
  for (const auto& arch : architectures) {
    for (double lr : learning_rates) out.push_back({arch, lr});
  }
  return out;
}

void DiscriminatorOptions::validate() const {
  if (architectures.empty() || learning_rates.empty()) throw std::invalid_argument("discriminator: empty grid");
  for (const auto& arch : architectures) {
    for (Index width : arch) {
      if (width < 1) throw std::invalid_argument("discriminator: hidden width must be positive");
    }
  }
  for (double lr : learning_rates) {
    if (!(lr > 0)) throw std::invalid_argument("discriminator: learning rate must be positive");
  }
  if (epochs < 1 || batch_size < 1) throw std::invalid_argument("discriminator: epochs and batch size must be positive");
  if (!(holdout_fraction > 0 && holdout_fraction < 1)) {
    throw std::invalid_argument("discriminator: holdout fraction must lie in (0, 1)");
  }
}

namespace {

Matrix standardize(const Discriminator& d, const Matrix& features) {
  return (features.colwise() - d.feature_mean).array().colwise() / d.feature_scale.array();
}

FeatureSet select_columns(const FeatureSet& set, const std::vector<Index>& columns) {
  FeatureSet out;
  out.classes = set.classes;
  out.features.resize(set.features.rows(), static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.features.col(static_cast<Index>(i)) = set.features.col(columns[i]);
    out.member.push_back(set.member[static_cast<std::size_t>(columns[i])]);
  }
  return out;
}

bool all_identical(const Matrix& features) {
  for (Index j = 1; j < features.cols(); ++j) {
    if (features.col(j) != features.col(0)) return false;
  }
  return true;
}

}  // namespace

Vector Discriminator::scores(const Matrix& features) const {
  return nn::softmax(network.infer(standardize(*this, features))).row(1).transpose();
}

std::vector<int> Discriminator::predict(const Matrix& features) const {
  const Matrix logits = network.infer(standardize(*this, features));
  return nn::predict_labels(logits);
}

double percent_correct(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("percent_correct: size mismatch");
  if (truth.empty()) throw std::invalid_argument("percent_correct: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

Discriminator train_discriminator(const FeatureSet& set, const DiscriminatorSpec& spec,
                                  const DiscriminatorOptions& options, std::uint64_t seed) {
  if (set.size() == 0) throw std::invalid_argument("discriminator: empty feature set");
  Discriminator d;
  d.spec = spec;
  d.feature_mean = set.features.rowwise().mean();
  d.feature_scale = ((set.features.colwise() - d.feature_mean).array().square().rowwise().mean()).sqrt();
  for (auto& s : d.feature_scale) s = s > 1e-12 ? s : 1.0;

  Index width = set.features.rows();
  for (Index h : spec.hidden) {
    d.network.add<nn::Dense>(width, h);
    d.network.add<nn::ReLU>(h);
    width = h;
  }
  d.network.add<nn::Dense>(width, 2);
  Rng init_rng(derive_seed(seed, 1));
  d.network.initialize(init_rng);

  const Matrix inputs = standardize(d, set.features);
  const auto n = static_cast<std::size_t>(set.size());
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  Rng shuffle_rng(derive_seed(seed, 2));
  nn::AdamState state;
  const nn::AdamOptions adam{.lr = spec.learning_rate};
  const auto params = d.network.trainable_parameters();
  Matrix grad;
  std::vector<int> labels;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(options.batch_size));
      Matrix batch(inputs.rows(), static_cast<Index>(end - begin));
      labels.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch.col(static_cast<Index>(i - begin)) = inputs.col(order[i]);
        labels.push_back(set.member[static_cast<std::size_t>(order[i])]);
      }
      d.network.zero_grad();
      nn::cross_entropy(d.network.forward(batch, nn::Mode::train), labels, grad);
      d.network.backward(grad);
      nn::adam_step(params, state, adam);
    }
  }
  return d;
}

DiscriminatorSelection train_discriminators(const FeatureSet& shadow_features,
                                            const DiscriminatorOptions& options, std::uint64_t seed) {
  options.validate();
  std::vector<Index> members, outsiders;
  for (Index j = 0; j < shadow_features.size(); ++j) {
    (shadow_features.member[static_cast<std::size_t>(j)] ? members : outsiders).push_back(j);
  }
  Rng rng(derive_seed(seed, 0x401d));
  std::shuffle(members.begin(), members.end(), rng);
  std::shuffle(outsiders.begin(), outsiders.end(), rng);
  std::vector<Index> fit, holdout;
  for (const auto* group : {&members, &outsiders}) {
    const auto held = static_cast<std::size_t>(std::ceil(options.holdout_fraction * static_cast<double>(group->size())));
    if (held == 0 || held >= group->size()) {
      throw std::invalid_argument("discriminator: too few samples per membership class for a holdout slice");
    }
    holdout.insert(holdout.end(), group->begin(), group->begin() + static_cast<std::ptrdiff_t>(held));
    fit.insert(fit.end(), group->begin() + static_cast<std::ptrdiff_t>(held), group->end());
  }
  std::sort(fit.begin(), fit.end());
  std::sort(holdout.begin(), holdout.end());
  const auto fit_set = select_columns(shadow_features, fit);
  const auto holdout_set = select_columns(shadow_features, holdout);

  DiscriminatorSelection selection;
  selection.degenerate_features = all_identical(fit_set.features);
  double best = -1;
  const auto grid = options.grid();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto d = train_discriminator(fit_set, grid[g], options, derive_seed(seed, 100 + g));
    const double acc = percent_correct(d.predict(holdout_set.features), holdout_set.member);
    selection.grid.push_back({grid[g], acc});
    if (acc > best) {
      best = acc;
      selection.best = std::move(d);
    }
  }
  return selection;
}

DiscriminatorSelection train_discriminators(const Predictor& shadow_model, const data::LabeledDataset& dataset,
                                            const MembershipSplit& split, const FeatureOptions& features,
                                            const DiscriminatorOptions& options, std::uint64_t seed) {
  const auto samples = evaluation_set(split, Side::shadow);
  const auto set = extract_feature_set(shadow_model, dataset, samples, features, derive_seed(seed, 0xfea7));
  return train_discriminators(set, options, seed);
}

}  // namespace sparsemia::mia
