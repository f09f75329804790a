// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/nn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsemia::nn {

namespace {

void check_labels(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != logits.cols()) {
    throw std::invalid_argument("cross_entropy: label count differs from batch size");
  }
  for (int y : labels) {
    if (y < 0 || y >= logits.rows()) throw std::out_of_range("cross_entropy: label out of range");
  }
}

}  // namespace

Matrix softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Index j = 0; j < logits.cols(); ++j) {
    const double shift = logits.col(j).maxCoeff();
    p.col(j) = (logits.col(j).array() - shift).exp();
    p.col(j) /= p.col(j).sum();
  }
  return p;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  double total = 0;
  for (Index j = 0; j < logits.cols(); ++j) {
    const double shift = logits.col(j).maxCoeff();
    const double lse = shift + std::log((logits.col(j).array() - shift).exp().sum());
    total += lse - logits(labels[static_cast<std::size_t>(j)], j);
  }
  return total / static_cast<double>(logits.cols());
}

double cross_entropy(const Matrix& logits, std::span<const int> labels, Matrix& grad) {
  const double loss = cross_entropy(logits, labels);
  grad = softmax(logits);
  for (Index j = 0; j < logits.cols(); ++j) grad(labels[static_cast<std::size_t>(j)], j) -= 1.0;
  grad /= static_cast<double>(logits.cols());
  return loss;
}

int argmax(const Eigen::Ref<const Vector>& scores) {
  int best = 0;
  for (Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  }
  return best;
}

std::vector<int> predict_labels(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.cols()));
  for (Index j = 0; j < logits.cols(); ++j) out[static_cast<std::size_t>(j)] = argmax(logits.col(j));
  return out;
}

double accuracy(const Network& network, const data::LabeledDataset& dataset, Index batch_size) {
  if (dataset.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
  Index correct = 0;
  for (Index start = 0; start < dataset.size(); start += batch_size) {
    const Index n = std::min(batch_size, dataset.size() - start);
    const auto predicted = predict_labels(network.infer(dataset.inputs.middleCols(start, n)));
    for (Index j = 0; j < n; ++j) {
      if (predicted[static_cast<std::size_t>(j)] == dataset.labels[static_cast<std::size_t>(start + j)]) {
        ++correct;
      }
    }
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace sparsemia::nn
