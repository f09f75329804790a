// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsemia/data/dataset.hpp"
#include "sparsemia/nn/network.hpp"

#include <span>
#include <vector>

namespace sparsemia::nn {

/// Column-wise softmax of classes × batch logits.
Matrix softmax(const Matrix& logits);

/// Mean over the batch of -log softmax(logits)[label]. Throws
/// std::out_of_range for a label outside [0, classes).
double cross_entropy(const Matrix& logits, std::span<const int> labels);

/// Loss as above; `grad` receives d(loss)/d(logits).
double cross_entropy(const Matrix& logits, std::span<const int> labels, Matrix& grad);

/// Index of the largest entry; ties resolve to the lowest index.
int argmax(const Eigen::Ref<const Vector>& scores);

std::vector<int> predict_labels(const Matrix& logits);

/// Percentage of samples whose most probable class is the label.
double accuracy(const Network& network, const data::LabeledDataset& dataset,
                Index batch_size = 1024);

}  // namespace sparsemia::nn
