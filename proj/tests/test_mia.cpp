// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "sparsemia/mia/attack.hpp"
#include "sparsemia/nn/layers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

using namespace sparsemia;

namespace {

/// R(x) = A x, no softmax.
class LinearPredictor final : public mia::Predictor {
 public:
  explicit LinearPredictor(Matrix a) : a_(std::move(a)) {}
  Index input_size() const override { return a_.cols(); }
  Index classes() const override { return a_.rows(); }
  Matrix predict(const Matrix& inputs) const override { return a_ * inputs; }

 private:
  Matrix a_;
};

class ConstantPredictor final : public mia::Predictor {
 public:
  Index input_size() const override { return 3; }
  Index classes() const override { return 4; }
  Matrix predict(const Matrix& inputs) const override { return Matrix::Constant(4, inputs.cols(), 0.25); }
};

/// One-hot on its label for stored members (exact input match), uniform
/// everywhere else.
class MemorizingPredictor final : public mia::Predictor {
 public:
  MemorizingPredictor(const data::LabeledDataset& d, const std::vector<Index>& members) : classes_(d.classes) {
    for (Index i : members) {
      const Vector x = d.inputs.col(i);
      memory_.emplace(std::vector<double>(x.begin(), x.end()), d.labels[static_cast<std::size_t>(i)]);
    }
    input_size_ = d.feature_size();
  }
  Index input_size() const override { return input_size_; }
  Index classes() const override { return classes_; }
  Matrix predict(const Matrix& inputs) const override {
    Matrix out = Matrix::Constant(classes_, inputs.cols(), 1.0 / static_cast<double>(classes_));
    for (Index j = 0; j < inputs.cols(); ++j) {
      const Vector x = inputs.col(j);
      const auto it = memory_.find(std::vector<double>(x.begin(), x.end()));
      if (it != memory_.end()) {
        out.col(j).setZero();
        out(it->second, j) = 1.0;
      }
    }
    return out;
  }

 private:
  Index classes_;
  Index input_size_ = 0;
  std::map<std::vector<double>, int> memory_;
};

data::LabeledDataset random_dataset(Index n, Index dims, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  data::LabeledDataset d;
  d.classes = classes;
  d.inputs = oracle::random_matrix(dims, n, rng);
  for (Index i = 0; i < n; ++i) d.labels.push_back(static_cast<int>(i % classes));
  return d;
}

mia::DiscriminatorOptions fast_options() {
  mia::DiscriminatorOptions o;
  o.epochs = 30;
  return o;
}

}  // namespace

TEST(Partition, SixtyThousandSamples) {
  const auto s = mia::partition(60000, 1);
  EXPECT_EQ(s.target_train.size(), 15000u);
  EXPECT_EQ(s.shadow_test.size(), 15000u);
  EXPECT_EQ(s.target_val.size(), 1000u);
  EXPECT_EQ(s.shadow_val.size(), 1000u);
}

TEST(Partition, DeskScaleProportionalValidation) {
  const auto s = mia::partition(4000, 2);
  EXPECT_EQ(s.target_test.size(), 1000u);
  EXPECT_EQ(s.target_val.size(), 67u);
  EXPECT_EQ(mia::validation_size(1000), 67);
}

TEST(Partition, DisjointQuartersCoverRetainedIndices) {
  const auto s = mia::partition(4003, 3);
  std::set<Index> all;
  for (const auto* q : {&s.target_train, &s.target_test, &s.shadow_train, &s.shadow_test}) {
    EXPECT_EQ(q->size(), 1000u);
    all.insert(q->begin(), q->end());
  }
  EXPECT_EQ(all.size(), 4000u);
  EXPECT_LT(*all.rbegin(), 4003);
  for (Index v : s.target_val) EXPECT_NE(std::find(s.target_train.begin(), s.target_train.end(), v), s.target_train.end());
  for (Index v : s.shadow_val) EXPECT_NE(std::find(s.shadow_train.begin(), s.shadow_train.end(), v), s.shadow_train.end());
}

TEST(Partition, SeededAndValidated) {
  EXPECT_EQ(mia::partition(400, 5).target_train, mia::partition(400, 5).target_train);
  EXPECT_NE(mia::partition(400, 5).target_train, mia::partition(400, 6).target_train);
  EXPECT_THROW(mia::partition(7, 1), std::invalid_argument);
  EXPECT_NO_THROW(mia::partition(8, 1));
}

TEST(Membership, LabelDefinition) {
  const auto s = mia::partition(40, 1);
  EXPECT_EQ(mia::membership_label(s.target_train[0], s, mia::Side::target), 1);
  EXPECT_EQ(mia::membership_label(s.target_test[0], s, mia::Side::target), 0);
  EXPECT_THROW(mia::membership_label(s.shadow_train[0], s, mia::Side::target), std::domain_error);
  EXPECT_EQ(mia::membership_label(s.shadow_test[3], s, mia::Side::shadow), 0);
}

TEST(Membership, EvaluationSetIsBalanced) {
  const auto s = mia::partition(400, 1);
  const auto eval = mia::evaluation_set(s, mia::Side::shadow);
  const auto members = std::count_if(eval.begin(), eval.end(), [](auto e) { return e.member == 1; });
  EXPECT_EQ(static_cast<std::size_t>(2 * members), eval.size());
  EXPECT_EQ(members, 100 - 7);
  for (const auto& e : eval) {
    EXPECT_EQ(mia::membership_label(e.index, s, mia::Side::shadow), e.member);
    EXPECT_EQ(std::find(s.shadow_val.begin(), s.shadow_val.end(), e.index), s.shadow_val.end());
  }
}

TEST(Features, ConstantModelHasZeroSensitivity) {
  Rng rng(1);
  const auto f = mia::extract_features(ConstantPredictor{}, Vector::Ones(3), 2, {}, rng);
  EXPECT_TRUE((f.sensitivity.array() == 0.0).all());
}

TEST(Features, OneHotClass) {
  const LinearPredictor model(Matrix::Identity(10, 10));
  Rng rng(2);
  const auto f = mia::extract_features(model, Vector::Zero(10), 7, {}, rng);
  EXPECT_EQ(f.class_onehot.sum(), 1.0);
  EXPECT_EQ(f.class_onehot[7], 1.0);
  EXPECT_EQ(f.flat().size(), 30);
}

TEST(Features, LinearModelMatchesFoldedGaussian) {
  Matrix a(2, 2);
  a << 3, 4, 1, 0;
  const LinearPredictor model(a);
  const double sqrt_2_pi = std::sqrt(2.0 / std::numbers::pi);
  for (int samples : {5, 10000}) {
    Rng rng(3);
    const auto f = mia::extract_features(model, Vector::Zero(2), 0, {.epsilon = 0.001, .mc_samples = samples}, rng);
    for (Index row = 0; row < 2; ++row) {
      const double norm = a.row(row).norm();
      const double se = norm * std::sqrt(1.0 - 2.0 / std::numbers::pi) / std::sqrt(static_cast<double>(samples));
      EXPECT_NEAR(f.sensitivity[row], norm * sqrt_2_pi, 3 * se) << samples << " samples, row " << row;
    }
  }
}

TEST(Features, NetworkPredictionIsDistributionAndDeterministic) {
  nn::Network net;
  net.add<nn::Dense>(4, 3);
  Rng init(4);
  net.initialize(init);
  const mia::NetworkPredictor model(net);
  const auto d = random_dataset(20, 4, 3, 5);
  const std::vector<mia::LabeledIndex> samples{{3, 1}, {7, 0}, {11, 1}, {2, 0}};
  const auto a = mia::extract_feature_set(model, d, samples, {}, 9);
  const auto b = mia::extract_feature_set(model, d, samples, {}, 9);
  EXPECT_EQ(a.features, b.features);
  for (Index j = 0; j < a.size(); ++j) {
    EXPECT_NEAR(a.features.col(j).segment(3, 3).sum(), 1.0, 1e-9);
    EXPECT_GE(a.features.col(j).tail(3).minCoeff(), 0.0);
  }
  // Per-sample streams: a sample's features do not depend on its neighbours.
  const std::vector<mia::LabeledIndex> alone{{7, 0}};
  EXPECT_EQ(mia::extract_feature_set(model, d, alone, {}, 9).features.col(0), a.features.col(1));
}

TEST(Discriminator, GridHasNineEntries) {
  const auto d = random_dataset(400, 5, 4, 6);
  const auto split = mia::partition(d.size(), 7);
  const MemorizingPredictor shadow(d, split.fitted(mia::Side::shadow));
  const auto sel = mia::train_discriminators(shadow, d, split, {}, fast_options(), 8);
  EXPECT_EQ(sel.grid.size(), 9u);
  EXPECT_FALSE(sel.degenerate_features);
  const auto best = std::max_element(sel.grid.begin(), sel.grid.end(), [](auto& x, auto& y) {
    return x.holdout_accuracy < y.holdout_accuracy;
  });
  EXPECT_EQ(best->spec, sel.best.spec);
}

TEST(Discriminator, MemorizingModelIsExposed) {
  const auto d = random_dataset(400, 5, 4, 9);
  const auto split = mia::partition(d.size(), 10);
  const MemorizingPredictor shadow(d, split.fitted(mia::Side::shadow));
  const MemorizingPredictor target(d, split.fitted(mia::Side::target));
  const auto sel = mia::train_discriminators(shadow, d, split, {}, fast_options(), 11);
  const auto outcome = mia::attack(sel.best, target, d, split, {}, 12);
  EXPECT_GE(outcome.precision, 95.0);
  EXPECT_DOUBLE_EQ(outcome.defense + 2 * outcome.precision, 200.0);
}

TEST(Discriminator, ShuffledLabelsGiveCoinFlip) {
  const auto d = random_dataset(2000, 5, 4, 13);
  const auto split = mia::partition(d.size(), 14);
  const MemorizingPredictor shadow(d, split.fitted(mia::Side::shadow));
  const MemorizingPredictor target(d, split.fitted(mia::Side::target));
  auto train = mia::extract_feature_set(shadow, d, mia::evaluation_set(split, mia::Side::shadow), {}, 15);
  auto eval = mia::extract_feature_set(target, d, mia::evaluation_set(split, mia::Side::target), {}, 16);
  mia::shuffle_membership(train, 17);
  mia::shuffle_membership(eval, 18);
  const auto sel = mia::train_discriminators(train, fast_options(), 19);
  const auto outcome = mia::attack(sel.best, eval);
  // 932 evaluated samples: one binomial standard deviation is ~1.6 points.
  EXPECT_NEAR(outcome.precision, 50.0, 5.0);
}

TEST(Discriminator, DegenerateFeaturesFlagged) {
  mia::FeatureSet set;
  set.classes = 2;
  set.features = Matrix::Ones(6, 20);
  for (int i = 0; i < 20; ++i) set.member.push_back(i % 2);
  mia::DiscriminatorOptions o;
  o.epochs = 2;
  const auto sel = mia::train_discriminators(set, o, 1);
  EXPECT_TRUE(sel.degenerate_features);
  EXPECT_EQ(sel.grid.size(), 9u);
}

TEST(Attack, DefenseFormula) {
  EXPECT_EQ(mia::defense_from_precision(50), 100.0);
  EXPECT_EQ(mia::defense_from_precision(75), 50.0);
  EXPECT_EQ(mia::defense_from_precision(100), 0.0);
}

TEST(Attack, RejectsUnbalancedSet) {
  mia::FeatureSet set;
  set.classes = 2;
  set.features = Matrix::Ones(6, 3);
  set.member = {1, 1, 0};
  mia::Discriminator d;
  EXPECT_THROW(mia::attack(d, set), std::invalid_argument);
}

TEST(Attack, JsonCarriesOutcome) {
  mia::AttackOutcome o;
  o.precision = 62.5;
  o.defense = mia::defense_from_precision(62.5);
  o.discriminator = {{30, 30}, 0.001};
  o.scores = {0.2, 0.9};
  o.truth = {0, 1};
  const auto j = mia::to_json(o);
  EXPECT_EQ(j["precision"], 62.5);
  EXPECT_EQ(j["defense"], 75.0);
  EXPECT_EQ(j["discriminator"]["hidden"].size(), 2u);
  EXPECT_EQ(j["member"][1], 1);
}

TEST(FeatureCsv, Header) {
  mia::FeatureSet set;
  set.classes = 2;
  set.features = Matrix::Zero(6, 1);
  set.member = {1};
  const auto p = std::filesystem::temp_directory_path() / "sparsemia_features.csv";
  mia::write_feature_csv(p, set);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "class_0,class_1,pred_0,pred_1,sens_0,sens_1,member");
}
