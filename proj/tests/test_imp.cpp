// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "sparsemia/data/synthetic.hpp"
#include "sparsemia/imp/mask_io.hpp"
#include "sparsemia/nn/layers.hpp"
#include "sparsemia/nn/loss.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

using namespace sparsemia;

namespace {

nn::SparseMask mask_of(std::initializer_list<int> bits) {
  nn::SparseMask m;
  for (int b : bits) m.bits.push_back(static_cast<std::uint8_t>(b));
  return m;
}

/// Entry i is pruned iff fewer than k kept entries precede it in
/// (|w|, index) order.
nn::SparseMask brute_force_prune(const Vector& w, const nn::SparseMask& mask, double fraction) {
  Index kept = 0;
  for (Index i = 0; i < w.size(); ++i) kept += mask.keeps(i) ? 1 : 0;
  const auto k = static_cast<Index>(std::floor(fraction * static_cast<double>(kept)));
  nn::SparseMask out = mask;
  for (Index i = 0; i < w.size(); ++i) {
    if (!mask.keeps(i)) continue;
    Index before = 0;
    for (Index j = 0; j < w.size(); ++j) {
      if (!mask.keeps(j) || j == i) continue;
      if (std::abs(w[j]) < std::abs(w[i]) || (std::abs(w[j]) == std::abs(w[i]) && j < i)) ++before;
    }
    if (before < k) out.bits[static_cast<std::size_t>(i)] = 0;
  }
  return out;
}

nn::Network mlp(Index in, Index hidden, Index classes) {
  nn::Network net;
  net.add<nn::Dense>(in, hidden);
  net.add<nn::ReLU>(hidden);
  net.add<nn::Dense>(hidden, hidden);
  net.add<nn::ReLU>(hidden);
  net.add<nn::Dense>(hidden, classes);
  return net;
}

data::LabeledDataset blobs(Index n, std::uint64_t seed) {
  auto d = data::make_synthetic(
      {.kind = data::SyntheticKind::blobs, .samples = n, .classes = 3, .noise = 0.4, .dims = 6, .seed = seed});
  data::normalize(d);
  return d;
}

}  // namespace

TEST(MagnitudePrune, DocumentedExample) {
  Vector w(4);
  w << 0.1, -0.5, 0.3, -0.05;
  EXPECT_EQ(imp::magnitude_prune(w, nn::SparseMask(4), 0.5), mask_of({0, 1, 1, 0}));
}

TEST(MagnitudePrune, TiesPruneLowerIndexFirst) {
  Vector w(5);
  w << 0.2, -0.2, 0.2, 0.9, 0.2;
  EXPECT_EQ(imp::magnitude_prune(w, nn::SparseMask(5), 0.4), mask_of({0, 0, 1, 1, 1}));
}

TEST(MagnitudePrune, OnlyCountsUnmaskedEntries) {
  Vector w(6);
  w << 0.0, 0.0, 1.0, 2.0, 3.0, 4.0;
  const auto out = imp::magnitude_prune(w, mask_of({0, 0, 1, 1, 1, 1}), 0.5);
  EXPECT_EQ(out, mask_of({0, 0, 0, 0, 1, 1}));
  EXPECT_TRUE(out.subset_of(mask_of({0, 0, 1, 1, 1, 1})));
}

TEST(MagnitudePrune, Errors) {
  Vector w(1);
  w << 1.0;
  EXPECT_THROW(imp::magnitude_prune(w, nn::SparseMask(1), 0.0), std::domain_error);
  EXPECT_THROW(imp::magnitude_prune(w, nn::SparseMask(1), 1.0), std::domain_error);
  Vector w2(2);
  w2 << 1.0, 2.0;
  EXPECT_THROW(imp::magnitude_prune(w2, mask_of({0, 0}), 0.5), std::domain_error);
  EXPECT_THROW(imp::magnitude_prune(w2, nn::SparseMask(3), 0.5), std::invalid_argument);
}

TEST(MagnitudePrune, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 100);
  std::uniform_int_distribution<int> level(-6, 6);
  std::bernoulli_distribution keep(0.7);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = size(rng);
    Vector w(n);
    for (auto& x : w) x = 0.25 * level(rng);  // coarse grid forces magnitude ties
    nn::SparseMask mask(n);
    for (auto& b : mask.bits) b = keep(rng) ? 1 : 0;
    const double f = frac(rng);
    const auto expected = brute_force_prune(w, mask, f);
    if (expected.count() == 0) {
      EXPECT_THROW(imp::magnitude_prune(w, mask, f), std::domain_error);
    } else {
      EXPECT_EQ(imp::magnitude_prune(w, mask, f), expected) << "trial " << trial;
    }
  }
}

TEST(Prune, GlobalAcrossTensorsMatchesOracle) {
  auto net = mlp(5, 6, 3);
  Rng rng(2);
  net.initialize(rng);
  const imp::ImpSchedule schedule{.prune_fraction = 0.3};
  Vector all(0);
  for (auto* p : imp::prunable_parameters(net, schedule)) {
    Vector grown(all.size() + p->size());
    grown << all, p->value;
    all = grown;
  }
  const auto expected = brute_force_prune(all, nn::SparseMask(all.size()), 0.3);
  imp::prune(net, schedule);
  nn::SparseMask got;
  for (auto* p : imp::prunable_parameters(net, schedule)) {
    got.bits.insert(got.bits.end(), p->mask->bits.begin(), p->mask->bits.end());
    for (Index i = 0; i < p->size(); ++i) {
      if (!p->mask->keeps(i)) EXPECT_EQ(p->value[i], 0.0);
    }
  }
  EXPECT_EQ(got, expected);
  for (auto* p : net.parameters()) {
    if (p->role == nn::ParamRole::bias) EXPECT_FALSE(p->mask.has_value());
  }
}

TEST(Prune, PerLayerAndBiasFlags) {
  auto net = mlp(5, 6, 3);
  Rng rng(3);
  net.initialize(rng);
  const imp::ImpSchedule schedule{.prune_fraction = 0.5, .global = false, .prune_biases = true};
  imp::prune(net, schedule);
  for (auto* p : imp::prunable_parameters(net, schedule)) {
    ASSERT_TRUE(p->mask.has_value()) << p->name;
    EXPECT_EQ(p->mask->count(), p->size() - p->size() / 2) << p->name;
  }
}

TEST(Rewind, FullMaskRestoresCheckpoint) {
  auto net = mlp(4, 5, 2);
  Rng rng(4);
  net.initialize(rng);
  const auto checkpoint = nn::snapshot(net);
  Rng other(5);
  net.initialize(other);
  imp::rewind(net, checkpoint);
  EXPECT_EQ(nn::snapshot(net), checkpoint);
}

TEST(Rewind, MaskedEntriesZeroAndIdempotent) {
  auto net = mlp(4, 5, 2);
  Rng rng(6);
  net.initialize(rng);
  const auto checkpoint = nn::snapshot(net);
  imp::prune(net, {.prune_fraction = 0.5});
  imp::rewind(net, checkpoint);
  const auto once = nn::snapshot(net);
  for (auto* p : net.parameters()) {
    if (!p->mask) continue;
    for (Index i = 0; i < p->size(); ++i) {
      if (!p->mask->keeps(i)) EXPECT_EQ(p->value[i], 0.0);
    }
  }
  imp::rewind(net, checkpoint);
  EXPECT_EQ(nn::snapshot(net), once);
  auto wrong = mlp(4, 6, 2);
  EXPECT_THROW(imp::rewind(wrong, checkpoint), std::invalid_argument);
}

TEST(Recurrence, SurvivorCounts) {
  const auto n = imp::survivor_counts(1000, 0.2, 3);
  EXPECT_EQ(n, (std::vector<Index>{1000, 800, 640, 512}));
  const auto m = imp::survivor_counts(272474, 0.2, 24);
  for (std::size_t k = 1; k < m.size(); ++k) {
    EXPECT_EQ(m[k], m[k - 1] - static_cast<Index>(std::floor(0.2 * static_cast<double>(m[k - 1]))));
    const double ratio = static_cast<double>(m[k]) / 272474.0;
    EXPECT_NEAR(ratio, std::pow(0.8, static_cast<double>(k)), static_cast<double>(k) / 272474.0);
  }
}

TEST(ImpRun, ZeroRoundsIsDenseTraining) {
  auto net = mlp(6, 8, 3);
  Rng rng(7);
  net.initialize(rng);
  nn::TrainConfig c;
  c.epochs = 2;
  const auto rounds = imp::imp_run(net, blobs(120, 1), blobs(60, 2), c, {.rounds = 0});
  ASSERT_EQ(rounds.size(), 1u);
  EXPECT_EQ(rounds[0].survivors, rounds[0].prunable);
  EXPECT_EQ(rounds[0].model.network.parameters()[0]->mask, std::nullopt);
}

TEST(ImpRun, RecurrenceNestingAndZeroPersistence) {
  auto net = mlp(6, 10, 3);
  Rng rng(8);
  net.initialize(rng);
  nn::TrainConfig c;
  c.epochs = 3;
  c.initial_lr = 0.05;
  const imp::ImpSchedule schedule{.rounds = 3, .prune_fraction = 0.2};
  const auto rounds = imp::imp_run(net, blobs(150, 3), blobs(60, 4), c, schedule);
  ASSERT_EQ(rounds.size(), 4u);
  const auto expected = imp::survivor_counts(rounds[0].prunable, 0.2, 3);
  const double targets[] = {1.0, 0.8, 0.64, 0.512};
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    EXPECT_EQ(rounds[k].survivors, expected[k]);
    EXPECT_NEAR(rounds[k].survivor_fraction(), targets[k], 3.0 / static_cast<double>(rounds[0].prunable));
    auto final_net = rounds[k].model.network;
    auto best_net = rounds[k].model.best_network();
    for (auto* model : {&final_net, &best_net}) {
      std::size_t m = 0;
      for (auto* p : imp::prunable_parameters(*model, schedule)) {
        const auto& mask = rounds[k].masks[m++];
        for (Index i = 0; i < p->size(); ++i) {
          if (!mask.keeps(i)) EXPECT_EQ(std::bit_cast<std::uint64_t>(p->value[i]), 0u);
        }
      }
    }
    if (k > 0) {
      for (std::size_t m = 0; m < rounds[k].masks.size(); ++m) {
        EXPECT_TRUE(rounds[k].masks[m].subset_of(rounds[k - 1].masks[m]));
      }
    }
  }
}

TEST(ImpRun, RoundsStayNearDenseAccuracy) {
  double dense = 0, pruned[5] = {};
  const int seeds = 3;
  for (int s = 0; s < seeds; ++s) {
    auto net = mlp(6, 32, 3);
    Rng rng(100 + s);
    net.initialize(rng);
    nn::TrainConfig c;
    c.epochs = 12;
    c.initial_lr = 0.05;
    c.seed = static_cast<std::uint64_t>(s);
    const auto val = blobs(300, 50 + s);
    const auto rounds = imp::imp_run(net, blobs(600, 10 + s), val, c, {.rounds = 5});
    dense += nn::accuracy(rounds[0].model.best_network(), val) / seeds;
    for (int k = 1; k <= 5; ++k) pruned[k - 1] += nn::accuracy(rounds[k].model.best_network(), val) / seeds;
  }
  for (double acc : pruned) EXPECT_GE(acc, dense - 10.0);
}

TEST(MaskIo, RoundTripAndOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "sparsemia_test_imp";
  std::filesystem::remove_all(dir);
  auto net = mlp(6, 8, 3);
  Rng rng(9);
  net.initialize(rng);
  nn::TrainConfig c;
  c.epochs = 2;
  const imp::ImpSchedule schedule{.rounds = 2};
  const auto rounds = imp::imp_run(net, blobs(90, 5), blobs(30, 6), c, schedule);
  imp::write_imp_outputs(dir, rounds, schedule);
  for (int k = 0; k <= 2; ++k) {
    const auto stem = "round_" + std::to_string(k);
    ASSERT_TRUE(std::filesystem::exists(dir / (stem + ".ckpt")));
    const auto masks = imp::load_masks(dir / (stem + ".mask"));
    ASSERT_EQ(masks.size(), rounds[static_cast<std::size_t>(k)].masks.size());
    for (std::size_t m = 0; m < masks.size(); ++m) EXPECT_EQ(masks[m].mask, rounds[static_cast<std::size_t>(k)].masks[m]);
  }
  std::ifstream csv(dir / "summary.csv");
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 4);
}
