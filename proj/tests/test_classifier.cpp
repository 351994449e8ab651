#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "lbpopt/classifier.hpp"
#include "lbpopt/error.hpp"
#include "support.hpp"

using namespace lbpopt;

namespace {

LabeledFeatures blobs(int per_class, const std::vector<std::vector<double>>& centers, double spread, Rng& rng) {
  LabeledFeatures d;
  d.class_count = static_cast<int>(centers.size());
  for (int k = 0; k < d.class_count; ++k)
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> x = centers[k];
      for (double& v : x) v += spread * standard_normal(rng);
      d.add(x, k);
    }
  return d;
}

LabeledFeatures labels_only(const std::vector<int>& sizes) {
  LabeledFeatures d;
  d.class_count = static_cast<int>(sizes.size());
  for (int k = 0; k < d.class_count; ++k)
    for (int i = 0; i < sizes[k]; ++i) d.add({static_cast<double>(i)}, k);
  return d;
}

// Naive scorer: standardize, then w.z + b per class.
std::vector<double> naive_scores(const SvmModel& m, const std::vector<double>& x) {
  std::vector<double> s(m.class_count);
  for (int k = 0; k < m.class_count; ++k) {
    double acc = m.bias[k];
    for (int j = 0; j < m.dimension; ++j) acc += m.weights[k][j] * ((x[j] - m.mean[j]) / m.stddev[j]);
    s[k] = acc;
  }
  return s;
}

}  // namespace

TEST(Split, SevenThreeOnTwentySamples) {
  const auto d = labels_only({10, 10});
  const auto [train, test] = split(d, 0.7, 42);
  EXPECT_EQ(std::count(train.labels.begin(), train.labels.end(), 0), 7);
  EXPECT_EQ(std::count(train.labels.begin(), train.labels.end(), 1), 7);
  EXPECT_EQ(std::count(test.labels.begin(), test.labels.end(), 0), 3);
  EXPECT_EQ(std::count(test.labels.begin(), test.labels.end(), 1), 3);
}

TEST(Split, DeterministicPerSeed) {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3);
  const auto a = stratified_split(labels, 3, 0.7, 5);
  const auto b = stratified_split(labels, 3, 0.7, 5);
  const auto c = stratified_split(labels, 3, 0.7, 6);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, PerClassCountsMatchRoundingOracle) {
  const std::vector<int> sizes{135, 54, 177, 75, 207, 84, 249};
  std::vector<int> labels;
  for (int k = 0; k < 7; ++k) labels.insert(labels.end(), sizes[k], k);
  const auto s = stratified_split(labels, 7, 0.5, 42);
  EXPECT_EQ(s.train.size() + s.test.size(), 981u);
  for (int k = 0; k < 7; ++k) {
    // round-half-away-from-zero of size / 2
    const int expect = (sizes[k] + 1) / 2;
    const auto in_train = std::count_if(s.train.begin(), s.train.end(), [&](std::size_t i) { return labels[i] == k; });
    EXPECT_EQ(in_train, expect) << "class " << k;
  }
}

TEST(Split, PartitionsAndClamps) {
  std::vector<int> labels{0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  const auto s = stratified_split(labels, 2, 0.99, 1);
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  const auto test0 = std::count_if(s.test.begin(), s.test.end(), [&](std::size_t i) { return labels[i] == 0; });
  const auto test1 = std::count_if(s.test.begin(), s.test.end(), [&](std::size_t i) { return labels[i] == 1; });
  EXPECT_EQ(test0, 1);
  EXPECT_EQ(test1, 1);
}

TEST(Split, Errors) {
  EXPECT_THROW(split(labels_only({1, 5}), 0.7, 1), DomainError);
  EXPECT_THROW(split(labels_only({4, 5}), 0.0, 1), DomainError);
  EXPECT_THROW(split(labels_only({4, 5}), 1.0, 1), DomainError);
}

TEST(Train, SeparableBlobs) {
  Rng rng(1);
  const auto d = blobs(50, {{0.0, 0.0}, {3.0, 3.0}}, 0.3, rng);
  const auto model = train(d);
  int correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) correct += predict(model, d.samples[i]) == d.labels[i];
  EXPECT_EQ(correct, 100);
}

TEST(Train, DuplicationInvariance) {
  Rng rng(2);
  const auto d = blobs(30, {{0.0, 1.0, 2.0}, {1.0, 0.0, 2.5}, {0.5, 0.5, 0.0}}, 0.6, rng);
  LabeledFeatures twice = d;
  for (std::size_t i = 0; i < d.size(); ++i) twice.add(d.samples[i], d.labels[i]);
  const auto a = train(d);
  const auto b = train(twice);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(a.bias[k], b.bias[k], 1e-6);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a.weights[k][j], b.weights[k][j], 1e-6);
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto sa = a.scores(d.samples[i]);
    const auto sb = b.scores(d.samples[i]);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(sa[k], sb[k], 1e-6);
  }
}

TEST(Train, OneDimensionalSign) {
  LabeledFeatures d;
  d.class_count = 2;
  for (int i = 0; i < 10; ++i) {
    d.add({-1.0 - 0.01 * i}, 0);
    d.add({1.0 + 0.01 * i}, 1);
  }
  const auto model = train(d);
  const double w1 = model.weights[1][0];
  EXPECT_GT(w1, 0.0);
  EXPECT_EQ(model.weights[0][0], -w1);
  EXPECT_EQ(predict(model, std::vector<double>{2.0}), 1);
  EXPECT_EQ(predict(model, std::vector<double>{-2.0}), 0);
}

TEST(Train, BitIdenticalReruns) {
  Rng rng(3);
  const auto d = blobs(40, {{0.0, 0.0}, {1.0, 2.0}, {2.0, 0.0}}, 0.8, rng);
  const auto a = train(d, {1e-3, 100, 9});
  const auto b = train(d, {1e-3, 100, 9});
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Train, FrozenZeroVarianceFeature) {
  Rng rng(4);
  auto d = blobs(20, {{0.0, 5.0}, {3.0, 5.0}}, 0.2, rng);
  for (auto& x : d.samples) x[1] = 5.0;
  const auto model = train(d);
  EXPECT_TRUE(model.frozen[1]);
  EXPECT_EQ(model.stddev[1], 1.0);
  for (const auto& w : model.weights) EXPECT_EQ(w[1], 0.0);
  EXPECT_FALSE(model.frozen[0]);
}

TEST(Train, Errors) {
  EXPECT_THROW(train(labels_only({5})), DomainError);
  EXPECT_THROW(train(labels_only({5, 5}), {0.0, 10, 1}), ConfigError);
  EXPECT_THROW(train(labels_only({5, 5}), {1e-3, 0, 1}), ConfigError);
  LabeledFeatures ragged = labels_only({2, 2});
  ragged.samples[1].push_back(1.0);
  EXPECT_THROW(train(ragged), ShapeError);
}

TEST(Predict, MatchesNaiveScorer) {
  Rng rng(5);
  const auto d = blobs(30, {{0.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 1.0, 1.0}}, 1.0, rng);
  const auto model = train(d, {1e-2, 50, 3});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(4);
    for (double& v : x) v = 2.0 * standard_normal(rng);
    const auto s = naive_scores(model, x);
    const auto got = model.scores(x);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(got[k], s[k], 1e-12);
    EXPECT_EQ(predict(model, x), static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin()));
  }
}

TEST(Predict, BinaryIsSignOfDiscriminant) {
  Rng rng(6);
  const auto d = blobs(30, {{0.0, 0.0}, {1.0, 1.0}}, 0.7, rng);
  const auto model = train(d);
  for (const auto& x : d.samples) {
    const auto s = model.scores(x);
    EXPECT_EQ(s[0], -s[1]);
    EXPECT_EQ(predict(model, x), s[1] > 0.0 ? 1 : 0);
  }
}

TEST(Predict, TiesGoToSmallestClass) {
  SvmModel m;
  m.dimension = 1;
  m.class_count = 3;
  m.mean = {0.0};
  m.stddev = {1.0};
  m.frozen = {false};
  m.weights = {{1.0}, {1.0}, {0.0}};
  m.bias = {0.0, 0.0, 0.0};
  EXPECT_EQ(predict(m, std::vector<double>{1.0}), 0);
  EXPECT_EQ(predict(m, std::vector<double>{-1.0}), 2);
  EXPECT_THROW(predict(m, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST(Predict, PositiveColumnRescalingInvariant) {
  Rng rng(7);
  const auto d = blobs(40, {{0.0, 0.0, 0.0}, {1.0, 2.0, 0.0}, {2.0, 0.0, 1.0}}, 0.9, rng);
  const auto test = blobs(20, {{0.0, 0.0, 0.0}, {1.0, 2.0, 0.0}, {2.0, 0.0, 1.0}}, 0.9, rng);
  const std::vector<double> scale{4.0, 0.5, 8.0};
  auto rescale = [&](LabeledFeatures x) {
    for (auto& s : x.samples)
      for (int j = 0; j < 3; ++j) s[j] *= scale[j];
    return x;
  };
  const auto a = train(d);
  const auto b = train(rescale(d));
  const auto scaled_test = rescale(test);
  for (std::size_t i = 0; i < test.size(); ++i)
    EXPECT_EQ(predict(a, test.samples[i]), predict(b, scaled_test.samples[i])) << i;
}

TEST(Evaluate, PerfectPredictor) {
  Rng rng(8);
  const auto d = blobs(20, {{0.0, 0.0}, {10.0, 10.0}}, 0.1, rng);
  const auto ev = evaluate(train(d), d);
  EXPECT_EQ(ev.accuracy, 1.0);
  EXPECT_EQ(ev.confusion.counts, (std::vector<std::vector<int>>{{20, 0}, {0, 20}}));
  EXPECT_EQ(ev.recall, (std::vector<double>{1.0, 1.0}));
  EXPECT_TRUE(ev.confusion.rejected.empty());
}

TEST(Evaluate, ConstantPredictor) {
  SvmModel m;
  m.dimension = 1;
  m.class_count = 4;
  m.mean = {0.0};
  m.stddev = {1.0};
  m.frozen = {false};
  m.weights = {{0.0}, {0.0}, {0.0}, {0.0}};
  m.bias = {0.0, 0.0, 1.0, 0.0};
  const auto ev = evaluate(m, labels_only({5, 5, 5, 5}));
  EXPECT_DOUBLE_EQ(ev.accuracy, 0.25);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(ev.confusion.row_total(k), 5);
  EXPECT_EQ(ev.confusion.total(), 20);
}

TEST(Evaluate, RowSumsEqualClassCounts) {
  Rng rng(9);
  const auto d = blobs(30, {{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.5}}, 0.8, rng);
  const auto [train_set, test_set] = split(d, 0.7, 3);
  const auto ev = evaluate(train(train_set), test_set);
  std::map<int, int> counts;
  for (int y : test_set.labels) ++counts[y];
  for (int k = 0; k < 3; ++k) EXPECT_EQ(ev.confusion.row_total(k), counts[k]);
  EXPECT_EQ(ev.confusion.total(), static_cast<int>(test_set.size()));
}

TEST(Evaluate, RejectRow) {
  Rng rng(10);
  const auto d = blobs(20, {{0.0, 0.0}, {10.0, 10.0}}, 0.1, rng);
  const auto model = train(d);
  const auto all_rejected = evaluate(model, d, 1e9);
  EXPECT_EQ(all_rejected.accuracy, 0.0);
  EXPECT_EQ(all_rejected.confusion.rejected, (std::vector<int>{20, 20}));
  EXPECT_EQ(all_rejected.confusion.total(), 40);
  const auto none = evaluate(model, d, -1e9);
  EXPECT_EQ(none.confusion.rejected, (std::vector<int>{0, 0}));
  EXPECT_EQ(none.accuracy, 1.0);
}
