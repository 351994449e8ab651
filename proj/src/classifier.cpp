#include "lbpopt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lbpopt/error.hpp"
#include "lbpopt/linalg.hpp"
#include "lbpopt/rng.hpp"

namespace lbpopt {

void LabeledFeatures::add(std::vector<double> x, int label) {
  samples.push_back(std::move(x));
  labels.push_back(label);
  class_count = std::max(class_count, label + 1);
}

LabeledFeatures LabeledFeatures::subset(std::span<const std::size_t> indices) const {
  LabeledFeatures out;
  out.class_count = class_count;
  out.samples.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.samples.push_back(samples.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

void validate(const LabeledFeatures& data) {
  if (data.samples.size() != data.labels.size()) throw ShapeError("sample and label counts differ");
  if (data.samples.empty()) throw DomainError("labeled feature set is empty");
  const std::size_t dim = data.samples.front().size();
  std::vector<int> per_class(std::max(data.class_count, 0), 0);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (data.samples[i].size() != dim) {
      throw ShapeError("sample " + std::to_string(i) + " has " + std::to_string(data.samples[i].size()) +
                       " features, expected " + std::to_string(dim));
    }
    const int y = data.labels[i];
    if (y < 0 || y >= data.class_count) throw DomainError("label " + std::to_string(y) + " out of range");
    ++per_class[y];
  }
  for (int k = 0; k < data.class_count; ++k) {
    if (per_class[k] == 0) throw DomainError("class " + std::to_string(k) + " has no samples");
  }
}

SplitIndices stratified_split(std::span<const int> labels, int class_count, double train_fraction,
                              std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::vector<std::size_t>> members(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) throw DomainError("label out of range in split");
    members[labels[i]].push_back(i);
  }
  Rng rng(seed);
  SplitIndices out;
  for (int k = 0; k < class_count; ++k) {
    auto& idx = members[k];
    const auto size = static_cast<long>(idx.size());
    if (size < 2) {
      throw DomainError("class " + std::to_string(k) + " has " + std::to_string(size) +
                        " samples; a split needs at least 2");
    }
    shuffle(std::span<std::size_t>(idx), rng);
    const long n_train = std::clamp(std::lround(train_fraction * static_cast<double>(size)), 1L, size - 1);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train);
    out.test.insert(out.test.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<LabeledFeatures, LabeledFeatures> split(const LabeledFeatures& data, double train_fraction,
                                                   std::uint64_t seed) {
  validate(data);
  const SplitIndices idx = stratified_split(data.labels, data.class_count, train_fraction, seed);
  return {data.subset(idx.train), data.subset(idx.test)};
}

std::vector<double> SvmModel::standardize(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension) {
    throw ShapeError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                     std::to_string(dimension));
  }
  std::vector<double> z(dimension);
  for (int j = 0; j < dimension; ++j) z[j] = frozen[j] ? 0.0 : (x[j] - mean[j]) / stddev[j];
  return z;
}

std::vector<double> SvmModel::scores(std::span<const double> x) const {
  const std::vector<double> z = standardize(x);
  std::vector<double> s(class_count);
  for (int k = 0; k < class_count; ++k) s[k] = dot(weights[k], z) + bias[k];
  return s;
}

namespace {

struct Discriminant {
  std::vector<double> w;
  double b = 0.0;
};

// Pegasos subgradient steps on the full training set (step 1/(lambda t),
// projection onto the ball of radius 1/sqrt(lambda)). The bias is the weight
// of a constant feature. Returns the average of the iterates over the second
// half of the run.
Discriminant pegasos(const std::vector<std::vector<double>>& z, const std::vector<double>& y,
                     const SvmParams& params) {
  const std::size_t n = z.size();
  const std::size_t dim = z.front().size();
  const double lambda = params.lambda;
  const double radius = 1.0 / std::sqrt(lambda);

  std::vector<double> w(dim + 1, 0.0);
  std::vector<double> g(dim + 1);
  std::vector<double> avg(dim + 1, 0.0);
  int averaged = 0;
  const int average_from = params.epochs / 2 + 1;

  for (int t = 1; t <= params.epochs; ++t) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double margin = y[i] * (dot(std::span<const double>(w.data(), dim), z[i]) + w[dim]);
      if (margin < 1.0) {
        for (std::size_t j = 0; j < dim; ++j) g[j] += y[i] * z[i][j];
        g[dim] += y[i];
      }
    }
    const double eta = 1.0 / (lambda * t);
    const double shrink = 1.0 - eta * lambda;
    for (std::size_t j = 0; j <= dim; ++j) w[j] = shrink * w[j] + eta * g[j] / static_cast<double>(n);
    const double norm = norm2(w);
    if (norm > radius) {
      for (double& x : w) x *= radius / norm;
    }
    if (t >= average_from) {
      for (std::size_t j = 0; j <= dim; ++j) avg[j] += w[j];
      ++averaged;
    }
  }
  Discriminant out;
  out.w.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) out.w[j] = avg[j] / averaged;
  out.b = avg[dim] / averaged;
  return out;
}

}  // namespace

SvmModel train(const LabeledFeatures& data, const SvmParams& params) {
  validate(data);
  if (data.class_count < 2) throw DomainError("SVM training needs at least two classes");
  if (!(params.lambda > 0.0)) throw ConfigError("SVM lambda must be positive");
  if (params.epochs < 1) throw ConfigError("SVM epochs must be at least 1");

  const int dim = data.dimension();
  const auto n = static_cast<double>(data.size());
  SvmModel model;
  model.dimension = dim;
  model.class_count = data.class_count;
  model.params = params;
  model.mean.assign(dim, 0.0);
  model.stddev.assign(dim, 1.0);
  model.frozen.assign(dim, false);

  for (const auto& x : data.samples)
    for (int j = 0; j < dim; ++j) model.mean[j] += x[j];
  for (double& m : model.mean) m /= n;
  std::vector<double> var(dim, 0.0);
  for (const auto& x : data.samples)
    for (int j = 0; j < dim; ++j) var[j] += (x[j] - model.mean[j]) * (x[j] - model.mean[j]);
  for (int j = 0; j < dim; ++j) {
    const double sd = std::sqrt(var[j] / n);
    if (sd <= 1e-12 * std::max(1.0, std::abs(model.mean[j]))) {
      model.frozen[j] = true;
    } else {
      model.stddev[j] = sd;
    }
  }

  std::vector<std::vector<double>> z;
  z.reserve(data.size());
  for (const auto& x : data.samples) z.push_back(model.standardize(x));

  std::vector<double> y(data.size());
  if (data.class_count == 2) {
    for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.labels[i] == 1 ? 1.0 : -1.0;
    const Discriminant d = pegasos(z, y, params);
    std::vector<double> negated(d.w.size());
    std::transform(d.w.begin(), d.w.end(), negated.begin(), [](double v) { return -v; });
    model.weights = {negated, d.w};
    model.bias = {-d.b, d.b};
  } else {
    for (int k = 0; k < data.class_count; ++k) {
      for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.labels[i] == k ? 1.0 : -1.0;
      Discriminant d = pegasos(z, y, params);
      model.weights.push_back(std::move(d.w));
      model.bias.push_back(d.b);
    }
  }
  for (auto& w : model.weights)
    for (int j = 0; j < dim; ++j)
      if (model.frozen[j]) w[j] = 0.0;
  return model;
}

int predict(const SvmModel& model, std::span<const double> x) {
  const std::vector<double> s = model.scores(x);
  int best = 0;
  for (int k = 1; k < model.class_count; ++k)
    if (s[k] > s[best]) best = k;
  return best;
}

int ConfusionMatrix::total() const noexcept {
  int t = 0;
  for (int k = 0; k < class_count; ++k) t += row_total(k);
  return t;
}

int ConfusionMatrix::row_total(int true_class) const noexcept {
  int t = rejected.empty() ? 0 : rejected[true_class];
  for (int c : counts[true_class]) t += c;
  return t;
}

Evaluation evaluate(const SvmModel& model, const LabeledFeatures& test,
                    std::optional<double> reject_threshold) {
  if (test.samples.empty()) throw DomainError("evaluation needs a nonempty test set");
  const int k = model.class_count;
  Evaluation ev;
  ev.confusion.class_count = k;
  ev.confusion.counts.assign(k, std::vector<int>(k, 0));
  ev.confusion.rejected.assign(k, 0);
  int correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int truth = test.labels[i];
    if (truth < 0 || truth >= k) throw DomainError("test label outside the model's classes");
    const std::vector<double> s = model.scores(test.samples[i]);
    int best = 0;
    for (int c = 1; c < k; ++c)
      if (s[c] > s[best]) best = c;
    if (reject_threshold && s[best] < *reject_threshold) {
      ++ev.confusion.rejected[truth];
      continue;
    }
    ++ev.confusion.counts[truth][best];
    if (best == truth) ++correct;
  }
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  ev.recall.resize(k);
  for (int c = 0; c < k; ++c) {
    const int row = ev.confusion.row_total(c);
    ev.recall[c] = row == 0 ? 0.0 : static_cast<double>(ev.confusion.counts[c][c]) / row;
  }
  if (!reject_threshold) ev.confusion.rejected.clear();
  return ev;
}

}  // namespace lbpopt
