#include "lbpopt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbpopt/error.hpp"
#include "lbpopt/matrix_form.hpp"

namespace lbpopt {

int RunConfig::resolved_m() const {
  if (m) return *m;
  return method == Method::standard ? 8 : 16;
}

int RunConfig::resolved_l() const {
  if (method != Method::standard) return resolved_m();
  return l ? *l : 16;
}

void validate(const RunConfig& config) {
  if (config.n < 3) throw ConfigError("image side n must be at least 3");
  if (config.n > kMaxDenseSide && config.method != Method::standard) {
    throw ConfigError("learned transforms support n <= " + std::to_string(kMaxDenseSide));
  }
  const int m = config.resolved_m();
  if (config.method == Method::standard) {
    build_T(config.n, config.resolved_l());
    build_H(m);
  } else {
    if (m < 1 || m > kCodeCount) throw ConfigError("m must lie in [1, 256]");
    if (config.l && *config.l != m) throw ConfigError("learned transforms require l = m");
  }
  if (!(config.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (config.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  if (config.repeat < 1) throw ConfigError("repeat must be at least 1");
  if (config.residual_m_max < 1 || config.residual_m_max > kCodeCount) {
    throw ConfigError("residual curve length must lie in [1, 256]");
  }
}

Json to_json(const RunConfig& c) {
  Json j{{"source", c.source},
         {"n", c.n},
         {"l", c.resolved_l()},
         {"m", c.resolved_m()},
         {"method", to_string(c.method)},
         {"lambda", c.lambda},
         {"epochs", c.epochs},
         {"seed", c.seed},
         {"train_fraction", c.train_fraction},
         {"repeat", c.repeat},
         {"residual_curve", c.residual_curve},
         {"residual_m_max", c.residual_m_max},
         {"rest_weighting", c.weighting == RestWeighting::pooled ? "pooled" : "unweighted"}};
  j["reject_threshold"] = c.reject_threshold ? Json(*c.reject_threshold) : Json(nullptr);
  return j;
}

namespace {

std::vector<MeanLbpMatrix> class_means(const Corpus& corpus, std::span<const std::size_t> indices, Exec exec) {
  const std::vector<int> labels = corpus.flat_labels();
  const std::vector<GrayImage> images = corpus.flat_images();
  std::vector<std::vector<GrayImage>> grouped(corpus.classes.size());
  for (std::size_t i : indices) grouped[labels.at(i)].push_back(images[i]);
  std::vector<MeanLbpMatrix> means;
  for (std::size_t k = 0; k < grouped.size(); ++k) {
    if (grouped[k].empty()) throw DataError("class '" + corpus.classes[k] + "' has no training images");
    means.push_back(mean_E(std::span<const GrayImage>(grouped[k]), exec));
  }
  return means;
}

}  // namespace

TransformSet fit_transforms(const Corpus& corpus, std::span<const std::size_t> indices, const RunConfig& config) {
  validate(config);
  if (corpus.side != config.n) {
    throw ConfigError("corpus side " + std::to_string(corpus.side) + " differs from n " + std::to_string(config.n));
  }
  TransformSet set;
  set.method = config.method;
  set.classes = corpus.classes;
  const int m = config.resolved_m();
  if (config.method == Method::standard) {
    set.pairs.push_back(standard_transforms(config.n, config.resolved_l(), m));
    return set;
  }
  if (corpus.classes.size() < 2) throw DomainError("learned transforms need at least two classes");
  const auto means = class_means(corpus, indices, config.exec);
  if (means.size() == 2) {
    const ClassDifference d = class_difference(means[0], means[1]);
    set.pairs.push_back(config.method == Method::svd ? fit_svd_transforms(d, m, m) : fit_optimal_transforms(d, m));
  } else {
    set.pairs = fit_multiclass(means, m, config.method, config.weighting);
  }
  return set;
}

std::vector<ClassDifference> class_differences(const Corpus& corpus, std::span<const std::size_t> indices,
                                               const RunConfig& config) {
  if (corpus.classes.size() < 2) throw DomainError("class differences need at least two classes");
  const auto means = class_means(corpus, indices, config.exec);
  std::vector<ClassDifference> out;
  if (means.size() == 2) {
    out.push_back(class_difference(means[0], means[1]));
  } else {
    for (int k = 0; k < static_cast<int>(means.size()); ++k)
      out.push_back(one_vs_rest_difference(means, k, config.weighting));
  }
  return out;
}

LabeledFeatures extract_labeled(const Corpus& corpus, std::span<const std::size_t> indices,
                                const TransformSet& set, Exec exec) {
  const std::vector<GrayImage> all = corpus.flat_images();
  const std::vector<int> labels = corpus.flat_labels();
  std::vector<GrayImage> chosen;
  chosen.reserve(indices.size());
  for (std::size_t i : indices) chosen.push_back(all.at(i));
  const auto features = extract_batch(chosen, set, exec);
  LabeledFeatures out;
  out.class_count = static_cast<int>(corpus.classes.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.samples.push_back(features[i].values);
    out.labels.push_back(labels[indices[i]]);
  }
  return out;
}

PipelineResult run_pipeline(const Corpus& corpus, const RunConfig& config) {
  validate(config);
  if (corpus.classes.size() < 2) throw DomainError("the pipeline needs at least two classes");
  const std::vector<int> labels = corpus.flat_labels();
  const int classes = static_cast<int>(corpus.classes.size());

  PipelineResult result;
  Json runs = Json::array();
  for (int r = 0; r < config.repeat; ++r) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    const SplitIndices split = stratified_split(labels, classes, config.train_fraction, seed);
    const TransformSet set = fit_transforms(corpus, split.train, config);
    const LabeledFeatures train_set = extract_labeled(corpus, split.train, set, config.exec);
    const LabeledFeatures test_set = extract_labeled(corpus, split.test, set, config.exec);
    const SvmModel model = train(train_set, {config.lambda, config.epochs, seed});
    const Evaluation ev = evaluate(model, test_set, config.reject_threshold);

    Json run = to_json(ev, corpus.classes);
    run.erase("format");
    run.erase("classes");
    run["seed"] = seed;
    run["train_count"] = split.train.size();
    runs.push_back(std::move(run));
    result.runs.push_back({seed, split.train.size(), ev});

    if (r == 0) {
      result.transforms = set;
      std::vector<std::size_t> everything(labels.size());
      std::iota(everything.begin(), everything.end(), std::size_t{0});
      const LabeledFeatures all = extract_labeled(corpus, everything, set, config.exec);
      result.features.paths = corpus.flat_paths();
      for (int y : all.labels) result.features.labels.push_back(corpus.classes[y]);
      result.features.features = all.samples;
      if (config.residual_curve) {
        for (const auto& d : class_differences(corpus, split.train, config)) {
          result.residual_curves.push_back(method_residual_curve(d, config.method, config.residual_m_max));
        }
      }
    }
  }

  std::vector<double> acc;
  for (const auto& run : result.runs) acc.push_back(run.evaluation.accuracy);
  const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
  double var = 0.0;
  for (double a : acc) var += (a - mean) * (a - mean);
  const double stddev = acc.size() > 1 ? std::sqrt(var / static_cast<double>(acc.size() - 1)) : 0.0;
  result.mean_accuracy = mean;
  result.stddev_accuracy = stddev;

  Json pairs = Json::array();
  for (std::size_t k = 0; k < result.transforms.pairs.size(); ++k) {
    const auto& p = result.transforms.pairs[k];
    Json entry{{"selected_codes", p.selected_codes}};
    if (p.method == Method::optimal) entry["uniform_fraction"] = uniform_fraction(p.selected_codes);
    if (result.transforms.pairs.size() > 1) entry["class"] = corpus.classes[k];
    pairs.push_back(std::move(entry));
  }

  Json& report = result.report;
  report["format"] = kReportFormat;
  report["config"] = to_json(config);
  report["classes"] = corpus.classes;
  report["image_count"] = corpus.size();
  report["feature_count"] = result.transforms.feature_count();
  report["transforms"] = std::move(pairs);
  report["runs"] = std::move(runs);
  report["accuracy"] = result.runs.front().evaluation.accuracy;
  report["confusion_matrix"] = result.runs.front().evaluation.confusion.counts;
  report["accuracy_mean"] = mean;
  report["accuracy_stddev"] = stddev;
  if (!result.residual_curves.empty()) {
    Json curves = Json::array();
    for (std::size_t k = 0; k < result.residual_curves.size(); ++k) {
      Json c = to_json(result.residual_curves[k]);
      if (result.residual_curves.size() > 1) c["class"] = corpus.classes[k];
      curves.push_back(std::move(c));
    }
    report["residual_curves"] = std::move(curves);
  }
  return result;
}

}  // namespace lbpopt
