#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbpopt/classifier.hpp"
#include "lbpopt/dataset.hpp"
#include "lbpopt/features.hpp"
#include "lbpopt/serialize.hpp"
#include "lbpopt/transform.hpp"

namespace lbpopt {

struct RunConfig {
  std::string source;  // corpus description echoed into reports
  int n = 64;
  std::optional<int> l;  // default 16 (standard) or m (learned)
  std::optional<int> m;  // default 8 (standard) or 16 (learned)
  Method method = Method::optimal;
  double lambda = 1e-3;
  int epochs = 200;
  std::uint64_t seed = 42;
  double train_fraction = 0.7;
  int repeat = 1;
  bool residual_curve = false;
  int residual_m_max = 256;
  std::optional<double> reject_threshold;
  RestWeighting weighting = RestWeighting::unweighted;
  Exec exec = Exec::parallel;

  int resolved_m() const;
  int resolved_l() const;
};

// Throws ConfigError on an invalid combination.
void validate(const RunConfig& config);

Json to_json(const RunConfig& config);

// Fits the method's transforms on the given corpus images (indices into the
// class-major flattening). Two classes give one pair fitted on
// mean(class 1) - mean(class 0); more give one one-vs-rest pair per class.
TransformSet fit_transforms(const Corpus& corpus, std::span<const std::size_t> indices,
                            const RunConfig& config);

// Class difference matrices used by the residual curves: one for two
// classes, one per class (one-vs-rest) otherwise.
std::vector<ClassDifference> class_differences(const Corpus& corpus, std::span<const std::size_t> indices,
                                               const RunConfig& config);

LabeledFeatures extract_labeled(const Corpus& corpus, std::span<const std::size_t> indices,
                                const TransformSet& set, Exec exec);

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t train_count = 0;
  Evaluation evaluation;
};

struct PipelineResult {
  Json report;
  std::vector<RunResult> runs;
  TransformSet transforms;  // from the first run
  FeatureTable features;    // every corpus image under the first run's transforms
  std::vector<ResidualCurve> residual_curves;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
};

// Fit -> extract -> train -> evaluate, repeated with seeds seed, seed+1, ...
PipelineResult run_pipeline(const Corpus& corpus, const RunConfig& config);

}  // namespace lbpopt
