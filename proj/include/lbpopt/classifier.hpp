#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lbpopt {

struct LabeledFeatures {
  std::vector<std::vector<double>> samples;
  std::vector<int> labels;  // 0..class_count-1
  int class_count = 0;

  std::size_t size() const noexcept { return samples.size(); }
  int dimension() const noexcept { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
  void add(std::vector<double> x, int label);
  LabeledFeatures subset(std::span<const std::size_t> indices) const;
};

// Throws ShapeError on ragged samples and DomainError on labels outside
// [0, class_count) or an empty class.
void validate(const LabeledFeatures& data);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified by label: each class is shuffled with the seeded generator and
// its first round(fraction * size) members (clamped to [1, size-1]) train.
// Index lists come back sorted.
SplitIndices stratified_split(std::span<const int> labels, int class_count, double train_fraction,
                              std::uint64_t seed);

std::pair<LabeledFeatures, LabeledFeatures> split(const LabeledFeatures& data, double train_fraction,
                                                   std::uint64_t seed);

struct SvmParams {
  double lambda = 1e-3;
  int epochs = 200;
  std::uint64_t seed = 42;
};

// One-vs-rest linear SVM on z-scored features. For two classes a single
// discriminant w is trained and class 0 scores -w.
struct SvmModel {
  int dimension = 0;
  int class_count = 0;
  std::vector<double> mean;
  std::vector<double> stddev;      // 1 for frozen features
  std::vector<bool> frozen;        // zero variance on the training set; weight fixed at 0
  std::vector<std::vector<double>> weights;  // per class, length dimension
  std::vector<double> bias;
  SvmParams params;

  std::vector<double> standardize(std::span<const double> x) const;
  std::vector<double> scores(std::span<const double> x) const;
};

SvmModel train(const LabeledFeatures& data, const SvmParams& params = {});

// argmax of the class scores; ties go to the smallest class index.
int predict(const SvmModel& model, std::span<const double> x);

struct ConfusionMatrix {
  int class_count = 0;
  std::vector<std::vector<int>> counts;  // [true][predicted]
  std::vector<int> rejected;             // per true class, when a reject threshold is set

  int total() const noexcept;
  int row_total(int true_class) const noexcept;
};

struct Evaluation {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<double> recall;  // per class; rejected samples count as misses
};

// A sample whose best score is below reject_threshold is reported in the
// rejected row instead of a predicted column.
Evaluation evaluate(const SvmModel& model, const LabeledFeatures& test,
                    std::optional<double> reject_threshold = std::nullopt);

}  // namespace lbpopt
