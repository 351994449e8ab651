#pragma once

#include <span>
#include <string>
#include <vector>

#include "lbpopt/lbp.hpp"
#include "lbpopt/transform.hpp"

namespace lbpopt {

struct FeatureVector {
  std::vector<double> values;
  Method method = Method::standard;
};

// Flattened T_std E H_std, row-major: l*m region histogram counts.
FeatureVector extract_standard(const GrayImage& image, int l, int m);
FeatureVector extract_standard(const LbpCodeMap& codes, int l, int m);

// diag(T E H): f_j = sum over pixels p of T(j, p) * H(code(p), j).
FeatureVector extract_learned(const GrayImage& image, const TransformPair& pair);
FeatureVector extract_learned(const LbpCodeMap& codes, const TransformPair& pair);

// extract_learned for every pair, concatenated in class order.
FeatureVector extract_multiclass(const GrayImage& image, std::span<const TransformPair> pairs);
FeatureVector extract_multiclass(const LbpCodeMap& codes, std::span<const TransformPair> pairs);

// A fitted feature extractor: a single standard pair, a single learned pair,
// or one learned pair per class (one-vs-rest).
struct TransformSet {
  Method method = Method::standard;
  std::vector<std::string> classes;
  std::vector<TransformPair> pairs;

  int side() const;
  int feature_count() const;
  FeatureVector extract(const LbpCodeMap& codes) const;
  FeatureVector extract(const GrayImage& image) const;
};

// Throws ConfigError when pairs disagree on side, m, or method.
void validate(const TransformSet& set);

std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images, const TransformSet& set,
                                         Exec exec = Exec::parallel);

namespace reference {
std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images, const TransformSet& set);
}

}  // namespace lbpopt
