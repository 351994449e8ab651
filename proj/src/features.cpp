#include "lbpopt/features.hpp"

#include <exception>
#include <string>

#include "lbpopt/error.hpp"
#include "lbpopt/matrix_form.hpp"

namespace lbpopt {

FeatureVector extract_standard(const LbpCodeMap& codes, int l, int m) {
  const TilingMatrix t = build_T(codes.side, l);
  const HistogramMatrix h = build_H(m);
  const DenseMatrix f = compose_F(t, build_E(codes), h);
  return {{f.values().begin(), f.values().end()}, Method::standard};
}

FeatureVector extract_standard(const GrayImage& image, int l, int m) {
  return extract_standard(encode_image(image, Exec::serial), l, m);
}

FeatureVector extract_learned(const LbpCodeMap& codes, const TransformPair& pair) {
  if (pair.method == Method::standard) {
    throw ConfigError("extract_learned needs an svd or optimal transform pair");
  }
  if (codes.side != pair.side) {
    throw ShapeError("transform pair was fitted for side " + std::to_string(pair.side) +
                     ", image has side " + std::to_string(codes.side));
  }
  const int pixels = codes.side * codes.side;
  if (pair.left.cols() != pixels || pair.right.rows() != kCodeCount ||
      pair.left.rows() < pair.m || pair.right.cols() != pair.m) {
    throw ShapeError("transform pair matrices do not match l x n^2 and 256 x m");
  }
  FeatureVector out{std::vector<double>(pair.m, 0.0), pair.method};
  for (int j = 0; j < pair.m; ++j) {
    const auto t = pair.left.row(j);
    double s = 0.0;
    for (int p = 0; p < pixels; ++p) s += t[p] * pair.right(codes.codes[p], j);
    out.values[j] = s;
  }
  return out;
}

FeatureVector extract_learned(const GrayImage& image, const TransformPair& pair) {
  return extract_learned(encode_image(image, Exec::serial), pair);
}

FeatureVector extract_multiclass(const LbpCodeMap& codes, std::span<const TransformPair> pairs) {
  if (pairs.empty()) throw ConfigError("multiclass extraction needs at least one transform pair");
  for (const auto& pair : pairs) {
    if (pair.side != pairs.front().side || pair.m != pairs.front().m) {
      throw ConfigError("transform pairs disagree on image side or feature count");
    }
  }
  FeatureVector out{{}, pairs.front().method};
  out.values.reserve(pairs.size() * pairs.front().m);
  for (const auto& pair : pairs) {
    const FeatureVector f = extract_learned(codes, pair);
    out.values.insert(out.values.end(), f.values.begin(), f.values.end());
  }
  return out;
}

FeatureVector extract_multiclass(const GrayImage& image, std::span<const TransformPair> pairs) {
  return extract_multiclass(encode_image(image, Exec::serial), pairs);
}

void validate(const TransformSet& set) {
  if (set.pairs.empty()) throw ConfigError("transform set has no pairs");
  const auto& first = set.pairs.front();
  for (const auto& pair : set.pairs) {
    if (pair.method != set.method) throw ConfigError("transform pair method differs from the set");
    if (pair.side != first.side || pair.m != first.m || pair.l != first.l) {
      throw ConfigError("transform pairs disagree on n, l or m");
    }
  }
  if (set.method == Method::standard && set.pairs.size() != 1) {
    throw ConfigError("a standard transform set holds exactly one pair");
  }
}

int TransformSet::side() const { return pairs.empty() ? 0 : pairs.front().side; }

int TransformSet::feature_count() const {
  if (pairs.empty()) return 0;
  if (method == Method::standard) return pairs.front().l * pairs.front().m;
  return static_cast<int>(pairs.size()) * pairs.front().m;
}

FeatureVector TransformSet::extract(const LbpCodeMap& codes) const {
  if (pairs.empty()) throw ConfigError("transform set has no pairs");
  if (method == Method::standard) {
    if (codes.side != pairs.front().side) {
      throw ShapeError("transform set was built for side " + std::to_string(pairs.front().side) +
                       ", image has side " + std::to_string(codes.side));
    }
    return extract_standard(codes, pairs.front().l, pairs.front().m);
  }
  if (pairs.size() == 1) return extract_learned(codes, pairs.front());
  return extract_multiclass(codes, pairs);
}

FeatureVector TransformSet::extract(const GrayImage& image) const {
  return extract(encode_image(image, Exec::serial));
}

namespace reference {

std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images, const TransformSet& set) {
  std::vector<FeatureVector> out;
  out.reserve(images.size());
  for (const auto& image : images) out.push_back(set.extract(image));
  return out;
}

}  // namespace reference

std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images, const TransformSet& set,
                                         Exec exec) {
  if (exec == Exec::serial) return reference::extract_batch(images, set);
  validate(set);
  std::vector<FeatureVector> out(images.size());
  const auto count = static_cast<std::ptrdiff_t>(images.size());
  // Exceptions must not escape the parallel region.
  std::vector<std::exception_ptr> errors(images.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = set.extract(images[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace lbpopt
