#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lbpopt/classifier.hpp"
#include "lbpopt/features.hpp"
#include "lbpopt/matrix_form.hpp"
#include "lbpopt/transform.hpp"

namespace lbpopt {

using Json = nlohmann::json;

inline constexpr std::string_view kTransformsFormat = "lbp-optlab/transforms-v1";
inline constexpr std::string_view kSvmFormat = "lbp-optlab/svm-v1";
inline constexpr std::string_view kEncodeFormat = "lbp-optlab/encode-v1";
inline constexpr std::string_view kEvaluationFormat = "lbp-optlab/evaluation-v1";
inline constexpr std::string_view kReportFormat = "lbp-optlab/report-v1";

// Sparse {0,1} matrices: {"shape": [rows, cols], "rows": [...], "cols": [...]}
// listing the coordinates of the ones in row-major order.
Json sparse_to_json(const ExtensionMatrix& e);
Json sparse_to_json(const TilingMatrix& t);
Json sparse_to_json(const HistogramMatrix& h);

// {"format", "method", "n", "l", "m", "classes", "pairs": [...]}, each pair
// with method, n, l, m, selected_codes, zero_rows and dense row-major T, H.
Json to_json(const TransformSet& set);
TransformSet transform_set_from_json(const Json& j);

Json to_json(const SvmModel& model, const std::vector<std::string>& classes);
SvmModel svm_model_from_json(const Json& j, std::vector<std::string>* classes = nullptr);

Json to_json(const Evaluation& ev, const std::vector<std::string>& classes);
Json to_json(const ResidualCurve& curve);

// Throws DataError when the file is missing or not valid JSON.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

// Features CSV: header "path,label,f0,...,f{d-1}", one row per image.
struct FeatureTable {
  std::vector<std::string> paths;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> features;
};

void write_features_csv(std::ostream& out, const FeatureTable& table);
FeatureTable read_features_csv(std::istream& in, const std::string& origin = "<stream>");

// Label names are mapped to indices in lexicographic order, matching corpus
// class order.
LabeledFeatures to_labeled(const FeatureTable& table, std::vector<std::string>* classes);

}  // namespace lbpopt
