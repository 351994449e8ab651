#include "lbpopt/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>

#include "lbpopt/error.hpp"

namespace lbpopt {

namespace {

Json dense_rows(const DenseMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

DenseMatrix dense_from_rows(const Json& rows, int expect_rows, int expect_cols, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != expect_rows) {
    throw DataError(std::string(what) + " must have " + std::to_string(expect_rows) + " rows");
  }
  DenseMatrix m(expect_rows, expect_cols);
  for (int r = 0; r < expect_rows; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != expect_cols) {
      throw DataError(std::string(what) + " row " + std::to_string(r) + " must have " +
                      std::to_string(expect_cols) + " entries");
    }
    for (int c = 0; c < expect_cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

void expect_format(const Json& j, std::string_view format) {
  if (!j.is_object() || !j.contains("format") || j["format"] != format) {
    throw DataError("expected a document with format tag '" + std::string(format) + "'");
  }
}

Json coo(int rows, int cols, const std::vector<int>& r, const std::vector<int>& c) {
  return Json{{"shape", {rows, cols}}, {"rows", r}, {"cols", c}};
}

}  // namespace

Json sparse_to_json(const ExtensionMatrix& e) {
  std::vector<int> r(e.rows()), c(e.rows());
  for (int j = 0; j < e.rows(); ++j) {
    r[j] = j;
    c[j] = e.column_of_row[j];
  }
  return coo(e.rows(), e.cols(), r, c);
}

Json sparse_to_json(const TilingMatrix& t) {
  std::vector<int> r, c;
  for (int region = 0; region < t.rows(); ++region)
    for (int j = 0; j < t.cols(); ++j)
      if (t.region_of_pixel[j] == region) {
        r.push_back(region);
        c.push_back(j);
      }
  return coo(t.rows(), t.cols(), r, c);
}

Json sparse_to_json(const HistogramMatrix& h) {
  std::vector<int> r(kCodeCount), c(kCodeCount);
  for (int code = 0; code < kCodeCount; ++code) {
    r[code] = code;
    c[code] = h.bin_of(code);
  }
  return coo(h.rows(), h.cols(), r, c);
}

Json to_json(const TransformSet& set) {
  validate(set);
  const auto& first = set.pairs.front();
  Json pairs = Json::array();
  for (const auto& p : set.pairs) {
    pairs.push_back({{"method", to_string(p.method)},
                     {"n", p.side},
                     {"l", p.l},
                     {"m", p.m},
                     {"selected_codes", p.selected_codes},
                     {"zero_rows", std::vector<bool>(p.zero_rows)},
                     {"T", dense_rows(p.left)},
                     {"H", dense_rows(p.right)}});
  }
  return {{"format", kTransformsFormat},
          {"method", to_string(set.method)},
          {"n", first.side},
          {"l", first.l},
          {"m", first.m},
          {"classes", set.classes},
          {"pairs", std::move(pairs)}};
}

TransformSet transform_set_from_json(const Json& j) {
  expect_format(j, kTransformsFormat);
  try {
    TransformSet set;
    set.method = parse_method(j.at("method").get<std::string>());
    set.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& p : j.at("pairs")) {
      TransformPair pair;
      pair.method = parse_method(p.at("method").get<std::string>());
      pair.side = p.at("n").get<int>();
      pair.l = p.at("l").get<int>();
      pair.m = p.at("m").get<int>();
      if (pair.side < 1 || pair.l < 1 || pair.m < 1 || pair.m > kCodeCount) {
        throw DataError("transform pair has invalid n, l or m");
      }
      pair.selected_codes = p.at("selected_codes").get<std::vector<int>>();
      pair.zero_rows = p.at("zero_rows").get<std::vector<bool>>();
      pair.left = dense_from_rows(p.at("T"), pair.l, pair.side * pair.side, "T");
      pair.right = dense_from_rows(p.at("H"), kCodeCount, pair.m, "H");
      set.pairs.push_back(std::move(pair));
    }
    validate(set);
    return set;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed transform file: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("inconsistent transform file: ") + e.what());
  }
}

Json to_json(const SvmModel& model, const std::vector<std::string>& classes) {
  return {{"format", kSvmFormat},
          {"classes", classes},
          {"dimension", model.dimension},
          {"class_count", model.class_count},
          {"mean", model.mean},
          {"stddev", model.stddev},
          {"frozen", std::vector<bool>(model.frozen)},
          {"weights", model.weights},
          {"bias", model.bias},
          {"lambda", model.params.lambda},
          {"epochs", model.params.epochs},
          {"seed", model.params.seed}};
}

SvmModel svm_model_from_json(const Json& j, std::vector<std::string>* classes) {
  expect_format(j, kSvmFormat);
  try {
    SvmModel m;
    m.dimension = j.at("dimension").get<int>();
    m.class_count = j.at("class_count").get<int>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.stddev = j.at("stddev").get<std::vector<double>>();
    m.frozen = j.at("frozen").get<std::vector<bool>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    m.params.lambda = j.at("lambda").get<double>();
    m.params.epochs = j.at("epochs").get<int>();
    m.params.seed = j.at("seed").get<std::uint64_t>();
    const auto dim = static_cast<std::size_t>(m.dimension);
    bool ok = m.mean.size() == dim && m.stddev.size() == dim && m.frozen.size() == dim &&
              static_cast<int>(m.weights.size()) == m.class_count &&
              static_cast<int>(m.bias.size()) == m.class_count;
    for (const auto& w : m.weights) ok = ok && w.size() == dim;
    if (!ok) throw DataError("SVM model arrays do not match its dimension and class count");
    if (classes) *classes = j.at("classes").get<std::vector<std::string>>();
    return m;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed SVM model: ") + e.what());
  }
}

Json to_json(const Evaluation& ev, const std::vector<std::string>& classes) {
  Json j{{"format", kEvaluationFormat},
         {"classes", classes},
         {"accuracy", ev.accuracy},
         {"test_count", ev.confusion.total()},
         {"confusion_matrix", ev.confusion.counts},
         {"per_class_recall", ev.recall}};
  if (!ev.confusion.rejected.empty()) j["rejected"] = ev.confusion.rejected;
  return j;
}

Json to_json(const ResidualCurve& curve) {
  Json m = Json::array(), r = Json::array();
  for (const auto& p : curve.points) {
    m.push_back(p.m);
    r.push_back(p.residual);
  }
  return {{"method", to_string(curve.method)}, {"m", std::move(m)}, {"residual", std::move(r)}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot create file");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError(path + ": write error");
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_features_csv(std::ostream& out, const FeatureTable& table) {
  const std::size_t dim = table.features.empty() ? 0 : table.features.front().size();
  out << "path,label";
  for (std::size_t j = 0; j < dim; ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < table.features.size(); ++i) {
    if (table.features[i].size() != dim) throw ShapeError("ragged feature table");
    out << csv_field(table.paths[i]) << ',' << csv_field(table.labels[i]);
    for (double x : table.features[i]) out << ',' << format_double(x);
    out << '\n';
  }
}

FeatureTable read_features_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty features CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "path" || header[1] != "label") {
    throw DataError(origin + ": features CSV header must start with path,label");
  }
  const std::size_t dim = header.size() - 2;
  FeatureTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != dim + 2) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim + 2) +
                      " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> x(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const std::string& f = fields[j + 2];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), x[j]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw DataError(origin + ":" + std::to_string(line_no) + ": invalid number '" + f + "'");
      }
    }
    table.paths.push_back(fields[0]);
    table.labels.push_back(fields[1]);
    table.features.push_back(std::move(x));
  }
  if (table.features.empty()) throw DataError(origin + ": features CSV has no rows");
  return table;
}

LabeledFeatures to_labeled(const FeatureTable& table, std::vector<std::string>* classes) {
  const std::set<std::string> names(table.labels.begin(), table.labels.end());
  std::map<std::string, int> index;
  std::vector<std::string> ordered;
  for (const auto& n : names) {
    index[n] = static_cast<int>(ordered.size());
    ordered.push_back(n);
  }
  LabeledFeatures data;
  data.class_count = static_cast<int>(ordered.size());
  for (std::size_t i = 0; i < table.features.size(); ++i) {
    data.samples.push_back(table.features[i]);
    data.labels.push_back(index.at(table.labels[i]));
  }
  if (classes) *classes = std::move(ordered);
  return data;
}

}  // namespace lbpopt
