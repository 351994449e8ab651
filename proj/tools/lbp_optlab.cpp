// lbp-optlab: LBP transform fitting, feature extraction and SVM evaluation.
//
// Exit status: 0 success, 2 configuration error, 3 data error, 4 numerical
// error. Failures print one JSON line {"error": kind, "exit": code,
// "message": text} on stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lbpopt/classifier.hpp"
#include "lbpopt/dataset.hpp"
#include "lbpopt/error.hpp"
#include "lbpopt/exec.hpp"
#include "lbpopt/features.hpp"
#include "lbpopt/lbp.hpp"
#include "lbpopt/matrix_form.hpp"
#include "lbpopt/pipeline.hpp"
#include "lbpopt/serialize.hpp"
#include "lbpopt/transform.hpp"

namespace fs = std::filesystem;
using namespace lbpopt;

namespace {

struct Global {
  int threads = 0;
  bool serial = false;
  Exec exec() const { return serial ? Exec::serial : Exec::parallel; }
};

struct SourceOptions {
  std::string corpus;
  std::string synthetic;
  int count = 100;
  std::uint64_t synth_seed = 42;
};

void add_source(CLI::App* cmd, SourceOptions& src) {
  auto* corpus = cmd->add_option("--corpus", src.corpus, "Corpus root laid out as <root>/<class>/*.pgm");
  auto* synth =
      cmd->add_option("--synthetic", src.synthetic,
                      "Comma-separated recipes generated in memory "
                      "(horizontal-edges, vertical-edges, flat-noise, checker)");
  corpus->excludes(synth);
  cmd->add_option("--count", src.count, "Images per class for --synthetic")->capture_default_str();
  cmd->add_option("--synth-seed", src.synth_seed, "Generator seed for --synthetic")->capture_default_str();
}

std::pair<Corpus, std::string> load_source(const SourceOptions& src, int n) {
  if (!src.corpus.empty()) return {load_corpus(src.corpus, n), "corpus:" + src.corpus};
  if (!src.synthetic.empty()) {
    if (src.count < 2) throw ConfigError("--count must be at least 2");
    const auto recipes = parse_recipes(src.synthetic);
    std::string desc = "synthetic:" + src.synthetic + ";count=" + std::to_string(src.count) +
                       ";seed=" + std::to_string(src.synth_seed);
    return {generate_synthetic(recipes, src.count, n, src.synth_seed), desc};
  }
  throw ConfigError("one of --corpus or --synthetic is required");
}

struct ModelOptions {
  int n = 64;
  int l = 0;
  int m = 0;
  std::string method = "optimal";
  std::string weighting = "unweighted";
  std::uint64_t seed = 42;
  double train_fraction = 0.7;
  CLI::Option* l_opt = nullptr;
  CLI::Option* m_opt = nullptr;
};

void add_model(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--n", o.n, "Image side after resampling")->capture_default_str();
  o.l_opt = cmd->add_option("--l", o.l, "Regions (standard) or left rows; default 16 standard, m learned");
  o.m_opt = cmd->add_option("--m", o.m, "Bins (standard) or selected codes; default 8 standard, 16 learned");
  cmd->add_option("--method", o.method, "standard, svd or optimal")->capture_default_str();
  cmd->add_option("--rest-weighting", o.weighting, "One-vs-rest mean: unweighted or pooled")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Split and training seed")->capture_default_str();
  cmd->add_option("--train-fraction", o.train_fraction, "Per-class training fraction")->capture_default_str();
}

RunConfig make_config(const ModelOptions& o, const Global& g) {
  RunConfig c;
  c.n = o.n;
  if (o.l_opt->count()) c.l = o.l;
  if (o.m_opt->count()) c.m = o.m;
  c.method = parse_method(o.method);
  if (o.weighting == "unweighted") {
    c.weighting = RestWeighting::unweighted;
  } else if (o.weighting == "pooled") {
    c.weighting = RestWeighting::pooled;
  } else {
    throw ConfigError("unknown rest weighting '" + o.weighting + "'");
  }
  c.seed = o.seed;
  c.train_fraction = o.train_fraction;
  c.exec = g.exec();
  return c;
}

enum class Subset { all, train, test };

Subset parse_subset(const std::string& s) {
  if (s == "all") return Subset::all;
  if (s == "train") return Subset::train;
  if (s == "test") return Subset::test;
  throw ConfigError("unknown subset '" + s + "' (expected all, train or test)");
}

std::vector<std::size_t> subset_indices(const Corpus& corpus, Subset subset, double fraction, std::uint64_t seed) {
  const auto labels = corpus.flat_labels();
  if (subset == Subset::all) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  const auto split = stratified_split(labels, static_cast<int>(corpus.classes.size()), fraction, seed);
  return subset == Subset::train ? split.train : split.test;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void print_selection(const TransformSet& set) {
  for (std::size_t k = 0; k < set.pairs.size(); ++k) {
    const auto& p = set.pairs[k];
    if (p.method != Method::optimal) continue;
    const std::string prefix = set.pairs.size() > 1 ? set.classes.at(k) + " " : std::string();
    std::cout << prefix << "selected_codes:";
    for (int c : p.selected_codes) std::cout << ' ' << c;
    std::cout << '\n' << prefix << "first_selected_code: " << p.selected_codes.front() << '\n';
    std::cout << prefix << "uniform_fraction: " << Json(uniform_fraction(p.selected_codes)).dump() << '\n';
  }
}

FeatureTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return read_features_csv(in, path);
}

LabeledFeatures labeled_with_classes(const FeatureTable& table, const std::vector<std::string>& classes) {
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < classes.size(); ++k) index[classes[k]] = static_cast<int>(k);
  LabeledFeatures data;
  data.class_count = static_cast<int>(classes.size());
  for (std::size_t i = 0; i < table.features.size(); ++i) {
    const auto it = index.find(table.labels[i]);
    if (it == index.end()) throw DataError("label '" + table.labels[i] + "' is not a model class");
    data.samples.push_back(table.features[i]);
    data.labels.push_back(it->second);
  }
  return data;
}

int fail(ErrorKind kind, int code, const std::string& message) {
  std::cerr << Json{{"error", std::string(to_string(kind))}, {"exit", code}, {"message", message}}.dump()
            << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LBP transform optimization lab"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  Global g;
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)");
  app.add_flag("--serial", g.serial, "Run the serial reference kernels");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic PGM corpus");
  std::string synth_recipes = "horizontal-edges,flat-noise", synth_out;
  int synth_count = 100, synth_n = 64;
  std::uint64_t synth_seed = 42;
  synth->add_option("--recipes", synth_recipes, "Comma-separated recipes")->capture_default_str();
  synth->add_option("--count", synth_count, "Images per class")->capture_default_str();
  synth->add_option("--n", synth_n, "Image side")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output corpus root")->required();

  // encode
  auto* encode = app.add_subcommand("encode", "LBP-encode one PGM image");
  std::string enc_image, enc_out;
  int enc_n = 0, enc_l = 0, enc_m = 0;
  encode->add_option("--image", enc_image, "Input PGM")->required();
  encode->add_option("--n", enc_n, "Resample to n x n (default: keep a square input)");
  auto* enc_l_opt = encode->add_option("--l", enc_l, "Also emit T and F for l regions");
  auto* enc_m_opt = encode->add_option("--m", enc_m, "Also emit H and F for m bins");
  enc_l_opt->needs(enc_m_opt);
  enc_m_opt->needs(enc_l_opt);
  encode->add_option("--out", enc_out, "Output JSON (default stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit transform matrices on a corpus");
  SourceOptions fit_src;
  ModelOptions fit_model;
  std::string fit_out = "transforms.json", fit_subset = "train";
  add_source(fit, fit_src);
  add_model(fit, fit_model);
  fit->add_option("--subset", fit_subset, "Images to fit on: train, test or all")->capture_default_str();
  fit->add_option("--out", fit_out, "Output transform file")->capture_default_str();

  // extract
  auto* extract = app.add_subcommand("extract", "Extract features with a transform file");
  SourceOptions ext_src;
  std::string ext_transforms, ext_out = "features.csv", ext_subset = "all";
  std::uint64_t ext_seed = 42;
  double ext_fraction = 0.7;
  add_source(extract, ext_src);
  extract->add_option("--transforms", ext_transforms, "Transform file from fit")->required();
  extract->add_option("--subset", ext_subset, "Images to extract: train, test or all")->capture_default_str();
  extract->add_option("--seed", ext_seed, "Split seed for --subset")->capture_default_str();
  extract->add_option("--train-fraction", ext_fraction, "Split fraction for --subset")->capture_default_str();
  extract->add_option("--out", ext_out, "Output features CSV")->capture_default_str();

  // residual-curve
  auto* curve = app.add_subcommand("residual-curve", "Residual R(m) of a method on a corpus");
  SourceOptions cur_src;
  ModelOptions cur_model;
  std::string cur_out, cur_format = "csv", cur_subset = "train";
  int cur_max = 256;
  add_source(curve, cur_src);
  add_model(curve, cur_model);
  curve->add_option("--m-max", cur_max, "Largest m on the curve")->capture_default_str();
  curve->add_option("--subset", cur_subset, "Images defining the class means")->capture_default_str();
  curve->add_option("--format", cur_format, "csv or json")->capture_default_str();
  curve->add_option("--out", cur_out, "Output file (default stdout)");

  // train
  auto* trn = app.add_subcommand("train", "Train a linear SVM on a features CSV");
  std::string trn_features, trn_out = "model.json";
  SvmParams trn_params;
  trn->add_option("--features", trn_features, "Features CSV")->required();
  trn->add_option("--lambda", trn_params.lambda, "Regularization")->capture_default_str();
  trn->add_option("--epochs", trn_params.epochs, "Subgradient iterations")->capture_default_str();
  trn->add_option("--seed", trn_params.seed, "Seed recorded with the model")->capture_default_str();
  trn->add_option("--out", trn_out, "Output model file")->capture_default_str();

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "Evaluate an SVM model on a features CSV");
  std::string evl_model, evl_features, evl_out;
  double evl_reject = 0.0;
  evl->add_option("--model", evl_model, "Model file from train")->required();
  evl->add_option("--features", evl_features, "Features CSV")->required();
  auto* evl_reject_opt =
      evl->add_option("--reject-threshold", evl_reject, "Reject samples whose best score is below this");
  evl->add_option("--out", evl_out, "Output evaluation JSON (default stdout)");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Split, fit, extract, train and evaluate");
  SourceOptions pipe_src;
  ModelOptions pipe_model;
  RunConfig pipe_extra;
  std::string pipe_report = "report.json", pipe_features;
  double pipe_reject = 0.0;
  add_source(pipe, pipe_src);
  add_model(pipe, pipe_model);
  pipe->add_option("--lambda", pipe_extra.lambda, "SVM regularization")->capture_default_str();
  pipe->add_option("--epochs", pipe_extra.epochs, "SVM subgradient iterations")->capture_default_str();
  pipe->add_option("--repeat", pipe_extra.repeat, "Runs with seeds seed, seed+1, ...")->capture_default_str();
  pipe->add_flag("--residual-curve", pipe_extra.residual_curve, "Add residual curves to the report");
  pipe->add_option("--m-max", pipe_extra.residual_m_max, "Largest m on residual curves")->capture_default_str();
  auto* pipe_reject_opt =
      pipe->add_option("--reject-threshold", pipe_reject, "Reject samples whose best score is below this");
  pipe->add_option("--report", pipe_report, "Output report JSON")->capture_default_str();
  pipe->add_option("--features-out", pipe_features, "Also write the first run's features CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorKind::config, 2, e.what());
  }

  try {
    if (g.threads < 0) throw ConfigError("--threads must be non-negative");
    set_threads(g.threads);

    if (*synth) {
      const auto recipes = parse_recipes(synth_recipes);
      if (synth_count < 1) throw ConfigError("--count must be positive");
      if (synth_n < 3) throw ConfigError("--n must be at least 3");
      const Corpus corpus = generate_synthetic(recipes, synth_count, synth_n, synth_seed);
      write_corpus(corpus, synth_out);
      std::cout << "wrote " << corpus.size() << " images in " << corpus.classes.size() << " classes to "
                << synth_out << '\n';
    } else if (*encode) {
      const PgmImage raw = read_pgm(enc_image);
      int n = enc_n;
      if (n == 0) {
        if (raw.width != raw.height) throw ConfigError("non-square input needs --n");
        n = raw.width;
      }
      if (n < 3) throw ConfigError("--n must be at least 3");
      const GrayImage img = resample_to_square(raw, n);
      const LbpCodeMap codes = encode_image(img, g.exec());
      const ExtensionMatrix e = build_E(codes);
      Json j{{"format", kEncodeFormat},
             {"image", enc_image},
             {"n", n},
             {"codes", std::vector<int>(codes.codes.begin(), codes.codes.end())},
             {"E", sparse_to_json(e)}};
      if (enc_l_opt->count()) {
        const TilingMatrix t = build_T(n, enc_l);
        const HistogramMatrix h = build_H(enc_m);
        const DenseMatrix f = compose_F(t, e, h);
        Json rows = Json::array();
        for (int r = 0; r < f.rows(); ++r) rows.push_back(std::vector<double>(f.row(r).begin(), f.row(r).end()));
        j["T"] = sparse_to_json(t);
        j["H"] = sparse_to_json(h);
        j["F"] = std::move(rows);
      }
      emit(enc_out, dump(j));
    } else if (*fit) {
      RunConfig c = make_config(fit_model, g);
      auto [corpus, desc] = load_source(fit_src, c.n);
      c.source = desc;
      const auto idx = subset_indices(corpus, parse_subset(fit_subset), c.train_fraction, c.seed);
      const TransformSet set = fit_transforms(corpus, idx, c);
      write_text_file(fit_out, dump(to_json(set)));
      std::cout << "method: " << to_string(set.method) << '\n';
      std::cout << "feature_count: " << set.feature_count() << '\n';
      print_selection(set);
      std::cout << "wrote " << fit_out << '\n';
    } else if (*extract) {
      const TransformSet set = transform_set_from_json(read_json_file(ext_transforms));
      auto [corpus, desc] = load_source(ext_src, set.side());
      if (set.method != Method::standard && corpus.classes != set.classes) {
        throw DataError("corpus classes differ from the transform file's classes");
      }
      const auto idx = subset_indices(corpus, parse_subset(ext_subset), ext_fraction, ext_seed);
      const LabeledFeatures data = extract_labeled(corpus, idx, set, g.exec());
      const auto paths = corpus.flat_paths();
      FeatureTable table;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        table.paths.push_back(paths[idx[i]]);
        table.labels.push_back(corpus.classes[data.labels[i]]);
      }
      table.features = data.samples;
      std::ostringstream os;
      write_features_csv(os, table);
      emit(ext_out, os.str());
    } else if (*curve) {
      RunConfig c = make_config(cur_model, g);
      c.residual_m_max = cur_max;
      validate(c);
      auto [corpus, desc] = load_source(cur_src, c.n);
      const auto idx = subset_indices(corpus, parse_subset(cur_subset), c.train_fraction, c.seed);
      const auto diffs = class_differences(corpus, idx, c);
      std::vector<ResidualCurve> curves;
      for (const auto& d : diffs) curves.push_back(method_residual_curve(d, c.method, cur_max));
      const bool per_class = curves.size() > 1;
      if (cur_format == "csv") {
        std::ostringstream os;
        os << (per_class ? "class,method,m,residual\n" : "method,m,residual\n");
        for (std::size_t k = 0; k < curves.size(); ++k)
          for (const auto& p : curves[k].points) {
            if (per_class) os << corpus.classes[k] << ',';
            os << to_string(curves[k].method) << ',' << p.m << ',' << Json(p.residual).dump() << '\n';
          }
        emit(cur_out, os.str());
      } else if (cur_format == "json") {
        Json arr = Json::array();
        for (std::size_t k = 0; k < curves.size(); ++k) {
          Json cj = to_json(curves[k]);
          if (per_class) cj["class"] = corpus.classes[k];
          arr.push_back(std::move(cj));
        }
        emit(cur_out, dump(Json{{"source", desc}, {"classes", corpus.classes}, {"residual_curves", arr}}));
      } else {
        throw ConfigError("unknown --format '" + cur_format + "' (expected csv or json)");
      }
    } else if (*trn) {
      const FeatureTable table = read_table(trn_features);
      std::vector<std::string> classes;
      const LabeledFeatures data = to_labeled(table, &classes);
      const SvmModel model = train(data, trn_params);
      write_text_file(trn_out, dump(to_json(model, classes)));
      std::cout << "trained on " << data.size() << " samples, " << data.dimension() << " features, "
                << classes.size() << " classes; wrote " << trn_out << '\n';
    } else if (*evl) {
      std::vector<std::string> classes;
      const SvmModel model = svm_model_from_json(read_json_file(evl_model), &classes);
      const LabeledFeatures test = labeled_with_classes(read_table(evl_features), classes);
      std::optional<double> reject;
      if (evl_reject_opt->count()) reject = evl_reject;
      const Evaluation ev = evaluate(model, test, reject);
      emit(evl_out, dump(to_json(ev, classes)));
    } else if (*pipe) {
      RunConfig c = make_config(pipe_model, g);
      c.lambda = pipe_extra.lambda;
      c.epochs = pipe_extra.epochs;
      c.repeat = pipe_extra.repeat;
      c.residual_curve = pipe_extra.residual_curve;
      c.residual_m_max = pipe_extra.residual_m_max;
      if (pipe_reject_opt->count()) c.reject_threshold = pipe_reject;
      validate(c);
      auto [corpus, desc] = load_source(pipe_src, c.n);
      c.source = desc;
      const PipelineResult result = run_pipeline(corpus, c);
      write_text_file(pipe_report, dump(result.report));
      if (!pipe_features.empty()) {
        std::ostringstream os;
        write_features_csv(os, result.features);
        write_text_file(pipe_features, os.str());
      }
      print_selection(result.transforms);
      std::cout << "accuracy: " << Json(result.runs.front().evaluation.accuracy).dump() << '\n';
      if (c.repeat > 1) {
        std::cout << "accuracy_mean: " << Json(result.mean_accuracy).dump() << '\n';
        std::cout << "accuracy_stddev: " << Json(result.stddev_accuracy).dump() << '\n';
      }
      std::cout << "wrote " << pipe_report << '\n';
    }
  } catch (const Error& e) {
    return fail(e.kind(), e.exit_code(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(ErrorKind::data, 3, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorKind::numerical, 4, std::string("internal error: ") + e.what());
  }
  return 0;
}
