#include <gtest/gtest.h>

#include <set>

#include "lbpopt/error.hpp"
#include "lbpopt/pipeline.hpp"

using namespace lbpopt;

namespace {

Corpus corpus(std::vector<Recipe> recipes, int count, int n, std::uint64_t seed = 42) {
  return generate_synthetic(recipes, count, n, seed);
}

}  // namespace

TEST(RunConfig, Defaults) {
  RunConfig c;
  EXPECT_EQ(c.n, 64);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_DOUBLE_EQ(c.train_fraction, 0.7);
  EXPECT_DOUBLE_EQ(c.lambda, 1e-3);
  EXPECT_EQ(c.epochs, 200);
  EXPECT_EQ(c.resolved_m(), 16);
  EXPECT_EQ(c.resolved_l(), 16);
  c.method = Method::standard;
  EXPECT_EQ(c.resolved_m(), 8);
  EXPECT_EQ(c.resolved_l(), 16);
}

TEST(RunConfig, Validation) {
  RunConfig c;
  c.n = 32;
  c.l = 4;
  EXPECT_THROW(validate(c), ConfigError);
  c.l.reset();
  c.train_fraction = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c.train_fraction = 0.7;
  c.method = Method::standard;
  c.l = 9;
  c.n = 32;
  EXPECT_THROW(validate(c), ConfigError);
  c.l = 16;
  c.m = 6;
  EXPECT_THROW(validate(c), ConfigError);
  c.m = 8;
  EXPECT_NO_THROW(validate(c));
  c.repeat = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Pipeline, TwoClassReportShape) {
  const Corpus data = corpus({Recipe::horizontal_edges, Recipe::flat_noise}, 30, 16);
  RunConfig c;
  c.n = 16;
  c.m = 4;
  c.residual_curve = true;
  const auto r = run_pipeline(data, c);
  const Json& j = r.report;
  EXPECT_EQ(j["format"], kReportFormat);
  EXPECT_EQ(j["config"]["m"], 4);
  EXPECT_EQ(j["feature_count"], 4);
  EXPECT_TRUE(j["accuracy"].is_number());
  EXPECT_EQ(j["runs"].size(), 1u);
  EXPECT_EQ(j["transforms"][0]["selected_codes"].size(), 4u);
  ASSERT_EQ(j["residual_curves"].size(), 1u);
  const auto& residual = j["residual_curves"][0]["residual"];
  ASSERT_EQ(residual.size(), 256u);
  for (std::size_t i = 1; i < residual.size(); ++i) EXPECT_LE(residual[i].get<double>(), residual[i - 1].get<double>());
  EXPECT_EQ(r.features.features.size(), 60u);
  EXPECT_EQ(r.features.paths.front(), "flat-noise/flat-noise_0000.pgm");
}

TEST(Pipeline, TransformsSeeOnlyTrainingImages) {
  const Corpus data = corpus({Recipe::checker, Recipe::flat_noise}, 20, 16);
  RunConfig c;
  c.n = 16;
  c.m = 6;
  const auto split = stratified_split(data.flat_labels(), 2, c.train_fraction, c.seed);
  const TransformSet direct = fit_transforms(data, split.train, c);
  const auto r = run_pipeline(data, c);
  EXPECT_EQ(r.transforms.pairs[0].selected_codes, direct.pairs[0].selected_codes);
  EXPECT_EQ(r.transforms.pairs[0].left, direct.pairs[0].left);
}

TEST(Pipeline, MulticlassConfusionRowsMatchCounts) {
  const Corpus data = corpus({Recipe::horizontal_edges, Recipe::vertical_edges, Recipe::checker}, 20, 16);
  RunConfig c;
  c.n = 16;
  c.m = 4;
  c.repeat = 3;
  const auto r = run_pipeline(data, c);
  ASSERT_EQ(r.runs.size(), 3u);
  EXPECT_EQ(r.transforms.pairs.size(), 3u);
  EXPECT_EQ(r.report["feature_count"], 12);
  for (const auto& run : r.runs) {
    ASSERT_EQ(run.evaluation.confusion.counts.size(), 3u);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(run.evaluation.confusion.row_total(k), 6);
  }
  std::set<std::uint64_t> seeds;
  for (const auto& run : r.runs) seeds.insert(run.seed);
  EXPECT_EQ(seeds, (std::set<std::uint64_t>{42, 43, 44}));
  EXPECT_GE(r.report["accuracy_stddev"].get<double>(), 0.0);
}

TEST(Pipeline, DeterministicReports) {
  const Corpus data = corpus({Recipe::horizontal_edges, Recipe::flat_noise}, 20, 16);
  RunConfig c;
  c.n = 16;
  c.m = 4;
  c.repeat = 2;
  c.residual_curve = true;
  const std::string a = run_pipeline(data, c).report.dump(2);
  const std::string b = run_pipeline(data, c).report.dump(2);
  c.exec = Exec::serial;
  const std::string s = run_pipeline(data, c).report.dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, s);
}

TEST(Pipeline, StandardAndSvdMethods) {
  const Corpus data = corpus({Recipe::horizontal_edges, Recipe::checker}, 20, 16);
  RunConfig c;
  c.n = 16;
  c.method = Method::standard;
  c.l = 4;
  c.m = 4;
  c.residual_curve = true;
  const auto standard = run_pipeline(data, c);
  EXPECT_EQ(standard.report["feature_count"], 16);
  EXPECT_EQ(standard.report["residual_curves"][0]["m"].size(), 9u);
  c.method = Method::svd;
  c.l.reset();
  const auto svd = run_pipeline(data, c);
  EXPECT_EQ(svd.report["feature_count"], 4);
}

TEST(Pipeline, Errors) {
  const Corpus one = corpus({Recipe::checker}, 10, 16);
  RunConfig c;
  c.n = 16;
  EXPECT_THROW(run_pipeline(one, c), DomainError);
  const Corpus two = corpus({Recipe::checker, Recipe::flat_noise}, 10, 16);
  c.n = 32;
  EXPECT_THROW(fit_transforms(two, std::vector<std::size_t>{0, 10}, c), ConfigError);
}
