#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "thinshell/harness.hpp"

namespace thinshell::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thinshell_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

TEST(Config, MinimalFileGetsDefaults) {
  const ExperimentConfig c = parse_config_text("experiment = grunbaum\nseed = 7\n");
  EXPECT_EQ(c.experiment, "grunbaum");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_TRUE(c.family.empty());
  EXPECT_EQ(c.samples(1234), 1234u);
  EXPECT_EQ(c.n_or(3), 3);
}

TEST(Config, ListsRangesSectionsAndComments) {
  const ExperimentConfig c = parse_config_text(
      "# comment\n[experiment]\nexperiment = moment-curve\nseed = 0x10\nn = 16, 64\np_grid = 1:3:1  # inline\n"
      "family = gaussian,product-laplace\nN = 2e5\n[tolerances]\nconcavity = 1e-9\n[extra]\nprobes = 12\n");
  EXPECT_EQ(c.seed, 16u);
  EXPECT_EQ(c.n_grid, (std::vector<int>{16, 64}));
  EXPECT_EQ(c.p_grid, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(c.samples(0), 200000u);
  EXPECT_DOUBLE_EQ(c.tolerance("concavity", 1.0), 1e-9);
  EXPECT_DOUBLE_EQ(c.tolerance("missing", 2.0), 2.0);
  EXPECT_EQ(c.get("extra.probes").value_or(""), "12");
}

TEST(Config, SmallSampleCountIsRejected) {
  try {
    parse_config_text("experiment = grunbaum\nseed = 1\nN = 10\n");
    FAIL() << "expected a validation error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'N'"), std::string::npos);
  }
}

TEST(Config, DuplicateKeyNamesKeyAndLine) {
  try {
    parse_config_text("experiment = grunbaum\nseed = 1\nseed = 2\n");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Config, MalformedLineReportsLine) {
  try {
    parse_config_text("experiment = grunbaum\nthis line has no equals\n");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Config, MissingFile) { EXPECT_THROW(parse_config("/nonexistent/thinshell.ini"), ConfigError); }

TEST(Registry, CoversEveryClaimKeyWithAnAnchor) {
  for (const char* key : {"thm1.1-tail-fit", "thm2.1-loglip-scan", "propA-sandwich", "grunbaum", "borell-concavity",
                          "so1-identity", "entropy-decomp", "reduction", "cheeger", "reverse-holder", "gamma-decr",
                          "stirling-bound", "zq-chains", "zk-identity", "addG", "a1-a3-appendix", "z2plus"}) {
    const ExperimentInfo& info = find_experiment(key);
    EXPECT_FALSE(info.anchor.empty()) << key;
  }
}

TEST(Run, UnknownExperiment) {
  ExperimentConfig c;
  c.experiment = "no-such-claim";
  try {
    run_experiment(c);
    FAIL();
  } catch (const UnknownExperiment& e) {
    EXPECT_NE(std::string(e.what()).find("unknown experiment"), std::string::npos);
  }
}

TEST(Run, GrunbaumZooPasses) {
  ExperimentConfig c = parse_config_text("experiment = grunbaum\nseed = 1\nfamily = zoo\n");
  const ExperimentResult r = run_experiment(c);
  ASSERT_FALSE(r.records.empty());
  EXPECT_FALSE(r.any_failure());
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.experiment, "grunbaum");
    EXPECT_EQ(rec.seed, 1u);
    EXPECT_EQ(rec.code_version, code_version());
  }
}

TEST(Emit, OneRecordMakesThreeFiles) {
  ExperimentResult r;
  ReportRecord rec;
  rec.experiment = "demo";
  rec.claim = "a claim";
  rec.anchor = "an anchor";
  rec.verdict = Verdict::pass;
  rec.metrics = {{"value", 1.5}};
  r.records.push_back(rec);
  const fs::path dir = scratch("emit_one");
  const auto files = emit_report(r, dir);
  EXPECT_EQ(files.size(), 3u);
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f));
  EXPECT_NE(slurp(dir / "summary.txt").find("an anchor"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Emit, EmptyStreamIsAnError) { EXPECT_THROW(emit_report(ExperimentResult{}, scratch("emit_empty")), std::invalid_argument); }

TEST(Emit, OverlayColumnsForTailFit) {
  ExperimentConfig c = parse_config_text("experiment = thm1.1-tail-fit\nseed = 3\nfamily = gaussian\nn = 64\nN = 5000\n");
  const ExperimentResult r = run_experiment(c);
  const fs::path dir = scratch("emit_overlay");
  emit_report(r, dir, {true});
  std::ifstream is(dir / "tail_curve.csv");
  std::string schema, header;
  std::getline(is, schema);
  std::getline(is, header);
  EXPECT_NE(schema.find("schema"), std::string::npos);
  EXPECT_NE(header.find("paouris_form"), std::string::npos);
  EXPECT_NE(header.find("klartag_form"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Emit, IdenticalRunsGiveIdenticalCsv) {
  ExperimentConfig c = parse_config_text("experiment = moment-curve\nseed = 9\nn = 16\nN = 4000\n");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  emit_report(run_experiment(c), a);
  emit_report(run_experiment(c), b);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
    ++compared;
  }
  EXPECT_GE(compared, 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format_scalar(Scalar{std::int64_t{3}}), "3");
  EXPECT_EQ(format_scalar(Scalar{true}), "true");
}

TEST(Overlay, FormsAreDecreasingInT) {
  EXPECT_DOUBLE_EQ(paouris_form(100.0, 2.0, 0.0), 1.0);
  EXPECT_LT(paouris_form(100.0, 2.0, 0.2), paouris_form(100.0, 2.0, 0.1));
  EXPECT_LT(klartag_form(100, 0.2), klartag_form(100, 0.1));
  EXPECT_LT(fleury_upper_form(100, 0.2), fleury_upper_form(100, 0.1));
  EXPECT_LT(fleury_lower_form(100, 0.2), fleury_lower_form(100, 0.1));
}

}  // namespace
}  // namespace thinshell::harness
