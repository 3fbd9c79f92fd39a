#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qftm/cli.hpp"
#include "qftm/sorkin.hpp"

using namespace qftm;
namespace fs = std::filesystem;

namespace {

const std::string kDefault = std::string(QFTM_CONFIG_DIR) + "/default.cfg";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qftm_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json summary(const fs::path& dir, const std::string& sub) {
  return nlohmann::json::parse(read_file(dir / (sub + "_summary.json")));
}

/// Bundled config with reduced verify counts.
fs::path small_verify_config() {
  std::string text = read_file(kDefault);
  text = text.substr(0, text.find("[verify]"));
  text += "[verify]\nsuites = commutator green sorkin induced unsharpness\ncommutator_pairs = 5\ngreen_functions = 3\n"
          "induced_samples = 3\ninduced_states = 2\nunsharpness_samples = 4\n";
  const fs::path p = fs::temp_directory_path() / "qftm_cli_small.cfg";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, SubcommandsOnTheBundledConfig) {
  std::ostringstream log;
  for (const char* sub : {"green", "sorkin", "scatter", "measure", "causal"}) {
    const fs::path dir = fresh_dir(sub);
    EXPECT_EQ(run(kDefault, sub, dir.string(), {}, log), 0) << sub << "\n" << log.str();
    const auto s = summary(dir, sub);
    EXPECT_EQ(s["status"], "pass") << sub;
    EXPECT_GT(s["checks"].get<int>(), 0);
    EXPECT_TRUE(fs::exists(dir / (std::string(sub) + "_checks.csv")));
  }
}

TEST(Cli, SorkinCsvMatchesTheGreenOracle) {
  const fs::path dir = fresh_dir("sorkin_oracle");
  std::ostringstream log;
  ASSERT_EQ(run(kDefault, "sorkin", dir.string(), {}, log), 0);
  std::istringstream csv(read_file(dir / "sorkin.csv"));
  std::string header, line;
  std::getline(csv, header);
  std::getline(csv, line);
  EXPECT_EQ(header, "e_fg,e_gh,mean_b,mean_ba,gap,gap_weyl_route");
  std::vector<double> v;
  std::istringstream cells(line);
  for (std::string c; std::getline(cells, c, ',');) v.push_back(std::stod(c));
  ASSERT_EQ(v.size(), 6u);

  const SorkinConfig layout = default_sorkin_layout();
  const FieldParams& p = layout.params;
  const double efg = layout.f.values().cwiseProduct(pauli_jordan(layout.g, p)).sum() * p.spec.dvol();
  const double egh = layout.g.values().cwiseProduct(pauli_jordan(layout.h, p)).sum() * p.spec.dvol();
  EXPECT_NEAR(v[4], 2.0 * egh * efg, 1e-10);
  EXPECT_NEAR(v[5], v[4], 1e-10);
  EXPECT_GT(std::abs(v[4]), 1e-3);
  EXPECT_TRUE(fs::exists(dir / "sorkin_retarded_f.csv"));
}

TEST(Cli, MalformedRegionIsAParseError) {
  std::string text = read_file(kDefault);
  text.replace(text.find("rect = {4, 9, 6, 13}"), 20, "rect = {4, 9, 13, 6}");
  const fs::path cfg = fs::temp_directory_path() / "qftm_cli_bad.cfg";
  std::ofstream(cfg) << text;
  const fs::path dir = fresh_dir("bad");
  std::ostringstream log;
  EXPECT_EQ(run(cfg.string(), "sorkin", dir.string(), {}, log), 2);
  const auto s = summary(dir, "sorkin");
  EXPECT_EQ(s["status"], "error");
  EXPECT_NE(s["error"].get<std::string>().find("line "), std::string::npos);
  EXPECT_NE(s["error"].get<std::string>().find("x1 = 6 < x0 = 13"), std::string::npos);

  EXPECT_EQ(run(kDefault, "dance", dir.string(), {}, log), 2);
  EXPECT_EQ(run("/nonexistent.cfg", "verify", dir.string(), {}, log), 2);
}

TEST(Cli, FailedCheckGivesExitOne) {
  std::string text = read_file(kDefault);
  text.replace(text.find("expect = not_convex O1"), 22, "expect = convex O1");
  const fs::path cfg = fs::temp_directory_path() / "qftm_cli_expect.cfg";
  std::ofstream(cfg) << text;
  const fs::path dir = fresh_dir("expect");
  std::ostringstream log;
  EXPECT_EQ(run(cfg.string(), "causal", dir.string(), {}, log), 1);
  EXPECT_EQ(summary(dir, "causal")["status"], "fail");
}

TEST(Cli, VerifyIsBitIdenticalAcrossRunsAndThreads) {
  const fs::path cfg = small_verify_config();
  std::ostringstream log;
  const fs::path a = fresh_dir("rep_a"), b = fresh_dir("rep_b"), c = fresh_dir("rep_c"), d = fresh_dir("rep_d");
  RunOptions opt;
  opt.seed = 99;
  ASSERT_EQ(run(cfg.string(), "verify", a.string(), opt, log), 0) << log.str();
  ASSERT_EQ(run(cfg.string(), "verify", b.string(), opt, log), 0);
  opt.parallel = true;
  ASSERT_EQ(run(cfg.string(), "verify", c.string(), opt, log), 0);
  EXPECT_EQ(read_file(a / "verify_checks.csv"), read_file(b / "verify_checks.csv"));
  EXPECT_EQ(read_file(a / "verify_summary.json"), read_file(b / "verify_summary.json"));
  EXPECT_EQ(read_file(a / "verify_checks.csv"), read_file(c / "verify_checks.csv"));
  EXPECT_EQ(summary(a, "verify")["seed"], 99);

  opt.seed = 100;
  ASSERT_EQ(run(cfg.string(), "verify", d.string(), opt, log), 0);
  EXPECT_NE(read_file(a / "verify_checks.csv"), read_file(d / "verify_checks.csv"));
}

TEST(Cli, ToleranceScaleMultipliesUpperBounds) {
  const fs::path cfg = small_verify_config();
  std::ostringstream log;
  const fs::path dir = fresh_dir("scale");
  RunOptions opt;
  opt.tolerance_scale = 1e-30;
  EXPECT_EQ(run(cfg.string(), "verify", dir.string(), opt, log), 1);
}
