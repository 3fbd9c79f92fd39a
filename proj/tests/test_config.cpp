#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qftm/config.hpp"
#include "qftm/errors.hpp"

using namespace qftm;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string kDefault = std::string(QFTM_CONFIG_DIR) + "/default.cfg";

/// Line number reported for the given text, or -1 if it parses.
int error_line(const std::string& text, std::string* what = nullptr) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    if (what) *what = e.what();
    return e.line();
  }
  return -1;
}

const char* kSmall = R"(seed = 3
[lattice]
n_t = 48
n_x = 48
[region A]
rect = {4, 8, 10, 14}
)";

}  // namespace

TEST(Config, BundledScenarioMatchesTheBuiltInLayout) {
  const ScenarioConfig cfg = load_scenario(kDefault);
  EXPECT_EQ(cfg.name, "default");
  EXPECT_EQ(cfg.system.spec.n_t, 64);
  ASSERT_TRUE(cfg.sorkin.has_value());
  const SorkinConfig ref = default_sorkin_layout(cfg.system);
  EXPECT_TRUE(cfg.sorkin->layout.o1 == ref.o1);
  EXPECT_TRUE(cfg.sorkin->layout.o2 == ref.o2);
  EXPECT_TRUE(cfg.sorkin->layout.o3 == ref.o3);
  EXPECT_EQ((cfg.sorkin->layout.f.values() - ref.f.values()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((cfg.sorkin->layout.g.values() - ref.g.values()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((cfg.sorkin->layout.h.values() - ref.h.values()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(cfg.probe_order, (std::vector<std::string>{"alice", "bob", "centre"}));
  EXPECT_EQ(cfg.measure->probes, (std::vector<std::string>{"alice", "bob"}));
  EXPECT_EQ(cfg.probes.at("alice").params.mass, 1.2);
  EXPECT_EQ(cfg.verify->impossible_geometries, 20);
}

TEST(Config, RegionUnionsAndLiterals) {
  const std::string text = std::string(kSmall) + R"(rect = {20, 21, 30, 31}
[function p]
term = point {5, 11, 2.5}
term = gaussian_bump {6, 12, 1, 1, 1, 4 8 10 14}
)";
  const ScenarioConfig cfg = parse_scenario(text);
  EXPECT_EQ(cfg.regions.at("A").size(), 5u * 5u + 2u * 2u);
  EXPECT_GT(cfg.functions.at("p")(5, 11), 2.5);
  EXPECT_TRUE(cfg.functions.at("p").support().subset_of(cfg.regions.at("A")));
}

TEST(Config, MalformedRegionNamesTheLine) {
  std::string what;
  EXPECT_EQ(error_line(std::string(kSmall) + "rect = {10, 12, 9, 3}\n", &what), 7);
  EXPECT_NE(what.find("x1 = 3 < x0 = 9"), std::string::npos);
  EXPECT_EQ(error_line(std::string(kSmall) + "rect = {10, 2, 3, 9}\n"), 7);
  EXPECT_EQ(error_line(std::string(kSmall) + "rect = {10, 12, 3, 90}\n"), 7);
  EXPECT_EQ(error_line(std::string(kSmall) + "rect = {10, 12, 3}\n"), 7);
}

TEST(Config, SyntaxAndReferenceErrors) {
  EXPECT_EQ(error_line(std::string(kSmall) + "colour = red\n"), 7);
  EXPECT_EQ(error_line(std::string(kSmall) + "just words\n"), 7);
  EXPECT_EQ(error_line(std::string(kSmall) + "[nonsense]\n"), 7);
  EXPECT_EQ(error_line(std::string(kSmall) + "[region A]\nrect = {1, 2, 3, 4}\n"), 7);
  EXPECT_EQ(error_line("[lattice]\nn_t = sixty\n"), 2);
  EXPECT_EQ(error_line(std::string(kSmall) + "[function f]\nterm = gaussian_bump {1, 2, 1, 1, 1, B}\n"), 8);
  EXPECT_EQ(error_line(std::string(kSmall) + "[green]\nfunctions = nope\n"), 8);
  EXPECT_EQ(error_line("[system]\nmass = -1\n"), 1);
  EXPECT_EQ(error_line("[lattice]\nboundary = twisted\n"), 2);
  EXPECT_EQ(error_line("[verify]\ncommutator_pairs = 0\n"), 2);
}

TEST(Config, CausalPreconditionsAreCheckedAtLoad) {
  std::string text = read_file(kDefault);
  std::string what;
  // O3 moved into the future of O1.
  const auto at = text.find("rect = {24, 29, 39, 44}");
  ASSERT_NE(at, std::string::npos);
  std::string moved = text;
  moved.replace(at, 23, "rect = {24, 29, 14, 20}");
  moved.replace(moved.find("{26.5, 41.5"), 11, "{26.5, 17.0");
  EXPECT_GT(error_line(moved, &what), 0);
  EXPECT_NE(what.find("causal complement of O1"), std::string::npos) << what;

  // Probes listed future first.
  std::string swapped = text;
  swapped.replace(swapped.find("probes = alice bob"), 18, "probes = bob alice");
  swapped.replace(swapped.find("effects = alice_yes bob_yes"), 27, "effects = bob_yes alice_yes");
  EXPECT_GT(error_line(swapped, &what), 0);
  EXPECT_NE(what.find("causal order violated"), std::string::npos) << what;

  // Coupling zone inside the padding slices.
  EXPECT_GT(error_line(std::string(kSmall) + R"([function r]
term = point {1, 5, 1}
[probe p]
strength = 0.5
shape = r
)",
                       &what),
            0);
}
