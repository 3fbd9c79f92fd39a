// One pass/fail line per acceptance criterion. Exit 0 iff all pass.
//
//   qftm_acceptance [config] [scratch_dir]

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qftm/cli.hpp"
#include "qftm/suites.hpp"

using namespace qftm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Line {
  int id;
  bool pass;
  std::string text;
};

double row_value(const Report& r, const std::string& quantity) {
  for (const auto& row : r.rows())
    if (row.quantity == quantity) return row.value;
  throw std::runtime_error("missing row: " + quantity);
}

std::string failing(const Report& r) {
  std::string s;
  for (const auto& row : r.rows())
    if (!row.pass) s += fmt::format(" [{}: {:.3g} {} {:.3g}]", row.quantity, row.value, row.relation, row.tolerance);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string config = argc > 1 ? argv[1] : std::string(QFTM_SOURCE_DIR) + "/configs/default.cfg";
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "qftm_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  std::ostringstream quiet;
  std::vector<Line> lines;

  const ScenarioConfig cfg = load_scenario(config);
  // Spec minimum sample counts, whatever the config asks for.
  const VerifyTask minimum{};
  const SuiteOptions options{cfg.seed, 1.0, false};

  // 1. Sorkin gap through the CLI, checked against an independent Green-function evaluation.
  {
    const auto t0 = Clock::now();
    const int code = run(config, "sorkin", (scratch / "sorkin").string(), {}, quiet);
    const double secs = seconds_since(t0);
    std::istringstream csv(read_file(scratch / "sorkin" / "sorkin.csv"));
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    std::vector<double> v;
    std::istringstream cells(row);
    for (std::string c; std::getline(cells, c, ',');) v.push_back(std::stod(c));
    const SorkinConfig layout = cfg.sorkin ? cfg.sorkin->layout : default_sorkin_layout(cfg.system);
    const FieldParams& p = layout.params;
    const double efg = layout.f.values().cwiseProduct(advanced(layout.g, p).values - retarded(layout.g, p).values).sum() *
                       p.spec.dvol();
    const double egh = layout.g.values().cwiseProduct(advanced(layout.h, p).values - retarded(layout.h, p).values).sum() *
                       p.spec.dvol();
    const bool ok = code == 0 && v.size() == 6;
    const double gap = ok ? v[4] : 0.0;
    const double oracle = std::abs(gap - 2.0 * egh * efg);
    const double routes = ok ? std::abs(v[4] - v[5]) : 1.0;
    lines.push_back({1, ok && oracle <= 1e-10 && routes <= 1e-10 && std::abs(gap) > 1e-3 && secs < 10.0,
                     fmt::format("Sorkin gap {:.6g}; |gap - 2E(g,h)E(f,g)| = {:.2g}; route defect {:.2g} (<= 1e-10); "
                                 "|gap| > 1e-3; runtime {:.2f} s (< 10 s)",
                                 gap, oracle, routes, secs)});
  }

  auto suite = [&](const std::string& name, double* secs = nullptr) {
    const auto t0 = Clock::now();
    SuiteResult r = run_suite(name, cfg, minimum, options);
    if (secs) *secs = seconds_since(t0);
    return r.report;
  };

  // 2. Commutator causality and antisymmetry.
  {
    const Report r = suite("commutator");
    lines.push_back({2, r.passed() && minimum.commutator_pairs >= 50,
                     fmt::format("max |E(f,g)| over {} causally disjoint pairs = {:.2g} (<= 1e-12); antisymmetry "
                                 "defect over {} pairs = {:.2g} (<= 1e-10){}",
                                 minimum.commutator_pairs, row_value(r, "max |E(f;g)|"), minimum.commutator_pairs,
                                 row_value(r, "max |E(f;g) + E(g;f)|"), failing(r))});
  }
  // 3. Green identities.
  {
    const Report r = suite("green");
    lines.push_back({3, r.passed() && minimum.green_functions >= 20,
                     fmt::format("{} random sources: residual ret {:.2g}, adv {:.2g} (<= 1e-10); points outside the "
                                 "cone {}{}",
                                 minimum.green_functions, row_value(r, "max retarded residual"),
                                 row_value(r, "max advanced residual"),
                                 row_value(r, "solution points outside the cone"), failing(r))});
  }
  // 4. Symplecticity and locality of the scattering map.
  {
    const Report r = suite("scattering");
    const double basis = row_value(r, "K-perp basis vectors");
    lines.push_back({4, r.passed() && basis >= 10,
                     fmt::format("|S^T Omega S - Omega| = {:.2g} (<= 1e-8); locality {:.2g} over {} K-perp vectors "
                                 "(<= 1e-9); lambda = 0: |S - I| = {:.2g} (<= 1e-12){}",
                                 row_value(r, "symplecticity defect"),
                                 row_value(r, "max |S v - v| for K-perp point data"), basis,
                                 row_value(r, "max |S - I|"), failing(r))});
  }
  // 5. Induced-observable causality and expectation consistency.
  {
    const Report r = suite("induced");
    lines.push_back({5, r.passed() && minimum.induced_states >= 10 && minimum.induced_samples >= 20,
                     fmt::format("|eps(B) - sigma(B) 1| = {:.2g} over {} states (<= 1e-10); two-route defect {:.2g} "
                                 "over {} samples (<= 1e-10){}",
                                 row_value(r, "max |eps(B) - sigma(B) 1|"), minimum.induced_states,
                                 row_value(r, "max two-route expectation defect"), minimum.induced_samples,
                                 failing(r))});
  }
  // 6. Update laws.
  {
    const Report r = suite("updates");
    lines.push_back(
        {6, r.passed() && minimum.update_scenarios >= 20,
         fmt::format("over {} two-probe scenarios: POVM additivity {:.2g} (<= 1e-10), nonselective K-perp {:.2g} "
                     "(<= 1e-10), successive selective {:.2g}, composition {:.2g} (<= 1e-9); order swap {:.2g} "
                     "(<= 1e-9){}",
                     minimum.update_scenarios, row_value(r, "POVM additivity defect"),
                     row_value(r, "nonselective update seen from K-perp"),
                     row_value(r, "successive selective update defect"), row_value(r, "instrument composition defect"),
                     row_value(r, "order swap defect"), failing(r))});
  }
  // 7. Absence of impossible measurements.
  {
    double secs = 0.0;
    const Report r = suite("impossible", &secs);
    const double n = row_value(r, "geometries");
    lines.push_back({7, r.passed() && n >= 20 && secs < 300.0,
                     fmt::format("{} admissible geometries: max gap {:.2g} (<= 1e-8) while min |unitary-kick gap| "
                                 "{:.3g} (> 1e-3); runtime {:.2f} s (< 300 s){}",
                                 n, row_value(r, "max impossible-measurement gap"),
                                 row_value(r, "min |unitary-kick gap| on the same geometries"), secs, failing(r))});
  }
  // 8. Unsharpness.
  {
    const Report r = suite("unsharpness");
    lines.push_back({8, r.passed() && minimum.unsharpness_samples >= 50,
                     fmt::format("min omega(N(E)) = {:.3g} over {} samples (>= -1e-10); min actual - induced variance "
                                 "{:.3g} (>= 0 up to 1e-10){}",
                                 row_value(r, "min omega(E - E^2)"), minimum.unsharpness_samples,
                                 row_value(r, "min (actual - induced variance)"), failing(r))});
  }
  // 9. Reproducibility of verify.
  {
    const fs::path a = scratch / "verify_a", b = scratch / "verify_b";
    const int ca = run(config, "verify", a.string(), {}, quiet);
    const int cb = run(config, "verify", b.string(), {}, quiet);
    bool same = true;
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      same = same && fs::exists(other) && read_file(entry.path()) == read_file(other);
      ++compared;
    }
    lines.push_back({9, ca == 0 && cb == 0 && same && compared >= 2,
                     fmt::format("two verify runs (seed {}): exit {} and {}, {} output files bit-identical: {}",
                                 cfg.seed, ca, cb, compared, same ? "yes" : "no")});
  }

  bool all = true;
  for (const auto& l : lines) {
    std::cout << fmt::format("criterion {} {} {}\n", l.id, l.pass ? "PASS" : "FAIL", l.text);
    all = all && l.pass;
  }
  std::cout << (all ? "all criteria pass\n" : "some criteria FAIL\n");
  return all ? 0 : 1;
}
