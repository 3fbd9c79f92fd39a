#pragma once

// Judged result rows and the randomized verification suites.

#include <cstdint>
#include <string>
#include <vector>

#include "qftm/config.hpp"

namespace qftm {

struct CheckRow {
  std::string scenario;
  std::string quantity;
  double value = 0.0;
  std::string relation;  // "<=", ">=" or "=="
  double tolerance = 0.0;
  bool pass = false;
};

/// Collects rows. Upper bounds ("<=") are multiplied by the tolerance scale;
/// lower bounds and equalities are not.
class Report {
 public:
  explicit Report(double tolerance_scale = 1.0) : scale_(tolerance_scale) {}

  void at_most(const std::string& scenario, const std::string& quantity, double value, double tolerance);
  void at_least(const std::string& scenario, const std::string& quantity, double value, double bound);
  void equals(const std::string& scenario, const std::string& quantity, double value, double expected);
  void append(const Report& other);

  const std::vector<CheckRow>& rows() const { return rows_; }
  bool passed() const;

 private:
  double scale_;
  std::vector<CheckRow> rows_;
};

/// scenario,quantity,value,relation,tolerance,pass with %.17g numbers.
std::string rows_csv(const std::vector<CheckRow>& rows);

struct SuiteOptions {
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  bool parallel = false;
};

struct SuiteResult {
  std::string name;
  Report report;
};

/// commutator, green, sorkin, scattering, induced, updates, impossible, unsharpness.
const std::vector<std::string>& suite_names();

/// Each suite draws from its own generator seeded by (seed, suite index), so
/// results do not depend on which suites run or in what order.
SuiteResult run_suite(const std::string& name, const ScenarioConfig& cfg, const VerifyTask& task,
                      const SuiteOptions& options);

/// Runs the selected suites (all when task.suites is empty), in parallel when asked.
std::vector<SuiteResult> run_verify(const ScenarioConfig& cfg, const VerifyTask& task, const SuiteOptions& options);

}  // namespace qftm
