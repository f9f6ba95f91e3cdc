#pragma once

// Acceptance criteria 1-10 with pinned tolerances, shared by the acceptance
// test binary and the `check` command.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wishart::acceptance {

struct CheckLine {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct CriterionReport {
  std::string id;
  std::string title;
  std::vector<CheckLine> checks;
  /// Values printed for the record and never asserted.
  std::vector<std::string> notes;
  double seconds = 0.0;

  bool pass() const;
};

struct Options {
  unsigned workers = 1;
  std::optional<std::filesystem::path> cache_dir;
  /// Progress messages for long criteria; may be null.
  std::ostream* progress = nullptr;
};

/// "1" .. "10", plus "4a", "4b" and "4b'" for the parts of criterion 4.
std::vector<std::string> criterion_ids();
bool is_criterion(const std::string& id);

CriterionReport run(const std::string& id, const Options& options);

/// Suites of the `check` command: oracles, expansion, variance, popdyn,
/// montecarlo, all.
std::vector<std::string> suite(const std::string& name);

/// "criterion <id>: PASS|FAIL  <title>" followed by indented check lines.
void print(const CriterionReport& report, std::ostream& out);

}  // namespace wishart::acceptance
