#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fraclab/config.hpp"

namespace fraclab {

struct CheckResult {
  std::string criterion;  // "C1".."C10", "NA" for the nonautonomous gate, "" for module invariants
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // how value is compared with tolerance: "<=", ">=", "<", ">", "==", "in"
  bool passed = false;
  std::string detail;
};

struct StageResult {
  std::string name;
  bool ran = false;
  std::string skipped_reason;
  std::vector<CheckResult> checks;

  [[nodiscard]] bool passed() const;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<StageResult> stages;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const StageResult* stage(const std::string& name) const;
  // Ordered list of criteria with their verdicts; a criterion passes when all its checks ran and passed.
  [[nodiscard]] std::vector<std::pair<std::string, bool>> criteria() const;
};

struct VerifyOptions {
  // Rerun the suite on the two inadmissible configurations of the assumption stage.
  bool negative_controls = true;
  std::function<void(const std::string&)> progress;
};

VerifyReport run_verify_suite(const ExperimentConfig& cfg, const VerifyOptions& opts = {});

// Deterministic JSON rendering (fixed key order, no timings).
std::string report_json(const VerifyReport& report);

}  // namespace fraclab
