// End-to-end batch run: solve, price, settle under both rules, decompose,
// verify identities, and emit the report files.
#pragma once

#include <optional>
#include <string>

#include "hgp/oracle.hpp"
#include "hgp/surplus.hpp"

namespace hgp {

// stable CLI exit contract
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitIdentityFailure = 3;

struct PipelineOptions {
  TempUnit unit = TempUnit::Celsius;
  double tolerance = 1e-8;
  double identity_threshold = 1e-4;  // $ per period, gate for exit code 3
  linalg::Exec exec = linalg::Exec::Parallel;
  std::optional<std::string> out_dir;  // write reports when set
};

struct PipelineResult {
  DispatchRun run;
  PriceSchedule prices;
  Settlement energy;
  Settlement double_rule;
  SurplusReport surplus;
  StationarityResiduals worst_stationarity;
  int exit_code = kExitOk;
  std::string message;
};

/// Runs the whole chain on a validated case. Solver failures and identity
/// violations are reported through exit_code, not exceptions.
PipelineResult run_pipeline(const CaseDefinition& c, const PipelineOptions& options);

/// Report writers (atomic; CSV with '.' decimal separator, LF endings).
void write_reports(const CaseDefinition& c, const PipelineResult& r,
                   const std::string& out_dir);

/// Table 3/4/5-style text block.
std::string summary_text(const CaseDefinition& c, const PipelineResult& r);

}  // namespace hgp
