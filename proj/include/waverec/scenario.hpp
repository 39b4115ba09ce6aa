#ifndef WAVEREC_SCENARIO_HPP
#define WAVEREC_SCENARIO_HPP

#include <string>

#include <json.hpp>

#include "waverec/types.hpp"

namespace waverec::scenario {

using Json = nlohmann::ordered_json;

struct RunOptions {
  double tol = 1e-9;
  int fock_dim = 64;
  std::uint64_t seed = 1;
  int max_iters = 500;
  std::string csv_dir;   // empty: no CSV tables
  bool verify = false;   // run the oracle cross-check inline
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 input error, 2 no-convergence / certificate failure
  Json report;
  std::string summary;  // one-line human summary for stdout
};

/// Parse options from the scenario's "options" object over the defaults.
RunOptions merge_options(const Json& scenario, RunOptions base);

/// Dispatch a parsed scenario. Throws SchemaError on malformed input.
RunOutcome run_scenario(const Json& scenario, const RunOptions& opts);

/// Load + dispatch; never throws, maps errors to exit codes.
RunOutcome run_scenario_file(const std::string& path, RunOptions opts);

/// Oracle cross-check of a previously written report.
RunOutcome verify_report(const Json& report, const RunOptions& opts);
/// Load a report file (or a {"kind": "verify"} scenario wrapping one) and
/// cross-check it; never throws.
RunOutcome verify_report_file(const std::string& path, RunOptions opts);

std::string schema_text();
std::uint64_t digest(const std::string& canonical);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& where);

}  // namespace waverec::scenario

#endif
