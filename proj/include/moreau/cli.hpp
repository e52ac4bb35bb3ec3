#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moreau/aw_metric.hpp"

namespace moreau {
namespace cli {

// Exit codes: one per failure class so scripts can branch on them.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;         // unknown subcommand / malformed invocation
inline constexpr int kValidation = 2;    // bad function spec or parameter out of range
inline constexpr int kBudget = 3;        // oracle iteration budget exhausted
inline constexpr int kVerification = 4;  // a theory-guaranteed check failed

struct GridSpec {
  double min = -3.0;
  double max = 3.0;
  double step = 0.01;
};

struct CommandRequest {
  std::string subcommand;
  std::vector<std::string> function_specs;  // catalog:NAME | paper.NAME | @file.json | inline JSON
  double accuracy = 1e-6;
  double eps = 0.5;
  int m = 1;
  int depth = 8;  // --M
  double x = 0.0;
  bool has_x = false;
  GridSpec grid;
  std::string family;       // epi-probe built-in family
  int count = 100;          // epi-probe family size
  double shift_const = 0.0; // epi-probe family constant
  double center = 0.0;      // epi-probe family center
  std::string balls = "1,2";
  double tol = 1e-3;
  std::string format = "json";  // json | csv
  std::string out;              // empty: stdout
};

struct RunResult {
  int status = kOk;
  std::string payload;     // JSON or CSV text
  std::string error_line;  // one-line machine-readable error object when status != 0
};

/// Resolves a function spec against the catalog, a @file, or inline JSON.
/// Inline and file PLQ functions must pass check_convexity.
FunctionHandle parse_function_spec(const std::string& spec);

/// Dispatches a validated request and serializes the result.
RunResult run(const CommandRequest& request);

/// argv-level entry used by the binary; writes payload to request.out or
/// stdout and the error object to stderr.
int main_entry(int argc, const char* const* argv);

/// Deterministic shortest round-trip formatting ("." decimal separator,
/// "inf"/"-inf" tokens).
std::string fmt_double(double v);

}  // namespace cli
}  // namespace moreau
