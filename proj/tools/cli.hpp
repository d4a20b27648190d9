#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "renyi/reference.hpp"
#include "renyi/solver.hpp"

namespace renyi::cli {

enum class Command { solve, sweep, verify, duality, thermo, divergence };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::solve;
  std::string ref_spec = "uniform:0,1";
  std::string ref2_spec;
  std::optional<double> alpha;
  std::optional<double> m;
  Kind kind = Kind::C;
  std::optional<std::pair<double, double>> gamma_range;
  std::size_t grid_n = 2048;
  std::string format = "json";
  std::optional<std::string> output_path;
  std::size_t threads = 1;
  std::uint64_t seed = 0x5eed2024;
  std::vector<std::string> suites;
  std::size_t count = 9;
};

/// Parses `x<TAB>q` lines; `#` lines and blank lines are skipped.
std::vector<TabulatedRow> parse_tabulated(std::istream& in);

/// "family:p1,p2" or "@path".
ReferenceDistribution parse_ref_spec(const std::string& spec);

/// Serializes with every double printed as %.17g (non-finite values become null).
std::string dump_json(const nlohmann::ordered_json& j);

/// Full command line; returns the exit status (0 ok, 1 usage, 2 computation).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_duality(const RunConfig& cfg, std::ostream& out);
int cmd_thermo(const RunConfig& cfg, std::ostream& out);
int cmd_divergence(const RunConfig& cfg, std::ostream& out);

/// One verification suite outcome.
struct SuiteResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;
  std::string detail;
};

const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const RunConfig& cfg);

}  // namespace renyi::cli
