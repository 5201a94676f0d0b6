#pragma once

#include "weylprior/errors.hpp"
#include "weylprior/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace weylprior::cli {

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Thrown by parse_command_line for --help; what() is the usage text.
class HelpRequested : public UsageError {
 public:
  using UsageError::UsageError;
};

enum class Subcommand { tensor, check, prior, posterior, verify_all };

/// Everything a run depends on; two equal configs produce identical output.
struct RunConfig {
  Subcommand command = Subcommand::tensor;
  std::string model = "gaussian1d";
  std::string chart;  // empty: the model's reference chart
  std::optional<std::vector<double>> theta;
  GeometryOptions geometry;

  // check
  std::string what;
  std::optional<double> alpha;
  std::optional<double> tolerance;
  std::string connection = "alpha";
  std::vector<std::string> lambdas;
  std::optional<std::string> path;

  // prior / posterior
  std::string kind = "jeffreys";
  std::optional<std::vector<double>> anchor;
  std::string grid;
  bool normalize = false;
  std::string prior_file;
  std::string data_file;
  std::size_t demo_n = 0;
  std::optional<std::uint64_t> seed;

  std::string out;
  std::string format;  // csv | json; empty picks the subcommand default
};

/// Exit statuses: 0 success, 1 failed check or runtime error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv (argv[0] is the program name). Throws UsageError.
RunConfig parse_command_line(const std::vector<std::string>& args);

/// Executes one run, writing results to `out` (or the --out file) and
/// diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_command_line + run with exit-status mapping; `--help` prints usage.
/// `args` is the full argv, program name first.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weylprior::cli
