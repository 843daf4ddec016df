#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace treedim::cli {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kFailed = 1, kError = 2 };

struct RunConfig {
  std::string command;
  std::vector<std::string> specs;  ///< fixture names or spec file paths
  std::size_t levels = 0;          ///< 0 = command default
  std::size_t window = 0;          ///< k (abel, orbits, rist) or diagnostic window (dim)
  std::size_t cap_points = 1 << 14;
  double tol = 0.02;
  std::string cache_dir;
  std::string format;  ///< json | csv | text; empty = command default
  std::string out;     ///< empty = stdout
  unsigned jobs = 0;
  std::string vertex;            ///< rist: a single vertex instead of a whole level
  std::vector<std::string> h;    ///< verify-gk: H as cycle strings
  std::string k;                 ///< verify-gk: K fixture or spec path
};

/// Parses argv into a config. Returns false after printing help or an error
/// to `err`; `exit_code` then holds the process status.
bool parse_args(int argc, const char* const* argv, RunConfig& config, int& exit_code,
                std::ostream& out, std::ostream& err);

/// Runs one command. Reports go to `config.out` (written atomically) or `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace treedim::cli
