#pragma once

// The htp command line: configuration, subcommand dispatch and exit codes
// (0 pass, 1 invariant failure, 2 usage error).

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace htp::cli {

extern const char* const kVersion;

struct RunConfig {
  /// Hankel tabulation and kernel-form quadrature accuracy.
  double quad_tol = 1e-10;
  /// Limit for `transplant apply --check`.
  double cross_check_tol = 1e-4;
  int grid_n = 64;
  double x_min = 0.1;
  double x_max = 8.0;
  /// "linear" or "log".
  std::string grid_spacing = "linear";
  /// 0 leaves the count to HTP_WORKERS or the OpenMP default.
  int workers = 0;
  /// "csv" or "json".
  std::string format = "csv";
  std::uint64_t seed = 1;

  /// Throws DomainError when an invariant fails.
  void validate() const;
  /// key=value lines in a fixed order, without the worker count (results do
  /// not depend on it).
  std::string canonical() const;
};

/// Applies "key = value" lines ('#' starts a comment) on top of `cfg`.
/// Unknown keys and malformed values throw DomainError.
void apply_config_text(RunConfig& cfg, const std::string& text);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace htp::cli
