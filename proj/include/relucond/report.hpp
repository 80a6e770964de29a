#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relucond/experiments.hpp"
#include "relucond/types.hpp"

namespace relucond {

/// Shortest decimal representation that round-trips the exact double.
/// Infinities serialize as "inf"/"-inf"; both JSON and CSV use this one
/// formatter so the two encodings carry identical numeric content.
std::string fmt_double(double v);

/// A finished run: the fully resolved configuration (strings, in flag
/// order) plus result rows.  --workers is deliberately not part of the
/// config: it may never influence output bytes.
struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  ExperimentReport results;
  double runtime_ms = 0.0;
};

std::string to_json(const RunReport& report);
std::string to_csv(const RunReport& report);

/// Text format: first line "m n", then m lines of n whitespace-separated
/// reals.  Rejects NaN/Inf and shape mismatches with the offending line
/// number in the message.
Matrix read_matrix_file(const std::string& path);
Matrix parse_matrix(const std::string& text, const std::string& origin);
void write_matrix_file(const std::string& path, const Matrix& a);

}  // namespace relucond
