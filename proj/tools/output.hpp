#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

// File output shared by the commands: CSV number formatting, whole-file
// writes and the run manifest written next to each output.

namespace coupled::cli {

/// Unwritable output path; maps to exit code 2.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest-exact "{:.17g}" form, "nan" for a failed value. Locale independent.
std::string csv_number(double v);

/// Every flag of the invocation, defaults included, as canonical strings.
using FlagSet = std::map<std::string, std::string>;

struct RunInfo {
  std::string command;
  FlagSet flags;
  std::uint64_t seed = 0;
};

/// Writes `content` to `path`, then `<path>.manifest.json` with the command,
/// flags, seed, library version and CRC-32 of the content.
void write_output(const std::string& path, const std::string& content, const RunInfo& run);

std::uint32_t crc32_of(const std::string& content);

}  // namespace coupled::cli
