#include "output.hpp"

#include <cmath>
#include <fstream>

#include <boost/crc.hpp>
#include <fmt/format.h>

#include "json.hpp"

namespace coupled::cli {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

std::uint32_t crc32_of(const std::string& content) {
  boost::crc_32_type crc;
  crc.process_bytes(content.data(), content.size());
  return crc.checksum();
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError(fmt::format("cannot open '{}' for writing", path));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw OutputError(fmt::format("failed writing '{}'", path));
}

}  // namespace

void write_output(const std::string& path, const std::string& content, const RunInfo& run) {
  write_file(path, content);
  nlohmann::ordered_json m;
  m["schema"] = 1;
  m["command"] = run.command;
  m["flags"] = run.flags;
  m["seed"] = run.seed;
  m["version"] = COUPLED_VERSION;
  m["output"] = path;
  m["bytes"] = content.size();
  m["crc32"] = fmt::format("{:08x}", crc32_of(content));
  write_file(path + ".manifest.json", m.dump(2) + "\n");
}

}  // namespace coupled::cli
