/// @file csv.hpp
/// Plain comma-separated column files with one header line.
#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "beamfsi/common.hpp"

namespace beamfsi::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<Vec> columns;
  /// Text columns holding one value repeated on every row (e.g. a config hash).
  std::vector<std::pair<std::string, std::string>> tags;
};

void write(const std::filesystem::path& path, const Table& t);
Table read(const std::filesystem::path& path);

/// Round-trippable decimal form of a double.
std::string format(double v);

}  // namespace beamfsi::csv
