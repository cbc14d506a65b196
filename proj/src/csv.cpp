#include "beamfsi/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace beamfsi::csv {

std::string format(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write(const std::filesystem::path& path, const Table& t) {
  if (t.header.size() != t.columns.size()) throw ConfigError("csv: header/column count mismatch");
  const size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
  for (const auto& c : t.columns) {
    if (c.size() != rows) throw ConfigError("csv: ragged columns");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
  for (const auto& [name, value] : t.tags) out << (t.header.empty() ? "" : ",") << name;
  out << '\n';
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << format(t.columns[c][r]);
    for (const auto& [name, value] : t.tags) out << (t.columns.empty() ? "" : ",") << value;
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path.string());
  std::stringstream hs(line);
  std::string cell;
  std::vector<std::string> names;
  while (std::getline(hs, cell, ',')) names.push_back(cell);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<std::string> row;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (row.size() != names.size()) throw IoError("csv row length mismatch in " + path.string());
    rows.push_back(std::move(row));
  }
  auto numeric = [](const std::string& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return !s.empty() && end == s.c_str() + s.size();
  };
  Table t;
  for (size_t c = 0; c < names.size(); ++c) {
    if (!rows.empty() && !numeric(rows.front()[c])) {
      t.tags.emplace_back(names[c], rows.front()[c]);
      continue;
    }
    Vec col;
    for (const auto& r : rows) {
      if (!numeric(r[c])) throw IoError("non-numeric cell in column " + names[c]);
      col.push_back(std::stod(r[c]));
    }
    t.header.push_back(names[c]);
    t.columns.push_back(std::move(col));
  }
  return t;
}

}  // namespace beamfsi::csv
