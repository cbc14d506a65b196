/// @file config.hpp
/// Run configuration files: a small TOML subset.
///
/// Supported syntax: `[section]` and `[section.sub]` headers, `key = value`
/// with numbers, booleans, double-quoted strings and flat arrays of those,
/// and `#` comments.  Unknown sections or keys are rejected.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "beamfsi/diagnostics.hpp"

namespace beamfsi::config {

struct Value;
using Array = std::vector<Value>;
struct Value {
  std::variant<double, bool, std::string, Array> v;
  int line = 0;
};

/// section name -> key -> value; keys outside any section live under "".
using Document = std::map<std::string, std::map<std::string, Value>>;

Document parse_toml(const std::string& text);

struct ProfileSpec {
  std::string kind = "zero";  // zero | cosine | bump | file
  double amplitude = 0.0;
  int mode = 1;
  double phase = 0.0;
  double center = 0.5;
  double width = 0.1;
  std::string file;

  Vec sample(int n, double L, const std::filesystem::path& base_dir) const;
};

struct SimConfig {
  RunConfig run;
  double M = 2.0;
  int cells_per_unit = 16;

  ProfileSpec eta0;
  ProfileSpec eta1;
  std::string u0 = "lift";  // zero | lift
  double lift_lambda = 0.0;  // 0 selects half the initial minimum height
  bool regularize = false;   // regularize with params.gamma before a single run

  int checkpoint_every = 0;  // 0 disables checkpoints

  Vec gammas;
  double delta = 0.1;
  int workers = 0;

  std::filesystem::path base_dir;  // resolves relative profile files

  /// Throws ConfigError on the first inconsistent value.
  void validate() const;
  /// Canonical text of the resolved configuration; parses back to the same values.
  std::string to_toml() const;
};

SimConfig from_document(const Document& d, const std::filesystem::path& base_dir = {});
SimConfig parse(const std::string& text, const std::filesystem::path& base_dir = {});
/// Throws IoError when unreadable and ConfigError when malformed.
SimConfig load(const std::filesystem::path& path);

/// Initial data described by the config, regularized when requested.
InitialData build_initial_data(const SimConfig& c);
/// Unregularized initial data.
InitialData raw_initial_data(const SimConfig& c);

SweepOptions sweep_options(const SimConfig& c);

}  // namespace beamfsi::config
