/// @file store.hpp
/// Checkpoints, run manifests and resume.
///
/// Checkpoint layout (host byte order, little-endian on supported targets):
///   char[8]  magic "BFSICKP1"
///   uint32   version (1)
///   int32    nx, nz
///   uint32   reserved (0)
///   float64  L, t
///   int64    step
///   uint64   len(u), len(p), len(eta), len(eta_dot)
///   float64  u[], p[], eta[], eta_dot[]
///   uint8[32] SHA-256 of every preceding byte
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "beamfsi/solver.hpp"

namespace beamfsi::store {

namespace fs = std::filesystem;

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Receipt {
  fs::path path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

Receipt save_checkpoint(const SimState& s, const fs::path& path);
/// Throws IoError when the file cannot be opened and HashMismatchError when
/// it is truncated or its trailer does not match the content.
SimState load_checkpoint(const fs::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

std::string params_hash(const Params& p);
std::string grid_hash(const FluidGrid& g);
std::string code_version();

struct FileEntry {
  std::string path;  // relative to the run directory
  std::string kind;  // checkpoint | ledger | events | table | report | profile
  std::string sha256;
  double t = -1.0;
  long step = -1;
};

struct RunManifest {
  std::string config_text;
  std::string config_hash;
  std::string code_version;
  std::string grid_hash;
  std::string params_hash;
  std::vector<FileEntry> files;
  double wall_seconds = 0.0;
  long steps = 0;
  double seconds_per_step = 0.0;

  void save(const fs::path& path) const;
  static RunManifest load(const fs::path& path);
  /// Throws IoError for a missing file and HashMismatchError for a changed one.
  void verify(const fs::path& dir) const;
  /// Adds or replaces the entry for rel and records its hash.
  void index(const fs::path& dir, const std::string& rel, const std::string& kind, double t = -1.0,
             long step = -1);
};

/// Observer target for run(): writes content-addressed checkpoints into
/// dir/checkpoints and indexes them.
class RunWriter {
 public:
  RunWriter(fs::path dir, const RunConfig& cfg, std::string config_text, int checkpoint_every);

  StepObserver observer();
  /// Writes ledger.csv and events.json, updates and saves manifest.json.
  const RunManifest& finish(const Trajectory& tr, double wall_seconds);
  const RunManifest& manifest() const { return manifest_; }

 private:
  void on_step(const SimState& s, const StepRecord& r);

  fs::path dir_;
  int every_;
  RunManifest manifest_;
};

void write_ledger_csv(const Trajectory& tr, const fs::path& path, const std::string& config_hash);
void write_events_json(const Trajectory& tr, const fs::path& path);

/// Latest indexed checkpoint with t at or before the requested time.  Throws
/// ConfigError when params or grid differ from the manifest and IoError when
/// no checkpoint qualifies.
SimState resume(const RunManifest& m, const fs::path& dir, double t, const RunConfig& cfg);

}  // namespace beamfsi::store
