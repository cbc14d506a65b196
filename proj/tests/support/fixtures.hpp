// Shared builders for the unit and acceptance tests.
#pragma once

#include <random>

#include "beamfsi/config.hpp"
#include "beamfsi/diagnostics.hpp"

namespace beamfsi::support {

/// Cosine-bump run matching configs/bump.toml.
RunConfig bump_run(int nx = 32, int nz = 16, double dt = 1e-3, double T = 0.25);
InitialData bump_data(const FluidGrid& g, double amplitude = -0.1);

/// Smooth periodic profile with min in [0, 0.3] (some members touch zero).
Profile random_profile(std::mt19937& rng, int n, double L = 1.0);

/// Random stream function on a container whose face heights vanish on a
/// run of columns; Psi is zero there, below y = 0 and equals b above the graph.
StreamFunction random_contact_stream(std::mt19937& rng, int nx, int cells_per_unit, double L = 1.0);

/// Temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace beamfsi::support
