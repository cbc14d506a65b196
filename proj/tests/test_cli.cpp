#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "beamfsi/store.hpp"
#include "support/fixtures.hpp"

using namespace beamfsi;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = BEAMFSI_CONFIG_DIR;

int cli(const std::string& args) {
  const std::string cmd = std::string(BEAMFSI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string cfg(const char* name) { return "--config " + (kConfigs / name).string(); }

}  // namespace

TEST(Cli, ValidateShippedConfigs) {
  EXPECT_EQ(cli("validate " + cfg("rest.toml")), 0);
  EXPECT_EQ(cli("validate " + cfg("bump.toml")), 0);
}

TEST(Cli, BadInputsExitWithTwo) {
  support::TempDir dir("cli_bad");
  std::ofstream(dir.path() / "bad.toml") << "[grid]\nnx = 16\nbogus = 1\n";
  EXPECT_EQ(cli("validate --config " + (dir.path() / "bad.toml").string()), 2);
  EXPECT_EQ(cli("validate --config " + (dir.path() / "missing.toml").string()), 2);
  EXPECT_EQ(cli("run " + cfg("rest.toml")), 2);  // --out missing
  EXPECT_EQ(cli("frobnicate"), 2);
  std::ofstream(dir.path() / "occupied") << "x";
  EXPECT_EQ(cli("run " + cfg("rest.toml") + " --out " + dir.path().string()), 2);
}

TEST(Cli, RunWritesVerifiableManifest) {
  support::TempDir dir("cli_run");
  const fs::path out = dir.path() / "rest";
  ASSERT_EQ(cli("run " + cfg("rest.toml") + " --out " + out.string()), 0);
  const store::RunManifest m = store::RunManifest::load(out / "manifest.json");
  EXPECT_NO_THROW(m.verify(out));
  EXPECT_EQ(m.steps, 100);
  EXPECT_EQ(m.config_hash, store::sha256_hex(m.config_text));
  const auto ev = read_json(out / "events.json");
  EXPECT_FALSE(ev.at("halted").get<bool>());
  EXPECT_TRUE(fs::exists(out / "ledger.csv"));
}

TEST(Cli, ContactRunHaltsWithExitFour) {
  support::TempDir dir("cli_contact");
  const fs::path out = dir.path() / "contact";
  ASSERT_EQ(cli("run " + cfg("contact.toml") + " --nx 16 --nz 8 --dt 2e-3 --out " + out.string()), 4);
  const auto ev = read_json(out / "events.json");
  EXPECT_TRUE(ev.at("halted").get<bool>());
  ASSERT_EQ(ev.at("events").size(), 1u);
  const auto& e = ev.at("events")[0];
  EXPECT_GT(e.at("time").get<double>(), 0.0);
  EXPECT_LE(e.at("min_height").get<double>(), 0.25);
  EXPECT_EQ(e.at("phase").get<std::string>(), "halted");
}

TEST(Cli, SweepProducesReportTables) {
  support::TempDir dir("cli_sweep");
  const fs::path out = dir.path() / "sweep";
  ASSERT_EQ(cli("sweep " + cfg("bump.toml") + " --nx 8 --nz 4 --dt 1e-2 --gammas 0.1,0.05 --out " +
                out.string()),
            0);
  const auto r = read_json(out / "sweep_report.json");
  EXPECT_EQ(r.at("members").size(), 2u);
  EXPECT_TRUE(r.contains("fluid_cauchy"));
  EXPECT_TRUE(r.contains("beam_cauchy"));
  EXPECT_TRUE(fs::exists(out / "tables" / "members.csv"));
  EXPECT_TRUE(fs::exists(out / "tables" / "cauchy.csv"));
  const store::RunManifest m = store::RunManifest::load(out / "manifest.json");
  EXPECT_NO_THROW(m.verify(out));
  EXPECT_EQ(cli("sweep " + cfg("bump.toml") + " --gammas 0.05,0.1 --out " + (dir.path() / "x").string()), 2);
}

TEST(Cli, ProjectorStudyReportsDecreasingErrors) {
  support::TempDir dir("cli_proj");
  const fs::path out = dir.path() / "proj";
  ASSERT_EQ(cli("study-projector " + cfg("bump.toml") + " --nx 32 --out " + out.string()), 0);
  const auto r = read_json(out / "study_projector.json");
  EXPECT_TRUE(r.at("decreasing").get<bool>());
}
