#include <gtest/gtest.h>

#include <fstream>

#include "beamfsi/config.hpp"
#include "support/fixtures.hpp"

using namespace beamfsi;
namespace fs = std::filesystem;

namespace {
const fs::path kConfigs = BEAMFSI_CONFIG_DIR;
}

TEST(Toml, ParsesTheSupportedSubset) {
  const config::Document d = config::parse_toml(R"(
top = 1
[a]
x = 1_000.5   # comment
s = "he said \"hi\""
flag = true
arr = [0.1, 0.05, 2e-3]
[a.b]
y = -3
)");
  EXPECT_EQ(std::get<double>(d.at("").at("top").v), 1.0);
  EXPECT_EQ(std::get<double>(d.at("a").at("x").v), 1000.5);
  EXPECT_EQ(std::get<std::string>(d.at("a").at("s").v), "he said \"hi\"");
  EXPECT_TRUE(std::get<bool>(d.at("a").at("flag").v));
  const auto& arr = std::get<config::Array>(d.at("a").at("arr").v);
  ASSERT_EQ(arr.size(), 3u);
  EXPECT_EQ(std::get<double>(arr[2].v), 2e-3);
  EXPECT_EQ(std::get<double>(d.at("a.b").at("y").v), -3.0);
}

TEST(Toml, MalformedInputIsRejected) {
  EXPECT_THROW(config::parse_toml("[a]\nx = \n"), ConfigError);
  EXPECT_THROW(config::parse_toml("[a\nx = 1\n"), ConfigError);
  EXPECT_THROW(config::parse_toml("[a]\nx = 1\nx = 2\n"), ConfigError);
  EXPECT_THROW(config::parse_toml("[a]\n[a]\n"), ConfigError);
  EXPECT_THROW(config::parse_toml("x = \"open\n"), ConfigError);
  EXPECT_THROW(config::parse_toml("x = [1, 2\n"), ConfigError);
}

TEST(Config, ShippedConfigsLoadAndValidate) {
  for (const char* name : {"rest.toml", "bump.toml", "contact.toml"}) {
    SCOPED_TRACE(name);
    const config::SimConfig c = config::load(kConfigs / name);
    EXPECT_NO_THROW(c.validate());
    EXPECT_NO_THROW(config::raw_initial_data(c));
  }
  const config::SimConfig b = config::load(kConfigs / "bump.toml");
  EXPECT_EQ(b.run.grid.nx, 32);
  EXPECT_EQ(b.gammas, (Vec{0.1, 0.05, 0.025, 0.0125}));
  const config::SimConfig k = config::load(kConfigs / "contact.toml");
  EXPECT_EQ(k.run.params.gamma, 0.0);
  EXPECT_EQ(k.run.eps_c, 0.25);
}

TEST(Config, UnknownNamesAndBadValuesAreRejected) {
  EXPECT_THROW(config::parse("[grid]\nnx = 16\nnzz = 8\n"), ConfigError);
  EXPECT_THROW(config::parse("[gird]\nnx = 16\n"), ConfigError);
  EXPECT_THROW(config::parse("[grid]\nnx = \"16\"\n"), ConfigError);
  EXPECT_THROW(config::parse("[grid]\nnx = 16.5\n"), ConfigError);
  EXPECT_THROW(config::parse("[params]\nmu = -1\n"), ConfigError);
  EXPECT_THROW(config::parse("[coupling]\nmode = \"sideways\"\n"), ConfigError);
  EXPECT_THROW(config::parse("[sweep]\ngammas = [0.1, 0.2]\n"), ConfigError);
  EXPECT_THROW(config::load("/nonexistent/beamfsi.toml"), IoError);
}

TEST(Config, CanonicalTextRoundTrips) {
  const config::SimConfig a = config::load(kConfigs / "bump.toml");
  const std::string text = a.to_toml();
  const config::SimConfig b = config::parse(text, a.base_dir);
  EXPECT_EQ(b.to_toml(), text);
  EXPECT_EQ(b.run.params.gamma, a.run.params.gamma);
  EXPECT_EQ(b.run.dt, a.run.dt);
  EXPECT_EQ(b.eta0.amplitude, a.eta0.amplitude);
  EXPECT_EQ(b.gammas, a.gammas);
}

TEST(Config, FileProfileResolvesRelativeToConfig) {
  support::TempDir dir("cfg");
  const int n = 16;
  Profile eta = Profile::sample([](double x) { return -0.1 * std::cos(2 * std::numbers::pi * x); }, n, 1.0);
  write_profile_csv(dir.path() / "eta0.csv", eta);
  std::ofstream(dir.path() / "run.toml") << "[grid]\nnx = 16\nnz = 8\n"
                                            "[initial.eta0]\nkind = \"file\"\nfile = \"eta0.csv\"\n";
  const config::SimConfig c = config::load(dir.path() / "run.toml");
  const InitialData d = config::raw_initial_data(c);
  for (int i = 0; i < n; ++i) EXPECT_EQ(d.eta0[i], eta.h[i]);

  std::ofstream(dir.path() / "bad.toml") << "[grid]\nnx = 32\nnz = 8\n"
                                            "[initial.eta0]\nkind = \"file\"\nfile = \"eta0.csv\"\n";
  EXPECT_THROW(config::raw_initial_data(config::load(dir.path() / "bad.toml")), ConfigError);
}

TEST(Config, ZeroVelocityRequiresZeroBeamVelocity) {
  const config::SimConfig c = config::parse(
      "[initial]\nu0 = \"zero\"\n[initial.eta1]\nkind = \"cosine\"\namplitude = 0.1\n");
  EXPECT_THROW(config::raw_initial_data(c), ConfigError);
}
