#include "beamfsi/store.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "beamfsi/csv.hpp"
#include "beamfsi/diagnostics.hpp"

#ifndef BEAMFSI_VERSION
#define BEAMFSI_VERSION "0.0.0"
#endif

namespace beamfsi::store {

namespace {

constexpr char kMagic[8] = {'B', 'F', 'S', 'I', 'C', 'K', 'P', '1'};
constexpr size_t kDigest = SHA256_DIGEST_LENGTH;

template <class T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_array(std::string& buf, const Vec& v) {
  buf.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}

class Reader {
 public:
  Reader(const std::string& b, size_t end) : b_(b), end_(end) {}
  template <class T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  Vec array(std::uint64_t n) {
    if (n > (end_ - pos_) / sizeof(double)) throw HashMismatchError("checkpoint: array exceeds file");
    Vec v(n);
    std::memcpy(v.data(), b_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  size_t pos() const { return pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > end_) throw HashMismatchError("checkpoint: truncated header");
  }
  const std::string& b_;
  size_t end_;
  size_t pos_ = 0;
};

std::string hex(const unsigned char* d, size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (size_t i = 0; i < n; ++i) {
    s[2 * i] = digits[d[i] >> 4];
    s[2 * i + 1] = digits[d[i] & 15];
  }
  return s;
}

std::string serialize(const SimState& s) {
  std::string buf;
  buf.append(kMagic, 8);
  put(buf, kCheckpointVersion);
  put(buf, static_cast<std::int32_t>(s.fluid.grid.nx));
  put(buf, static_cast<std::int32_t>(s.fluid.grid.nz));
  put(buf, std::uint32_t{0});
  put(buf, s.fluid.grid.L);
  put(buf, s.t);
  put(buf, static_cast<std::int64_t>(s.step));
  for (const Vec* v : {&s.fluid.u, &s.fluid.p, &s.beam.eta, &s.beam.eta_dot})
    put(buf, static_cast<std::uint64_t>(v->size()));
  for (const Vec* v : {&s.fluid.u, &s.fluid.p, &s.beam.eta, &s.beam.eta_dot}) put_array(buf, *v);
  unsigned char d[kDigest];
  SHA256(reinterpret_cast<const unsigned char*>(buf.data()), buf.size(), d);
  buf.append(reinterpret_cast<const char*>(d), kDigest);
  return buf;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string g17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char d[kDigest];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), d);
  return hex(d, kDigest);
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_all(path)); }

Receipt save_checkpoint(const SimState& s, const fs::path& path) {
  const std::string bytes = serialize(s);
  write_all(path, bytes);
  return {path, sha256_hex(bytes), bytes.size()};
}

SimState load_checkpoint(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
  const std::string b = read_all(path);
  if (b.size() < 8 + kDigest || std::memcmp(b.data(), kMagic, 8) != 0) {
    throw HashMismatchError("checkpoint: bad magic or truncated file " + path.string());
  }
  const size_t body = b.size() - kDigest;
  unsigned char d[kDigest];
  SHA256(reinterpret_cast<const unsigned char*>(b.data()), body, d);
  if (std::memcmp(d, b.data() + body, kDigest) != 0) {
    throw HashMismatchError("checkpoint: content hash mismatch in " + path.string());
  }
  Reader r(b, body);
  r.get<std::uint64_t>();  // magic
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  }
  SimState s;
  s.fluid.grid.nx = r.get<std::int32_t>();
  s.fluid.grid.nz = r.get<std::int32_t>();
  r.get<std::uint32_t>();
  s.fluid.grid.L = r.get<double>();
  s.t = r.get<double>();
  s.step = r.get<std::int64_t>();
  std::uint64_t n[4];
  for (auto& k : n) k = r.get<std::uint64_t>();
  s.fluid.u = r.array(n[0]);
  s.fluid.p = r.array(n[1]);
  s.beam.eta = r.array(n[2]);
  s.beam.eta_dot = r.array(n[3]);
  const FluidGrid& g = s.fluid.grid;
  if (r.pos() != body || g.nx <= 0 || g.nz <= 0 || n[0] != static_cast<std::uint64_t>(g.nu()) ||
      n[1] != static_cast<std::uint64_t>(g.np()) || n[2] != static_cast<std::uint64_t>(g.nx) ||
      n[3] != static_cast<std::uint64_t>(g.nx)) {
    throw IoError("checkpoint: inconsistent array lengths in " + path.string());
  }
  return s;
}

std::string params_hash(const Params& p) {
  std::string s = "rho_f=" + g17(p.rho_f) + ";rho_s=" + g17(p.rho_s) + ";mu=" + g17(p.mu) +
                  ";alpha=" + g17(p.alpha) + ";beta=" + g17(p.beta) + ";gamma=" + g17(p.gamma) +
                  ";L=" + g17(p.L);
  return sha256_hex(s);
}

std::string grid_hash(const FluidGrid& g) {
  return sha256_hex("nx=" + std::to_string(g.nx) + ";nz=" + std::to_string(g.nz) + ";L=" + g17(g.L));
}

std::string code_version() { return BEAMFSI_VERSION; }

// ---- manifest --------------------------------------------------------------

void RunManifest::save(const fs::path& path) const {
  nlohmann::json j;
  j["schema"] = "beamfsi.manifest/1";
  j["code_version"] = code_version;
  j["config"] = {{"text", config_text}, {"sha256", config_hash}};
  j["grid_hash"] = grid_hash;
  j["params_hash"] = params_hash;
  j["files"] = nlohmann::json::array();
  for (const auto& f : files) {
    nlohmann::json e = {{"path", f.path}, {"kind", f.kind}, {"sha256", f.sha256}};
    if (f.step >= 0) {
      e["t"] = f.t;
      e["step"] = f.step;
    }
    j["files"].push_back(e);
  }
  j["wall_clock"] = {{"seconds", wall_seconds}, {"steps", steps}, {"seconds_per_step", seconds_per_step}};
  write_all(path, j.dump(2) + "\n");
}

RunManifest RunManifest::load(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_all(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest: " + std::string(e.what()));
  }
  RunManifest m;
  try {
    m.code_version = j.at("code_version").get<std::string>();
    m.config_text = j.at("config").at("text").get<std::string>();
    m.config_hash = j.at("config").at("sha256").get<std::string>();
    m.grid_hash = j.at("grid_hash").get<std::string>();
    m.params_hash = j.at("params_hash").get<std::string>();
    for (const auto& e : j.at("files")) {
      FileEntry f;
      f.path = e.at("path").get<std::string>();
      f.kind = e.at("kind").get<std::string>();
      f.sha256 = e.at("sha256").get<std::string>();
      if (e.contains("step")) {
        f.step = e.at("step").get<long>();
        f.t = e.at("t").get<double>();
      }
      m.files.push_back(f);
    }
    const auto& w = j.at("wall_clock");
    m.wall_seconds = w.at("seconds").get<double>();
    m.steps = w.at("steps").get<long>();
    m.seconds_per_step = w.at("seconds_per_step").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest: " + std::string(e.what()));
  }
  return m;
}

void RunManifest::verify(const fs::path& dir) const {
  for (const auto& f : files) {
    const fs::path p = dir / f.path;
    if (!fs::exists(p)) throw IoError("manifest: missing file " + f.path);
    if (sha256_file(p) != f.sha256) throw HashMismatchError("manifest: hash mismatch for " + f.path);
  }
}

void RunManifest::index(const fs::path& dir, const std::string& rel, const std::string& kind, double t,
                        long step) {
  FileEntry e{rel, kind, sha256_file(dir / rel), t, step};
  for (auto& f : files)
    if (f.path == rel) {
      f = e;
      return;
    }
  files.push_back(e);
}

// ---- run writer ------------------------------------------------------------

RunWriter::RunWriter(fs::path dir, const RunConfig& cfg, std::string config_text, int checkpoint_every)
    : dir_(std::move(dir)), every_(checkpoint_every) {
  fs::create_directories(dir_ / "checkpoints");
  manifest_.config_hash = sha256_hex(config_text);
  manifest_.config_text = std::move(config_text);
  manifest_.code_version = code_version();
  manifest_.grid_hash = grid_hash(cfg.grid);
  manifest_.params_hash = params_hash(cfg.params);
}

StepObserver RunWriter::observer() {
  return [this](const SimState& s, const StepRecord& r, bool) { on_step(s, r); };
}

void RunWriter::on_step(const SimState& s, const StepRecord&) {
  if (every_ <= 0 || s.step % every_ != 0) return;
  const std::string bytes = serialize(s);
  const std::string h = sha256_hex(bytes);
  const std::string rel = "checkpoints/" + h.substr(0, 16) + ".ckpt";
  if (!fs::exists(dir_ / rel)) write_all(dir_ / rel, bytes);
  FileEntry e{rel, "checkpoint", h, s.t, s.step};
  bool seen = false;
  for (const auto& f : manifest_.files) seen = seen || (f.path == rel);
  if (!seen) manifest_.files.push_back(e);
}

const RunManifest& RunWriter::finish(const Trajectory& tr, double wall_seconds) {
  write_ledger_csv(tr, dir_ / "ledger.csv", manifest_.config_hash);
  manifest_.index(dir_, "ledger.csv", "ledger");
  write_events_json(tr, dir_ / "events.json");
  manifest_.index(dir_, "events.json", "events");
  manifest_.wall_seconds = wall_seconds;
  manifest_.steps = tr.records.empty() ? 0 : tr.records.back().step;
  manifest_.seconds_per_step = manifest_.steps > 0 ? wall_seconds / manifest_.steps : 0.0;
  manifest_.save(dir_ / "manifest.json");
  return manifest_;
}

void write_ledger_csv(const Trajectory& tr, const fs::path& path, const std::string& config_hash) {
  const EnergyLedger led = energy_ledger(tr.records);
  csv::Table t;
  t.header = {"step", "t", "dt", "fluid_kinetic", "beam_kinetic", "elastic", "total",
              "viscous_cum", "damping_cum", "residual", "relative", "iterations", "gauge",
              "div_max", "mean_eta_dot", "trace_mismatch", "min_height", "volume"};
  t.columns.assign(t.header.size(), Vec{});
  for (size_t k = 0; k < tr.records.size(); ++k) {
    const StepRecord& r = tr.records[k];
    const LedgerRow& l = led.rows[k];
    const double row[] = {double(r.step), r.t, r.dt, r.energy.fluid_kinetic, r.energy.beam_kinetic,
                          r.energy.elastic, r.energy.total(), l.viscous, l.damping, l.residual,
                          l.relative, double(r.iterations), r.gauge, r.div_max, r.mean_eta_dot,
                          r.trace_mismatch, r.min_height, r.volume};
    for (size_t c = 0; c < t.header.size(); ++c) t.columns[c].push_back(row[c]);
  }
  t.tags = {{"config_hash", config_hash}};
  csv::write(path, t);
}

void write_events_json(const Trajectory& tr, const fs::path& path) {
  nlohmann::json j;
  j["halted"] = tr.halted;
  j["events"] = nlohmann::json::array();
  for (const auto& e : tr.events) {
    j["events"].push_back({{"time", e.time},
                           {"node", e.node},
                           {"x", e.x},
                           {"min_height", e.min_height},
                           {"phase", e.phase == ContactPhase::Halted ? "halted" : "flagged"}});
  }
  write_all(path, j.dump(2) + "\n");
}

SimState resume(const RunManifest& m, const fs::path& dir, double t, const RunConfig& cfg) {
  if (params_hash(cfg.params) != m.params_hash) {
    throw ConfigError("resume: parameters differ from the manifest (params hash mismatch)");
  }
  if (grid_hash(cfg.grid) != m.grid_hash) {
    throw ConfigError("resume: grid differs from the manifest (grid hash mismatch)");
  }
  const FileEntry* best = nullptr;
  for (const auto& f : m.files) {
    if (f.kind != "checkpoint" || f.t > t + 1e-12 * std::max(1.0, std::abs(t))) continue;
    if (!best || f.t > best->t) best = &f;
  }
  if (!best) throw IoError("resume: no checkpoint at or before t = " + g17(t));
  const fs::path p = dir / best->path;
  if (!fs::exists(p)) throw IoError("resume: missing checkpoint " + best->path);
  if (sha256_file(p) != best->sha256) throw HashMismatchError("resume: checkpoint changed: " + best->path);
  SimState s = load_checkpoint(p);
  if (!(s.fluid.grid == cfg.grid)) throw ConfigError("resume: checkpoint grid differs from config");
  return s;
}

}  // namespace beamfsi::store
