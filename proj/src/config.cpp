#include "beamfsi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "beamfsi/csv.hpp"
#include "beamfsi/geometry.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi::config {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

Value scalar(const toml::node& n) {
  const int line = line_of(n);
  if (auto v = n.as_floating_point()) return {v->get(), line};
  if (auto v = n.as_integer()) return {static_cast<double>(v->get()), line};
  if (auto v = n.as_boolean()) return {v->get(), line};
  if (auto v = n.as_string()) return {v->get(), line};
  fail(line, "unsupported value type");
}

/// Nested tables become sections named "a.b"; the root table is section "".
void flatten(const toml::table& t, const std::string& name, Document& doc) {
  auto& kv = doc[name];
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (const toml::table* sub = node.as_table()) {
      flatten(*sub, name.empty() ? key : name + "." + key, doc);
    } else if (const toml::array* arr = node.as_array()) {
      Array out;
      for (const toml::node& e : *arr) {
        if (e.is_array() || e.is_table()) fail(line_of(e), "nested arrays and tables are not supported");
        out.push_back(scalar(e));
      }
      kv[key] = {std::move(out), line_of(node)};
    } else {
      kv[key] = scalar(node);
    }
  }
}

class Section {
 public:
  Section(const Document& d, const std::string& name) : name_(name) {
    if (auto it = d.find(name); it != d.end()) kv_ = &it->second;
  }
  void num(const char* key, double& out) {
    if (const Value* v = find(key)) {
      if (!std::holds_alternative<double>(v->v)) fail(v->line, where(key) + " must be a number");
      out = std::get<double>(v->v);
    }
  }
  void integer(const char* key, int& out) {
    double d = out;
    num(key, d);
    if (d != std::floor(d) || std::abs(d) > 1e9) fail(line(key), where(key) + " must be an integer");
    out = static_cast<int>(d);
  }
  void boolean(const char* key, bool& out) {
    if (const Value* v = find(key)) {
      if (!std::holds_alternative<bool>(v->v)) fail(v->line, where(key) + " must be true or false");
      out = std::get<bool>(v->v);
    }
  }
  void str(const char* key, std::string& out) {
    if (const Value* v = find(key)) {
      if (!std::holds_alternative<std::string>(v->v)) fail(v->line, where(key) + " must be a string");
      out = std::get<std::string>(v->v);
    }
  }
  void numbers(const char* key, Vec& out) {
    if (const Value* v = find(key)) {
      if (!std::holds_alternative<Array>(v->v)) fail(v->line, where(key) + " must be an array");
      out.clear();
      for (const Value& e : std::get<Array>(v->v)) {
        if (!std::holds_alternative<double>(e.v)) fail(e.line, where(key) + " must hold numbers");
        out.push_back(std::get<double>(e.v));
      }
    }
  }
  /// Rejects keys that no accessor asked for.
  void finish() const {
    if (!kv_) return;
    for (const auto& [k, v] : *kv_)
      if (!used_.count(k)) fail(v.line, "unknown key '" + k + "' in [" + name_ + "]");
  }
  int line(const char* key) const {
    if (!kv_) return 0;
    auto it = kv_->find(key);
    return it == kv_->end() ? 0 : it->second.line;
  }

 private:
  const Value* find(const char* key) {
    used_.insert(key);
    if (!kv_) return nullptr;
    auto it = kv_->find(key);
    return it == kv_->end() ? nullptr : &it->second;
  }
  std::string where(const char* key) const { return "[" + name_ + "] " + key; }

  std::string name_;
  const std::map<std::string, Value>* kv_ = nullptr;
  std::set<std::string> used_;
};

ProfileSpec read_profile(const Document& d, const std::string& name) {
  Section s(d, name);
  ProfileSpec p;
  s.str("kind", p.kind);
  s.num("amplitude", p.amplitude);
  s.integer("mode", p.mode);
  s.num("phase", p.phase);
  s.num("center", p.center);
  s.num("width", p.width);
  s.str("file", p.file);
  s.finish();
  return p;
}

std::string q(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string n(double v) { return csv::format(v); }

void write_profile(std::ostringstream& o, const std::string& name, const ProfileSpec& p) {
  o << "\n[" << name << "]\n" << "kind = " << q(p.kind) << "\n";
  if (p.kind == "cosine" || p.kind == "bump") o << "amplitude = " << n(p.amplitude) << "\n";
  if (p.kind == "cosine") o << "mode = " << p.mode << "\nphase = " << n(p.phase) << "\n";
  if (p.kind == "bump") o << "center = " << n(p.center) << "\nwidth = " << n(p.width) << "\n";
  if (p.kind == "file") o << "file = " << q(p.file) << "\n";
}

}  // namespace

Document parse_toml(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    fail(static_cast<int>(e.source().begin.line), std::string(e.description()));
  }
  Document doc;
  flatten(root, "", doc);
  return doc;
}

Vec ProfileSpec::sample(int nx, double L, const std::filesystem::path& base_dir) const {
  Vec v(nx, 0.0);
  const double dx = L / nx;
  if (kind == "zero") return v;
  if (kind == "cosine") {
    for (int i = 0; i < nx; ++i)
      v[i] = amplitude * std::cos(2.0 * std::numbers::pi * mode * i * dx / L + phase);
    return v;
  }
  if (kind == "bump") {
    for (int i = 0; i < nx; ++i) {
      double r = std::fmod(std::abs(i * dx - center), L);
      r = std::min(r, L - r);
      v[i] = amplitude * std::exp(-(r / width) * (r / width));
    }
    return v;
  }
  if (kind == "file") {
    std::filesystem::path p = file;
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    Profile pr;
    try {
      pr = read_profile_csv(p, L);
    } catch (const IoError& e) {
      throw ConfigError(std::string("profile file: ") + e.what());
    }
    if (pr.size() != nx) {
      throw ConfigError("profile file " + p.string() + " has " + std::to_string(pr.size()) +
                        " nodes, grid has " + std::to_string(nx));
    }
    return pr.h;
  }
  throw ConfigError("unknown profile kind '" + kind + "'");
}

void SimConfig::validate() const {
  try {
    run.params.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(run.grid.nx >= 4 && run.grid.nz >= 2, "[grid] needs nx >= 4 and nz >= 2");
  check(run.grid.L == run.params.L, "[grid] L must equal [params] L");
  check(run.dt > 0.0 && run.T >= 0.0, "[grid] needs dt > 0 and T >= 0");
  check(M > 0.0 && cells_per_unit >= 2, "[grid] needs M > 0 and cells_per_unit >= 2");
  check(run.coupling.tolerance > 0.0 && run.coupling.max_iterations >= 1,
        "[coupling] needs tolerance > 0 and max_iterations >= 1");
  check(run.coupling.omega0 > 0.0 && run.coupling.omega0 <= 1.0, "[coupling] omega0 must lie in (0, 1]");
  check(run.eps_c >= 0.0, "[contact] eps_c must be nonnegative");
  check(run.sample_every >= 1 && checkpoint_every >= 0,
        "[output] needs sample_every >= 1 and checkpoint_every >= 0");
  check(run.cfl_safety > 0.0, "[grid] cfl_safety must be positive");
  check(u0 == "zero" || u0 == "lift", "[initial] u0 must be \"zero\" or \"lift\"");
  check(lift_lambda >= 0.0, "[initial] lift_lambda must be nonnegative");
  for (const ProfileSpec* p : {&eta0, &eta1}) {
    check(p->kind == "zero" || p->kind == "cosine" || p->kind == "bump" || p->kind == "file",
          "[initial] unknown profile kind '" + p->kind + "'");
    check(p->kind != "bump" || p->width > 0.0, "[initial] bump width must be positive");
    check(p->kind != "file" || !p->file.empty(), "[initial] file profile needs a file name");
  }
  for (size_t k = 0; k < gammas.size(); ++k) {
    check(gammas[k] >= 0.0, "[sweep] gammas must be nonnegative");
    check(k == 0 || gammas[k] < gammas[k - 1], "[sweep] gammas must strictly decrease");
  }
  check(delta > 0.0, "[sweep] delta must be positive");
  check(workers >= 0, "[sweep] workers must be nonnegative");
}

SimConfig from_document(const Document& d, const std::filesystem::path& base_dir) {
  static const std::set<std::string> known = {"",        "params",  "grid",    "initial",
                                              "initial.eta0", "initial.eta1", "coupling",
                                              "contact", "output",  "sweep"};
  for (const auto& [name, kv] : d) {
    if (!known.count(name)) {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  SimConfig c;
  c.base_dir = base_dir;
  {
    Section s(d, "");
    s.finish();
  }
  {
    Section s(d, "params");
    Params& p = c.run.params;
    s.num("rho_f", p.rho_f);
    s.num("rho_s", p.rho_s);
    s.num("mu", p.mu);
    s.num("alpha", p.alpha);
    s.num("beta", p.beta);
    s.num("gamma", p.gamma);
    s.num("L", p.L);
    s.finish();
  }
  {
    Section s(d, "grid");
    FluidGrid& g = c.run.grid;
    g.nx = 32;
    g.nz = 16;
    s.integer("nx", g.nx);
    s.integer("nz", g.nz);
    g.L = c.run.params.L;
    s.num("dt", c.run.dt);
    s.num("T", c.run.T);
    s.boolean("adaptive_dt", c.run.adaptive_dt);
    s.num("cfl_safety", c.run.cfl_safety);
    s.num("M", c.M);
    s.integer("cells_per_unit", c.cells_per_unit);
    s.finish();
  }
  {
    Section s(d, "initial");
    s.str("u0", c.u0);
    s.num("lift_lambda", c.lift_lambda);
    s.boolean("regularize", c.regularize);
    s.finish();
    c.eta0 = read_profile(d, "initial.eta0");
    c.eta1 = read_profile(d, "initial.eta1");
  }
  {
    Section s(d, "coupling");
    std::string mode = "monolithic";
    s.str("mode", mode);
    if (mode == "monolithic") {
      c.run.coupling.mode = CouplingMode::Monolithic;
    } else if (mode == "partitioned") {
      c.run.coupling.mode = CouplingMode::Partitioned;
    } else {
      throw ConfigError("[coupling] mode must be \"monolithic\" or \"partitioned\"");
    }
    s.num("tolerance", c.run.coupling.tolerance);
    s.integer("max_iterations", c.run.coupling.max_iterations);
    s.num("omega0", c.run.coupling.omega0);
    s.finish();
  }
  {
    Section s(d, "contact");
    s.num("eps_c", c.run.eps_c);
    std::string policy = "halt";
    s.str("policy", policy);
    if (policy == "halt") {
      c.run.policy = ContactPhase::Halted;
    } else if (policy == "flag") {
      c.run.policy = ContactPhase::Flagged;
    } else {
      throw ConfigError("[contact] policy must be \"halt\" or \"flag\"");
    }
    s.finish();
  }
  {
    Section s(d, "output");
    s.integer("sample_every", c.run.sample_every);
    s.integer("checkpoint_every", c.checkpoint_every);
    s.finish();
  }
  {
    Section s(d, "sweep");
    s.numbers("gammas", c.gammas);
    s.num("delta", c.delta);
    s.integer("workers", c.workers);
    s.finish();
  }
  c.validate();
  return c;
}

SimConfig parse(const std::string& text, const std::filesystem::path& base_dir) {
  return from_document(parse_toml(text), base_dir);
}

SimConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

std::string SimConfig::to_toml() const {
  std::ostringstream o;
  const Params& p = run.params;
  o << "[params]\nrho_f = " << n(p.rho_f) << "\nrho_s = " << n(p.rho_s) << "\nmu = " << n(p.mu)
    << "\nalpha = " << n(p.alpha) << "\nbeta = " << n(p.beta) << "\ngamma = " << n(p.gamma)
    << "\nL = " << n(p.L) << "\n";
  o << "\n[grid]\nnx = " << run.grid.nx << "\nnz = " << run.grid.nz << "\ndt = " << n(run.dt)
    << "\nT = " << n(run.T) << "\nadaptive_dt = " << (run.adaptive_dt ? "true" : "false")
    << "\ncfl_safety = " << n(run.cfl_safety) << "\nM = " << n(M)
    << "\ncells_per_unit = " << cells_per_unit << "\n";
  o << "\n[initial]\nu0 = " << q(u0) << "\nlift_lambda = " << n(lift_lambda)
    << "\nregularize = " << (regularize ? "true" : "false") << "\n";
  write_profile(o, "initial.eta0", eta0);
  write_profile(o, "initial.eta1", eta1);
  o << "\n[coupling]\nmode = "
    << q(run.coupling.mode == CouplingMode::Monolithic ? "monolithic" : "partitioned")
    << "\ntolerance = " << n(run.coupling.tolerance)
    << "\nmax_iterations = " << run.coupling.max_iterations << "\nomega0 = " << n(run.coupling.omega0)
    << "\n";
  o << "\n[contact]\neps_c = " << n(run.eps_c)
    << "\npolicy = " << q(run.policy == ContactPhase::Halted ? "halt" : "flag") << "\n";
  o << "\n[output]\nsample_every = " << run.sample_every << "\ncheckpoint_every = " << checkpoint_every
    << "\n";
  o << "\n[sweep]\ngammas = [";
  for (size_t k = 0; k < gammas.size(); ++k) o << (k ? ", " : "") << n(gammas[k]);
  o << "]\ndelta = " << n(delta) << "\nworkers = " << workers << "\n";
  return o.str();
}

InitialData raw_initial_data(const SimConfig& c) {
  const FluidGrid& g = c.run.grid;
  InitialData d;
  d.eta0 = c.eta0.sample(g.nx, g.L, c.base_dir);
  d.eta1 = c.eta1.sample(g.nx, g.L, c.base_dir);
  const double m1 = spectral::mean(d.eta1);
  for (double& v : d.eta1) v -= m1;
  Vec h(g.nx);
  for (int i = 0; i < g.nx; ++i) h[i] = 1.0 + d.eta0[i];
  const double hmin = *std::min_element(h.begin(), h.end());
  if (!(hmin > 0.0)) throw ConfigError("[initial] eta0 leaves no fluid: min(1 + eta0) <= 0");
  if (c.u0 == "lift") {
    const double lambda = c.lift_lambda > 0.0 ? c.lift_lambda : 0.5 * hmin;
    d.u0 = lift_state(g, d.eta1, h, lambda);
  } else {
    d.u0 = FluidState::rest(g);
    if (*std::max_element(d.eta1.begin(), d.eta1.end()) != 0.0 ||
        *std::min_element(d.eta1.begin(), d.eta1.end()) != 0.0) {
      throw ConfigError("[initial] u0 = \"zero\" requires eta1 = zero (kinematic condition)");
    }
  }
  validate_initial_data(d);
  return d;
}

InitialData build_initial_data(const SimConfig& c) {
  InitialData d = raw_initial_data(c);
  if (c.regularize && c.run.params.gamma > 0.0) d = regularize_initial_data(d, c.run.params.gamma, c.run.params);
  return d;
}

SweepOptions sweep_options(const SimConfig& c) {
  SweepOptions o;
  o.delta = c.delta;
  o.M = c.M;
  o.cells_per_unit = c.cells_per_unit;
  o.workers = c.workers;
  o.regularize = true;
  return o;
}

}  // namespace beamfsi::config
