#include "beamfsi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "beamfsi/csv.hpp"
#include "beamfsi/kernels.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

double Profile::min() const { return *std::min_element(h.begin(), h.end()); }
double Profile::max() const { return *std::max_element(h.begin(), h.end()); }

Profile Profile::from_values(Vec values, double L) {
  const int n = static_cast<int>(values.size());
  require(n >= 3, "profile needs at least 3 nodes");
  require(L > 0.0, "profile period must be positive");
  Profile p;
  p.L = L;
  p.h = std::move(values);
  p.dh.assign(n, 0.0);
  const double dx = L / n;
  auto live = [&](int i) { return p.h[wrap(i, n)] > 0.0; };
  for (int i = 0; i < n; ++i) {
    const double hm = p.h[wrap(i - 1, n)], h0 = p.h[i], hp = p.h[wrap(i + 1, n)];
    const bool a = live(i - 1), b = live(i), c = live(i + 1);
    if (a == b && b == c) {
      p.dh[i] = (hp - hm) / (2.0 * dx);
    } else if (b == c) {
      p.dh[i] = (hp - h0) / dx;
    } else if (a == b) {
      p.dh[i] = (h0 - hm) / dx;
    } else {
      p.dh[i] = 0.0;
    }
  }
  return p;
}

Profile Profile::sample(const std::function<double(double)>& f, int n, double L) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = f(i * L / n);
  return from_values(std::move(v), L);
}

double w1inf_norm(const Profile& p) {
  double a = 0.0, b = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    a = std::max(a, std::abs(p.h[i]));
    b = std::max(b, std::abs(p.dh[i]));
  }
  return a + b;
}

Deformation::Deformation(Vec eta, double L, double M) : eta_(std::move(eta)), L_(L), M_(M) {
  require(eta_.size() >= 3, "deformation needs at least 3 nodes");
  require(L_ > 0.0, "period L must be positive");
  for (size_t i = 0; i < eta_.size(); ++i) {
    const double h = 1.0 + eta_[i];
    if (!(h >= 0.0 && h <= M_)) {
      throw ConfigError("deformation height " + std::to_string(h) + " at node " +
                        std::to_string(i) + " outside [0, M=" + std::to_string(M_) + "]");
    }
  }
}

Profile Deformation::height() const {
  Vec h(eta_.size());
  for (size_t i = 0; i < eta_.size(); ++i) h[i] = 1.0 + eta_[i];
  return Profile::from_values(std::move(h), L_);
}

Profile positive_part_shift(const Profile& h, double mu) {
  if (!(mu >= 0.0)) throw ConfigError("positive_part_shift: mu must be nonnegative");
  Profile out = h;
  for (int i = 0; i < h.size(); ++i) {
    if (h.h[i] > mu) {
      out.h[i] = h.h[i] - mu;
      out.dh[i] = h.dh[i];
    } else {
      out.h[i] = 0.0;
      out.dh[i] = 0.0;
    }
  }
  return out;
}

double sublevel_slope_sup(const Profile& h, double mu) {
  double best = 0.0;
  for (int i = 0; i < h.size(); ++i) {
    if (h.h[i] <= mu) best = std::max(best, std::abs(h.dh[i]));
  }
  return best;
}

double w1inf_distance(const Profile& a, const Profile& b) {
  if (a.size() != b.size() || a.L != b.L) throw ConfigError("w1inf_distance: grid mismatch");
  double dv = 0.0, ds = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    dv = std::max(dv, std::abs(a.h[i] - b.h[i]));
    ds = std::max(ds, std::abs(a.dh[i] - b.dh[i]));
  }
  return dv + ds;
}

namespace {

double periodic_lerp(const Vec& v, double L, double x) {
  const int n = static_cast<int>(v.size());
  const double u = x / (L / n);
  const double fl = std::floor(u);
  const double r = u - fl;
  const int i = wrap(static_cast<int>(fl), n);
  return (1.0 - r) * v[i] + r * v[wrap(i + 1, n)];
}

}  // namespace

double AleMap::m_at(double x) const { return periodic_lerp(m, source.L, x); }
double AleMap::dm_at(double x) const { return periodic_lerp(dm, source.L, x); }

std::array<double, 2> AleMap::chi(double x, double y) const {
  return {x, m_at(x) * (y + 1.0) - 1.0};
}

std::array<double, 2> AleMap::chi_inverse(double x, double Y) const {
  return {x, (Y + 1.0) / m_at(x) - 1.0};
}

std::array<double, 4> AleMap::cofactor(double x, double y) const {
  return {m_at(x), 0.0, -dm_at(x) * (y + 1.0), 1.0};
}

AleMap ale_map(const Profile& h, const Profile& hb) {
  if (h.size() != hb.size() || h.L != hb.L) throw ConfigError("ale_map: grid mismatch");
  AleMap a;
  a.source = h;
  a.target = hb;
  a.m.resize(h.size());
  a.dm.resize(h.size());
  for (int i = 0; i < h.size(); ++i) {
    if (hb.h[i] > h.h[i]) {
      throw ConfigError("ale_map: hb exceeds h at node " + std::to_string(i));
    }
    if (hb.h[i] < 0.0) throw ConfigError("ale_map: negative hb at node " + std::to_string(i));
    const double den = hb.h[i] + 1.0;
    a.m[i] = (h.h[i] + 1.0) / den;
    a.dm[i] = (h.dh[i] * den - (h.h[i] + 1.0) * hb.dh[i]) / (den * den);
  }
  return a;
}

long long LowerEnvelope::interval_of(double t) const {
  if (interval <= 0.0) return 0;
  const double u = std::floor((t - t0) / interval);
  if (u < 0.0) return 0;
  if (u > static_cast<double>(N)) return N;
  return static_cast<long long>(u);
}

const EnvelopeRow* LowerEnvelope::row_for(double t) const {
  const long long k = interval_of(t);
  auto it = std::lower_bound(rows.begin(), rows.end(), k,
                             [](const EnvelopeRow& r, long long kk) { return r.k < kk; });
  if (it == rows.end() || it->k != k) return nullptr;
  return &*it;
}

LowerEnvelope build_lower_envelope(const std::vector<TimedProfile>& trajectory, double delta,
                                   double theta) {
  if (trajectory.empty()) throw ConfigError("build_lower_envelope: empty trajectory");
  if (!(delta > 0.0)) throw ConfigError("build_lower_envelope: delta must be positive");
  if (!(theta > 0.0 && theta < 0.25)) {
    throw ConfigError("build_lower_envelope: theta must lie in (0, 1/4)");
  }
  const size_t ns = trajectory.size();
  for (size_t s = 1; s < ns; ++s) {
    if (!(trajectory[s].t > trajectory[s - 1].t)) {
      throw ConfigError("build_lower_envelope: sample times must increase");
    }
    if (trajectory[s].h.size() != trajectory[0].h.size()) {
      throw ConfigError("build_lower_envelope: grid mismatch along trajectory");
    }
  }

  LowerEnvelope env;
  env.delta = delta;
  env.theta = theta;
  env.t0 = trajectory.front().t;
  env.T = trajectory.back().t - env.t0;

  const double dx = trajectory[0].h.dx();
  double slope_max = 0.0;
  Vec h2(ns);
  for (size_t s = 0; s < ns; ++s) {
    for (double v : trajectory[s].h.dh) slope_max = std::max(slope_max, std::abs(v));
    h2[s] = spectral::h2_norm(trajectory[s].h.h, trajectory[s].h.L);
    env.check.trajectory_h2_max = std::max(env.check.trajectory_h2_max, h2[s]);
  }
  env.floor = 2.0 * dx * slope_max;

  auto condition = [&](double eps) {
    double worst = 0.0;
    for (const auto& tp : trajectory) {
      worst = std::max(worst, 4.0 * eps + sublevel_slope_sup(tp.h, 2.0 * eps));
    }
    return worst;
  };

  // condition is nondecreasing in eps; bisect on [floor, delta/4]
  double eps = delta / 4.0;
  if (condition(eps) > delta) {
    double lo = env.floor, hi = eps;
    if (!(lo < hi) || condition(lo) > delta) {
      throw NumericalError("build_lower_envelope: no epsilon above the grid floor " +
                           std::to_string(env.floor) + " meets the slope condition; residual " +
                           std::to_string(condition(std::min(lo, hi))) + " > delta " +
                           std::to_string(delta));
    }
    for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (condition(mid) <= delta ? lo : hi) = mid;
    }
    eps = lo;
  }
  env.epsilon = eps;
  env.check.slope_condition = condition(eps);

  std::vector<Vec> hv(ns), dv(ns);
  Vec tv(ns);
  for (size_t s = 0; s < ns; ++s) {
    hv[s] = trajectory[s].h.h;
    dv[s] = trajectory[s].h.dh;
    tv[s] = trajectory[s].t;
  }
  env.hoelder_C = kernels::hoelder_pair_max(hv, dv, tv, theta);

  // smallest interval count K = N+1 with C (T/K)^theta < eps
  if (env.hoelder_C <= 0.0 || env.T <= 0.0) {
    env.N = 0;
  } else {
    const double dt_max = std::pow(eps / env.hoelder_C, 1.0 / theta);
    const double K = std::floor(env.T / dt_max) + 1.0;
    env.N = static_cast<long long>(std::min(K, 1e15)) - 1;
  }
  env.interval = env.T > 0.0 ? env.T / static_cast<double>(env.N + 1) : 0.0;

  // group samples by interval; t_k minimizes the H2 norm inside I_k
  std::vector<long long> kof(ns);
  for (size_t s = 0; s < ns; ++s) kof[s] = env.interval_of(trajectory[s].t);
  for (size_t s = 0; s < ns;) {
    size_t e = s;
    size_t best = s;
    while (e < ns && kof[e] == kof[s]) {
      if (h2[e] < h2[best]) best = e;
      ++e;
    }
    EnvelopeRow row;
    row.k = kof[s];
    row.t_begin = env.t0 + row.k * env.interval;
    row.t_end = env.t0 + (row.k + 1) * env.interval;
    row.t_k = trajectory[best].t;
    row.sample = static_cast<int>(best);
    row.h = positive_part_shift(trajectory[best].h, 2.0 * eps);
    env.check.row_w1inf_max = std::max(env.check.row_w1inf_max, w1inf_norm(row.h));
    for (size_t q = s; q < e; ++q) {
      const Profile& ht = trajectory[q].h;
      for (int i = 0; i < ht.size(); ++i) {
        if (row.h.h[i] > ht.h[i]) ++env.check.below_violations;
      }
      const double gap = w1inf_distance(row.h, ht);
      env.check.max_gap = std::max(env.check.max_gap, gap);
      if (gap > delta) ++env.check.gap_violations;
    }
    env.rows.push_back(std::move(row));
    s = e;
  }
  return env;
}

void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
  csv::Table t;
  t.header = {"x", "h", "dh"};
  Vec x(p.size());
  for (int i = 0; i < p.size(); ++i) x[i] = p.x(i);
  t.columns = {x, p.h, p.dh};
  csv::write(path, t);
}

Profile read_profile_csv(const std::filesystem::path& path, double L) {
  const csv::Table t = csv::read(path);
  auto col = [&](const std::string& name) -> const Vec* {
    for (size_t c = 0; c < t.header.size(); ++c)
      if (t.header[c] == name) return &t.columns[c];
    return nullptr;
  };
  const Vec* h = col("h");
  if (!h) throw IoError("profile csv lacks an 'h' column: " + path.string());
  if (const Vec* dh = col("dh")) {
    Profile p;
    p.L = L;
    p.h = *h;
    p.dh = *dh;
    return p;
  }
  return Profile::from_values(*h, L);
}

std::filesystem::path save_envelope(const LowerEnvelope& env, const std::filesystem::path& dir,
                                    const std::string& stem) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["parameters"] = {{"delta", env.delta},   {"epsilon", env.epsilon}, {"N", env.N},
                     {"theta", env.theta},   {"hoelder_C", env.hoelder_C},
                     {"floor", env.floor},   {"t0", env.t0},           {"T", env.T},
                     {"interval", env.interval}};
  j["check"] = {{"below_violations", env.check.below_violations},
                {"gap_violations", env.check.gap_violations},
                {"max_gap", env.check.max_gap},
                {"row_w1inf_max", env.check.row_w1inf_max},
                {"trajectory_h2_max", env.check.trajectory_h2_max},
                {"slope_condition", env.check.slope_condition}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : env.rows) {
    const std::string file = stem + "_k" + std::to_string(r.k) + ".csv";
    write_profile_csv(dir / file, r.h);
    rows.push_back({{"k", r.k},
                    {"t_begin", r.t_begin},
                    {"t_end", r.t_end},
                    {"t_k", r.t_k},
                    {"sample", r.sample},
                    {"file", file}});
  }
  j["intervals"] = rows;
  const auto path = dir / (stem + ".json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  return path;
}

}  // namespace beamfsi
