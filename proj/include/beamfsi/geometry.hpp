/// @file geometry.hpp
/// Beam heights h = 1 + eta, the positive-part shift, the ALE map between
/// two subgraph domains, and the piecewise-in-time lower envelope.
#pragma once

#include <array>
#include <filesystem>
#include <functional>

#include "beamfsi/common.hpp"

namespace beamfsi {

/// Periodic height samples on x_i = i*L/n together with their slopes.
/// Slopes travel with the values so that clipped profiles keep the exact
/// chain-rule derivative instead of a smeared difference quotient.
struct Profile {
  Vec h;
  Vec dh;
  double L = 1.0;

  int size() const { return static_cast<int>(h.size()); }
  double dx() const { return L / static_cast<double>(h.size()); }
  double x(int i) const { return i * dx(); }
  double min() const;
  double max() const;

  /// Central differences, switching to one-sided differences next to
  /// zero runs (the kinks of a clipped profile).
  static Profile from_values(Vec h, double L);
  static Profile sample(const std::function<double(double)>& f, int n, double L);
};

/// Discrete ||.||_{W^{1,inf}}: max|h| + max|h'|.
double w1inf_norm(const Profile& p);

class Deformation {
 public:
  Deformation(Vec eta, double L, double M);

  const Vec& eta() const { return eta_; }
  double L() const { return L_; }
  double M() const { return M_; }
  int size() const { return static_cast<int>(eta_.size()); }
  double dx() const { return L_ / size(); }
  Profile height() const;

 private:
  Vec eta_;
  double L_;
  double M_;
};

Profile positive_part_shift(const Profile& h, double mu);
double sublevel_slope_sup(const Profile& h, double mu);
double w1inf_distance(const Profile& a, const Profile& b);

/// chi(x,y) = (x, m(x)(y+1)-1) from the subgraph of hb onto the subgraph of h.
struct AleMap {
  Profile source;  // h
  Profile target;  // hb
  Vec m;
  Vec dm;

  double m_at(double x) const;
  double dm_at(double x) const;
  std::array<double, 2> chi(double x, double y) const;
  std::array<double, 2> chi_inverse(double x, double Y) const;
  /// Row-major [[m, 0], [-m'(y+1), 1]].
  std::array<double, 4> cofactor(double x, double y) const;
};

AleMap ale_map(const Profile& h, const Profile& hb);

struct TimedProfile {
  double t;
  Profile h;
};

struct EnvelopeRow {
  long long k;  // interval index
  double t_begin;
  double t_end;
  double t_k;
  int sample;  // index of the trajectory sample used
  Profile h;
};

struct EnvelopeCheck {
  long long below_violations = 0;
  long long gap_violations = 0;
  double max_gap = 0.0;
  double row_w1inf_max = 0.0;
  double trajectory_h2_max = 0.0;
  double slope_condition = 0.0;  // max_t 4 eps + sublevel sup at 2 eps
};

struct LowerEnvelope {
  double delta = 0.0;
  double epsilon = 0.0;
  double theta = 0.2;
  double hoelder_C = 0.0;
  double floor = 0.0;  // lower end of the epsilon bisection, 2 dx max|h'|
  double t0 = 0.0;
  double T = 0.0;
  long long N = 0;  // intervals I_0 .. I_N
  double interval = 0.0;
  std::vector<EnvelopeRow> rows;  // only intervals holding at least one sample
  EnvelopeCheck check;

  long long interval_of(double t) const;
  const EnvelopeRow* row_for(double t) const;
};

LowerEnvelope build_lower_envelope(const std::vector<TimedProfile>& trajectory, double delta,
                                   double theta = 0.2);

void write_profile_csv(const std::filesystem::path& path, const Profile& p);
Profile read_profile_csv(const std::filesystem::path& path, double L);

/// Writes <dir>/<stem>.json plus one CSV per row; returns the JSON path.
std::filesystem::path save_envelope(const LowerEnvelope& env, const std::filesystem::path& dir,
                                    const std::string& stem);

}  // namespace beamfsi
