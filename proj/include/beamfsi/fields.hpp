/// @file fields.hpp
/// Velocity fields on the container (0,L) x (-1,2M) and the constructive
/// operators acting on them.
///
/// Container layout (uniform, staggered):
///   Psi(i+1/2, j)   stream function at faces x_{i+1/2}, levels y_j
///   u1 (i+1/2, j+1/2)
///   u2 (i, j)       beam nodes x_i, levels y_j
/// so that u = curl Psi = (-dPsi/dy, dPsi/dx) is exactly solenoidal.
/// Region tags use face heights H_{i+1/2} = (h_i + h_{i+1})/2.
#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "beamfsi/common.hpp"
#include "beamfsi/geometry.hpp"

namespace beamfsi {

struct ContainerGrid {
  int nx = 0;
  int ny = 0;
  int j0 = 0;  // level index of y = 0
  double L = 1.0;
  double M = 1.0;
  double dy = 0.0;

  double dx() const { return L / nx; }
  double y(int j) const { return -1.0 + j * dy; }
  double y_half(int j) const { return -1.0 + (j + 0.5) * dy; }
  double x_node(int i) const { return i * dx(); }
  double x_face(int i) const { return (i + 0.5) * dx(); }
  double top() const { return y(ny); }

  /// dy = 1/cells_per_unit; M is rounded up so that 2M lands on a level.
  static ContainerGrid make(int nx, double L, double M_min, int cells_per_unit);
  bool operator==(const ContainerGrid& o) const;
};

enum class Region : std::uint8_t { Substrate, Fluid, Virtual };

Vec face_heights(const Vec& h);
Region region_psi(const ContainerGrid& g, const Vec& H, int f, int j);
Region region_u1(const ContainerGrid& g, const Vec& H, int f, int j);
Region region_u2(const ContainerGrid& g, const Vec& H, int i, int j);

struct ExtendedField {
  ContainerGrid grid;
  Vec u1;  // ny rows of nx faces
  Vec u2;  // ny+1 rows of nx nodes
  Vec h;   // node heights behind the region tags; empty when untagged

  static ExtendedField zeros(const ContainerGrid& g);
  double& U1(int f, int j) { return u1[j * grid.nx + f]; }
  double U1(int f, int j) const { return u1[j * grid.nx + f]; }
  double& U2(int i, int j) { return u2[j * grid.nx + i]; }
  double U2(int i, int j) const { return u2[j * grid.nx + i]; }
  /// Top boundary row of u2 (y = 2M).
  Vec top_trace() const;
};

/// Cell divergences (u1 differences over dx + u2 differences over dy), ny rows of nx.
Vec divergence(const ExtendedField& w);
double max_abs(const Vec& v);

struct StreamFunction {
  ContainerGrid grid;
  Vec psi;  // ny+1 rows of nx faces
  Vec b;    // top row
  Vec h;
  std::vector<int> contact_columns;
  double consistency_residual = 0.0;

  double& at(int f, int j) { return psi[j * grid.nx + f]; }
  double at(int f, int j) const { return psi[j * grid.nx + f]; }
  /// Column value at arbitrary height (cubic, clamped to the end levels).
  double sample(int f, double y) const;
};

struct CouplePair {
  ExtendedField w;
  Vec d;
};

struct SobolevConfig {
  double kappa = 0.25;
  double s = 0.1;
  void validate() const;
};

/// Smooth step: 0 for s <= 1/2, 1 for s >= 1, normalized integral of a bump.
double smooth_step(double s);
double smooth_step_derivative(double s);

/// Mean-free discrete antiderivative at faces: b_{i+1/2} - b_{i-1/2} = d_i dx.
Vec face_antiderivative(const Vec& d, double L);

struct ExtendOptions {
  double trace_tolerance = 1e-6;  // relative to max(1, |v|, |d|)
};

struct ExtendReport {
  double trace_mismatch = 0.0;
  double max_divergence = 0.0;
};

/// Keeps fluid-tagged nodes of v, writes (0,d) on virtual nodes and 0 below y = 0.
ExtendedField extend(const ExtendedField& v, const Vec& d, const Vec& h,
                     const ExtendOptions& opt = {}, ExtendReport* report = nullptr);
/// Fluid part (other nodes zeroed) and top trace of a tagged field.
std::pair<ExtendedField, Vec> restrict_to_fluid(const ExtendedField& w);

/// Pointwise samples of curl(b(x) zeta(y/lambda)).
ExtendedField lift(const Vec& d, double lambda, const ContainerGrid& g);
/// Stream function b(x) zeta(y/lambda) with the discrete antiderivative b.
StreamFunction lift_stream(const Vec& d, double lambda, const ContainerGrid& g);

struct StreamOptions {
  double tolerance = 1e-2;  // relative path-consistency residual
  double eps_c = 1e-6;      // contact column threshold
};

StreamFunction stream_function(const ExtendedField& w, const StreamOptions& opt = {});
ExtendedField curl(const StreamFunction& psi);

/// (sigma v1(x, sigma y), v2(x, sigma y)), realized as curl Psi(x, sigma y).
/// Samples beyond the container top continue the top stream-function value.
ExtendedField vertical_contraction(const ExtendedField& v, double sigma);

struct TraceResult {
  Vec t1;
  Vec t2;
  double h_half_norm = 0.0;
  double h1_norm = 0.0;
  double ratio = 0.0;  // empirical trace constant
};

TraceResult trace_at_interface(const ExtendedField& v, const Profile& h);

double hs_norm_1d(const Vec& d, double L, double order);
double h2s_norm_1d(const Vec& d, double L, const SobolevConfig& cfg);
double hs_norm(const ExtendedField& w, double s);
double hs_norm(const ExtendedField& w, const SobolevConfig& cfg);
double xs_norm(const CouplePair& p, const SobolevConfig& cfg);
/// Weighted X^0 product rho_f int w.w' + rho_s int d d'.
double x0_inner(const CouplePair& a, const CouplePair& b, double rho_f, double rho_s);
CouplePair difference(const CouplePair& a, const CouplePair& b);

CouplePair projector_competitor(const CouplePair& pair, const Profile& h, const Profile& hb,
                                const SobolevConfig& cfg);

struct StripReport {
  double fluid_lhs[2] = {0.0, 0.0};  // strip integrals of Psi^2/2 at a and b
  double fluid_rhs[2] = {0.0, 0.0};  // eps^2/4 strip integrals of |grad Psi|^2
  double beam_lhs[2] = {0.0, 0.0};
  double beam_rhs[2] = {0.0, 0.0};
  double cross_term = 0.0;   // int Psi^2/2 chi'' over the strips
  double cross_bound = 0.0;  // ||chi''|| eps^2/4 * strip gradient integrals
  int strip_cells = 0;
  int violations = 0;
  double chi_d_scaled = 0.0;   // eps  max|chi'|
  double chi_dd_scaled = 0.0;  // eps^2 max|chi''|
  bool support_ok = true;
};

struct CutoffResult {
  CouplePair pair;
  StripReport report;
};

/// Positivity components of the face heights as (a, b) face positions;
/// b may exceed L when the component wraps.
std::vector<std::pair<double, double>> positivity_components(const StreamFunction& psi);

CutoffResult contact_cutoff(const StreamFunction& psi, std::pair<double, double> interval,
                            double eps);

/// Normalized bump weights w_{-r..r} of half-width gamma on n periodic nodes.
Vec mollifier_weights(int n, double L, double gamma);
Vec mollify_periodic(const Vec& eta, double L, double gamma);

/// Flat binary layout plus a JSON sidecar.
void save_field(const std::filesystem::path& path, const ExtendedField& w);
ExtendedField load_field(const std::filesystem::path& path);
void save_stream(const std::filesystem::path& path, const StreamFunction& s);
StreamFunction load_stream(const std::filesystem::path& path);

}  // namespace beamfsi
