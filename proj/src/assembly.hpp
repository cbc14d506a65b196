// Saddle-point systems shared by the fluid step and the coupled step.
#pragma once

#include <Eigen/Dense>

#include "beamfsi/fluid_ops.hpp"
#include "beamfsi/solver.hpp"

namespace beamfsi::detail {

struct Assembly {
  FluidGrid g;
  fluid::Metric m1;
  fluid::Momentum mo;
  fluid::SpMat D;
};

Assembly assemble(const FluidGrid& g, const Vec& h_old, const Vec& h_new, const Vec& u0,
                  double dt, const Params& p, const Vec* force);

enum class TopRows { Dirichlet, Beam };

/// Unknowns [u | p (| gauge multiplier)].  With TopRows::Beam the top rows
/// receive dx * beam_block on the top columns.
fluid::SpMat saddle_matrix(const Assembly& a, TopRows top, const Eigen::MatrixXd* beam_block,
                           bool gauge_row);
Eigen::VectorXd saddle_rhs(const Assembly& a, TopRows top, const Vec& top_values,
                           bool gauge_row);

/// S u - b - D^T p on every velocity row.
Vec momentum_residual(const Assembly& a, const Vec& u, const Vec& p);
Vec top_rows(const FluidGrid& g, const Vec& r);

}  // namespace beamfsi::detail
