#pragma once

#include "perifront/pde_engine.hpp"

namespace perifront {

/// Numerics for one application of the time-omega map.
struct PoincareNumerics {
  int nx = 256;            // solver nodes
  int nt_per_period = 64;  // time steps per period
  Real window = 40.0;      // one-sided truncation window width
  Real domain_margin = 10.0;  // extra room for whole-line solves
  Real class_slack = 1e-3;    // tolerated overshoot above p(0,.) after a step
  Real theta = 1.0;
};

/// Smooth nonincreasing cutoff: 1 on (-inf, 1/2], 0 on [1, inf), quintic
/// smoothstep in between.
Real smooth_cutoff(Real s);

/// The time-omega Poincare map U over the class C, dispatching on the kind
/// of supporting points of phi (two-sided, right/left one-sided, whole line).
CompactProfile apply_U(const ReactionSpec& spec, const PeriodicState& pstate,
                       const CompactProfile& phi, const PoincareNumerics& num);

/// n successive applications of U.
std::vector<CompactProfile> apply_U_iterates(const ReactionSpec& spec,
                                             const PeriodicState& pstate,
                                             const CompactProfile& phi, int n,
                                             const PoincareNumerics& num);

/// Truncated operator U_B[phi](x) = U[eta(|.-x|/B) phi](x): solve the
/// two-sided problem from the cutoff datum and evaluate the time-omega
/// profile at x. Returns 0 for x outside (g0 - B, h0 + B).
Real apply_U_truncated(const ReactionSpec& spec, const PeriodicState& pstate,
                       const CompactProfile& phi, Real B, Real x,
                       const PoincareNumerics& num);

/// Time-omega map of an L-periodic whole-line profile, computed exactly on
/// the periodic cell (values on the uniform grid x_j = j*L/n).
Array apply_U_periodic_cell(const ReactionSpec& spec, const Array& cell,
                            int nt_per_period);

}  // namespace perifront
