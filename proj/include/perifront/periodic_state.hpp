#pragma once

#include <optional>
#include <stdexcept>

#include "perifront/reaction.hpp"

namespace perifront {

/// The positive space-time periodic solution p(t,x) of p_t = d p_xx + f,
/// sampled on one period cell. t_i = i*omega/nt, x_j = j*L/nx.
struct PeriodicState {
  int nt = 0;
  int nx = 0;
  Real omega = 0;
  Real L = 0;
  Table values;    // nt x nx
  Real residual = 0;  // measured max |p_t - d p_xx - f| on the grid
  Real tol = 0;       // period-gap tolerance the march converged to

  Real at(Real t, Real x) const;  // bilinear, periodic in both arguments
  Real min_value() const { return values.minCoeff(); }
  Real max_value() const { return values.maxCoeff(); }
  Array slice_at_t0(int nx_out) const;  // p(0, x) resampled to nx_out points
};

struct ConvergenceError : std::runtime_error {
  Real last_gap;
  ConvergenceError(const std::string& msg, Real gap)
      : std::runtime_error(msg), last_gap(gap) {}
};

struct NoPositivePeriodicStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Time-marches the L-periodic Cauchy problem from v0 (default: the constant
/// cap_M, a supersolution, so the Poincare iterates decrease monotonically)
/// until the period gap ||v(t+omega,.) - v(t,.)||_inf drops below tol, then
/// records one period.
PeriodicState compute_periodic_state(const ReactionSpec& spec, int nt, int nx,
                                     Real tol = 1e-8, int max_periods = 200,
                                     std::optional<Real> v0_const = std::nullopt);

enum class LinearizeAt { Zero, PositiveState };

struct PowerIterationError : std::runtime_error {
  Real rayleigh_prev, rayleigh_last;
  PowerIterationError(const std::string& msg, Real prev, Real last)
      : std::runtime_error(msg), rayleigh_prev(prev), rayleigh_last(last) {}
};

/// Principal eigenvalue of phi_t - d phi_xx - f_u(t,x,q) phi = lambda phi
/// with positive (omega, L)-periodic eigenfunction, where q = 0 or the
/// periodic state. Computed as -(1/omega) log rho with rho the spectral
/// radius of the linearized period map, by power iteration.
Real principal_eigenvalue(const ReactionSpec& spec, LinearizeAt at, int nt,
                          int nx, const PeriodicState* pstate = nullptr,
                          Real tol = 1e-10, int max_iters = 2000);

/// One period of the nonlinear L-periodic cell problem: advances cell values
/// (on the uniform grid x_j = j*L/nx) from time t0 to t0 + omega with nt
/// steps. Shared by the periodic-state march and the Weinberger plateau
/// updates.
void advance_cell_one_period(const ReactionSpec& spec, Array& cell, Real t0,
                             int nt, Real theta = 1.0);

/// p~(t,x) = p(t,-x): the periodic state of the reflected spec.
PeriodicState reflect(const PeriodicState& ps);

}  // namespace perifront
