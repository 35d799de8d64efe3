#include "perifront/periodic_state.hpp"

#include <cmath>

namespace perifront {

Real PeriodicState::at(Real t, Real x) const {
  const Real st = frac_part(t / omega) * nt;
  const Real sx = frac_part(x / L) * nx;
  const int i = static_cast<int>(st) % nt;
  const int j = static_cast<int>(sx) % nx;
  const Real wt = st - std::floor(st);
  const Real wx = sx - std::floor(sx);
  const int i1 = (i + 1) % nt, j1 = (j + 1) % nx;
  return (1 - wt) * ((1 - wx) * values(i, j) + wx * values(i, j1)) +
         wt * ((1 - wx) * values(i1, j) + wx * values(i1, j1));
}

Array PeriodicState::slice_at_t0(int nx_out) const {
  Array out(nx_out);
  for (int j = 0; j < nx_out; ++j) out[j] = at(0.0, j * L / nx_out);
  return out;
}

// One theta-IMEX step of v_t = d v_xx + f(t,x,v) on the periodic cell:
// diffusion handled by the cyclic tridiagonal solve, reaction explicit.
namespace {
void cell_step(const ReactionSpec& spec, Array& v, Real t, Real dt,
               Real theta) {
  const int nx = static_cast<int>(v.size());
  const Real dx = spec.L / nx;
  const Real r = spec.d * dt / (dx * dx);

  Array rhs(nx);
  for (int j = 0; j < nx; ++j) {
    const int jm = (j + nx - 1) % nx, jp = (j + 1) % nx;
    const Real lap = v[jm] - 2.0 * v[j] + v[jp];
    rhs[j] = v[j] + (1.0 - theta) * r * lap +
             dt * eval_f(spec, t, j * dx, v[j]);
  }
  if (theta == 0.0) {
    v = rhs;
    return;
  }
  Array lower = Array::Constant(nx, -theta * r);
  Array upper = Array::Constant(nx, -theta * r);
  Array diag = Array::Constant(nx, 1.0 + 2.0 * theta * r);
  Array out;
  solve_cyclic_tridiag(lower, diag, upper, rhs, out);
  v = out;
}
}  // namespace

void advance_cell_one_period(const ReactionSpec& spec, Array& cell, Real t0,
                             int nt, Real theta) {
  const Real dt = spec.omega / nt;
  for (int i = 0; i < nt; ++i) cell_step(spec, cell, t0 + i * dt, dt, theta);
}

PeriodicState compute_periodic_state(const ReactionSpec& spec, int nt, int nx,
                                     Real tol, int max_periods,
                                     std::optional<Real> v0_const) {
  if (nx < 16 || nt < 16)
    throw std::invalid_argument("compute_periodic_state: need nx >= 16, nt >= 16");

  Array v = Array::Constant(nx, v0_const.value_or(spec.cap_M));
  Real gap = std::numeric_limits<Real>::infinity();
  bool converged = false;
  for (int period = 0; period < max_periods; ++period) {
    Array prev = v;
    advance_cell_one_period(spec, v, 0.0, nt);
    gap = (v - prev).abs().maxCoeff();
    if (v.maxCoeff() < 10.0 * tol)
      throw NoPositivePeriodicStateError(
          "periodic march collapsed to zero: hypothesis (H) fails for this spec");
    if (gap < tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("periodic march did not settle within max_periods", gap);

  PeriodicState ps;
  ps.nt = nt;
  ps.nx = nx;
  ps.omega = spec.omega;
  ps.L = spec.L;
  ps.tol = tol;
  ps.values.resize(nt, nx);
  const Real dt = spec.omega / nt;
  for (int i = 0; i < nt; ++i) {
    ps.values.row(i) = v.transpose();
    cell_step(spec, v, i * dt, dt, 1.0);
  }

  // Residual certificate with centered second-order stencils, periodic in
  // both directions.
  const Real dx = spec.L / nx;
  Real res = 0.0;
  for (int i = 0; i < nt; ++i) {
    const int im = (i + nt - 1) % nt, ip = (i + 1) % nt;
    for (int j = 0; j < nx; ++j) {
      const int jm = (j + nx - 1) % nx, jp = (j + 1) % nx;
      const Real pt = (ps.values(ip, j) - ps.values(im, j)) / (2.0 * dt);
      const Real pxx = (ps.values(i, jm) - 2.0 * ps.values(i, j) +
                        ps.values(i, jp)) / (dx * dx);
      const Real f = eval_f(spec, i * dt, j * dx, ps.values(i, j));
      res = std::max(res, std::abs(pt - spec.d * pxx - f));
    }
  }
  ps.residual = res;

  if (ps.values.minCoeff() <= 0.0)
    throw NoPositivePeriodicStateError("periodic state not strictly positive");
  return ps;
}

PeriodicState reflect(const PeriodicState& ps) {
  PeriodicState r = ps;
  for (int j = 0; j < ps.nx; ++j)
    r.values.col(j) = ps.values.col((ps.nx - j) % ps.nx);
  return r;
}

namespace {
// One theta step of the linear equation phi_t = d phi_xx + c(t,x) phi on the
// cell, with the zeroth-order coefficient treated implicitly as well.
void linear_cell_step(const ReactionSpec& spec, Array& v, Real t, Real dt,
                      Real theta, LinearizeAt at, const PeriodicState* ps) {
  const int nx = static_cast<int>(v.size());
  const Real dx = spec.L / nx;
  const Real r = spec.d * dt / (dx * dx);

  auto coef = [&](Real tt, Real x) {
    const Real q = (at == LinearizeAt::Zero) ? 0.0 : ps->at(tt, x);
    return eval_f_u(spec, tt, x, q);
  };

  Array rhs(nx);
  for (int j = 0; j < nx; ++j) {
    const int jm = (j + nx - 1) % nx, jp = (j + 1) % nx;
    const Real lap = v[jm] - 2.0 * v[j] + v[jp];
    rhs[j] = v[j] + (1.0 - theta) * (r * lap + dt * coef(t, j * dx) * v[j]);
  }
  Array lower = Array::Constant(nx, -theta * r);
  Array upper = Array::Constant(nx, -theta * r);
  Array diag(nx);
  for (int j = 0; j < nx; ++j)
    diag[j] = 1.0 + 2.0 * theta * r - theta * dt * coef(t + dt, j * dx);
  Array out;
  solve_cyclic_tridiag(lower, diag, upper, rhs, out);
  v = out;
}
}  // namespace

Real principal_eigenvalue(const ReactionSpec& spec, LinearizeAt at, int nt,
                          int nx, const PeriodicState* pstate, Real tol,
                          int max_iters) {
  if (at == LinearizeAt::PositiveState && pstate == nullptr)
    throw std::invalid_argument(
        "principal_eigenvalue: linearizing at p requires a PeriodicState");

  const Real dt = spec.omega / nt;
  Array v = Array::Constant(nx, 1.0);
  Real rho_prev = 0.0, rho = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Array w = v;
    // Crank-Nicolson keeps the period-map growth factor second-order
    // accurate in dt.
    for (int i = 0; i < nt; ++i)
      linear_cell_step(spec, w, i * dt, dt, 0.5, at, pstate);
    const Real norm = w.abs().maxCoeff();
    rho_prev = rho;
    rho = norm;  // v is sup-normalized, so the map's growth is the new norm
    v = w / norm;
    if (it > 2 && std::abs(rho - rho_prev) <= tol * std::max(1.0, rho))
      return -std::log(rho) / spec.omega;
  }
  throw PowerIterationError("power iteration did not converge", rho_prev, rho);
}

}  // namespace perifront
