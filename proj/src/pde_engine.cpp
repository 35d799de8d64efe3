#include "perifront/pde_engine.hpp"

#include <algorithm>
#include <cmath>

namespace perifront {

Real CompactProfile::eval(Real x) const {
  switch (class_tag) {
    case ProfileClass::TwoSided:
      if (x <= g0 || x >= h0) return 0.0;
      break;
    case ProfileClass::RightFront:
      if (x >= h0) return 0.0;
      break;
    case ProfileClass::LeftFront:
      if (x <= g0) return 0.0;
      break;
    case ProfileClass::WholeLine:
      break;
  }
  return interp_linear(xs, vals, x);
}

CompactProfile hat_profile(Real center, Real width, Real height, int n) {
  CompactProfile p;
  p.class_tag = ProfileClass::TwoSided;
  p.g0 = center - width / 2;
  p.h0 = center + width / 2;
  p.xs.resize(n);
  p.vals.resize(n);
  for (int i = 0; i < n; ++i) {
    const Real x = p.g0 + width * i / (n - 1);
    p.xs[i] = x;
    const Real r = 1.0 - std::abs(2.0 * (x - center) / width);
    p.vals[i] = height * std::max(0.0, r);
  }
  return p;
}

CompactProfile ramp_to_p(const PeriodicState& ps, Real h0, Real depth, int n) {
  CompactProfile p;
  p.class_tag = ProfileClass::RightFront;
  p.h0 = h0;
  p.tail_at_p = true;
  p.below_p = true;
  p.xs.resize(n);
  p.vals.resize(n);
  for (int i = 0; i < n; ++i) {
    const Real x = h0 - depth + depth * i / (n - 1);
    p.xs[i] = x;
    p.vals[i] = std::min(ps.at(0.0, x), std::max(0.0, h0 - x));
  }
  return p;
}

Real Snapshot::eval(Real x) const {
  if (x < xs[0] || x > xs[xs.size() - 1]) return 0.0;
  return interp_linear(xs, vals, x);
}

namespace {

Real safe_f(const ReactionSpec& spec, Real t, Real x, Real u) {
  return eval_f(spec, t, x, std::max(u, 0.0));
}

struct VanishTracker {
  Real level;
  Real omega;
  Real t_last_above = 0.0;
  bool vanished = false;
  void observe(Real t, Real sup) {
    if (sup >= level)
      t_last_above = t;
    else if (t - t_last_above >= omega)
      vanished = true;
  }
};

Real default_vanish_level(const ReactionSpec& spec, const StepControl& ctl) {
  return ctl.vanish_level > 0 ? ctl.vanish_level : 1e-6 * spec.cap_M;
}

void maybe_snapshot(FrontTrajectory& traj, const StepControl& ctl, Real t,
                    Real T, Real& next_snap, const Array& xs, const Array& U) {
  const bool due = (ctl.snapshot_every > 0 && t >= next_snap - 1e-12) ||
                   t == 0.0 || t >= T - 1e-12;
  if (!due) return;
  traj.snapshots.push_back({t, xs, U});
  if (ctl.snapshot_every > 0)
    while (next_snap <= t + 1e-12) next_snap += ctl.snapshot_every;
}

}  // namespace

FrontTrajectory solve_two_sided(const ReactionSpec& spec,
                                const CompactProfile& u0, Real T, int nx,
                                Real dt, const StepControl& ctl) {
  if (u0.class_tag != ProfileClass::TwoSided)
    throw std::invalid_argument("solve_two_sided: datum must be TwoSided");
  if (!(u0.g0 < u0.h0))
    throw std::invalid_argument("solve_two_sided: need g0 < h0");
  if (nx < 8) throw std::invalid_argument("solve_two_sided: nx too small");

  const Real dy = 1.0 / nx;
  Real g = u0.g0, h = u0.h0, s = h - g;
  const Real s0 = s;
  const Real min_width = ctl.min_width_factor * std::max(1.0, s0);

  Array U(nx + 1);
  for (int i = 0; i <= nx; ++i) U[i] = std::max(0.0, u0.eval(g + s * i * dy));
  U[0] = U[nx] = 0.0;
  if (U.maxCoeff() <= 0.0)
    throw std::invalid_argument("solve_two_sided: datum vanishes identically");

  FrontTrajectory traj;
  traj.dt = dt;
  traj.nx = nx;
  traj.mu = spec.mu;
  traj.omega = spec.omega;
  traj.sup_u = U.maxCoeff();

  VanishTracker vt{default_vanish_level(spec, ctl), spec.omega};
  Real next_snap = 0.0;
  auto physical_xs = [&]() {
    Array xs(nx + 1);
    for (int i = 0; i <= nx; ++i) xs[i] = g + s * i * dy;
    return xs;
  };
  maybe_snapshot(traj, ctl, 0.0, T, next_snap, physical_xs(), U);
  traj.times.push_back(0.0);
  traj.g.push_back(g);
  traj.h.push_back(h);

  Array lower(nx - 2), diag(nx - 1), upper(nx - 2), rhs(nx - 1), sol;
  const long n_steps = std::lround(std::ceil(T / dt - 1e-12));
  Real t = 0.0;
  Real gp = 0.0, hp = 0.0;
  for (long step = 0; step < n_steps && !vt.vanished; ++step) {
    Real dt_left = std::min(dt, T - t);
    while (dt_left > 1e-15) {
      const Real uy0 = (4.0 * U[1] - U[2]) / (2.0 * dy);
      const Real uy1 = (U[nx - 2] - 4.0 * U[nx - 1]) / (2.0 * dy);
      gp = -spec.mu * uy0 / s;
      hp = -spec.mu * uy1 / s;
      traj.max_abs_ux = std::max({traj.max_abs_ux, std::abs(uy0) / s,
                                  std::abs(uy1) / s});
      const Real speed = std::max(std::abs(gp), std::abs(hp));
      Real dt_sub = dt_left;
      if (speed > 0)
        dt_sub = std::min(dt_sub, ctl.front_cfl * s * dy / speed);

      g += dt_sub * gp;
      h += dt_sub * hp;
      s = h - g;
      if (s < min_width) {
        vt.vanished = true;
        break;
      }

      const Real alpha = spec.d / (s * s);
      const Real ra = alpha / (dy * dy);
      for (int i = 1; i < nx; ++i) {
        const Real y = i * dy;
        const Real beta = ((1.0 - y) * gp + y * hp) / s;
        const Real rb = beta / (2.0 * dy);
        const Real x = g + y * s;
        Real expl = 0.0;
        if (ctl.theta < 1.0) {
          const Real lap = U[i + 1] - 2.0 * U[i] + U[i - 1];
          const Real adv = U[i + 1] - U[i - 1];
          expl = (1.0 - ctl.theta) * (ra * lap + rb * adv);
        }
        rhs[i - 1] = U[i] + dt_sub * (expl + safe_f(spec, t, x, U[i]));
        diag[i - 1] = 1.0 + ctl.theta * dt_sub * 2.0 * ra;
        if (i > 1) lower[i - 2] = -ctl.theta * dt_sub * (ra - rb);
        if (i < nx - 1) upper[i - 1] = -ctl.theta * dt_sub * (ra + rb);
      }
      Array d2 = diag, r2 = rhs, l2 = lower, up2 = upper;
      solve_tridiag(l2, d2, up2, r2, sol);
      for (int i = 1; i < nx; ++i) U[i] = sol[i - 1];
      if (!U.allFinite())
        throw StepSizeError("solve_two_sided: step blew up (NaN/overflow)");

      t += dt_sub;
      dt_left -= dt_sub;
    }
    if (vt.vanished) break;

    const Real sup = U.maxCoeff();
    traj.sup_u = std::max(traj.sup_u, sup);
    vt.observe(t, sup);
    traj.times.push_back(t);
    traj.g.push_back(g);
    traj.h.push_back(h);
    maybe_snapshot(traj, ctl, t, T, next_snap, physical_xs(), U);
  }

  if (vt.vanished) {
    traj.flag = TrajectoryFlag::Vanished;
  } else if (U.maxCoeff() >= 0.2 * spec.cap_M && (h - g) >= 1.2 * s0 &&
             hp >= 0.0 && gp <= 0.0) {
    traj.flag = TrajectoryFlag::Spreading;
  }
  return traj;
}

FrontTrajectory solve_right(const ReactionSpec& spec, const CompactProfile& u0,
                            Real T, Real window_width, int nx, Real dt,
                            const PeriodicState* pstate,
                            const StepControl& ctl) {
  if (u0.class_tag != ProfileClass::RightFront)
    throw std::invalid_argument("solve_right: datum must be RightFront");
  if (u0.tail_at_p && pstate == nullptr)
    throw std::invalid_argument("solve_right: tail_at_p requires a PeriodicState");
  if (nx < 8) throw std::invalid_argument("solve_right: nx too small");

  const Real W = window_width;
  const Real dy = 1.0 / nx;
  Real h = u0.h0;

  Array U(nx + 1);
  for (int i = 0; i <= nx; ++i)
    U[i] = std::max(0.0, u0.eval(h - W + W * i * dy));
  U[nx] = 0.0;

  const bool dirichlet_left = u0.tail_at_p;

  FrontTrajectory traj;
  traj.dt = dt;
  traj.nx = nx;
  traj.mu = spec.mu;
  traj.omega = spec.omega;
  traj.sup_u = U.maxCoeff();

  VanishTracker vt{default_vanish_level(spec, ctl), spec.omega};
  Real next_snap = 0.0;
  auto physical_xs = [&]() {
    Array xs(nx + 1);
    for (int i = 0; i <= nx; ++i) xs[i] = h - W + W * i * dy;
    return xs;
  };
  maybe_snapshot(traj, ctl, 0.0, T, next_snap, physical_xs(), U);
  traj.times.push_back(0.0);
  traj.h.push_back(h);

  // System over i = i_lo .. nx-1 (i_lo = 0 for the Neumann cut).
  const int i_lo = dirichlet_left ? 1 : 0;
  const int n_sys = nx - i_lo;
  Array lower(n_sys - 1), diag(n_sys), upper(n_sys - 1), rhs(n_sys), sol;

  const long n_steps = std::lround(std::ceil(T / dt - 1e-12));
  Real t = 0.0;
  Real hp = 0.0;
  for (long step = 0; step < n_steps && !vt.vanished; ++step) {
    Real dt_left = std::min(dt, T - t);
    while (dt_left > 1e-15) {
      const Real uy1 = (U[nx - 2] - 4.0 * U[nx - 1]) / (2.0 * dy);
      hp = -spec.mu * uy1 / W;
      traj.max_abs_ux = std::max(traj.max_abs_ux, std::abs(uy1) / W);
      Real dt_sub = dt_left;
      if (std::abs(hp) > 0)
        dt_sub = std::min(dt_sub, ctl.front_cfl * W * dy / std::abs(hp));

      h += dt_sub * hp;

      const Real ra = spec.d / (W * W) / (dy * dy);
      const Real rb = (hp / W) / (2.0 * dy);
      const Real t_new = t + dt_sub;
      if (dirichlet_left) U[0] = pstate->at(t_new, h - W);

      for (int i = i_lo; i < nx; ++i) {
        const int row = i - i_lo;
        const Real x = h - W + W * i * dy;
        Real expl = 0.0;
        if (ctl.theta < 1.0) {
          const Real um = (i == 0) ? U[1] : U[i - 1];  // Neumann ghost at the cut
          const Real lap = U[i + 1] - 2.0 * U[i] + um;
          const Real adv = U[i + 1] - um;
          expl = (1.0 - ctl.theta) * (ra * lap + rb * adv);
        }
        rhs[row] = U[i] + dt_sub * (expl + safe_f(spec, t, x, U[i]));
        diag[row] = 1.0 + ctl.theta * dt_sub * 2.0 * ra;
        if (i == 0) {
          upper[row] = -ctl.theta * dt_sub * 2.0 * ra;  // ghost folds into U[1]
        } else {
          if (row > 0) lower[row - 1] = -ctl.theta * dt_sub * (ra - rb);
          if (i < nx - 1) upper[row] = -ctl.theta * dt_sub * (ra + rb);
        }
        if (i == 1 && dirichlet_left)
          rhs[row] += ctl.theta * dt_sub * (ra - rb) * U[0];
      }
      Array d2 = diag, r2 = rhs, l2 = lower, up2 = upper;
      solve_tridiag(l2, d2, up2, r2, sol);
      for (int i = i_lo; i < nx; ++i) U[i] = sol[i - i_lo];
      if (!U.allFinite())
        throw StepSizeError("solve_right: step blew up (NaN/overflow)");

      t = t_new;
      dt_left -= dt_sub;
    }

    const Real sup = U.maxCoeff();
    traj.sup_u = std::max(traj.sup_u, sup);
    vt.observe(t, sup);
    traj.times.push_back(t);
    traj.h.push_back(h);
    maybe_snapshot(traj, ctl, t, T, next_snap, physical_xs(), U);
    if (vt.vanished) break;
  }

  if (vt.vanished)
    traj.flag = TrajectoryFlag::Vanished;
  else if (U.maxCoeff() >= 0.2 * spec.cap_M && h > u0.h0)
    traj.flag = TrajectoryFlag::Spreading;
  return traj;
}

namespace {

CompactProfile reflect_profile(const CompactProfile& p) {
  CompactProfile r = p;
  switch (p.class_tag) {
    case ProfileClass::RightFront: r.class_tag = ProfileClass::LeftFront; break;
    case ProfileClass::LeftFront: r.class_tag = ProfileClass::RightFront; break;
    default: break;
  }
  r.g0 = -p.h0;
  r.h0 = -p.g0;
  const Eigen::Index n = p.xs.size();
  r.xs.resize(n);
  r.vals.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.xs[i] = -p.xs[n - 1 - i];
    r.vals[i] = p.vals[n - 1 - i];
  }
  return r;
}

}  // namespace

FrontTrajectory solve_left(const ReactionSpec& spec, const CompactProfile& u0,
                           Real T, Real window_width, int nx, Real dt,
                           const PeriodicState* pstate, const StepControl& ctl) {
  if (u0.class_tag != ProfileClass::LeftFront)
    throw std::invalid_argument("solve_left: datum must be LeftFront");
  const ReactionSpec rspec = reflect(spec);
  PeriodicState rps;
  if (pstate) rps = reflect(*pstate);
  FrontTrajectory rt = solve_right(rspec, reflect_profile(u0), T, window_width,
                                   nx, dt, pstate ? &rps : nullptr, ctl);
  FrontTrajectory traj = rt;
  traj.g.resize(rt.h.size());
  for (size_t i = 0; i < rt.h.size(); ++i) traj.g[i] = -rt.h[i];
  traj.h.clear();
  for (auto& snap : traj.snapshots) {
    const Eigen::Index n = snap.xs.size();
    Array xs(n), vals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      xs[i] = -snap.xs[n - 1 - i];
      vals[i] = snap.vals[n - 1 - i];
    }
    snap.xs = xs;
    snap.vals = vals;
  }
  return traj;
}

FrontTrajectory solve_cauchy(const ReactionSpec& spec, const CompactProfile& v0,
                             Real T, Real domain_halfwidth, int nx, Real dt,
                             const PeriodicState* pstate, const StepControl& ctl,
                             Real center) {
  if (nx < 8) throw std::invalid_argument("solve_cauchy: nx too small");
  const Real X = domain_halfwidth;
  const Real dx = 2.0 * X / nx;

  Array xs(nx + 1), U(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    xs[i] = center - X + i * dx;
    U[i] = std::max(0.0, v0.eval(xs[i]));
  }

  FrontTrajectory traj;
  traj.dt = dt;
  traj.nx = nx;
  traj.mu = spec.mu;
  traj.omega = spec.omega;
  traj.sup_u = U.maxCoeff();

  VanishTracker vt{default_vanish_level(spec, ctl), spec.omega};
  Real next_snap = 0.0;
  maybe_snapshot(traj, ctl, 0.0, T, next_snap, xs, U);
  traj.times.push_back(0.0);

  const Real guard_level = pstate ? 0.5 * pstate->min_value() : -1.0;
  auto check_domain = [&](Real tt) {
    if (guard_level <= 0) return;
    // No front when the level is attained everywhere or nowhere.
    if (U.minCoeff() >= guard_level || U.maxCoeff() < guard_level) return;
    const Real margin = 0.05 * 2.0 * X;
    int first = nx, last = 0;
    for (int i = 0; i <= nx; ++i)
      if (U[i] >= guard_level) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    if (xs[first] < xs[0] + margin || xs[last] > xs[nx] - margin)
      throw DomainTooSmallError(
          "solve_cauchy: front reached 5% of the domain edge at t = " +
              std::to_string(tt),
          tt);
  };

  const Real ra = spec.d / (dx * dx);
  Array lower(nx), diag(nx + 1), upper(nx), rhs(nx + 1), sol;

  const long n_steps = std::lround(std::ceil(T / dt - 1e-12));
  Real t = 0.0;
  for (long step = 0; step < n_steps; ++step) {
    const Real dt_sub = std::min(dt, T - t);
    for (int i = 0; i <= nx; ++i) {
      Real expl = 0.0;
      if (ctl.theta < 1.0) {
        const Real um = (i == 0) ? U[1] : U[i - 1];
        const Real up = (i == nx) ? U[nx - 1] : U[i + 1];
        expl = (1.0 - ctl.theta) * ra * (up - 2.0 * U[i] + um);
      }
      rhs[i] = U[i] + dt_sub * (expl + safe_f(spec, t, xs[i], U[i]));
      diag[i] = 1.0 + ctl.theta * dt_sub * 2.0 * ra;
    }
    for (int i = 0; i < nx; ++i) {
      lower[i] = -ctl.theta * dt_sub * ra;
      upper[i] = -ctl.theta * dt_sub * ra;
    }
    upper[0] = -ctl.theta * dt_sub * 2.0 * ra;       // Neumann ghost, left
    lower[nx - 1] = -ctl.theta * dt_sub * 2.0 * ra;  // Neumann ghost, right
    Array d2 = diag, r2 = rhs, l2 = lower, up2 = upper;
    solve_tridiag(l2, d2, up2, r2, sol);
    U = sol;
    if (!U.allFinite())
      throw StepSizeError("solve_cauchy: step blew up (NaN/overflow)");

    t += dt_sub;
    const Real sup = U.maxCoeff();
    traj.sup_u = std::max(traj.sup_u, sup);
    vt.observe(t, sup);
    traj.times.push_back(t);
    maybe_snapshot(traj, ctl, t, T, next_snap, xs, U);
    check_domain(t);
    if (vt.vanished) break;
  }

  if (vt.vanished)
    traj.flag = TrajectoryFlag::Vanished;
  else if (U.maxCoeff() >= 0.2 * spec.cap_M)
    traj.flag = TrajectoryFlag::Spreading;
  return traj;
}

}  // namespace perifront
