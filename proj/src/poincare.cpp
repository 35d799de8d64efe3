#include "perifront/poincare.hpp"

#include <cmath>

namespace perifront {

Real smooth_cutoff(Real s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const Real r = (s - 0.5) / 0.5;
  return 1.0 - r * r * r * (10.0 + r * (-15.0 + 6.0 * r));
}

namespace {

CompactProfile profile_from_snapshot(const Snapshot& snap, ProfileClass tag,
                                     Real g, Real h, bool below_p,
                                     bool tail_at_p) {
  CompactProfile out;
  out.class_tag = tag;
  out.g0 = g;
  out.h0 = h;
  out.xs = snap.xs;
  out.vals = snap.vals;
  out.below_p = below_p;
  out.tail_at_p = tail_at_p;
  return out;
}

void check_class(const CompactProfile& prof, const PeriodicState& ps,
                 Real slack) {
  if (!prof.below_p) return;
  for (Eigen::Index i = 0; i < prof.xs.size(); ++i) {
    const Real bound = ps.at(0.0, prof.xs[i]);
    if (prof.vals[i] > bound + slack)
      throw std::runtime_error(
          "apply_U: image left class C (exceeds p(0,.) beyond slack)");
  }
}

}  // namespace

CompactProfile apply_U(const ReactionSpec& spec, const PeriodicState& pstate,
                       const CompactProfile& phi, const PoincareNumerics& num) {
  const Real omega = spec.omega;
  const Real dt = omega / num.nt_per_period;
  StepControl ctl;
  ctl.theta = num.theta;

  CompactProfile out;
  switch (phi.class_tag) {
    case ProfileClass::TwoSided: {
      FrontTrajectory tr = solve_two_sided(spec, phi, omega, num.nx, dt, ctl);
      if (tr.flag == TrajectoryFlag::Vanished) {
        out = phi;
        out.vals.setZero();
        out.g0 = tr.g.back();
        out.h0 = tr.h.back();
        return out;
      }
      out = profile_from_snapshot(tr.snapshots.back(), ProfileClass::TwoSided,
                                  tr.g.back(), tr.h.back(), phi.below_p, false);
      break;
    }
    case ProfileClass::RightFront: {
      FrontTrajectory tr = solve_right(spec, phi, omega, num.window, num.nx, dt,
                                       &pstate, ctl);
      out = profile_from_snapshot(tr.snapshots.back(), ProfileClass::RightFront,
                                  0.0, tr.h.back(), phi.below_p, phi.tail_at_p);
      break;
    }
    case ProfileClass::LeftFront: {
      FrontTrajectory tr = solve_left(spec, phi, omega, num.window, num.nx, dt,
                                      &pstate, ctl);
      out = profile_from_snapshot(tr.snapshots.back(), ProfileClass::LeftFront,
                                  tr.g.back(), 0.0, phi.below_p, phi.tail_at_p);
      break;
    }
    case ProfileClass::WholeLine: {
      // Finite propagation up to exponential tails: size the domain by the
      // support radius plus a KPP-type bound on one period of motion.
      Real radius = 0.0;
      for (Eigen::Index i = 0; i < phi.xs.size(); ++i)
        if (phi.vals[i] > 0) radius = std::max(radius, std::abs(phi.xs[i]));
      const Real K = std::max(compute_linear_bound(spec), 1e-8);
      const Real speed_bound = 2.0 * std::sqrt(2.0 * spec.d * K);
      const Real X = radius + speed_bound * omega + num.domain_margin;
      const int nx = std::max(num.nx, static_cast<int>(2.0 * X / (spec.L / 64)));
      FrontTrajectory tr =
          solve_cauchy(spec, phi, omega, X, nx, dt, nullptr, ctl);
      out = profile_from_snapshot(tr.snapshots.back(), ProfileClass::WholeLine,
                                  0.0, 0.0, phi.below_p, false);
      break;
    }
  }
  check_class(out, pstate, num.class_slack);
  return out;
}

std::vector<CompactProfile> apply_U_iterates(const ReactionSpec& spec,
                                             const PeriodicState& pstate,
                                             const CompactProfile& phi, int n,
                                             const PoincareNumerics& num) {
  if (n < 1) throw std::invalid_argument("apply_U_iterates: need n >= 1");
  std::vector<CompactProfile> out;
  out.reserve(n);
  CompactProfile cur = phi;
  for (int k = 0; k < n; ++k) {
    cur = apply_U(spec, pstate, cur, num);
    out.push_back(cur);
  }
  return out;
}

Real apply_U_truncated(const ReactionSpec& spec, const PeriodicState& pstate,
                       const CompactProfile& phi, Real B, Real x,
                       const PoincareNumerics& num) {
  if (B <= 0) throw std::invalid_argument("apply_U_truncated: need B > 0");
  Real g0 = phi.g0, h0 = phi.h0;
  if (phi.class_tag == ProfileClass::RightFront ||
      phi.class_tag == ProfileClass::WholeLine)
    g0 = -std::numeric_limits<Real>::infinity();
  if (phi.class_tag == ProfileClass::LeftFront ||
      phi.class_tag == ProfileClass::WholeLine)
    h0 = std::numeric_limits<Real>::infinity();

  if (x <= g0 - B || x >= h0 + B) return 0.0;
  const Real lo = std::max(g0, x - B);
  const Real hi = std::min(h0, x + B);
  if (!(lo < hi)) return 0.0;

  CompactProfile datum;
  datum.class_tag = ProfileClass::TwoSided;
  datum.g0 = lo;
  datum.h0 = hi;
  const int n = std::max(num.nx, 64) + 1;
  datum.xs.resize(n);
  datum.vals.resize(n);
  for (int i = 0; i < n; ++i) {
    const Real y = lo + (hi - lo) * i / (n - 1);
    datum.xs[i] = y;
    datum.vals[i] = smooth_cutoff(std::abs(y - x) / B) * phi.eval(y);
  }
  datum.vals[0] = datum.vals[n - 1] = 0.0;
  if (datum.vals.maxCoeff() <= 0.0) return 0.0;

  StepControl ctl;
  ctl.theta = num.theta;
  const Real dt = spec.omega / num.nt_per_period;
  FrontTrajectory tr = solve_two_sided(spec, datum, spec.omega, num.nx, dt, ctl);
  if (tr.flag == TrajectoryFlag::Vanished) return 0.0;
  const Snapshot& fin = tr.snapshots.back();
  if (x <= tr.g.back() || x >= tr.h.back()) return 0.0;
  (void)pstate;
  return fin.eval(x);
}

Array apply_U_periodic_cell(const ReactionSpec& spec, const Array& cell,
                            int nt_per_period) {
  Array v = cell;
  advance_cell_one_period(spec, v, 0.0, nt_per_period);
  return v;
}

}  // namespace perifront
