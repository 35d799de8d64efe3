#include "perifront/speed_lab.hpp"

#include <cmath>

namespace perifront {

namespace {
// Indices of recorded times that sit on integer multiples of omega within
// the final tail_fraction of the run.
std::vector<size_t> tail_period_indices(const std::vector<Real>& times,
                                        Real omega, Real tail_fraction) {
  const Real T = times.back();
  const Real t_lo = T * (1.0 - tail_fraction);
  std::vector<size_t> idx;
  long next_k = static_cast<long>(std::ceil(t_lo / omega));
  for (size_t i = 0; i < times.size() && next_k * omega <= T + 1e-9; ++i) {
    if (std::abs(times[i] - next_k * omega) <= 0.51 * (times[1] - times[0])) {
      idx.push_back(i);
      ++next_k;
    }
  }
  return idx;
}
}  // namespace

SpeedEstimate front_slope_speed(const FrontTrajectory& traj,
                                Real tail_fraction) {
  if (traj.flag == TrajectoryFlag::Vanished)
    throw ClassificationError("front_slope_speed: trajectory vanished");
  if (traj.flag != TrajectoryFlag::Spreading)
    throw ClassificationError("front_slope_speed: trajectory not flagged spreading");
  if (!(tail_fraction > 0 && tail_fraction <= 0.9))
    throw std::invalid_argument("front_slope_speed: tail_fraction in (0, 0.9]");

  const bool use_h = !traj.h.empty();
  const auto idx = tail_period_indices(traj.times, traj.omega, tail_fraction);
  if (idx.size() < 3)
    throw std::invalid_argument("front_slope_speed: too few period samples in the tail");
  std::vector<Real> ts, ys;
  for (size_t i : idx) {
    ts.push_back(traj.times[i]);
    ys.push_back(use_h ? traj.h[i] : -traj.g[i]);
  }
  const LinearFit fit = fit_line(ts, ys);
  SpeedEstimate est;
  est.value = fit.slope;
  est.method = SpeedMethod::FrontSlope;
  est.fit_t_lo = ts.front();
  est.fit_t_hi = ts.back();
  est.residual = fit.rms;
  est.meta["n_samples"] = static_cast<Real>(ts.size());
  return est;
}

SpeedEstimate level_set_speed(const FrontTrajectory& traj, Real level,
                              Real tail_fraction) {
  if (traj.snapshots.size() < 4)
    throw std::invalid_argument("level_set_speed: need snapshots");
  if (level <= 0) throw std::invalid_argument("level_set_speed: level > 0");

  const Real T = traj.times.back();
  const Real t_lo = T * (1.0 - tail_fraction);
  std::vector<Real> ts, xs;
  for (const auto& snap : traj.snapshots) {
    if (snap.t < t_lo) continue;
    const Eigen::Index n = snap.xs.size();
    // rightmost node at or above the level
    Eigen::Index last = -1;
    for (Eigen::Index i = n - 1; i >= 0; --i)
      if (snap.vals[i] >= level) {
        last = i;
        break;
      }
    if (last < 0) continue;        // level not attained in this snapshot
    if (last == n - 1)
      throw std::invalid_argument(
          "level_set_speed: level attained at the domain edge (no front)");
    // linear crossing between last and last+1
    const Real v0 = snap.vals[last], v1 = snap.vals[last + 1];
    const Real x = snap.xs[last] +
                   (v0 - level) / std::max(v0 - v1, 1e-300) *
                       (snap.xs[last + 1] - snap.xs[last]);
    ts.push_back(snap.t);
    xs.push_back(x);
  }
  if (ts.size() < 3)
    throw std::invalid_argument("level_set_speed: level never attained in the tail");
  const LinearFit fit = fit_line(ts, xs);
  SpeedEstimate est;
  est.value = fit.slope;
  est.method = SpeedMethod::LevelSet;
  est.fit_t_lo = ts.front();
  est.fit_t_hi = ts.back();
  est.residual = fit.rms;
  est.meta["level"] = level;
  return est;
}

DichotomyReport dichotomy_scan(const ReactionSpec& spec,
                               const std::vector<Real>& widths, Real u0_height,
                               Real T, int nx, Real dt) {
  for (size_t i = 1; i < widths.size(); ++i)
    if (widths[i] <= widths[i - 1])
      throw std::invalid_argument("dichotomy_scan: widths must increase");

  DichotomyReport rep;
  rep.first_spread = std::numeric_limits<Real>::infinity();
  for (Real w : widths) {
    const CompactProfile u0 = hat_profile(0.0, w, u0_height);
    FrontTrajectory tr = solve_two_sided(spec, u0, T, nx, dt);
    DichotomyEntry e;
    e.width = w;
    switch (tr.flag) {
      case TrajectoryFlag::Spreading: e.outcome = Outcome::Spreading; break;
      case TrajectoryFlag::Vanished: e.outcome = Outcome::Vanished; break;
      default: e.outcome = Outcome::Undecided; break;
    }
    if (e.outcome == Outcome::Vanished) rep.last_vanished = w;
    if (e.outcome == Outcome::Spreading)
      rep.first_spread = std::min(rep.first_spread, w);
    rep.entries.push_back(e);
  }
  // Comparison principle: once a width spreads, larger widths must spread.
  bool seen_spread = false;
  for (const auto& e : rep.entries) {
    if (e.outcome == Outcome::Spreading) seen_spread = true;
    if (seen_spread && e.outcome == Outcome::Vanished)
      rep.monotone_in_width = false;
  }
  return rep;
}

MuSweepReport mu_sweep(const ReactionSpec& spec, const PeriodicState& pstate,
                       const std::vector<Real>& mu_grid, SpeedMethod method,
                       const MuSweepConfig& cfg) {
  if (mu_grid.size() < 4)
    throw std::invalid_argument("mu_sweep: need at least 4 mu points");
  for (size_t i = 1; i < mu_grid.size(); ++i)
    if (mu_grid[i] <= mu_grid[i - 1])
      throw std::invalid_argument("mu_sweep: mu grid must increase");

  MuSweepReport rep;

  // Cauchy reference speed from the level-set oracle.
  {
    const Real level = 0.5 * pstate.min_value();
    const Real K = compute_linear_bound(spec);
    const Real bound = 2.0 * std::sqrt(spec.d * K);
    const Real X = bound * cfg.T * 1.2 + 20.0;
    const int nx = static_cast<int>(2 * X / (spec.L / 48));
    StepControl ctl;
    ctl.snapshot_every = spec.omega;
    const Real dt = cfg.dt > 0 ? cfg.dt : spec.omega / 64;
    FrontTrajectory tr = solve_cauchy(spec, hat_profile(0, 4.0, 0.5), cfg.T, X,
                                      nx, dt, nullptr, ctl);
    rep.cauchy_ref = level_set_speed(tr, level, cfg.tail_fraction).value;
  }

  for (Real mu : mu_grid) {
    ReactionSpec s = spec;
    s.mu = mu;
    MuSweepPoint pt;
    pt.mu = mu;
    try {
      if (method == SpeedMethod::FrontSlope) {
        const Real dt = cfg.dt > 0 ? cfg.dt : spec.omega / 64;
        const int nx =
            cfg.nx > 0 ? cfg.nx
                       : static_cast<int>(cfg.window / (spec.L / 64));
        CompactProfile u0 = ramp_to_p(pstate, 0.0, cfg.window * 0.75, 4 * nx);
        FrontTrajectory tr =
            solve_right(s, u0, cfg.T, cfg.window, nx, dt, &pstate);
        pt.speed = front_slope_speed(tr, cfg.tail_fraction);
      } else if (method == SpeedMethod::Recursion) {
        const XiProfile phi0 = default_phi0(s, pstate, cfg.recursion.nx,
                                            cfg.recursion.per_period);
        pt.speed = estimate_c_plus(s, pstate, phi0, cfg.recursion).estimate;
      } else {
        throw std::invalid_argument("mu_sweep: method must be FrontSlope or Recursion");
      }
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
    rep.points.push_back(pt);
  }

  Real prev = -std::numeric_limits<Real>::infinity();
  Real prev_res = 0;
  for (const auto& pt : rep.points) {
    if (!pt.ok) continue;
    const Real slack = pt.speed.residual + prev_res + 1e-12;
    if (pt.speed.value < prev - slack) rep.monotone = false;
    if (pt.speed.value > rep.cauchy_ref + slack) rep.all_below_cauchy = false;
    prev = pt.speed.value;
    prev_res = pt.speed.residual;
  }
  const auto first_ok = std::find_if(rep.points.begin(), rep.points.end(),
                                     [](const MuSweepPoint& p) { return p.ok; });
  const auto last_ok = std::find_if(rep.points.rbegin(), rep.points.rend(),
                                    [](const MuSweepPoint& p) { return p.ok; });
  if (first_ok != rep.points.end() && last_ok != rep.points.rend())
    rep.gap_shrinking = (rep.cauchy_ref - last_ok->speed.value) <=
                        (rep.cauchy_ref - first_ok->speed.value) + 1e-9;
  return rep;
}

BelowPReport check_u_below_p(const ReactionSpec& spec,
                             const PeriodicState& pstate,
                             const CompactProfile& u0, Real T_scan, int nx,
                             Real dt) {
  if (spec.family == ReactionFamily::Degenerate)
    throw std::invalid_argument(
        "check_u_below_p: degenerate family violates the concavity "
        "hypothesis (f_uu <= 0 fails near p)");

  StepControl ctl;
  ctl.snapshot_every = spec.omega;
  FrontTrajectory tr = solve_two_sided(spec, u0, T_scan, nx, dt, ctl);

  BelowPReport rep;
  Real current_margin = -std::numeric_limits<Real>::infinity();
  for (const auto& snap : tr.snapshots) {
    if (snap.t <= 0) continue;
    const Real k = snap.t / spec.omega;
    if (std::abs(k - std::round(k)) > 1e-6) continue;
    Real margin = std::numeric_limits<Real>::infinity();
    for (Eigen::Index i = 0; i < snap.xs.size(); ++i)
      margin = std::min(margin, pstate.at(0.0, snap.xs[i]) - snap.vals[i]);
    current_margin = margin;
    if (margin > 0) {
      rep.achieved = true;
      rep.t0 = snap.t;
      rep.margin = margin;
      return rep;
    }
  }
  rep.achieved = false;
  rep.margin = current_margin;
  rep.t0 = T_scan;
  return rep;
}

Real max_cone_deviation(const FrontTrajectory& traj, const PeriodicState& ps,
                        Real c1, Real c2, Real final_fraction) {
  const Real T = traj.times.back();
  Real worst = 0;
  for (const auto& snap : traj.snapshots) {
    if (snap.t < T * (1.0 - final_fraction)) continue;
    const Real lo = -c2 * snap.t, hi = c1 * snap.t;
    for (Eigen::Index i = 0; i < snap.xs.size(); ++i) {
      const Real x = snap.xs[i];
      if (x < lo || x > hi) continue;
      worst = std::max(worst, std::abs(snap.vals[i] - ps.at(snap.t, x)));
    }
  }
  return worst;
}

Real max_outside_cone(const FrontTrajectory& traj, Real c1prime,
                      Real final_fraction) {
  const Real T = traj.times.back();
  Real worst = 0;
  for (const auto& snap : traj.snapshots) {
    if (snap.t < T * (1.0 - final_fraction)) continue;
    for (Eigen::Index i = 0; i < snap.xs.size(); ++i)
      if (snap.xs[i] >= c1prime * snap.t)
        worst = std::max(worst, snap.vals[i]);
  }
  return worst;
}

}  // namespace perifront
