#pragma once

#include "perifront/pde_engine.hpp"
#include "perifront/speed_types.hpp"
#include "perifront/weinberger.hpp"

namespace perifront {

struct ClassificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares slope of h(t) (or -g(t)) over the final tail_fraction of
/// the run, sampled at integer multiples of omega to suppress the periodic
/// wobble of h'(t).
SpeedEstimate front_slope_speed(const FrontTrajectory& traj, Real tail_fraction);

/// Rightmost level crossing per snapshot, linear fit on the tail.
SpeedEstimate level_set_speed(const FrontTrajectory& traj, Real level,
                              Real tail_fraction = 0.5);

enum class Outcome { Spreading, Vanished, Undecided };

struct DichotomyEntry {
  Real width = 0;
  Outcome outcome = Outcome::Undecided;
};

struct DichotomyReport {
  std::vector<DichotomyEntry> entries;
  bool monotone_in_width = true;
  Real last_vanished = 0;   // largest width that vanished (0 if none)
  Real first_spread = 0;    // smallest width that spread (inf if none)
};

/// Runs solve_two_sided from height*hat data of each width and reports the
/// spreading/vanishing outcome, the empirical threshold interval, and the
/// monotonicity of the outcome in the width.
DichotomyReport dichotomy_scan(const ReactionSpec& spec,
                               const std::vector<Real>& widths, Real u0_height,
                               Real T, int nx = 256, Real dt = 1e-2);

struct MuSweepPoint {
  Real mu = 0;
  bool ok = false;
  SpeedEstimate speed;
  std::string error;
};

struct MuSweepReport {
  std::vector<MuSweepPoint> points;
  Real cauchy_ref = 0;       // c-bar_+* from the level-set oracle
  bool monotone = true;      // nondecreasing within fit residuals
  bool all_below_cauchy = true;
  bool gap_shrinking = true; // gap to the Cauchy speed shrinks along the grid
};

struct MuSweepConfig {
  Real T = 60.0;
  int nx = 0;          // 0: derived from window/dx defaults
  Real dt = 0;         // 0: omega / 64
  Real window = 40.0;
  Real tail_fraction = 0.5;
  WeinbergerNumerics recursion;  // used when method == Recursion
};

MuSweepReport mu_sweep(const ReactionSpec& spec, const PeriodicState& pstate,
                       const std::vector<Real>& mu_grid, SpeedMethod method,
                       const MuSweepConfig& cfg = {});

struct BelowPReport {
  bool achieved = false;
  Real t0 = 0;
  Real margin = 0;  // min over the grid of p(0,.) - u(t0,.)
};

/// Finds the first multiple of omega at which the two-sided solution sits
/// strictly below p(0,.) on the whole grid. Requires a family with
/// f/u nonincreasing and f_uu <= 0 near p (Logistic qualifies).
BelowPReport check_u_below_p(const ReactionSpec& spec,
                             const PeriodicState& pstate,
                             const CompactProfile& u0, Real T_scan,
                             int nx = 256, Real dt = 1e-2);

/// Max of |u - p| over the cone [-c2 t, c1 t] during the final quarter of a
/// spreading run (snapshots required).
Real max_cone_deviation(const FrontTrajectory& traj, const PeriodicState& ps,
                        Real c1, Real c2, Real final_fraction = 0.25);

/// Max of u over x >= c1' t during the final quarter of the run.
Real max_outside_cone(const FrontTrajectory& traj, Real c1prime,
                      Real final_fraction = 0.25);

}  // namespace perifront
