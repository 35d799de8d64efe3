#pragma once

#include <vector>

#include "perifront/periodic_state.hpp"

namespace perifront {

enum class ProfileClass { TwoSided, RightFront, LeftFront, WholeLine };

/// Piecewise-linear initial/solution profile over a stated finite window.
/// Evaluation is zero beyond finite supporting points and extends the last
/// sample constantly toward an infinite tail (used for right/left-front
/// data whose tail sits at the plateau or at p).
struct CompactProfile {
  ProfileClass class_tag = ProfileClass::TwoSided;
  Real g0 = 0.0;  // left supporting point (ignored for RightFront/WholeLine)
  Real h0 = 0.0;  // right supporting point (ignored for LeftFront/WholeLine)
  Array xs, vals;
  bool below_p = false;   // class-C membership flag: 0 < phi <= p(0,.)
  bool tail_at_p = false; // infinite tail follows p; selects the Dirichlet cut

  Real eval(Real x) const;
};

/// Hat profile of the given height on [center-width/2, center+width/2].
CompactProfile hat_profile(Real center, Real width, Real height, int n = 129);

/// RightFront datum min(p(0,x), max(0, h0-x)) with tail at p.
CompactProfile ramp_to_p(const PeriodicState& ps, Real h0, Real depth, int n);

enum class TrajectoryFlag { None, Spreading, Vanished };

struct Snapshot {
  Real t;
  Array xs, vals;
  Real eval(Real x) const;  // piecewise linear, zero outside the window
};

struct FrontTrajectory {
  std::vector<Real> times;
  std::vector<Real> g, h;  // g empty for RightFront runs, h empty for LeftFront
  std::vector<Snapshot> snapshots;
  Real dt = 0;
  int nx = 0;
  Real mu = 0;
  Real omega = 0;
  TrajectoryFlag flag = TrajectoryFlag::None;
  Real sup_u = 0;        // max of u over the whole run
  Real max_abs_ux = 0;   // max |u_x| observed at the free boundaries
};

struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainTooSmallError : std::runtime_error {
  Real t_offending;
  DomainTooSmallError(const std::string& msg, Real t)
      : std::runtime_error(msg), t_offending(t) {}
};

/// Shared stepping knobs. theta is the implicitness of the linear part
/// (diffusion + front advection); the reaction stays explicit. Front motion
/// is sub-stepped so it never exceeds front_cfl cells per sub-step.
struct StepControl {
  Real theta = 1.0;
  Real front_cfl = 0.2;
  Real snapshot_every = 0.0;  // 0: endpoints only
  Real vanish_level = -1.0;   // threshold for ||u||_inf; <0: 1e-6 * cap_M
  Real min_width_factor = 0.02;  // two-sided width floor, relative to max(1, s0)
};

/// Two-sided free boundary problem on g(t) < x < h(t) with Stefan conditions
/// g' = -mu u_x(t,g), h' = -mu u_x(t,h), front-fixed to y in [0,1].
FrontTrajectory solve_two_sided(const ReactionSpec& spec,
                                const CompactProfile& u0, Real T, int nx,
                                Real dt, const StepControl& ctl = {});

/// Right one-sided problem on (-inf, h(t)], truncated to a sliding window of
/// width window_width behind the front. Left artificial boundary: Dirichlet
/// p(t, cut) when u0.tail_at_p (requires pstate), else homogeneous Neumann.
FrontTrajectory solve_right(const ReactionSpec& spec, const CompactProfile& u0,
                            Real T, Real window_width, int nx, Real dt,
                            const PeriodicState* pstate = nullptr,
                            const StepControl& ctl = {});

/// Mirror of solve_right under x -> -x with the reflected reaction.
FrontTrajectory solve_left(const ReactionSpec& spec, const CompactProfile& u0,
                           Real T, Real window_width, int nx, Real dt,
                           const PeriodicState* pstate = nullptr,
                           const StepControl& ctl = {});

/// Cauchy problem on the truncated line [center-X, center+X] with homogeneous
/// Neumann ends; fronts absent, snapshots only. When pstate is given, raises
/// DomainTooSmallError once the level-(0.5 min p) set comes within 5% of the
/// domain edge.
FrontTrajectory solve_cauchy(const ReactionSpec& spec, const CompactProfile& v0,
                             Real T, Real domain_halfwidth, int nx, Real dt,
                             const PeriodicState* pstate = nullptr,
                             const StepControl& ctl = {}, Real center = 0.0);

}  // namespace perifront
