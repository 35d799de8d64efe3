#pragma once

#include <functional>

#include "perifront/poincare.hpp"
#include "perifront/semiwave.hpp"
#include "perifront/speed_types.hpp"

namespace perifront {

/// Sampled element of the class M of front-like profiles: nonincreasing in
/// xi, L-periodic in x, positive plateau below p(0,.) as xi -> -inf, zero
/// for large xi. Rows live on the uniform grid xi_i = xi0 + i*dxi with
/// dxi = L/per_period; columns on x_j = j*L/nx.
struct XiProfile {
  Real xi0 = 0;
  Real dxi = 0;
  int per_period = 8;
  Real L = 0;
  Table values;        // m x nx
  Array left_plateau;  // phi(-inf, x) on the x grid
  Array H0;            // per row: supporting point of the diagonal through xi_i
  Real support_xi = 0; // exact bound: phi(xi,.) == 0 iff xi >= support_xi
  // Analytic continuation for xi < xi0 (the tau-ramp tail); when absent the
  // plateau is used.
  std::function<Real(Real, Real)> left_ext;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  Real xi_at(int i) const { return xi0 + i * dxi; }
  Real x_at(int j) const { return j * L / cols(); }
  Real row_val(int i, Real x) const;
  Real eval(Real xi, Real x) const;
  Real H0_at(Real xi) const;  // interp with the exact L-shift reduction
};

/// phi0(xi,x) = tau(xi) w(x) with the hyperbolic ramp tau and w a fraction
/// of p(0,.); the stock member of M used throughout.
XiProfile default_phi0(const ReactionSpec& spec, const PeriodicState& pstate,
                       int nx, int per_period, Real plateau_frac = 0.5);

/// A structurally different member of M: piecewise-linear compact ramp with
/// a higher plateau. Used for the phi-independence checks.
XiProfile compact_phi0(const ReactionSpec& spec, const PeriodicState& pstate,
                       int nx, int per_period, Real plateau_frac = 0.66);

struct WeinbergerNumerics {
  int nx = 64;             // x points per period (divisible by per_period)
  int per_period = 8;      // xi rows per period
  int nt_per_period = 64;  // solver steps per period
  Real window = 40.0;      // solver window behind the front
  Real right_margin = 30.0;  // look-ahead window, Cauchy mode
  int n_max = 40;
  int stagnation_steps = 3;
  Real stagnation_tol = 1e-5;
  Real stall_tol = 1e-6;        // front-advance threshold for stagnation
  Real bisect_tol_frac = 1e-2;  // of the initial bracket width
  Real zero_floor = 1e-13;      // support cutoff, Cauchy mode
  int max_rows = 6000;
  Real theta = 1.0;
  int jobs = 1;
};

enum class RecursionMode { FreeBoundary, Cauchy };

struct RecursionDiag {
  int n = 0;
  Real crit_min_gap = 0;  // min_x (a_n(H2, x) - phi0(-inf, x))
  Real crit_row_min = 0, crit_row_max = 0;
  Real H_at_zero = 0;
  Real plateau_sup_gap = 0;  // ||alpha_n - p(0,.)||_inf
  Real clamp_max = 0;        // largest monotone-projection applied this step
  Real diag_lipschitz = 0;   // max slope along solved diagonals
};

/// State of the recursion a_n^c = max(phi0, Q[a_{n-1}^c](. + c, .)).
struct RecursionState {
  int n = 0;
  Real c = 0;
  RecursionMode mode = RecursionMode::FreeBoundary;
  XiProfile a;
  Array H;       // per row of a: H_n(xi_i) (support edge in Cauchy mode)
  Array alpha;   // plateau alpha_n(x)
  Array Ualpha;  // U restricted to the cell, applied to alpha_{n-1}
  std::vector<RecursionDiag> history;
};

struct GridWindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconclusiveError : std::runtime_error {
  Real probe_c;
  InconclusiveError(const std::string& msg, Real c)
      : std::runtime_error(msg), probe_c(c) {}
};

/// Q_+[phi](xi + y, y) for y on one period: a single right-front solve with
/// the diagonal datum y -> phi(xi + y, y). Returns samples at y_j = j*L/nx.
Array apply_Q_plus(const ReactionSpec& spec, const PeriodicState& pstate,
                   const XiProfile& phi, Real xi, const WeinbergerNumerics& num);

RecursionState make_recursion_state(const XiProfile& phi0, Real c,
                                    RecursionMode mode);

/// One update of the recursion over the xi grid (one solve per diagonal in a
/// period; the L-shift structure covers the rest of the grid exactly).
void recursion_step(RecursionState& state, const ReactionSpec& spec,
                    const PeriodicState& pstate, const XiProfile& phi0,
                    const WeinbergerNumerics& num);

enum class CClass { Below, AboveOrEqual, Undecided };

/// Finite-n surrogate of the xi -> inf dichotomy: Below once the crit-row
/// criterion fires (rigorous by monotonicity), AboveOrEqual once the crit
/// row stagnates while the front advance has stalled, Undecided otherwise.
CClass classify_c(const ReactionSpec& spec, const PeriodicState& pstate,
                  const XiProfile& phi0, Real c, const WeinbergerNumerics& num,
                  RecursionMode mode = RecursionMode::FreeBoundary,
                  std::vector<RecursionDiag>* diag_out = nullptr,
                  int* n_used = nullptr);

struct ProbeLog {
  Real c = 0;
  CClass label = CClass::Undecided;
  int n_used = 0;
};

struct RecursionSpeed {
  SpeedEstimate estimate;  // per unit time
  Real c_per_period = 0;   // per omega
  Real c_lo = 0, c_hi = 0;
  std::vector<ProbeLog> probes;
};

/// Bisection for c_+ = sup{c : a^c(inf,.) == p(0,.)}; auto-bracket
/// [0, c* omega] with the semi-wave upper bound.
RecursionSpeed estimate_c_plus(const ReactionSpec& spec,
                               const PeriodicState& pstate,
                               const XiProfile& phi0,
                               const WeinbergerNumerics& num);

/// Leftward speed via the reflected problem.
RecursionSpeed estimate_c_minus(const ReactionSpec& spec,
                                const PeriodicState& pstate,
                                const WeinbergerNumerics& num);

/// Cauchy-mode speed c-bar_+ via the recursion on the whole-line Poincare map.
RecursionSpeed estimate_c_cauchy(const ReactionSpec& spec,
                                 const PeriodicState& pstate,
                                 const XiProfile& phi0,
                                 const WeinbergerNumerics& num);

struct ChainCheck {
  std::string name;
  bool pass = false;
  Real worst_margin = 0;
};

struct SubsolutionReport {
  Real B = 0, c = 0, cprime = 0, A = 0, Aprime = 0, eps = 0;
  int m = 0;
  std::vector<ChainCheck> checks;
  bool all_pass() const {
    for (const auto& c_ : checks)
      if (!c_.pass) return false;
    return true;
  }
};

/// Numerical verification of the truncated-operator chain: the plateau
/// lemma for U_B^n[w], the w-recursion identity, the plateau structure of
/// the truncated xi-recursions, and the subsolution inequality
/// e_{n+1} <= U_B[e_n], all checked at sampled points with margins.
SubsolutionReport verify_subsolution_chain(const ReactionSpec& spec,
                                           const PeriodicState& pstate, Real B,
                                           int m, Real c, Real cprime, Real A,
                                           Real Aprime,
                                           const WeinbergerNumerics& num);

}  // namespace perifront
