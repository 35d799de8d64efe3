#include "perifront/weinberger.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <thread>

namespace perifront {

// ---------------------------------------------------------------------------
// XiProfile

Real XiProfile::row_val(int i, Real x) const {
  const int n = cols();
  const Real s = frac_part(x / L) * n;
  const int j = static_cast<int>(s) % n;
  const Real w = s - std::floor(s);
  const int j1 = (j + 1) % n;
  return values(i, j) + w * (values(i, j1) - values(i, j));
}

Real XiProfile::eval(Real xi, Real x) const {
  const Real s = (xi - xi0) / dxi;
  const int m = rows();
  if (s <= 0.0) {
    if (left_ext) return left_ext(xi, x);
    return interp_periodic(left_plateau, L, x);
  }
  if (s >= m - 1) return row_val(m - 1, x);
  const int i = static_cast<int>(s);
  const Real w = s - i;
  return (1.0 - w) * row_val(i, x) + w * row_val(i + 1, x);
}

namespace {
// Lookup in per-row samples with the exact shift law v(xi + kL) = v(xi) - kL.
Real shifted_lookup(const Array& samples, Real xi0, Real dxi, Real L, Real xi) {
  const int m = static_cast<int>(samples.size());
  const Real xi_max = xi0 + (m - 1) * dxi;
  Real shift = 0.0;
  if (xi < xi0) {
    const Real k = std::ceil((xi0 - xi) / L);
    xi += k * L;
    shift = k * L;  // value at the original xi is larger by kL
  } else if (xi > xi_max) {
    const Real k = std::ceil((xi - xi_max) / L);
    xi -= k * L;
    shift = -k * L;
  }
  const Real s = std::clamp((xi - xi0) / dxi, 0.0, static_cast<Real>(m - 1));
  const int i = std::min(static_cast<int>(s), m - 2);
  const Real w = s - i;
  return samples[i] + w * (samples[i + 1] - samples[i]) + shift;
}
}  // namespace

Real XiProfile::H0_at(Real xi) const {
  return shifted_lookup(H0, xi0, dxi, L, xi);
}

// ---------------------------------------------------------------------------
// Stock members of M

namespace {
XiProfile build_profile(const ReactionSpec& spec, const PeriodicState& pstate,
                        int nx, int per_period, Real plateau_frac,
                        const std::function<Real(Real)>& ramp, Real support_xi,
                        bool analytic_ext) {
  if (nx % per_period != 0)
    throw std::invalid_argument("phi0: nx must be divisible by per_period");
  const Real L = spec.L;
  XiProfile p;
  p.L = L;
  p.per_period = per_period;
  p.dxi = L / per_period;
  p.xi0 = -2.0 * L;
  p.support_xi = support_xi;

  Array w(nx);
  for (int j = 0; j < nx; ++j)
    w[j] = plateau_frac * pstate.at(0.0, j * L / nx);
  p.left_plateau = w;

  const int top_rows = static_cast<int>(
      std::ceil((support_xi + L - p.xi0) / p.dxi)) + 3;
  p.values.resize(top_rows, nx);
  p.H0.resize(top_rows);
  for (int i = 0; i < top_rows; ++i) {
    const Real xi = p.xi_at(i);
    for (int j = 0; j < nx; ++j) p.values(i, j) = ramp(xi) * w[j];
    p.H0[i] = support_xi - xi;
  }
  if (analytic_ext) {
    const Real Lcap = L;
    p.left_ext = [ramp, w, Lcap](Real xi, Real x) {
      return ramp(xi) * interp_periodic(w, Lcap, x);
    };
  }
  return p;
}
}  // namespace

XiProfile default_phi0(const ReactionSpec& spec, const PeriodicState& pstate,
                       int nx, int per_period, Real plateau_frac) {
  auto tau = [](Real xi) {
    const Real m = std::max(-xi, 0.0);
    return m / (m + 1.0);
  };
  return build_profile(spec, pstate, nx, per_period, plateau_frac, tau, 0.0,
                       true);
}

XiProfile compact_phi0(const ReactionSpec& spec, const PeriodicState& pstate,
                       int nx, int per_period, Real plateau_frac) {
  const Real dxi = spec.L / per_period;
  const Real lo = -8.0 * dxi, hi = 4.0 * dxi;
  auto ramp = [lo, hi](Real xi) {
    if (xi <= lo) return 1.0;
    if (xi >= hi) return 0.0;
    return (hi - xi) / (hi - lo);
  };
  return build_profile(spec, pstate, nx, per_period, plateau_frac, ramp, hi,
                       false);
}

// ---------------------------------------------------------------------------
// Diagonal solves

namespace {

constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

struct FieldView {
  std::function<Real(Real, Real)> eval;   // (xi, x)
  std::function<Real(Real)> support;      // zeta -> diagonal support point
};

struct DiagonalSolve {
  bool empty = true;
  Array xs, vals;
  Real h = kNegInf;
  Array tail;  // periodic far-field behind the window
  Real L = 0;
  Real lip = 0;

  Real eval(Real y) const {
    if (empty) return 0.0;
    if (y <= xs[0]) return tail.size() ? interp_periodic(tail, L, y) : vals[0];
    if (y >= xs[xs.size() - 1]) return 0.0;
    return interp_linear(xs, vals, y);
  }
};

Real max_slope(const Array& xs, const Array& vals) {
  Real m = 0;
  for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) {
    const Real dx = xs[i + 1] - xs[i];
    if (dx > 0) m = std::max(m, std::abs(vals[i + 1] - vals[i]) / dx);
  }
  return m;
}

DiagonalSolve solve_diagonal(const ReactionSpec& spec,
                             const PeriodicState& pstate,
                             const FieldView& field, Real zeta,
                             const Array& tail, RecursionMode mode,
                             const WeinbergerNumerics& num) {
  const Real L = spec.L;
  const Real dx = L / num.nx;
  const Real dt = spec.omega / num.nt_per_period;
  StepControl ctl;
  ctl.theta = num.theta;

  DiagonalSolve out;
  out.tail = tail;
  out.L = L;

  if (mode == RecursionMode::FreeBoundary) {
    const Real Hz = field.support(zeta);
    const Real W = num.window;
    const int n = std::max(32, static_cast<int>(std::lround(W / dx)));
    CompactProfile datum;
    datum.class_tag = ProfileClass::RightFront;
    datum.h0 = Hz;
    datum.xs.resize(n + 1);
    datum.vals.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const Real y = Hz - W + W * i / n;
      datum.xs[i] = y;
      datum.vals[i] = std::max(0.0, field.eval(zeta + y, y));
    }
    datum.vals[n] = 0.0;
    if (datum.vals.maxCoeff() <= 0.0) return out;
    FrontTrajectory tr =
        solve_right(spec, datum, spec.omega, W, n, dt, &pstate, ctl);
    const Snapshot& fin = tr.snapshots.back();
    out.empty = false;
    out.xs = fin.xs;
    out.vals = fin.vals;
    out.h = tr.h.back();
    out.lip = max_slope(fin.xs, fin.vals);
  } else {
    const Real E = field.support(zeta);
    const Real lo = E - num.window, hi = E + num.right_margin;
    const int n = std::max(32, static_cast<int>(std::lround((hi - lo) / dx)));
    CompactProfile datum;
    datum.class_tag = ProfileClass::WholeLine;
    datum.xs.resize(n + 1);
    datum.vals.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const Real y = lo + (hi - lo) * i / n;
      datum.xs[i] = y;
      datum.vals[i] = std::max(0.0, field.eval(zeta + y, y));
    }
    if (datum.vals.maxCoeff() <= 0.0) return out;
    FrontTrajectory tr = solve_cauchy(spec, datum, spec.omega, (hi - lo) / 2, n,
                                      dt, nullptr, ctl, (lo + hi) / 2);
    const Snapshot& fin = tr.snapshots.back();
    out.empty = false;
    out.xs = fin.xs;
    out.vals = fin.vals;
    out.h = kNegInf;
    for (Eigen::Index i = fin.xs.size() - 1; i >= 0; --i)
      if (fin.vals[i] > num.zero_floor) {
        out.h = fin.xs[i];
        break;
      }
    out.lip = max_slope(fin.xs, fin.vals);
  }
  return out;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(jobs, n);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

Array apply_Q_plus(const ReactionSpec& spec, const PeriodicState& pstate,
                   const XiProfile& phi, Real xi,
                   const WeinbergerNumerics& num) {
  Array tail =
      apply_U_periodic_cell(spec, phi.left_plateau, num.nt_per_period);
  FieldView field{
      [&phi](Real z, Real x) { return phi.eval(z, x); },
      [&phi](Real z) { return phi.H0_at(z); }};
  DiagonalSolve ds = solve_diagonal(spec, pstate, field, xi, tail,
                                    RecursionMode::FreeBoundary, num);
  Array out(num.nx);
  for (int j = 0; j < num.nx; ++j) out[j] = ds.eval(j * spec.L / num.nx);
  return out;
}

RecursionState make_recursion_state(const XiProfile& phi0, Real c,
                                    RecursionMode mode) {
  RecursionState st;
  st.n = 0;
  st.c = c;
  st.mode = mode;
  st.a = phi0;
  st.H = phi0.H0;
  st.alpha = phi0.left_plateau;
  st.Ualpha = Array();
  return st;
}

void recursion_step(RecursionState& st, const ReactionSpec& spec,
                    const PeriodicState& pstate, const XiProfile& phi0,
                    const WeinbergerNumerics& num) {
  const int nx = st.a.cols();
  const Real L = st.a.L;
  const Real dx = L / nx;
  const int q = nx / st.a.per_period;
  const Real c = st.c;

  // Plateau machinery: the extension of a_{n-1} below the window uses
  // U[alpha_{n-2}]; the far field of this step's solves is U[alpha_{n-1}].
  const Array prev_Ualpha = st.Ualpha;
  const Array Ualpha_new =
      apply_U_periodic_cell(spec, st.alpha, num.nt_per_period);

  const XiProfile& a = st.a;
  auto field_eval = [&](Real xi, Real x) -> Real {
    if (xi >= a.xi0) return a.eval(xi, x);
    Real base = phi0.eval(xi, x);
    if (prev_Ualpha.size())
      base = std::max(base, interp_periodic(prev_Ualpha, L, x));
    return base;
  };
  auto support = [&](Real zeta) {
    return shifted_lookup(st.H, a.xi0, a.dxi, L, zeta);
  };
  FieldView field{field_eval, support};

  std::vector<DiagonalSolve> ds(nx);
  parallel_for(nx, num.jobs, [&](int s) {
    const Real zeta = a.xi0 + c + s * dx;
    ds[s] = solve_diagonal(spec, pstate, field, zeta, Ualpha_new, st.mode, num);
  });

  Real clamp_max = 0.0;
  Real lip = 0.0;
  for (const auto& d : ds) lip = std::max(lip, d.lip);

  const int old_rows = st.a.rows();
  auto q_read = [&](long i, int j) -> Real {
    const long idx = i * q - j;
    int s = static_cast<int>(((idx % nx) + nx) % nx);
    const long k = (idx - s) / nx;
    return ds[s].eval(j * dx + static_cast<Real>(k) * L);
  };
  auto h_read = [&](long i) -> Real {
    const long idx = i * q;
    int s = static_cast<int>(((idx % nx) + nx) % nx);
    const long k = (idx - s) / nx;
    if (ds[s].empty || ds[s].h == kNegInf) return kNegInf;
    return ds[s].h - static_cast<Real>(k) * L;
  };

  auto fill_row = [&](long i, Array& row) {
    const Real xi = st.a.xi_at(static_cast<int>(i));
    for (int j = 0; j < nx; ++j) {
      Real v = std::max(phi0.eval(xi, j * dx), q_read(i, j));
      if (i < old_rows) {
        const Real old = st.a.values(i, j);
        if (v < old) {
          clamp_max = std::max(clamp_max, old - v);
          v = old;
        }
      }
      row[j] = v;
    }
  };

  const Real zero_level =
      (st.mode == RecursionMode::Cauchy) ? num.zero_floor : 0.0;

  std::vector<Array> rows;
  std::vector<Real> Hs;
  rows.reserve(old_rows + 8);
  for (long i = 0; i < old_rows; ++i) {
    Array row(nx);
    fill_row(i, row);
    rows.push_back(std::move(row));
    Real Hn = std::max(phi0.H0_at(st.a.xi_at(static_cast<int>(i))), h_read(i));
    if (Hn < st.H[i]) {
      clamp_max = std::max(clamp_max, st.H[i] - Hn);
      Hn = st.H[i];
    }
    Hs.push_back(Hn);
  }
  // Extend upward until the top two rows are (numerically) zero.
  auto row_is_zero = [&](const Array& r) { return r.maxCoeff() <= zero_level; };
  long i_top = old_rows;
  while (rows.size() < 2 || !row_is_zero(rows[rows.size() - 1]) ||
         !row_is_zero(rows[rows.size() - 2])) {
    if (static_cast<int>(rows.size()) > num.max_rows)
      throw GridWindowError("recursion xi-window exhausted the row cap");
    Array row(nx);
    fill_row(i_top, row);
    rows.push_back(std::move(row));
    Hs.push_back(std::max(phi0.H0_at(st.a.xi_at(static_cast<int>(i_top))),
                          h_read(i_top)));
    ++i_top;
  }

  if (clamp_max > 5e-3)
    throw std::runtime_error(
        "recursion monotonicity violated beyond discretization slack: " +
        std::to_string(clamp_max));

  const int m_new = static_cast<int>(rows.size());
  st.a.values.resize(m_new, nx);
  st.H.resize(m_new);
  for (int i = 0; i < m_new; ++i) {
    st.a.values.row(i) = rows[i].transpose();
    st.H[i] = Hs[i];
  }
  Array alpha_new = Ualpha_new.max(phi0.left_plateau);
  alpha_new = alpha_new.max(st.alpha);  // monotone in n
  st.alpha = alpha_new;
  st.Ualpha = Ualpha_new;
  st.a.left_plateau = st.alpha;
  st.n += 1;

  // Diagnostics
  RecursionDiag d;
  d.n = st.n;
  const Real crit_xi =
      phi0.support_xi + (st.mode == RecursionMode::FreeBoundary ? L : 0.0);
  const int i_crit = static_cast<int>(std::lround((crit_xi - st.a.xi0) / st.a.dxi));
  Real gap = std::numeric_limits<Real>::infinity();
  Real rmin = std::numeric_limits<Real>::infinity(), rmax = -rmin;
  for (int j = 0; j < nx; ++j) {
    const Real v = (i_crit < m_new) ? st.a.values(i_crit, j) : 0.0;
    gap = std::min(gap, v - phi0.left_plateau[j]);
    rmin = std::min(rmin, v);
    rmax = std::max(rmax, v);
  }
  d.crit_min_gap = gap;
  d.crit_row_min = rmin;
  d.crit_row_max = rmax;
  const int i_zero = static_cast<int>(std::lround((0.0 - st.a.xi0) / st.a.dxi));
  d.H_at_zero = (i_zero >= 0 && i_zero < m_new) ? st.H[i_zero] : kNegInf;
  Real psg = 0;
  for (int j = 0; j < nx; ++j)
    psg = std::max(psg, std::abs(st.alpha[j] - pstate.at(0.0, j * dx)));
  d.plateau_sup_gap = psg;
  d.clamp_max = clamp_max;
  d.diag_lipschitz = lip;
  st.history.push_back(d);
}

CClass classify_c(const ReactionSpec& spec, const PeriodicState& pstate,
                  const XiProfile& phi0, Real c, const WeinbergerNumerics& num,
                  RecursionMode mode, std::vector<RecursionDiag>* diag_out,
                  int* n_used) {
  RecursionState st = make_recursion_state(phi0, c, mode);
  const Real crit_xi =
      phi0.support_xi + (mode == RecursionMode::FreeBoundary ? spec.L : 0.0);
  std::deque<Array> recent_rows;
  std::deque<Real> recent_H;
  CClass result = CClass::Undecided;
  const int k = num.stagnation_steps;

  for (int n = 1; n <= num.n_max; ++n) {
    recursion_step(st, spec, pstate, phi0, num);
    const RecursionDiag& d = st.history.back();
    if (n_used) *n_used = n;
    if (d.crit_min_gap > 0) {
      result = CClass::Below;
      break;
    }
    const int i_crit =
        static_cast<int>(std::lround((crit_xi - st.a.xi0) / st.a.dxi));
    Array crit_row = (i_crit < st.a.rows())
                         ? Array(st.a.values.row(i_crit).transpose())
                         : Array(Array::Zero(st.a.cols()));
    recent_rows.push_back(crit_row);
    recent_H.push_back(d.H_at_zero);
    if (static_cast<int>(recent_rows.size()) > k + 1) {
      recent_rows.pop_front();
      recent_H.pop_front();
    }
    if (n >= std::max(6, k + 1) &&
        static_cast<int>(recent_rows.size()) == k + 1) {
      const Real row_change =
          (recent_rows.back() - recent_rows.front()).abs().maxCoeff();
      const Real h_change = recent_H.back() - recent_H.front();
      if (row_change < num.stagnation_tol && h_change < num.stall_tol) {
        result = CClass::AboveOrEqual;
        break;
      }
    }
  }
  if (diag_out) *diag_out = st.history;
  return result;
}

namespace {

RecursionSpeed bisect_speed(const ReactionSpec& spec,
                            const PeriodicState& pstate, const XiProfile& phi0,
                            const WeinbergerNumerics& num, RecursionMode mode,
                            Real c_hi_initial) {
  RecursionSpeed out;
  auto probe = [&](Real c) {
    int n_used = 0;
    const CClass cls = classify_c(spec, pstate, phi0, c, num, mode, nullptr,
                                  &n_used);
    out.probes.push_back({c, cls, n_used});
    return cls;
  };

  Real lo = 0.0, hi = c_hi_initial;
  if (probe(lo) != CClass::Below)
    throw InconclusiveError(
        "recursion: lower bracket c = 0 did not classify Below", lo);
  CClass top = probe(hi);
  if (top == CClass::Below) {
    hi *= 1.25;
    top = probe(hi);
  }
  if (top != CClass::AboveOrEqual)
    throw InconclusiveError("recursion: upper bracket did not classify "
                            "AboveOrEqual",
                            hi);

  const Real tol_abs = num.bisect_tol_frac * (hi - lo);
  while (hi - lo > tol_abs) {
    const Real mid = 0.5 * (lo + hi);
    const CClass cls = probe(mid);
    if (cls == CClass::Undecided)
      throw InconclusiveError(
          "recursion: probe classified Undecided within n_max", mid);
    if (cls == CClass::Below)
      lo = mid;
    else
      hi = mid;
  }

  out.c_lo = lo;
  out.c_hi = hi;
  out.c_per_period = 0.5 * (lo + hi);
  out.estimate.value = out.c_per_period / spec.omega;
  out.estimate.method = SpeedMethod::Recursion;
  out.estimate.residual = 0.5 * (hi - lo) / spec.omega;
  out.estimate.fit_t_lo = lo / spec.omega;
  out.estimate.fit_t_hi = hi / spec.omega;
  out.estimate.meta["c_per_period"] = out.c_per_period;
  out.estimate.meta["n_max"] = num.n_max;
  out.estimate.meta["bracket_hi_initial"] = c_hi_initial;
  return out;
}

}  // namespace

RecursionSpeed estimate_c_plus(const ReactionSpec& spec,
                               const PeriodicState& pstate,
                               const XiProfile& phi0,
                               const WeinbergerNumerics& num) {
  const Real c_hi = upper_bound_c_plus(spec);
  return bisect_speed(spec, pstate, phi0, num, RecursionMode::FreeBoundary,
                      c_hi);
}

RecursionSpeed estimate_c_minus(const ReactionSpec& spec,
                                const PeriodicState& pstate,
                                const WeinbergerNumerics& num) {
  const ReactionSpec rspec = reflect(spec);
  const PeriodicState rps = reflect(pstate);
  const XiProfile phi0 = default_phi0(rspec, rps, num.nx, num.per_period);
  RecursionSpeed out = estimate_c_plus(rspec, rps, phi0, num);
  out.estimate.meta["direction"] = -1.0;
  return out;
}

RecursionSpeed estimate_c_cauchy(const ReactionSpec& spec,
                                 const PeriodicState& pstate,
                                 const XiProfile& phi0,
                                 const WeinbergerNumerics& num) {
  const Real K = compute_linear_bound(spec);
  const Real c_hi = 2.0 * std::sqrt(spec.d * K) * spec.omega * 1.05;
  RecursionSpeed out =
      bisect_speed(spec, pstate, phi0, num, RecursionMode::Cauchy, c_hi);
  out.estimate.meta["mode_cauchy"] = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Section-4 verification harness

namespace {

// U_B applied to an L-periodic function given by cell samples; returns cell
// samples of the image.
Array apply_UB_periodic(const ReactionSpec& spec, const PeriodicState& pstate,
                        const Array& cell, Real B,
                        const WeinbergerNumerics& num,
                        const PoincareNumerics& pnum) {
  const int nx = static_cast<int>(cell.size());
  const Real L = spec.L;
  CompactProfile phi;
  phi.class_tag = ProfileClass::WholeLine;
  const Real lo = -B - 2 * L, hi = L + B + 2 * L;
  const int n = static_cast<int>(std::lround((hi - lo) / (L / nx))) + 1;
  phi.xs.resize(n);
  phi.vals.resize(n);
  for (int i = 0; i < n; ++i) {
    const Real x = lo + (hi - lo) * i / (n - 1);
    phi.xs[i] = x;
    phi.vals[i] = interp_periodic(cell, L, x);
  }
  Array out(nx);
  parallel_for(nx, num.jobs, [&](int j) {
    out[j] = apply_U_truncated(spec, pstate, phi, B, j * L / nx, pnum);
  });
  return out;
}

// Truncated xi-recursion table over a fixed window, shift +c (rightward,
// direction=+1) or -c' (leftward, direction=-1).
struct TruncTable {
  Real xi0 = 0, dxi = 0, L = 0;
  int nx = 0;
  Table vals;
  int direction = +1;
  Real shift = 0;     // c or c'
  Real B = 0;
  // analytic values outside the window at step n
  const std::vector<Array>* wB = nullptr;  // w_B^n cell samples
  int n = 0;

  Real xi_at(int i) const { return xi0 + i * dxi; }
  int rows() const { return static_cast<int>(vals.rows()); }

  // phi0 for the truncated recursion (Lemma 4.3 choices)
  Real phi0(Real xi, Real x) const {
    const Array& w = (*wB)[0];
    const Real wx = interp_periodic(w, L, x);
    if (direction > 0) {
      if (xi <= -1.0) return wx;
      if (xi >= 0.0) return 0.0;
      return -xi * wx;
    }
    if (xi >= 1.0) return wx;
    if (xi <= 0.0) return 0.0;
    return xi * wx;
  }

  // plateau / zero zones per the induction bookkeeping
  Real analytic(Real xi, Real x) const {
    const Array& w = (*wB)[n];
    if (direction > 0) {
      if (xi <= -n * (B + shift) - 1.0) return interp_periodic(w, L, x);
      return 0.0;  // xi >= n(B - shift)
    }
    if (xi >= n * (B + shift) + 1.0) return interp_periodic(w, L, x);
    return 0.0;
  }

  Real eval(Real xi, Real x) const {
    const Real s = (xi - xi0) / dxi;
    const int m = rows();
    if (s <= 0.0 || s >= m - 1) return analytic(xi, x);
    const int i = static_cast<int>(s);
    const Real w = s - i;
    auto rv = [&](int r) {
      const int n_ = nx;
      const Real ss = frac_part(x / L) * n_;
      const int j = static_cast<int>(ss) % n_;
      const Real ww = ss - std::floor(ss);
      return vals(r, j) + ww * (vals(r, (j + 1) % n_) - vals(r, j));
    };
    return (1 - w) * rv(i) + w * rv(i + 1);
  }
};

void trunc_step(TruncTable& tbl, const ReactionSpec& spec,
                const PeriodicState& pstate, const WeinbergerNumerics& num,
                const PoincareNumerics& pnum) {
  const int nx = tbl.nx;
  const Real L = tbl.L;
  const Real dsh = tbl.direction > 0 ? tbl.shift : -tbl.shift;
  Table next(tbl.rows(), nx);
  const int rows = tbl.rows();
  parallel_for(rows, num.jobs, [&](int i) {
    const Real xi = tbl.xi_at(i);
    for (int j = 0; j < nx; ++j) {
      const Real x = j * L / nx;
      const Real zeta = xi + dsh - x;
      // U_B[a(. + zeta, .)](x): cutoff two-sided solve on [x - B, x + B]
      CompactProfile datum;
      datum.class_tag = ProfileClass::TwoSided;
      datum.g0 = x - tbl.B;
      datum.h0 = x + tbl.B;
      const int nd = std::max(64, static_cast<int>(2 * tbl.B / (L / nx)));
      datum.xs.resize(nd + 1);
      datum.vals.resize(nd + 1);
      for (int r = 0; r <= nd; ++r) {
        const Real y = datum.g0 + 2 * tbl.B * r / nd;
        datum.xs[r] = y;
        datum.vals[r] = smooth_cutoff(std::abs(y - x) / tbl.B) *
                        std::max(0.0, tbl.eval(zeta + y, y));
      }
      datum.vals[0] = datum.vals[nd] = 0.0;
      Real ub = 0.0;
      if (datum.vals.maxCoeff() > 0.0) {
        StepControl ctl;
        ctl.theta = num.theta;
        const Real dt = spec.omega / pnum.nt_per_period;
        FrontTrajectory tr =
            solve_two_sided(spec, datum, spec.omega, pnum.nx, dt, ctl);
        if (tr.flag != TrajectoryFlag::Vanished && x > tr.g.back() &&
            x < tr.h.back())
          ub = tr.snapshots.back().eval(x);
      }
      next(i, j) = std::max(tbl.phi0(xi, x), ub);
    }
  });
  // monotone in n
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < nx; ++j)
      next(i, j) = std::max(next(i, j), tbl.vals(i, j));
  tbl.vals = next;
  tbl.n += 1;
}

}  // namespace

SubsolutionReport verify_subsolution_chain(const ReactionSpec& spec,
                                           const PeriodicState& pstate, Real B,
                                           int m, Real c, Real cprime, Real A,
                                           Real Aprime,
                                           const WeinbergerNumerics& num) {
  if (c <= 0 || cprime <= 0)
    throw std::invalid_argument("verify_subsolution_chain: need c, c' > 0");
  if (A < (1 + m * (B + c) + 2 * B) / c ||
      Aprime < (1 + m * (B + cprime) + 2 * B) / cprime)
    throw std::invalid_argument(
        "verify_subsolution_chain: A, A' violate the size conditions");

  SubsolutionReport rep;
  rep.B = B;
  rep.m = m;
  rep.c = c;
  rep.cprime = cprime;
  rep.A = A;
  rep.Aprime = Aprime;

  const Real L = spec.L;
  const int nx = num.nx;
  PoincareNumerics pnum;
  pnum.nx = std::max(128, static_cast<int>(2 * B / (L / nx)));
  pnum.nt_per_period = num.nt_per_period;
  pnum.theta = num.theta;

  Array p0(nx), w(nx);
  for (int j = 0; j < nx; ++j) {
    p0[j] = pstate.at(0.0, j * L / nx);
    w[j] = 0.5 * p0[j];
  }
  const Real eps = 0.4 * p0.minCoeff();
  rep.eps = eps;

  // Pure powers U_B^n[w] and the max-recursion w_B^n.
  std::vector<Array> uB{w}, wB{w};
  for (int n = 1; n <= m; ++n) {
    uB.push_back(apply_UB_periodic(spec, pstate, uB.back(), B, num, pnum));
    Array img = apply_UB_periodic(spec, pstate, wB.back(), B, num, pnum);
    wB.push_back(img.max(w));
  }

  {
    ChainCheck ck{"plateau: U_B^m[w] >= p(0,.) - eps", false, 0};
    ck.worst_margin = (uB[m] - (p0 - eps)).minCoeff();
    ck.pass = ck.worst_margin >= 0;
    rep.checks.push_back(ck);
  }
  {
    ChainCheck ck{"w-recursion: U_B[w_B^{m-1}] >= w (so max is inactive)",
                  false, 0};
    Array img = apply_UB_periodic(spec, pstate, wB[m - 1], B, num, pnum);
    ck.worst_margin = (img - w).minCoeff();
    ck.pass = ck.worst_margin >= 0;
    rep.checks.push_back(ck);
  }

  // Truncated xi-recursions.
  const Real pad = 2.0 * L;
  auto make_table = [&](int direction, Real shift) {
    TruncTable t;
    t.L = L;
    t.nx = nx;
    t.direction = direction;
    t.shift = shift;
    t.B = B;
    t.wB = &wB;
    t.dxi = L / num.per_period;
    const Real lo = (direction > 0) ? -m * (B + shift) - 1 - pad
                                    : -m * (B - shift) - pad;
    const Real hi = (direction > 0) ? m * (B - shift) + pad
                                    : m * (B + shift) + 1 + pad;
    t.xi0 = std::floor(lo / t.dxi) * t.dxi;
    const int rows = static_cast<int>(std::ceil((hi - t.xi0) / t.dxi)) + 2;
    t.vals.resize(rows, nx);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < nx; ++j)
        t.vals(i, j) = t.phi0(t.xi_at(i), j * L / nx);
    return t;
  };

  TruncTable ta = make_table(+1, c);
  TruncTable tb = make_table(-1, cprime);
  for (int n = 0; n < m; ++n) {
    trunc_step(ta, spec, pstate, num, pnum);
    trunc_step(tb, spec, pstate, num, pnum);
  }

  {
    // Lemma 4.3(i): computed rows deep in the plateau zone match w_B^m.
    ChainCheck ck{"tilde-a plateau: a~_m(xi,.) == w_B^m for xi <= -m(B+c)-1",
                  false, 0};
    Real worst = 0;
    for (int i = 0; i < ta.rows(); ++i) {
      const Real xi = ta.xi_at(i);
      if (xi > -m * (B + c) - 1 || xi < -m * (B + c) - 1 - pad) continue;
      for (int j = 0; j < nx; ++j)
        worst = std::max(worst, std::abs(ta.vals(i, j) - wB[m][j]));
    }
    ck.worst_margin = -worst;
    ck.pass = worst < 1e-6 + 5e-3;  // interpolation + solver noise
    rep.checks.push_back(ck);
  }
  {
    ChainCheck ck{"tilde-a support: a~_m(xi,.) == 0 for xi >= m(B-c)", false, 0};
    Real worst = 0;
    for (int i = 0; i < ta.rows(); ++i) {
      if (ta.xi_at(i) < m * (B - c)) continue;
      worst = std::max(worst, ta.vals.row(i).maxCoeff());
    }
    ck.worst_margin = -worst;
    ck.pass = worst <= 0.0;
    rep.checks.push_back(ck);
  }

  // e_n and the subsolution inequality.
  const auto e_n = [&](int n, Real x) -> Real {
    if (x >= 0) return ta.eval(x - (n + A) * c, x);
    return tb.eval(x + (n + Aprime) * cprime, x);
  };
  const Real l_mn0 = (0 + Aprime) * cprime - m * (B + cprime);
  const Real lt_mn0 = (0 + A) * c - m * (B + c);
  {
    ChainCheck ck{"e_n plateau: e_0 == w_B^m on [-l+1, l~-1]", false, 0};
    Real worst = 0;
    const int samples = 17;
    for (int s = 0; s < samples; ++s) {
      const Real x = (-l_mn0 + 1) + (lt_mn0 - 1 - (-l_mn0 + 1)) * s / (samples - 1);
      worst = std::max(worst,
                       std::abs(e_n(0, x) - interp_periodic(wB[m], L, x)));
    }
    ck.worst_margin = -worst;
    ck.pass = worst < 1e-6 + 5e-3;
    rep.checks.push_back(ck);
  }
  {
    ChainCheck ck{"subsolution: e_{n+1} <= U_B[e_n] at sampled x", false, 0};
    Real worst = std::numeric_limits<Real>::infinity();
    for (int n = 0; n <= 1; ++n) {
      const Real lo = -((n + 1 + Aprime) * cprime + m * B) - 2;
      const Real hi = (n + 1 + A) * c + m * B + 2;
      CompactProfile en;
      en.class_tag = ProfileClass::TwoSided;
      en.g0 = lo;
      en.h0 = hi;
      const int nn = static_cast<int>((hi - lo) / (L / nx)) + 1;
      en.xs.resize(nn);
      en.vals.resize(nn);
      for (int r = 0; r < nn; ++r) {
        const Real y = lo + (hi - lo) * r / (nn - 1);
        en.xs[r] = y;
        en.vals[r] = std::max(0.0, e_n(n, y));
      }
      en.vals[0] = en.vals[nn - 1] = 0.0;
      const int samples = 25;
      for (int s = 0; s < samples; ++s) {
        const Real x = lo + 1 + (hi - lo - 2) * s / (samples - 1);
        const Real ub = apply_U_truncated(spec, pstate, en, B, x, pnum);
        worst = std::min(worst, ub - e_n(n + 1, x));
      }
    }
    ck.worst_margin = worst;
    ck.pass = worst >= 0;
    rep.checks.push_back(ck);
  }
  return rep;
}

}  // namespace perifront
