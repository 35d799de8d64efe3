#pragma once

#include <Eigen/Core>
#include <cassert>
#include <cmath>

namespace perifront {

using Real = double;
using Array = Eigen::ArrayXd;
using Table = Eigen::ArrayXXd;

// Solves a tridiagonal system in place via the Thomas algorithm.
// lower has n-1 entries (subdiagonal), diag n, upper n-1, rhs n.
// diag and rhs are destroyed; the solution is written to x.
inline void solve_tridiag(Array& lower, Array& diag, Array& upper, Array& rhs,
                          Array& x) {
  const Eigen::Index n = diag.size();
  assert(lower.size() == n - 1 && upper.size() == n - 1 && rhs.size() == n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const Real w = lower[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  x.resize(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  }
}

// Solves a cyclic tridiagonal system (periodic stencil) by the
// Sherman-Morrison correction. All bands have length n; lower[i] couples
// x[i] to x[i-1] (wrapping), upper[i] couples x[i] to x[i+1].
inline void solve_cyclic_tridiag(const Array& lower, const Array& diag,
                                 const Array& upper, const Array& rhs,
                                 Array& x) {
  const Eigen::Index n = diag.size();
  assert(n >= 3);
  const Real corner_lo = lower[0];      // couples x[0] to x[n-1]
  const Real corner_up = upper[n - 1];  // couples x[n-1] to x[0]
  const Real gamma = -diag[0];

  Array d = diag, r = rhs, u(n);
  d[0] -= gamma;
  d[n - 1] -= corner_lo * corner_up / gamma;
  u.setZero();
  u[0] = gamma;
  u[n - 1] = corner_up;

  Array lo = lower.segment(1, n - 1);
  Array up = upper.segment(0, n - 1);
  Array d1 = d, r1 = r;
  Array y;
  solve_tridiag(lo, d1, up, r1, y);
  Array d2 = d, r2 = u;
  Array lo2 = lower.segment(1, n - 1);
  Array up2 = upper.segment(0, n - 1);
  Array z;
  solve_tridiag(lo2, d2, up2, r2, z);

  const Real num = y[0] + (corner_lo / gamma) * y[n - 1];
  const Real den = 1.0 + z[0] + (corner_lo / gamma) * z[n - 1];
  x = y - (num / den) * z;
}

// Stable fractional part: result in [0,1).
inline Real frac_part(Real s) {
  Real f = s - std::floor(s);
  if (f >= 1.0) f -= 1.0;
  if (f < 0.0) f += 1.0;
  return f;
}

// Piecewise-linear interpolation on an increasing grid with constant
// extension beyond both ends.
inline Real interp_linear(const Array& xs, const Array& vals, Real x) {
  const Eigen::Index n = xs.size();
  if (n == 0) return 0.0;
  if (x <= xs[0]) return vals[0];
  if (x >= xs[n - 1]) return vals[n - 1];
  // binary search for the bracketing interval
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (xs[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  const Real t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return vals[lo] + t * (vals[hi] - vals[lo]);
}

// Linear interpolation on a uniform periodic grid x_j = j*period/n.
inline Real interp_periodic(const Array& vals, Real period, Real x) {
  const Eigen::Index n = vals.size();
  const Real s = frac_part(x / period) * static_cast<Real>(n);
  const Eigen::Index j = static_cast<Eigen::Index>(s) % n;
  const Real t = s - std::floor(s);
  const Eigen::Index j1 = (j + 1) % n;
  return vals[j] + t * (vals[j1] - vals[j]);
}

// Least-squares fit y ~ a + b*x; returns {b, a, rms residual}.
struct LinearFit {
  Real slope = 0;
  Real intercept = 0;
  Real rms = 0;
};

inline LinearFit fit_line(const std::vector<Real>& ts,
                          const std::vector<Real>& ys) {
  const size_t n = ts.size();
  assert(n >= 2 && ys.size() == n);
  Real st = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    st += ts[i];
    sy += ys[i];
  }
  const Real tbar = st / n, ybar = sy / n;
  Real stt = 0, sty = 0;
  for (size_t i = 0; i < n; ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    sty += (ts[i] - tbar) * (ys[i] - ybar);
  }
  LinearFit f;
  f.slope = sty / stt;
  f.intercept = ybar - f.slope * tbar;
  Real ss = 0;
  for (size_t i = 0; i < n; ++i) {
    const Real r = ys[i] - (f.intercept + f.slope * ts[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace perifront
