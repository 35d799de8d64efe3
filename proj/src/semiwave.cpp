#include "perifront/semiwave.hpp"

#include <cmath>

namespace perifront {

Real SemiWaveProblem::F(Real q) const {
  if (kind == Kind::LogisticAB) return q * (a - b * q);
  return (K / M) * q * (2.0 * M - q);
}

Real SemiWaveProblem::F_prime0() const {
  return kind == Kind::LogisticAB ? a : 2.0 * K;
}

Real SemiWaveProblem::target() const {
  return kind == Kind::LogisticAB ? a / b : 2.0 * M;
}

void SemiWaveProblem::validate() const {
  if (d <= 0 || mu <= 0) throw std::invalid_argument("semiwave: need d, mu > 0");
  if (F_prime0() <= 0) throw std::invalid_argument("semiwave: need F'(0) > 0");
  const Real tgt = target();
  for (int i = 1; i < 64; ++i) {
    const Real q = tgt * i / 64.0;
    if (F(q) <= 0)
      throw std::invalid_argument("semiwave: F must be positive on (0, target)");
  }
}

namespace {

enum class ShotOutcome { Undershoot, Overshoot };

struct Rk45State {
  Real x, q, qp;
};

// One Dormand-Prince(4,5) step; returns the embedded error estimate.
template <typename Rhs>
Real dp45_step(const Rhs& rhs, Rk45State& s, Real hstep) {
  auto f = [&](Real q, Real qp) { return rhs(q, qp); };
  const Real q0 = s.q, p0 = s.qp;
  Real k1q = p0, k1p = f(q0, p0);
  Real q2 = q0 + hstep * 0.2 * k1q, p2 = p0 + hstep * 0.2 * k1p;
  Real k2q = p2, k2p = f(q2, p2);
  Real q3 = q0 + hstep * (3.0 / 40 * k1q + 9.0 / 40 * k2q);
  Real p3 = p0 + hstep * (3.0 / 40 * k1p + 9.0 / 40 * k2p);
  Real k3q = p3, k3p = f(q3, p3);
  Real q4 = q0 + hstep * (44.0 / 45 * k1q - 56.0 / 15 * k2q + 32.0 / 9 * k3q);
  Real p4 = p0 + hstep * (44.0 / 45 * k1p - 56.0 / 15 * k2p + 32.0 / 9 * k3p);
  Real k4q = p4, k4p = f(q4, p4);
  Real q5 = q0 + hstep * (19372.0 / 6561 * k1q - 25360.0 / 2187 * k2q +
                          64448.0 / 6561 * k3q - 212.0 / 729 * k4q);
  Real p5 = p0 + hstep * (19372.0 / 6561 * k1p - 25360.0 / 2187 * k2p +
                          64448.0 / 6561 * k3p - 212.0 / 729 * k4p);
  Real k5q = p5, k5p = f(q5, p5);
  Real q6 = q0 + hstep * (9017.0 / 3168 * k1q - 355.0 / 33 * k2q +
                          46732.0 / 5247 * k3q + 49.0 / 176 * k4q -
                          5103.0 / 18656 * k5q);
  Real p6 = p0 + hstep * (9017.0 / 3168 * k1p - 355.0 / 33 * k2p +
                          46732.0 / 5247 * k3p + 49.0 / 176 * k4p -
                          5103.0 / 18656 * k5p);
  Real k6q = p6, k6p = f(q6, p6);
  const Real qn = q0 + hstep * (35.0 / 384 * k1q + 500.0 / 1113 * k3q +
                                125.0 / 192 * k4q - 2187.0 / 6784 * k5q +
                                11.0 / 84 * k6q);
  const Real pn = p0 + hstep * (35.0 / 384 * k1p + 500.0 / 1113 * k3p +
                                125.0 / 192 * k4p - 2187.0 / 6784 * k5p +
                                11.0 / 84 * k6p);
  Real k7q = pn, k7p = f(qn, pn);
  const Real qe = q0 + hstep * (5179.0 / 57600 * k1q + 7571.0 / 16695 * k3q +
                                393.0 / 640 * k4q - 92097.0 / 339200 * k5q +
                                187.0 / 2100 * k6q + 1.0 / 40 * k7q);
  const Real pe = p0 + hstep * (5179.0 / 57600 * k1p + 7571.0 / 16695 * k3p +
                                393.0 / 640 * k4p - 92097.0 / 339200 * k5p +
                                187.0 / 2100 * k6p + 1.0 / 40 * k7p);
  const Real err = std::max(std::abs(qn - qe), std::abs(pn - pe));
  s.x += hstep;
  s.q = qn;
  s.qp = pn;
  return err;
}

struct ShotResult {
  ShotOutcome outcome;
  Real q_end, qp_end;
};

ShotResult shoot(const SemiWaveProblem& prob, Real c, Real x_max,
                 Real rk_tol = 1e-10) {
  auto rhs = [&](Real q, Real qp) { return (c * qp - prob.F(q)) / prob.d; };
  const Real tgt = prob.target();
  Rk45State s{0.0, 0.0, c / prob.mu};
  Real hstep = 1e-3 * std::sqrt(prob.d / prob.F_prime0());
  while (s.x < x_max) {
    Rk45State trial = s;
    const Real err = dp45_step(rhs, trial, hstep);
    if (err > rk_tol) {
      hstep *= std::max(0.2, 0.9 * std::pow(rk_tol / err, 0.2));
      continue;
    }
    s = trial;
    if (err > 0)
      hstep = std::min(hstep * std::min(5.0, 0.9 * std::pow(rk_tol / err, 0.2)),
                       x_max / 50.0);
    if (s.q >= tgt) return {ShotOutcome::Overshoot, s.q, s.qp};
    if (s.qp <= 0.0 && s.q < tgt * (1.0 - 1e-9))
      return {ShotOutcome::Undershoot, s.q, s.qp};
  }
  // Ran out the window while hugging the connecting orbit; classify by side.
  return {s.q < tgt ? ShotOutcome::Undershoot : ShotOutcome::Overshoot, s.q,
          s.qp};
}

}  // namespace

SpeedEstimate shoot_semiwave_speed(const SemiWaveProblem& prob, Real tol) {
  prob.validate();
  const Real c_kpp = 2.0 * std::sqrt(prob.d * prob.F_prime0());
  const Real x_max = 40.0 * std::sqrt(prob.d / prob.F_prime0());
  Real lo = std::min(tol, 1e-8), hi = c_kpp;

  if (shoot(prob, lo, x_max).outcome != ShotOutcome::Undershoot ||
      shoot(prob, hi, x_max).outcome != ShotOutcome::Overshoot)
    throw BracketError(
        "semiwave: no sign change in the bracket [tol, 2 sqrt(d F'(0))]");

  while (hi - lo > tol) {
    const Real mid = 0.5 * (lo + hi);
    if (shoot(prob, mid, x_max).outcome == ShotOutcome::Undershoot)
      lo = mid;
    else
      hi = mid;
  }
  const Real c = 0.5 * (lo + hi);
  const ShotResult final_shot = shoot(prob, c, x_max);

  SpeedEstimate est;
  est.value = c;
  est.method = SpeedMethod::SemiWave;
  est.fit_t_lo = 0.0;
  est.fit_t_hi = x_max;
  est.residual = std::abs(final_shot.q_end - prob.target());
  est.meta["c_kpp_bound"] = c_kpp;
  est.meta["bracket_width"] = hi - lo;
  return est;
}

Real upper_bound_c_plus(const ReactionSpec& spec) {
  SemiWaveProblem prob;
  prob.kind = SemiWaveProblem::Kind::Majorant;
  prob.d = spec.d;
  prob.mu = spec.mu;
  prob.K = compute_linear_bound(spec);
  prob.M = spec.cap_M;
  const SpeedEstimate est = shoot_semiwave_speed(prob, 1e-6);
  return est.value * spec.omega;
}

std::pair<Array, Array> semiwave_profile(const SemiWaveProblem& prob, Real c,
                                         int n_samples) {
  const Real x_max = 40.0 * std::sqrt(prob.d / prob.F_prime0());
  auto rhs = [&](Real q, Real qp) { return (c * qp - prob.F(q)) / prob.d; };
  Array xs(n_samples), qs(n_samples);
  Rk45State s{0.0, 0.0, c / prob.mu};
  const Real dx = x_max / (n_samples - 1);
  xs[0] = 0;
  qs[0] = 0;
  for (int i = 1; i < n_samples; ++i) {
    const Real x_target = i * dx;
    while (s.x < x_target - 1e-14) {
      const Real hstep = std::min(dx / 16.0, x_target - s.x);
      dp45_step(rhs, s, hstep);
    }
    xs[i] = s.x;
    qs[i] = s.q;
  }
  return {xs, qs};
}

}  // namespace perifront
