#pragma once

#include "perifront/reaction.hpp"
#include "perifront/speed_types.hpp"

namespace perifront {

/// Scalar semi-wave problem d q'' - c q' + F(q) = 0, q(0) = 0,
/// mu q'(0) = c, q(inf) = target. F is either the homogeneous logistic
/// q(a - b q) or the majorant (K/M) u (2M - u) used for the upper bound.
struct SemiWaveProblem {
  enum class Kind { LogisticAB, Majorant };
  Kind kind = Kind::LogisticAB;
  Real d = 1.0;
  Real mu = 1.0;
  Real a = 1.0, b = 1.0;  // LogisticAB
  Real K = 1.0, M = 1.0;  // Majorant

  Real F(Real q) const;
  Real F_prime0() const;
  Real target() const;
  void validate() const;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shooting with bisection on c: integrate from (q, q') = (0, c/mu),
/// classify overshoot (q exceeds the target) against undershoot (q' turns
/// negative below the target), and bisect until the bracket is narrower
/// than tol. Integration uses an adaptive RK45 pair with event detection.
SpeedEstimate shoot_semiwave_speed(const SemiWaveProblem& prob, Real tol = 1e-8);

/// Prop-3.12-style upper bound: c* omega where c* is the semi-wave speed of
/// the majorant F(u) = (K/M) u (2M - u) with K the linear bound constant of
/// the spec. Serves as the bisection upper bracket for the recursion.
Real upper_bound_c_plus(const ReactionSpec& spec);

/// Integrates the accepted profile for inspection; returns (x, q) samples.
std::pair<Array, Array> semiwave_profile(const SemiWaveProblem& prob, Real c,
                                         int n_samples = 400);

}  // namespace perifront
