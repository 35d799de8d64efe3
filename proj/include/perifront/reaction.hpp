#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "perifront/linalg.hpp"

namespace perifront {

/// One Fourier mode of a space-time periodic coefficient. The mode
/// contributes cos_amp*cos(2*pi*(k_t*t/omega + k_x*x/L)) + the sine analog,
/// so mixed (k_t, k_x) modes produce traveling-phase media.
struct FourierMode {
  int k_t = 0;
  int k_x = 0;
  Real cos_amp = 0.0;
  Real sin_amp = 0.0;
};

/// Finite Fourier series in (2*pi*t/omega, 2*pi*x/L). Exactly periodic by
/// construction; phases are reduced before evaluation so periodicity holds
/// to rounding for arbitrarily large arguments.
struct PeriodicCoefficient {
  Real mean = 0.0;
  std::vector<FourierMode> modes;
  bool positive = false;   // if set, min over the period cell must be >= lower_bound
  Real lower_bound = 0.0;  // kappa_1 when positive

  Real eval(Real t, Real x, Real omega, Real L) const;
  Real min_on_cell(Real omega, Real L, int samples = 128) const;
  Real max_on_cell(Real omega, Real L, int samples = 128) const;
  void validate(Real omega, Real L) const;
};

inline PeriodicCoefficient constant_coefficient(Real value) {
  PeriodicCoefficient c;
  c.mean = value;
  return c;
}

enum class ReactionFamily { Logistic, Degenerate, HomogeneousLogistic };

/// Space-time periodic reaction term together with the structural constants
/// of the problem: diffusion d, Stefan coefficient mu, periods omega and L,
/// and the cap M above which f <= 0.
struct ReactionSpec {
  ReactionFamily family = ReactionFamily::HomogeneousLogistic;
  std::map<std::string, PeriodicCoefficient> coeffs;  // "a" (and "b" for Logistic)
  Real degenerate_k = 2.0;                            // exponent k > 1
  Real hom_a = 1.0, hom_b = 1.0;                      // HomogeneousLogistic parameters
  Real d = 1.0;
  Real mu = 1.0;
  Real omega = 1.0;
  Real L = 1.0;
  Real cap_M = 1.0;

  Real a(Real t, Real x) const;
  Real b(Real t, Real x) const;
};

ReactionSpec make_homogeneous_logistic(Real a, Real b, Real d, Real mu,
                                       Real omega, Real L);
ReactionSpec make_logistic(PeriodicCoefficient a, PeriodicCoefficient b, Real d,
                           Real mu, Real omega, Real L);
ReactionSpec make_degenerate(PeriodicCoefficient a, Real k, Real d, Real mu,
                             Real omega, Real L);

/// f(t,x,u). Throws std::domain_error for u < 0.
Real eval_f(const ReactionSpec& spec, Real t, Real x, Real u);

/// Analytic df/du, used by the linearized period map and as the source of
/// the linear bound constant K.
Real eval_f_u(const ReactionSpec& spec, Real t, Real x, Real u);

/// K = max of f_u over a 64x64x64 grid of the period cell times [0, M],
/// so that f(t,x,u) <= K*u on [0, M].
Real compute_linear_bound(const ReactionSpec& spec, int samples = 64);

/// Reflection x -> -x: returns the spec with reaction f~(t,x,u) = f(t,-x,u).
ReactionSpec reflect(const ReactionSpec& spec);

/// JSON (de)serialization of the declarative config block; round-trips
/// bit-exactly. Implemented over nlohmann::json in reaction.cpp.
std::string reaction_to_json(const ReactionSpec& spec);
ReactionSpec reaction_from_json(const std::string& text);

}  // namespace perifront
