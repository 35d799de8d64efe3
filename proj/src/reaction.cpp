#include "perifront/reaction.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace perifront {

namespace {
constexpr Real kTwoPi = 6.283185307179586476925286766559;
}

Real PeriodicCoefficient::eval(Real t, Real x, Real omega, Real L) const {
  const Real pt = frac_part(t / omega);
  const Real px = frac_part(x / L);
  Real v = mean;
  for (const auto& m : modes) {
    const Real arg = kTwoPi * frac_part(m.k_t * pt + m.k_x * px);
    if (m.cos_amp != 0.0) v += m.cos_amp * std::cos(arg);
    if (m.sin_amp != 0.0) v += m.sin_amp * std::sin(arg);
  }
  return v;
}

Real PeriodicCoefficient::min_on_cell(Real omega, Real L, int samples) const {
  Real m = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j)
      m = std::min(m, eval(i * omega / samples, j * L / samples, omega, L));
  return m;
}

Real PeriodicCoefficient::max_on_cell(Real omega, Real L, int samples) const {
  Real m = -std::numeric_limits<Real>::infinity();
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j)
      m = std::max(m, eval(i * omega / samples, j * L / samples, omega, L));
  return m;
}

void PeriodicCoefficient::validate(Real omega, Real L) const {
  if (positive) {
    if (lower_bound <= 0.0)
      throw std::invalid_argument(
          "positive coefficient requires a declared lower bound > 0");
    const Real m = min_on_cell(omega, L);
    if (m < lower_bound)
      throw std::invalid_argument(
          "coefficient dips below its declared lower bound: min = " +
          std::to_string(m));
  }
}

Real ReactionSpec::a(Real t, Real x) const {
  if (family == ReactionFamily::HomogeneousLogistic) return hom_a;
  return coeffs.at("a").eval(t, x, omega, L);
}

Real ReactionSpec::b(Real t, Real x) const {
  if (family == ReactionFamily::HomogeneousLogistic) return hom_b;
  return coeffs.at("b").eval(t, x, omega, L);
}

ReactionSpec make_homogeneous_logistic(Real a, Real b, Real d, Real mu,
                                       Real omega, Real L) {
  if (a <= 0 || b <= 0 || d <= 0 || mu <= 0 || omega <= 0 || L <= 0)
    throw std::invalid_argument("homogeneous logistic parameters must be positive");
  ReactionSpec s;
  s.family = ReactionFamily::HomogeneousLogistic;
  s.hom_a = a;
  s.hom_b = b;
  s.d = d;
  s.mu = mu;
  s.omega = omega;
  s.L = L;
  s.cap_M = a / b;  // smallest cap with f <= 0 above it
  return s;
}

ReactionSpec make_logistic(PeriodicCoefficient a, PeriodicCoefficient b, Real d,
                           Real mu, Real omega, Real L) {
  ReactionSpec s;
  s.family = ReactionFamily::Logistic;
  s.d = d;
  s.mu = mu;
  s.omega = omega;
  s.L = L;
  const Real amin = a.min_on_cell(omega, L), bmin = b.min_on_cell(omega, L);
  if (amin <= 0 || bmin <= 0)
    throw std::invalid_argument("logistic coefficients must stay positive");
  s.cap_M = a.max_on_cell(omega, L) / bmin;
  s.coeffs["a"] = std::move(a);
  s.coeffs["b"] = std::move(b);
  return s;
}

ReactionSpec make_degenerate(PeriodicCoefficient a, Real k, Real d, Real mu,
                             Real omega, Real L) {
  if (k <= 1.0) throw std::invalid_argument("degenerate family requires k > 1");
  ReactionSpec s;
  s.family = ReactionFamily::Degenerate;
  s.degenerate_k = k;
  s.d = d;
  s.mu = mu;
  s.omega = omega;
  s.L = L;
  if (a.min_on_cell(omega, L) <= 0)
    throw std::invalid_argument("degenerate coefficient a must stay positive");
  s.cap_M = 1.0;
  s.coeffs["a"] = std::move(a);
  return s;
}

Real eval_f(const ReactionSpec& spec, Real t, Real x, Real u) {
  if (u < 0.0) throw std::domain_error("eval_f: negative density");
  switch (spec.family) {
    case ReactionFamily::HomogeneousLogistic:
      return u * (spec.hom_a - spec.hom_b * u);
    case ReactionFamily::Logistic:
      return u * (spec.a(t, x) - spec.b(t, x) * u);
    case ReactionFamily::Degenerate:
      return spec.a(t, x) * std::pow(u, spec.degenerate_k) * (1.0 - u);
  }
  return 0.0;
}

Real eval_f_u(const ReactionSpec& spec, Real t, Real x, Real u) {
  if (u < 0.0) throw std::domain_error("eval_f_u: negative density");
  switch (spec.family) {
    case ReactionFamily::HomogeneousLogistic:
      return spec.hom_a - 2.0 * spec.hom_b * u;
    case ReactionFamily::Logistic:
      return spec.a(t, x) - 2.0 * spec.b(t, x) * u;
    case ReactionFamily::Degenerate: {
      const Real k = spec.degenerate_k;
      // d/du [a u^k (1-u)] = a u^(k-1) (k - (k+1) u)
      return spec.a(t, x) * std::pow(u, k - 1.0) * (k - (k + 1.0) * u);
    }
  }
  return 0.0;
}

Real compute_linear_bound(const ReactionSpec& spec, int samples) {
  Real K = -std::numeric_limits<Real>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Real t = i * spec.omega / samples;
    for (int j = 0; j < samples; ++j) {
      const Real x = j * spec.L / samples;
      for (int k = 0; k < samples; ++k) {
        const Real u = k * spec.cap_M / (samples - 1);
        K = std::max(K, eval_f_u(spec, t, x, u));
      }
    }
  }
  return K;
}

ReactionSpec reflect(const ReactionSpec& spec) {
  ReactionSpec r = spec;
  for (auto& [name, coef] : r.coeffs)
    for (auto& m : coef.modes) m.k_x = -m.k_x;
  return r;
}

namespace {

using nlohmann::json;

json coefficient_to_json(const PeriodicCoefficient& c) {
  json j;
  j["mean"] = c.mean;
  j["modes"] = json::array();
  for (const auto& m : c.modes)
    j["modes"].push_back({{"k_t", m.k_t},
                          {"k_x", m.k_x},
                          {"cos_amp", m.cos_amp},
                          {"sin_amp", m.sin_amp}});
  if (c.positive) {
    j["positive"] = true;
    j["lower_bound"] = c.lower_bound;
  }
  return j;
}

PeriodicCoefficient coefficient_from_json(const json& j) {
  PeriodicCoefficient c;
  c.mean = j.at("mean").get<Real>();
  if (j.contains("modes"))
    for (const auto& m : j.at("modes")) {
      FourierMode mode;
      mode.k_t = m.at("k_t").get<int>();
      mode.k_x = m.at("k_x").get<int>();
      mode.cos_amp = m.value("cos_amp", 0.0);
      mode.sin_amp = m.value("sin_amp", 0.0);
      c.modes.push_back(mode);
    }
  c.positive = j.value("positive", false);
  c.lower_bound = j.value("lower_bound", 0.0);
  return c;
}

}  // namespace

std::string reaction_to_json(const ReactionSpec& spec) {
  json j;
  switch (spec.family) {
    case ReactionFamily::HomogeneousLogistic:
      j["family"] = "homogeneous_logistic";
      j["a"] = spec.hom_a;
      j["b"] = spec.hom_b;
      break;
    case ReactionFamily::Logistic:
      j["family"] = "logistic";
      j["a"] = coefficient_to_json(spec.coeffs.at("a"));
      j["b"] = coefficient_to_json(spec.coeffs.at("b"));
      break;
    case ReactionFamily::Degenerate:
      j["family"] = "degenerate";
      j["a"] = coefficient_to_json(spec.coeffs.at("a"));
      j["k"] = spec.degenerate_k;
      break;
  }
  j["d"] = spec.d;
  j["mu"] = spec.mu;
  j["omega"] = spec.omega;
  j["L"] = spec.L;
  j["cap_M"] = spec.cap_M;
  return j.dump(2);
}

ReactionSpec reaction_from_json(const std::string& text) {
  const json j = json::parse(text);
  const std::string family = j.at("family").get<std::string>();
  ReactionSpec s;
  if (family == "homogeneous_logistic") {
    s = make_homogeneous_logistic(j.at("a").get<Real>(), j.at("b").get<Real>(),
                                  j.at("d").get<Real>(), j.at("mu").get<Real>(),
                                  j.at("omega").get<Real>(), j.at("L").get<Real>());
  } else if (family == "logistic") {
    s = make_logistic(coefficient_from_json(j.at("a")),
                      coefficient_from_json(j.at("b")), j.at("d").get<Real>(),
                      j.at("mu").get<Real>(), j.at("omega").get<Real>(),
                      j.at("L").get<Real>());
  } else if (family == "degenerate") {
    s = make_degenerate(coefficient_from_json(j.at("a")), j.at("k").get<Real>(),
                        j.at("d").get<Real>(), j.at("mu").get<Real>(),
                        j.at("omega").get<Real>(), j.at("L").get<Real>());
  } else {
    throw std::invalid_argument("unknown reaction family: " + family);
  }
  if (j.contains("cap_M")) s.cap_M = j.at("cap_M").get<Real>();
  return s;
}

}  // namespace perifront
