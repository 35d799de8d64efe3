#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "perifront/reaction.hpp"

using namespace perifront;

namespace {
PeriodicCoefficient cos_x(Real mean, Real amp) {
  PeriodicCoefficient c;
  c.mean = mean;
  c.modes.push_back({0, 1, amp, 0.0});
  return c;
}
PeriodicCoefficient cos_t(Real mean, Real amp) {
  PeriodicCoefficient c;
  c.mean = mean;
  c.modes.push_back({1, 0, amp, 0.0});
  return c;
}
}  // namespace

TEST_CASE("homogeneous logistic basics") {
  const ReactionSpec s = make_homogeneous_logistic(1, 1, 1, 1, 1, 2);
  CHECK(eval_f(s, 0.3, 0.7, 0.0) == 0.0);       // f(.,.,0) = 0
  CHECK(eval_f(s, 0.3, 0.7, 1.0) == 0.0);       // equilibrium a/b
  CHECK(eval_f_u(s, 0, 0, 0.0) == doctest::Approx(1.0));
  CHECK(eval_f_u(s, 0, 0, 1.0) == doctest::Approx(-1.0));
  CHECK(s.cap_M == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_f(s, 0, 0, -0.5), std::domain_error);
}

TEST_CASE("logistic with x-periodic a: direct arithmetic") {
  // a = 1 + 0.5 cos(2 pi x / L), b = 1, u = 0.5 at x = 0:
  // f = 0.5 (1.5 - 0.5) = 0.5
  const ReactionSpec s =
      make_logistic(cos_x(1.0, 0.5), constant_coefficient(1.0), 1, 1, 1, 2);
  CHECK(eval_f(s, 0.123, 0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("degenerate family") {
  const ReactionSpec s =
      make_degenerate(constant_coefficient(1.0), 2.0, 1, 1, 1, 2);
  CHECK(eval_f(s, 0, 0, 0.0) == 0.0);
  CHECK(eval_f_u(s, 0, 0, 0.0) == 0.0);  // k > 1 kills the derivative at 0
  CHECK(eval_f(s, 0, 0, 1.0) == 0.0);
  CHECK(s.cap_M == 1.0);
}

TEST_CASE("exact periodicity of eval_f") {
  PeriodicCoefficient a;
  a.mean = 1.1;
  a.modes.push_back({1, 1, 0.25, 0.1});   // traveling-phase mode
  a.modes.push_back({2, -1, 0.05, 0.0});
  const ReactionSpec s =
      make_logistic(a, constant_coefficient(1.0), 1, 1, 0.7, 1.3);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<Real> ut(-5, 5), ux(-9, 9), uu(0, 1);
  for (int i = 0; i < 200; ++i) {
    const Real t = ut(rng), x = ux(rng), u = uu(rng);
    const Real base = eval_f(s, t, x, u);
    CHECK(eval_f(s, t + s.omega, x, u) == doctest::Approx(base).epsilon(1e-12));
    CHECK(eval_f(s, t, x + s.L, u) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("f_u matches central differences at second order") {
  const ReactionSpec s =
      make_logistic(cos_x(1.0, 0.4), cos_t(1.0, 0.3), 1, 1, 0.9, 1.7);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<Real> ut(0, 3), ux(0, 3), uu(0.05, 0.9);
  for (int i = 0; i < 50; ++i) {
    const Real t = ut(rng), x = ux(rng), u = uu(rng);
    const Real exact = eval_f_u(s, t, x, u);
    auto cd = [&](Real h) {
      return (eval_f(s, t, x, u + h) - eval_f(s, t, x, u - h)) / (2 * h);
    };
    const Real e1 = std::abs(cd(1e-3) - exact);
    const Real e2 = std::abs(cd(5e-4) - exact);
    CHECK(e1 < 1e-5);
    if (e1 > 1e-12) CHECK(e2 < 0.3 * e1);  // roughly O(h^2)
  }
}

TEST_CASE("linear bound: f <= K u on [0, M]") {
  const ReactionSpec s =
      make_logistic(cos_x(1.0, 0.5), constant_coefficient(1.0), 1, 1, 1, 2);
  const Real K = compute_linear_bound(s);
  CHECK(K >= 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<Real> ut(0, 1), ux(0, 2), uu(0, s.cap_M);
  for (int i = 0; i < 500; ++i) {
    const Real t = ut(rng), x = ux(rng), u = uu(rng);
    CHECK(eval_f(s, t, x, u) <= K * u + 1e-12);
  }
}

TEST_CASE("logistic f/u strictly decreasing in u") {
  const ReactionSpec s =
      make_logistic(cos_x(1.0, 0.5), cos_x(1.0, -0.3), 1, 1, 1, 2);
  for (int j = 0; j < 8; ++j) {
    const Real t = 0.13 * j, x = 0.29 * j;
    Real prev = std::numeric_limits<Real>::infinity();
    for (int k = 1; k <= 20; ++k) {
      const Real u = 0.1 * k;
      const Real ratio = eval_f(s, t, x, u) / u;
      CHECK(ratio < prev);
      prev = ratio;
    }
  }
}

TEST_CASE("positive-flag validation") {
  PeriodicCoefficient a = cos_x(1.0, 0.5);
  a.positive = true;
  a.lower_bound = 0.5;
  CHECK_NOTHROW(a.validate(1.0, 2.0));
  a.lower_bound = 0.75;  // min is 0.5
  CHECK_THROWS_AS(a.validate(1.0, 2.0), std::invalid_argument);
}

TEST_CASE("reflection flips the x-phase") {
  PeriodicCoefficient a;
  a.mean = 1.0;
  a.modes.push_back({0, 1, 0.2, 0.3});  // has a sine part: not even in x
  const ReactionSpec s =
      make_logistic(a, constant_coefficient(1.0), 1, 1, 1, 2);
  const ReactionSpec r = reflect(s);
  for (int i = 0; i < 20; ++i) {
    const Real x = -3.0 + 0.31 * i;
    CHECK(r.a(0.2, x) == doctest::Approx(s.a(0.2, -x)).epsilon(1e-12));
  }
}

TEST_CASE("json round-trip is bit-exact") {
  PeriodicCoefficient a;
  a.mean = 1.0 + 1e-16;
  a.modes.push_back({1, 2, 0.123456789012345678, -0.3e-7});
  const ReactionSpec s =
      make_logistic(a, constant_coefficient(0.9999999999999), 0.7, 1.3,
                    0.777, 1.999);
  const std::string text = reaction_to_json(s);
  const ReactionSpec back = reaction_from_json(text);
  CHECK(back.d == s.d);
  CHECK(back.mu == s.mu);
  CHECK(back.omega == s.omega);
  CHECK(back.L == s.L);
  CHECK(back.cap_M == s.cap_M);
  CHECK(back.coeffs.at("a").mean == s.coeffs.at("a").mean);
  CHECK(back.coeffs.at("a").modes[0].cos_amp == s.coeffs.at("a").modes[0].cos_amp);
  CHECK(back.coeffs.at("a").modes[0].sin_amp == s.coeffs.at("a").modes[0].sin_amp);
  CHECK(reaction_to_json(back) == text);
}
