#include <cmath>
#include <random>

#include "doctest.h"
#include "semistab/error.hpp"
#include "semistab/grid.hpp"
#include "semistab/weights.hpp"

using namespace semistab;

namespace {

WeightEvolution lasota(double c, double p = 2.0) {
  return WeightEvolution(make_family_problem(FamilySpec::lasota(), MultiplierShape{0.0, c}, p));
}

WeightEvolution from_text(const char* text) { return WeightEvolution(parse_problem(text)); }

}  // namespace

TEST_CASE("multiplier cocycle") {
  const auto we = lasota(-0.3);
  CHECK(we.multiplier_cocycle(2.0, 0.5) == doctest::Approx(std::exp(-0.6)));
  CHECK(we.multiplier_cocycle(0.0, 0.5) == 1.0);

  const auto wx = from_text("family = lasota\nh_expr = x\n");
  for (double t : {0.5, 2.0, 8.0})
    CHECK(wx.multiplier_cocycle(t, 0.7) == doctest::Approx(std::exp(0.7 * (1 - std::exp(-t)))).epsilon(1e-9));
}

TEST_CASE("cocycle law") {
  const auto we = from_text("domain = (0,1)\nF_expr = -x - x^3\nh_expr = x^2 - 0.3\n");
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> T(0.0, 2.0), X(0.05, 0.95);
  for (int k = 0; k < 50; ++k) {
    const double t = T(gen), s = T(gen), x = X(gen);
    const double lhs = we.multiplier_cocycle(t + s, x);
    const double rhs = we.multiplier_cocycle(t, x) * we.multiplier_cocycle(s, we.semiflow().flow(t, x));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("transported weight: closed forms") {
  const double c = -0.3, p = 2.0;
  const auto we = lasota(c, p);
  CHECK(we.rho_tp(1.0, 0.2) == doctest::Approx(std::exp((p * c + 1) * 1.0)));
  CHECK(we.rho_tp(1.0, 0.5) == 0.0);
  CHECK(we.rho_tp(0.0, 0.5) == 1.0);

  const auto tr = from_text("family = translation\nh_const = 0\nrho_expr = 1/(1 + x^2)\n");
  CHECK(tr.rho_tp(1.5, 0.4) == doctest::Approx(1 / (1 + (0.4 - 1.5) * (0.4 - 1.5))));

  const auto af = from_text("family = affine\na = 1\nb = -1\nh_const = 0\nrho_expr = (1+abs(x-1))^(-3)\n");
  auto rho = [](double x) { return std::pow(1 + std::fabs(x - 1), -3.0); };
  for (double x : {-2.0, 0.5, 1.2, 4.0}) {
    const double t = 0.8;
    CHECK(af.rho_tp(t, x) == doctest::Approx(rho(1 + (x - 1) * std::exp(t)) * std::exp(t)));
  }
}

TEST_CASE("transported weight: lemma form matches the definition") {
  const char* docs[] = {
      "family = lasota\nh_expr = x - 0.2\np = 2\n",
      "family = lasota_r\nr = 2\nh_expr = -x + 0.5\np = 1.5\n",
  };
  for (const char* doc : docs) {
    const auto we = from_text(doc);
    for (double t : {0.3, 1.0, 2.5})
      for (double x : {0.01, 0.05, 0.2}) {
        const double a = we.rho_tp(t, x), b = we.rho_tp_definition(t, x);
        CHECK(a == doctest::Approx(b).epsilon(1e-6));
      }
  }

  const auto af = from_text("family = affine\na = 1\nb = -1\nh_expr = 0.1*abs(x-1) - 0.4\nrho_expr = exp(-abs(x))\n");
  for (double t : {0.5, 2.0})
    for (double x : {-3.0, 0.2, 0.99, 1.01, 2.5})
      CHECK(af.rho_tp(t, x) == doctest::Approx(af.rho_tp_definition(t, x)).epsilon(1e-6));
}

TEST_CASE("backward weight") {
  const double c = 0.2, p = 3.0;
  const auto we = lasota(c, p);
  CHECK(we.rho_minus_tp(1.3, 0.6) == doctest::Approx(std::exp(-(p * c + 1) * 1.3)));
  CHECK(we.rho_minus_tp(0.0, 0.6) == 1.0);
  const auto tr = from_text("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
  CHECK(tr.rho_minus_tp(2.0, 0.5) == doctest::Approx(std::exp(2.5)));
}

TEST_CASE("operator norm") {
  const double c = -0.8, p = 2.0, t = 3.0;
  const auto we = lasota(c, p);
  const auto grid = sample_domain(we.problem().domain, we.problem().grid);
  const auto n = we.operator_norm(t, grid);
  CHECK(n.raw_sup == doctest::Approx(std::exp((p * c + 1) * t)));
  CHECK(n.norm == doctest::Approx(std::exp((c + 1 / p) * t)));
  CHECK(we.operator_norm(0.0, grid).norm == doctest::Approx(1.0));

  const auto tr = from_text("family = translation\nh_const = 0\nrho_expr = exp(x)\np = 3\n");
  const auto g2 = sample_domain(tr.problem().domain, tr.problem().grid);
  const auto m = tr.operator_norm(2.0, g2);
  CHECK(m.raw_sup == doctest::Approx(std::exp(-2.0)));
  CHECK(m.norm == doctest::Approx(std::exp(-2.0 / 3)));
}

TEST_CASE("norm exponent: brute force on a near-extremal function") {
  // ||T(t)f|| / ||f|| for f = x^(-alpha) approaches the p-th root of the raw sup as alpha -> 1/p.
  const double c = -0.8, p = 2.0, t = 1.0, alpha = 1 / p - 0.002;
  const auto we = lasota(c, p);
  const auto f = SampledFunction::power(0.0, alpha);
  const double ratio = lp_norm(we.problem(), we.apply_semigroup(t, f)) / lp_norm(we.problem(), f);
  const auto n = we.operator_norm(t, sample_domain(we.problem().domain, we.problem().grid));
  CHECK(ratio == doctest::Approx(n.norm).epsilon(0.01));
  CHECK(std::fabs(ratio - n.raw_sup) > 0.05);
}

TEST_CASE("semigroup application") {
  const double c = 0.4;
  const auto we = lasota(c);
  const auto one = we.apply_semigroup(1.5, SampledFunction([](double) { return 1.0; }));
  CHECK(one(0.3) == doctest::Approx(we.multiplier_cocycle(1.5, 0.3)));
  const auto lin = we.apply_semigroup(1.5, SampledFunction([](double x) { return x; }));
  CHECK(lin(0.3) == doctest::Approx(std::exp((c - 1) * 1.5) * 0.3));
  const auto id = we.apply_semigroup(0.0, SampledFunction([](double x) { return x * x; }));
  CHECK(id(0.3) == doctest::Approx(0.09));

  const auto sing = we.apply_semigroup(2.0, SampledFunction::power(0.0, 0.3));
  REQUIRE(sing.singularity());
  CHECK(sing.singularity()->exponent == 0.3);
  CHECK(sing(0.5) == doctest::Approx(std::exp(2 * c) * std::pow(0.5 * std::exp(-2.0), -0.3)));
}

TEST_CASE("weighted norms") {
  const auto pr = parse_problem("family = lasota\nh_const = 0\np = 2\n");
  CHECK(lp_norm(pr, SampledFunction([](double) { return 1.0; })) == doctest::Approx(1.0));
  CHECK(lp_norm(pr, SampledFunction([](double x) { return x; })) == doctest::Approx(1 / std::sqrt(3.0)));
  CHECK(lp_norm(pr, SampledFunction::power(0.0, 0.25)) == doctest::Approx(std::sqrt(2.0)));
  const auto p5 = parse_problem("family = lasota\nh_const = 0\np = 5\n");
  CHECK(lp_norm(p5, SampledFunction([](double) { return 1.0; })) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lp_norm(pr, SampledFunction::power(0.0, 0.5)), DivergentIntegral);
}

TEST_CASE("change of variables") {
  const auto we = from_text("family = lasota\nh_expr = x - 0.6\np = 2\n");
  for (double t : {0.5, 2.0}) {
    const auto [lhs, rhs] = change_of_variables(we, t, SampledFunction([](double x) { return 1 + x * x; }));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
  const auto tr = from_text("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
  const auto [a, b] = change_of_variables(tr, 1.0, SampledFunction([](double x) { return std::exp(-x * x); }));
  CHECK(a == doctest::Approx(b).epsilon(1e-8));
}

TEST_CASE("admissibility fit") {
  const double c = -0.3, p = 2.0;
  const auto we = lasota(c, p);
  const auto fit = we.admissibility_fit(10.0, sample_domain(we.problem().domain, we.problem().grid));
  CHECK_FALSE(fit.refuted);
  CHECK(fit.M == doctest::Approx(1.0));
  CHECK(fit.omega == doctest::Approx(p * c + 1));
  CHECK(fit.max_violation <= 1e-9);
  CHECK(we.admissibility_violation(1.0, p * c + 0.5, fit) > 0);

  const auto single = we.admissibility_fit(0.0, sample_domain(we.problem().domain, we.problem().grid));
  CHECK(single.M == 1.0);
  CHECK(single.omega == 0.0);
}

TEST_CASE("endpoint singularities of expressions") {
  const auto f = function_on_interval(Expression::parse("x^(-0.3) + 1"), Interval{0, 1});
  REQUIRE(f.singularity());
  CHECK(f.singularity()->at == 0.0);
  CHECK(f.singularity()->exponent == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(f(0.25) == doctest::Approx(std::pow(0.25, -0.3) + 1));
  CHECK_FALSE(function_on_interval(Expression::parse("x^2"), Interval{0, 1}).singularity());
  CHECK(detect_endpoint_exponent([](double x) { return std::pow(1 - x, -0.7); }, 1.0, -1.0) ==
        doctest::Approx(0.7).epsilon(1e-3));
}

TEST_CASE("equilibrium membership") {
  const auto we = from_text("family = affine\na = 1\nb = -1\nh_const = 0\n");
  const double at[] = {1.0}, off[] = {1.1};
  CHECK(we.in_omega0(at));
  CHECK_FALSE(we.in_omega0(off));
  CHECK(we.rho_tp(3.0, 1.0) == doctest::Approx(std::exp(3.0)));  // e^{pt(h - F'/p)} with F' = -1
}
