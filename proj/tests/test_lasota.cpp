#include <cmath>

#include "doctest.h"
#include "semistab/error.hpp"
#include "semistab/grid.hpp"
#include "semistab/lasota.hpp"

using namespace semistab;

TEST_SUITE("closed form") {
  TEST_CASE("semigroup formula") {
    const auto c = Expression::constant(-0.3);
    CHECK(lasota_semigroup([](double) { return 1.0; }, c, 2.0, 0.4) == doctest::Approx(std::exp(-0.6)));
    const double a = 0.3;
    CHECK(lasota_semigroup([a](double x) { return std::pow(x, -a); }, c, 2.0, 0.4) ==
          doctest::Approx(std::exp((-0.3 + a) * 2.0) * std::pow(0.4, -a)));
    CHECK(lasota_semigroup([](double x) { return x * x; }, Expression::parse("x"), 0.0, 0.4) ==
          doctest::Approx(0.16));
    // h = x: int_{-t}^0 x e^s ds = x (1 - e^{-t})
    CHECK(lasota_semigroup([](double) { return 1.0; }, Expression::parse("x"), 1.0, 0.5) ==
          doctest::Approx(std::exp(0.5 * (1 - std::exp(-1.0)))));
  }

  TEST_CASE("agrees with the generic engine") {
    const auto lp = LasotaProblem{1.0, Expression::parse("x - 0.4"), 2.0};
    const WeightEvolution we(lp.to_problem());
    const auto f = SampledFunction([](double x) { return 1 + x; });
    for (double t : {0.5, 3.0}) {
      const auto g = we.apply_semigroup(t, f);
      for (double x : {0.1, 0.6})
        CHECK(g(x) == doctest::Approx(lasota_semigroup([](double y) { return 1 + y; }, lp.h, t, x)).epsilon(1e-9));
    }
  }
}

TEST_SUITE("thresholds") {
  TEST_CASE("classical equation") {
    const auto t = lasota_threshold(LasotaProblem{1.0, Expression::parse("-0.5 + x^2"), 2.0});
    CHECK(t.lp_threshold == doctest::Approx(-0.5));
    CHECK(*t.lp == Status::Stable);
    CHECK(*lasota_threshold(LasotaProblem::constant(1, -0.4, 2)).lp == Status::Unstable);
    const auto w = lasota_threshold(LasotaProblem::constant(1, 0.0, 1, Space::W1pStar));
    REQUIRE(w.wstar);
    REQUIRE(w.w);
    CHECK(*w.wstar == Status::Stable);
    CHECK(*w.w == Status::Unstable);
    CHECK(w.wstar_threshold == doctest::Approx(0.0));
  }

  TEST_CASE("generalized equation uses the leading coefficient") {
    const auto t = lasota_threshold(LasotaProblem::leading(2, -0.9, 2));
    CHECK(t.kappa == doctest::Approx(-0.9));
    CHECK(t.lp_threshold == doctest::Approx(-1.0));
    CHECK(*t.lp == Status::Unstable);
    CHECK(*lasota_threshold(LasotaProblem::leading(2, -1.0, 2)).lp == Status::Stable);
    CHECK(*lasota_threshold(LasotaProblem::leading(3, -1.6, 2)).lp == Status::Stable);
    // a nonzero constant is not of order x^{r-1} at 0: the hypothesis fails
    CHECK_THROWS_AS(lasota_threshold(LasotaProblem::constant(2, -0.9, 2)), HypothesisError);
  }

  TEST_CASE("generalized Sobolev thresholds") {
    const auto s = lasota_threshold(LasotaProblem::constant(2, 0.0, 2, Space::W1pStar));
    CHECK(*s.wstar == Status::Stable);
    CHECK(*s.w == Status::Unstable);
    CHECK(*lasota_threshold(LasotaProblem::constant(2, 0.1, 2, Space::W1pStar)).wstar == Status::Unstable);
    CHECK(*lasota_threshold(LasotaProblem::constant(2, -0.1, 2, Space::W1pStar)).w == Status::Stable);
  }

  TEST_CASE("singular multiplier fails the probe") {
    CHECK_THROWS_AS(lasota_threshold(LasotaProblem{1.0, Expression::parse("-1 + x^0.5/x"), 2.0}), HypothesisError);
  }

  TEST_CASE("prediction agrees with the classifier on the lattice") {
    for (double p : {1.0, 2.0, 4.0}) {
      for (double d : {-0.1, 0.0, 0.1}) {
        const auto lp = LasotaProblem::constant(1, -1 / p + d, p);
        const auto pr = lp.to_problem();
        const auto v = classify_stability_rho1(pr, 20.0, sample_domain(pr.domain, pr.grid));
        CHECK(*lasota_threshold(lp).lp == v.status);
      }
    }
  }
}

TEST_SUITE("hypercyclicity") {
  TEST_CASE("criterion on the classical family") {
    const auto hyp = hypercyclicity_check(WeightEvolution(LasotaProblem::constant(1, -0.25, 2).to_problem()));
    CHECK(hyp.candidate);
    CHECK(hyp.omega0_null);
    CHECK_FALSE(hyp.points.empty());
    for (double v : hyp.rho_minus_final) CHECK(v < 1e-6);
    const auto no = hypercyclicity_check(WeightEvolution(LasotaProblem::constant(1, -0.75, 2).to_problem()));
    CHECK_FALSE(no.candidate);
  }

  TEST_CASE("sequence must tend to infinity") {
    CHECK_THROWS_AS((SequenceSpec{0.0, 10}.times()), Error);
    CHECK_THROWS_AS((SequenceSpec{0.5, 0}.times()), Error);
    const auto ts = SequenceSpec{0.25, 4}.times();
    CHECK(ts == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  }

  TEST_CASE("trichotomy, decreasing field") {
    const auto a = stability_vs_hypercyclicity(FamilySpec::lasota(), -0.75, 2.0);
    CHECK(a.decreasing);
    CHECK(a.analytic_stable);
    CHECK(*a.analytic_hypercyclic == false);
    CHECK(a.numeric.status == Status::Stable);
    CHECK_FALSE(a.hypercyclicity.candidate);
    CHECK(a.consistent);

    const auto b = stability_vs_hypercyclicity(FamilySpec::lasota(), -0.25, 2.0);
    CHECK_FALSE(b.analytic_stable);
    CHECK(*b.analytic_hypercyclic);
    CHECK(b.hypercyclicity.candidate);
    CHECK(b.numeric.status == Status::Unstable);
    CHECK(b.consistent);

    const auto e = stability_vs_hypercyclicity(FamilySpec::lasota(), -0.5, 2.0);
    CHECK(e.analytic_stable);
    CHECK_FALSE(e.hypercyclicity.candidate);
    CHECK(e.consistent);
  }

  TEST_CASE("trichotomy, increasing field") {
    const auto fam = FamilySpec::affine(0.0, 1.0);
    const auto dom = Domain::interval(0, INFINITY);
    const auto s = stability_vs_hypercyclicity(fam, -0.25, 2.0, 100.0, dom);
    CHECK_FALSE(s.decreasing);
    CHECK(s.analytic_stable);
    CHECK_FALSE(s.analytic_hypercyclic);
    CHECK(s.numeric.status == Status::Stable);
    CHECK_FALSE(s.hypercyclicity.candidate);
    CHECK(s.consistent);

    const auto u = stability_vs_hypercyclicity(fam, -0.75, 2.0, 100.0, dom);
    CHECK_FALSE(u.analytic_stable);
    CHECK(u.numeric.status == Status::Unstable);
    CHECK_FALSE(u.hypercyclicity.candidate);

    // isometry at lambda = -1/p: flagged, not stable
    const auto iso = stability_vs_hypercyclicity(fam, -0.5, 2.0, 100.0, dom);
    CHECK_FALSE(iso.flags.empty());
    CHECK(iso.numeric.status != Status::Stable);
  }

  TEST_CASE("no parameter is both stable and a candidate") {
    for (double lam : {-1.0, -0.6, -0.5, -0.4, -0.1, 0.2}) {
      const auto r = stability_vs_hypercyclicity(FamilySpec::lasota(), lam, 2.0);
      CHECK_FALSE((r.numeric.status == Status::Stable && r.hypercyclicity.candidate));
    }
  }
}

TEST_SUITE("witness slopes") {
  TEST_CASE("decay rate experiment") {
    const double c = -0.7, p = 2.0;
    const WeightEvolution we(LasotaProblem::constant(1, c, p).to_problem());
    for (double a : {0.0, 0.2, 0.45}) {
      const auto f = a == 0.0 ? SampledFunction([](double) { return 1.0; }) : SampledFunction::power(0.0, a);
      const auto ev = decay_rate_experiment(we, f, 10.0, 20);
      CHECK(ev.slope == doctest::Approx(c + a).epsilon(0.02));
      CHECK(ev.samples.size() == 21);
    }
  }
}
