#include <cmath>

#include "doctest.h"
#include "semistab/error.hpp"
#include "semistab/grid.hpp"
#include "semistab/stability.hpp"

using namespace semistab;

namespace {

ProblemSpec lasota(double c, double p = 2.0) {
  return make_family_problem(FamilySpec::lasota(), MultiplierShape{0.0, c}, p);
}

SampleGrid grid_of(const ProblemSpec& pr) { return sample_domain(pr.domain, pr.grid); }

const CriterionResult& criterion(const Verdict& v, const std::string& id) {
  for (const auto& c : v.criteria)
    if (c.id == id) return c;
  throw std::runtime_error("missing criterion " + id);
}

double evidence(const CriterionResult& c, const std::string& key) {
  for (const auto& [k, v] : c.evidence)
    if (k == key) return v;
  throw std::runtime_error("missing evidence " + key);
}

}  // namespace

TEST_SUITE("decay") {
  TEST_CASE("classification") {
    std::vector<double> t, down, flat, up, killed;
    for (int i = 0; i <= 40; ++i) {
      t.push_back(i);
      down.push_back(std::exp(-1.0 * i));
      flat.push_back(1.0);
      up.push_back(std::exp(0.1 * i));
      killed.push_back(i < 5 ? 1.0 : 0.0);
    }
    CHECK(classify_decay(t, down, 1e-3, 1e-6).classification == DecayClass::DecaysToZero);
    CHECK(classify_decay(t, flat, 1e-3, 1e-6).classification == DecayClass::BoundedNonvanishing);
    CHECK(classify_decay(t, up, 1e-3, 1e-6).classification == DecayClass::Grows);
    CHECK(classify_decay(t, killed, 1e-3, 1e-6).classification == DecayClass::DecaysToZero);
    // negative slope but not yet below value_tol
    std::vector<double> slow;
    for (double s : t) slow.push_back(std::exp(-0.05 * s));
    CHECK(classify_decay(t, slow, 1e-3, 1e-6).classification == DecayClass::Undetermined);
  }

  TEST_CASE("boundedness of log curves") {
    std::vector<double> t, log_grow, log_flat;
    for (int i = 1; i <= 100; ++i) {
      t.push_back(i);
      log_grow.push_back(std::log(std::log(1.0 + i)));
      log_flat.push_back(-0.5);
    }
    CHECK(test_bounded(t, log_flat, 1e-3).bounded);
    CHECK_FALSE(test_bounded(t, log_grow, 1e-3).bounded);  // log-time slope catches log growth
    const std::vector<double> logs{0.0, 0.5, 1.0};
    const std::vector<double> ts{1.0, 2.0, 3.0};
    const auto few = test_bounded(ts, logs, 1e-3);
    CHECK(few.low_confidence);
    CHECK(least_squares_slope(ts, logs) == doctest::Approx(0.5));
  }
}

TEST_SUITE("criteria") {
  TEST_CASE("boundedness") {
    const auto ok = lasota(-0.5);
    const auto r1 = check_boundedness(WeightEvolution(ok), 20.0, grid_of(ok));
    CHECK(r1.passed());
    const auto bad = lasota(-0.4);
    const auto r2 = check_boundedness(WeightEvolution(bad), 20.0, grid_of(bad));
    CHECK(r2.outcome == Outcome::Fail);
    CHECK(evidence(r2, "linear_slope") == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(r2.witness);
    const auto r3 = check_boundedness(WeightEvolution(bad), 0.0, grid_of(bad));
    CHECK(r3.passed());
    CHECK(r3.low_confidence);
  }

  TEST_CASE("pointwise decay") {
    const auto pr = lasota(-0.5);
    const auto r = check_pointwise_decay(WeightEvolution(pr), 20.0, {{0.5}});
    CHECK(r.passed());
    REQUIRE(r.decay.size() == 1);
    CHECK(r.decay.front().second.classification == DecayClass::DecaysToZero);

    const auto tr = parse_problem("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
    CHECK(check_pointwise_decay(WeightEvolution(tr), 30.0, {{0.0}}).passed());

    const auto af = parse_problem("family = affine\na = 1\nb = -1\nh_const = 0\nrho_expr = 1/(1 + abs(x - 1))\n");
    const auto f = check_pointwise_decay(WeightEvolution(af), 20.0, {{0.0}, {3.0}});
    CHECK(f.outcome == Outcome::Fail);
    CHECK(f.witness);
  }

  TEST_CASE("sign of h on the equilibrium set") {
    auto run = [](const char* text, std::vector<std::vector<double>> points = {}) {
      const auto pr = parse_problem(text);
      const auto part = partition_domain(pr, grid_of(pr));
      return check_omega0_sign(pr, part, points.empty() ? part.samples0 : points);
    };
    CHECK(run("family = affine\na = 1\nb = -1\nh_const = 0.3\n").passed());
    CHECK(run("domain = (0,1)\nF_expr = 0\nh_const = -1\n").passed());
    const auto bad = run("domain = (0,1)\nF_expr = 0\nh_expr = x - 0.5\n", {{0.25}, {0.75}});
    CHECK(bad.outcome == Outcome::Fail);
    REQUIRE(bad.witness);
    CHECK(bad.witness->find("0.75") != std::string::npos);
  }

  TEST_CASE("escape") {
    const auto sf = Semiflow::closed_form(FamilySpec::lasota(), Domain::interval(0, 1));
    CHECK(check_escape(sf, 1.0, {{1e-12}, {0.5}}).passed());
    const auto tr = Semiflow::closed_form(FamilySpec::translation(), Domain::interval(-INFINITY, INFINITY));
    CHECK_FALSE(check_escape(tr, 50.0, {{0.0}}).passed());
  }

  TEST_CASE("w*-integral over boxes") {
    const auto tr = parse_problem("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
    const auto r = check_wstar_integral(WeightEvolution(tr), Box{{Interval{0, 1}}}, 30.0);
    CHECK(r.passed());
    REQUIRE(r.decay.size() == 1);
    const auto& s = r.decay.front().second.samples;
    REQUIRE(!s.empty());
    CHECK(s.front().first == 0.0);
    CHECK(s.front().second == doctest::Approx(std::exp(1.0) - 1));
    for (const auto& [t, v] : s) CHECK(v == doctest::Approx(std::exp(-t) * (std::exp(1.0) - 1)).epsilon(1e-8));

    const auto la = lasota(-0.5);
    const auto q = check_wstar_integral(WeightEvolution(la), Box{{Interval{0.25, 0.75}}}, 10.0);
    CHECK(q.passed());
    for (const auto& [t, v] : q.decay.front().second.samples)
      CHECK(v == doctest::Approx(std::max(0.0, std::min(0.75, std::exp(-t)) - 0.25)).epsilon(1e-6));

    const auto flat = parse_problem("family = translation\nh_const = 0\n");
    CHECK(check_wstar_integral(WeightEvolution(flat), Box{{Interval{-1, 1}}}, 30.0).outcome == Outcome::Fail);
  }
}

TEST_SUITE("classifiers") {
  TEST_CASE("three-condition classifier") {
    CHECK(classify_stability_1d(lasota(-0.5), 20.0, grid_of(lasota(-0.5))).status == Status::Stable);
    const auto un = classify_stability_1d(lasota(-0.4), 20.0, grid_of(lasota(-0.4)));
    CHECK(un.status == Status::Unstable);
    CHECK(criterion(un, "bounded").outcome == Outcome::Fail);
    CHECK(un.witness);

    const auto mult = parse_problem("domain = (0,1)\nF_expr = 0\nh_const = 0.1\n");
    const auto v = classify_stability_1d(mult, 20.0, grid_of(mult));
    CHECK(v.status == Status::Unstable);
    CHECK(criterion(v, "omega0_sign").outcome == Outcome::Fail);
  }

  TEST_CASE("worked examples on the line") {
    const auto e = parse_problem("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
    CHECK(classify_stability(e, 30.0, grid_of(e)).status == Status::Stable);
    const auto one = parse_problem("family = translation\nh_const = 0\n");
    CHECK(classify_stability(one, 30.0, grid_of(one)).status == Status::Unstable);
  }

  TEST_CASE("stability integral") {
    const double c = -0.3, p = 2.0;
    for (double t : {0.0, 1.0, 7.5}) CHECK(stability_integral(lasota(c, p), 0.4, t) == doctest::Approx((c + 1 / p) * t));
    const double r = 2.0, h0 = -0.5, y = 0.6, t = 3.0;
    const double bound = (h0 + r / p) / (r - 1) * std::log(1 + (r - 1) * t * std::pow(y, r - 1));
    const auto lr = make_family_problem(FamilySpec::lasota_r(r), MultiplierShape{0.0, h0}, p);
    CHECK(stability_integral(lr, y, t) <= bound);
    CHECK(stability_integral(lr, y, t) == doctest::Approx(h0 * t + r / p * std::log(1 + t * y)));
    // h = h0 x^{r-1} attains the bound
    const auto lead = make_family_problem(FamilySpec::lasota_r(r), Expression::parse("-0.5*x"), p);
    CHECK(stability_integral(lead, y, t) == doctest::Approx(bound));
  }

  TEST_CASE("rho = 1 integral classifier") {
    const auto s = classify_stability_rho1(lasota(-0.5), 20.0, grid_of(lasota(-0.5)));
    CHECK(s.status == Status::Stable);
    CHECK(classify_stability_rho1(lasota(-0.4), 20.0, grid_of(lasota(-0.4))).status == Status::Unstable);
    const auto lr = make_family_problem(FamilySpec::lasota_r(2.0), MultiplierShape{0.0, -1.0}, 2.0);
    CHECK(classify_stability_rho1(lr, 20.0, grid_of(lr)).status == Status::Stable);
    const auto tw = parse_problem("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
    CHECK_THROWS_AS(classify_stability_rho1(tw, 20.0, grid_of(tw)), Error);
  }

  TEST_CASE("surjective flow needs divergence") {
    const auto pr = make_family_problem(FamilySpec::affine(0.0, 1.0), MultiplierShape{0.0, -0.3}, 2.0,
                                        Space::Lp, Domain::interval(0, INFINITY));
    CHECK(classify_stability_rho1(pr, 100.0, grid_of(pr)).status == Status::Stable);
    // ||T(t)f||^p = e^{(pc-1)t} ||f||^p: isometry at c = 1/p
    const auto iso = make_family_problem(FamilySpec::affine(0.0, 1.0), MultiplierShape{0.0, 0.5}, 2.0,
                                         Space::Lp, Domain::interval(0, INFINITY));
    CHECK(classify_stability_rho1(iso, 100.0, grid_of(iso)).status == Status::Unstable);
  }

  TEST_CASE("1d and rho = 1 classifiers agree on the registered families") {
    std::vector<ProblemSpec> cases;
    for (double c : {-1.0, -0.6, -0.5, -0.45, -0.2, 0.3}) cases.push_back(lasota(c));
    for (double c : {-1.5, -1.0, -0.8}) cases.push_back(make_family_problem(FamilySpec::lasota_r(2.0), MultiplierShape{0.0, c}, 2.0));
    for (const auto& pr : cases) {
      const auto g = grid_of(pr);
      CHECK(classify_stability_1d(pr, 20.0, g).status == classify_stability_rho1(pr, 20.0, g).status);
    }
  }

  TEST_CASE("general classifier") {
    const auto e = parse_problem("family = translation\nh_const = 0\nrho_expr = exp(x)\n");
    const auto boxes = default_test_boxes(e.domain);
    CHECK_FALSE(boxes.empty());
    for (const auto& b : boxes) CHECK(b.bounded());
    CHECK(classify_stability_general(e, 30.0, boxes, grid_of(e)).status == Status::Stable);
    const auto one = parse_problem("family = translation\nh_const = 0\n");
    CHECK(classify_stability_general(one, 30.0, default_test_boxes(one.domain), grid_of(one)).status ==
          Status::Unstable);
    CHECK(classify_stability_general(lasota(-0.6), 20.0, default_test_boxes(Domain::interval(0, 1)),
                                     grid_of(lasota(-0.6)))
              .status == Status::Stable);
  }

  TEST_CASE("product flow in the unit square") {
    for (const auto& [c, expect] : {std::pair{-1.2, Status::Stable}, std::pair{-0.8, Status::Unstable}}) {
      auto pr = parse_problem("domain = (0,1)x(0,1)\nF_expr = -x; -y\nh_const = " + format_double(c) + "\np = 2\n");
      pr.grid.samples_nd = 12;
      const auto v = classify_stability(pr, 15.0, sample_domain(pr.domain, pr.grid));
      CHECK(v.status == expect);
    }
  }

  TEST_CASE("verdict fold") {
    Verdict v;
    v.criteria.push_back({"a", Outcome::Pass});
    v.criteria.push_back({"b", Outcome::Unknown});
    v.fold();
    CHECK(v.status == Status::Inconclusive);
    v.criteria.push_back({"c", Outcome::Fail, "", {}, std::string("x = 1")});
    v.fold();
    CHECK(v.status == Status::Unstable);
    CHECK(v.witness->find("x = 1") != std::string::npos);
    Verdict ok;
    ok.criteria.push_back({"a", Outcome::Pass});
    ok.fold();
    CHECK(ok.status == Status::Stable);
  }
}
