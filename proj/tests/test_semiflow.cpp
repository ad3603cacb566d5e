#include <cmath>
#include <random>

#include "doctest.h"
#include "semistab/error.hpp"
#include "semistab/semiflow.hpp"

using namespace semistab;

namespace {

Semiflow lasota() { return Semiflow::closed_form(FamilySpec::lasota(), Domain::interval(0, 1)); }
Semiflow lasota_r(double r) { return Semiflow::closed_form(FamilySpec::lasota_r(r), Domain::interval(0, 1)); }
Semiflow translation() { return Semiflow::closed_form(FamilySpec::translation(), Domain::interval(-INFINITY, INFINITY)); }
Semiflow affine() { return Semiflow::closed_form(FamilySpec::affine(1, -1), Domain::interval(-INFINITY, INFINITY)); }

}  // namespace

TEST_CASE("closed-form flows") {
  const auto L = lasota();
  CHECK(L.flow(2.0, 0.5) == doctest::Approx(0.5 * std::exp(-2.0)));
  CHECK(affine().flow(1.5, 3.0) == doctest::Approx(1 + 2 * std::exp(-1.5)));
  const double r = 2.5, t = 0.7, x = 0.4;
  CHECK(lasota_r(r).flow(t, x) == doctest::Approx(std::pow((r - 1) * t + std::pow(x, 1 - r), 1 / (1 - r))));
  CHECK(translation().flow(3.0, -1.0) == 2.0);
  CHECK(L.flow(0.0, 0.3) == 0.3);
}

TEST_CASE("inverse flow and the image") {
  const auto L = lasota();
  REQUIRE(L.inverse_flow(1.0, 0.2));
  CHECK(*L.inverse_flow(1.0, 0.2) == doctest::Approx(0.2 * std::exp(1.0)));
  CHECK_FALSE(L.inverse_flow(1.0, 0.5));
  CHECK_FALSE(L.image_indicator(1.0, 0.5));
  CHECK(L.image_indicator(1.0, 0.3));
  CHECK(L.image_indicator(0.0, 0.999));
  CHECK(*L.inverse_flow(0.0, 0.42) == 0.42);

  const auto T = translation();
  CHECK(*T.inverse_flow(5.0, 1.0) == -4.0);
  for (double x : {-100.0, 0.0, 1e6}) CHECK(T.image_indicator(7.0, x));

  const auto I = L.image_interval(2.0);
  CHECK(I.lo == 0.0);
  CHECK(I.hi == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("jacobians") {
  CHECK(affine().flow_jacobian(2.0, 5.0) == doctest::Approx(std::exp(-2.0)));
  const double r = 2.0, t = 1.3, x = 0.6;
  CHECK(lasota_r(r).flow_jacobian(t, x) ==
        doctest::Approx(std::pow(x, -r) * std::pow((r - 1) * t + std::pow(x, 1 - r), r / (1 - r))));
  CHECK(lasota().flow_jacobian(-1.0, 0.1) == doctest::Approx(std::exp(1.0)));
  for (const auto& sf : {lasota(), lasota_r(3.0), affine(), translation()}) CHECK(sf.flow_jacobian(0.0, 0.5) == 1.0);
}

TEST_CASE("jacobian agrees with finite differences") {
  for (const auto& sf : {lasota(), lasota_r(1.5), lasota_r(3.0), affine()}) {
    for (double t : {0.1, 1.0, 4.0}) {
      for (double x : {0.2, 0.5, 0.8}) {
        const double h = 1e-5 * x;
        const double fd = (sf.flow(t, x + h) - sf.flow(t, x - h)) / (2 * h);
        CHECK(sf.flow_jacobian(t, x) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("escape times") {
  CHECK(*lasota().escape_time(0.25, INFINITY) == doctest::Approx(-std::log(0.25)));
  const double r = 3.0, x = 0.5;
  CHECK(*lasota_r(r).escape_time(x, INFINITY) == doctest::Approx((std::pow(x, 1 - r) - 1) / (r - 1)));
  CHECK_FALSE(translation().escape_time(0.0, 1e6));
  CHECK_FALSE(lasota().escape_time(0.01, 1.0));  // escapes only at -log 0.01 > 1
}

TEST_CASE("numeric backend matches the closed form") {
  const auto num = Semiflow::numeric({Expression::parse("-x")}, Domain::interval(0, 1));
  CHECK(num.kind() == Semiflow::Kind::Numeric);
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double x = 0.1 * i;
    for (double t = 0.0; t <= 10.0; t += 0.5) worst = std::max(worst, std::fabs(num.flow(t, x) - x * std::exp(-t)));
  }
  CHECK(worst <= 1e-10);
  CHECK(num.flow_jacobian(2.0, 0.3) == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
  CHECK(*num.inverse_flow(1.0, 0.2) == doctest::Approx(0.2 * std::exp(1.0)).epsilon(1e-9));
  CHECK_FALSE(num.inverse_flow(1.0, 0.5));
  CHECK(*num.escape_time(0.25, 5.0) == doctest::Approx(-std::log(0.25)).epsilon(1e-6));
}

TEST_CASE("numeric exit is reported with its time") {
  const auto out = Semiflow::numeric({Expression::parse("1")}, Domain::interval(0, 1));
  try {
    out.flow(2.0, 0.25);
    FAIL("no exit");
  } catch (const DomainExit& e) {
    CHECK(e.exit_time() == doctest::Approx(0.75).epsilon(1e-6));
    CHECK_FALSE(e.blowup());
  }
  const auto blow = Semiflow::numeric({Expression::parse("x^2")}, Domain::interval(0, INFINITY));
  CHECK_THROWS_AS(blow.flow(5.0, 1.0), DomainExit);
}

TEST_CASE("group law and round trip on random samples") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> T(0.0, 3.0), X(0.05, 0.95);
  const auto num = Semiflow::numeric({Expression::parse("-x - x^3")}, Domain::interval(0, 1));
  for (const auto& sf : {lasota(), lasota_r(2.0), affine(), num}) {
    double group = 0.0, trip = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double t = T(gen), s = T(gen), x = X(gen);
      group = std::max(group, std::fabs(sf.flow(t, sf.flow(s, x)) - sf.flow(t + s, x)));
      if (const auto y = sf.inverse_flow(t, x)) trip = std::max(trip, std::fabs(sf.flow(t, *y) - x));
    }
    CHECK(group <= 1e-8);
    CHECK(trip <= 1e-8);
  }
}

TEST_CASE("flows are monotone in x") {
  const auto num = Semiflow::numeric({Expression::parse("-x - x^3")}, Domain::interval(0, 1));
  for (const auto& sf : {lasota_r(2.0), num}) {
    double prev = -1.0;
    for (int i = 1; i < 100; ++i) {
      const double y = sf.flow(2.0, i / 100.0);
      CHECK(y > prev);
      prev = y;
    }
  }
}

TEST_CASE("closure backend for a product flow") {
  const Domain sq = Domain::parse("(0,1)x(0,1)");
  auto flow = [](double t, std::span<const double> x) -> std::optional<std::vector<double>> {
    std::vector<double> y{x[0] * std::exp(-t), x[1] * std::exp(-t)};
    if (y[0] >= 1 || y[1] >= 1) return std::nullopt;
    return y;
  };
  auto jac = [](double t, std::span<const double>) { return std::exp(-2 * t); };
  const auto sf = Semiflow::closure(sq, flow, jac);
  const double x[] = {0.5, 0.2};
  CHECK(sf.dim() == 2);
  CHECK(sf.flow(1.0, x)[1] == doctest::Approx(0.2 * std::exp(-1.0)));
  CHECK(sf.flow_jacobian(1.0, x) == doctest::Approx(std::exp(-2.0)));
  CHECK_FALSE(sf.image_indicator(1.0, x));
  const double y[] = {0.3, 0.2};
  CHECK(sf.image_indicator(1.0, y));
  CHECK(*sf.escape_time(x, 10.0) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("transport accumulates an integrand along the path") {
  const auto L = lasota();
  const double x = 0.8;
  const double ts[] = {0.0, 1.0, 2.0};
  const auto path = L.transport(std::span<const double>(&x, 1), ts, Direction::Forward, Expression::parse("x"));
  REQUIRE(path.samples.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(path.samples[i].alive);
    CHECK(path.samples[i].integral == doctest::Approx(x * (1 - std::exp(-ts[i]))).epsilon(1e-8));
  }
  const auto back = L.transport(std::span<const double>(&x, 1), ts, Direction::Backward);
  CHECK(back.exit_time);
  CHECK(*back.exit_time == doctest::Approx(-std::log(x)));
  CHECK_FALSE(back.samples[2].alive);
}

TEST_CASE("cache can be toggled") {
  const auto num = Semiflow::numeric({Expression::parse("-x")}, Domain::interval(0, 1));
  num.set_cache_enabled(false);
  const double a = num.flow(1.0, 0.5);
  num.set_cache_enabled(true);
  CHECK(num.flow(1.0, 0.5) == a);
}
