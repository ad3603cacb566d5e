#include "semistab/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <string>

#include "semistab/error.hpp"
#include "semistab/expr.hpp"

namespace semistab {

namespace bq = boost::math::quadrature;

namespace {

// Error estimates from Kronrod/double-exponential rules are pessimistic; accept three orders above
// the requested relative tolerance, with an absolute floor for integrals that vanish.
bool acceptable(const QuadResult& r, double tol) {
  return std::isfinite(r.value) && r.error <= std::max(1e3 * tol * r.l1, 1e-280);
}

void require_finite(const QuadResult& r, double a, double b) {
  if (!std::isfinite(r.value))
    throw DivergentIntegral("integral over (" + format_double(a) + "," + format_double(b) + ") is not finite");
}

// tanh_sinh must never sample the endpoints themselves.
Integrand guarded(const Integrand& f) {
  return [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  };
}

}  // namespace

QuadResult integrate_smooth(const Integrand& f, double a, double b, double tol) {
  QuadResult r;
  if (a == b) return r;
  // boost's error estimate degrades on very short intervals; work on [0,1]
  const double w = b - a;
  r.value = bq::gauss_kronrod<double, 31>::integrate([&](double u) { return f(a + w * u); }, 0.0, 1.0, 18, tol,
                                                      &r.error, &r.l1);
  r.value *= w;
  r.error *= std::fabs(w);
  r.l1 *= std::fabs(w);
  return r;
}

QuadResult integrate_endpoint_singular(const Integrand& f, double a, double b, double tol) {
  QuadResult r;
  if (a == b) return r;
  std::size_t levels = 0;
  bq::tanh_sinh<double> ts(18);
  r.value = ts.integrate(f, a, b, tol, &r.error, &r.l1, &levels);
  return r;
}

QuadResult integrate(const Integrand& f, double a, double b, double tol) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, tol);
    r.value = -r.value;
    return r;
  }
  QuadResult r;
  if (std::isinf(a) || std::isinf(b)) {
    // adaptive core (kinks, e.g. at equilibria, live at moderate |x|) plus exp-sinh tails
    constexpr double core = 16.0;
    const double lo = std::isinf(a) ? (std::isinf(b) ? -core : b - 2 * core) : a;
    const double hi = std::isinf(b) ? (std::isinf(a) ? core : a + 2 * core) : b;
    auto add = [&r](const QuadResult& part) {
      r.value += part.value;
      r.error += part.error;
      r.l1 += part.l1;
    };
    add(integrate(f, lo, hi, tol));
    bq::exp_sinh<double> es(12);
    if (std::isinf(b)) {
      QuadResult t;
      t.value = es.integrate([&](double u) { return f(hi + u); }, 0.0, INFINITY, tol, &t.error, &t.l1);
      add(t);
    }
    if (std::isinf(a)) {
      QuadResult t;
      t.value = es.integrate([&](double u) { return f(lo - u); }, 0.0, INFINITY, tol, &t.error, &t.l1);
      add(t);
    }
  } else {
    r = integrate_smooth(f, a, b, tol);
    if (!acceptable(r, tol)) {
      const Integrand g = guarded(f);
      auto alt = integrate_endpoint_singular(g, a, b, tol);
      if (std::isfinite(alt.value) && (alt.error < r.error || !std::isfinite(r.value))) r = alt;
    }
  }
  require_finite(r, a, b);
  if (!acceptable(r, tol))
    throw QuadratureError("quadrature over (" + format_double(a) + "," + format_double(b) +
                          ") did not converge: estimate " + format_double(r.value) + " +- " + format_double(r.error));
  return r;
}

QuadResult integrate_power_singular(const Integrand& q, double a, double b, double s, double beta, double tol) {
  if (beta >= 1.0)
    throw DivergentIntegral("|x - " + format_double(s) + "|^(-" + format_double(beta) +
                            ") is not integrable (exponent >= 1)");
  if (s != a && s != b) throw QuadratureError("singular point must be an endpoint");
  if (beta <= 0.0) {
    return integrate([&](double x) { return std::pow(std::fabs(x - s), -beta) * q(x); }, a, b, tol);
  }
  const double w = (s == a) ? b - a : a - b;  // signed: x = s + w u^m, u in (0, 1)
  const double m = 1.0 / (1.0 - beta);
  const double scale = m * std::pow(std::fabs(w), 1.0 - beta);
  auto g = [&](double u) {
    double x = s + w * std::pow(u, m);
    // Keep x strictly inside so q sees an interior point even when u^m underflows.
    if (x == s) x = s + (w > 0 ? 1e-300 : -1e-300);
    return scale * q(x);
  };
  auto r = integrate(g, 0.0, 1.0, tol);
  return r;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  auto fill = [&](const auto& absc, const auto& wts, bool odd) {
    nodes.clear();
    weights.clear();
    for (std::size_t i = absc.size(); i-- > 0;) {
      if (odd && i == 0) continue;
      nodes.push_back(-absc[i]);
      weights.push_back(wts[i]);
    }
    for (std::size_t i = 0; i < absc.size(); ++i) {
      nodes.push_back(absc[i]);
      weights.push_back(wts[i]);
    }
  };
  switch (order) {
    case 2: fill(bq::gauss<double, 2>::abscissa(), bq::gauss<double, 2>::weights(), false); break;
    case 3: fill(bq::gauss<double, 3>::abscissa(), bq::gauss<double, 3>::weights(), true); break;
    case 4: fill(bq::gauss<double, 4>::abscissa(), bq::gauss<double, 4>::weights(), false); break;
    case 5: fill(bq::gauss<double, 5>::abscissa(), bq::gauss<double, 5>::weights(), true); break;
    case 6: fill(bq::gauss<double, 6>::abscissa(), bq::gauss<double, 6>::weights(), false); break;
    case 7: fill(bq::gauss<double, 7>::abscissa(), bq::gauss<double, 7>::weights(), true); break;
    case 8: fill(bq::gauss<double, 8>::abscissa(), bq::gauss<double, 8>::weights(), false); break;
    case 10: fill(bq::gauss<double, 10>::abscissa(), bq::gauss<double, 10>::weights(), false); break;
    case 15: fill(bq::gauss<double, 15>::abscissa(), bq::gauss<double, 15>::weights(), true); break;
    case 20: fill(bq::gauss<double, 20>::abscissa(), bq::gauss<double, 20>::weights(), false); break;
    default: throw QuadratureError("unsupported Gauss-Legendre order " + std::to_string(order));
  }
}

TensorRule tensor_rule(const Box& box, int panels, int order) {
  if (!box.bounded()) throw QuadratureError("tensor rules need a bounded box, got " + box.str());
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  std::vector<std::vector<double>> axis_x(box.sides.size()), axis_w(box.sides.size());
  for (std::size_t d = 0; d < box.sides.size(); ++d) {
    const auto& s = box.sides[d];
    const double h = s.width() / panels;
    for (int k = 0; k < panels; ++k) {
      const double c = s.lo + (k + 0.5) * h;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        axis_x[d].push_back(c + 0.5 * h * gx[i]);
        axis_w[d].push_back(0.5 * h * gw[i]);
      }
    }
  }
  TensorRule rule;
  std::vector<std::size_t> idx(box.sides.size(), 0);
  while (true) {
    std::vector<double> p(idx.size());
    double w = 1.0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      p[d] = axis_x[d][idx[d]];
      w *= axis_w[d][idx[d]];
    }
    rule.points.push_back(std::move(p));
    rule.weights.push_back(w);
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == axis_x[d].size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return rule;
}

}  // namespace semistab
