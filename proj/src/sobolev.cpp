#include "semistab/sobolev.hpp"

#include <algorithm>
#include <cmath>

#include "semistab/error.hpp"
#include "semistab/quadrature.hpp"

namespace semistab {

SobolevFunction SobolevFunction::power(double a, double beta) {
  SobolevFunction f;
  f.value = SampledFunction::power(a, -beta, {}, "(x-" + format_double(a) + ")^" + format_double(beta));
  if (beta == 1.0)
    f.derivative = SampledFunction([](double) { return 1.0; }, "1");
  else
    f.derivative = SampledFunction::power(a, 1.0 - beta, [beta](double) { return beta; },
                                          format_double(beta) + "(x-" + format_double(a) + ")^" + format_double(beta - 1.0));
  return f;
}

SobolevFunction SobolevFunction::from_expression(const Expression& f) {
  return {SampledFunction::from_expression(f), SampledFunction::from_expression(f.derivative(0))};
}

BoundednessProbe probe_conjugacy_hypothesis(const ProblemSpec& problem) {
  const auto& iv = problem.domain.as_interval();
  const double a = iv.lo, w = iv.width();
  const double ha = problem.h(a);
  const auto& F = problem.field.front();
  BoundednessProbe probe;
  probe.grid = "y = a + (b-a) 10^-k, k = 1..12, plus 16 uniform points";
  std::vector<double> near(12);
  double early = 0.0;
  auto ratio = [&](double y) { return std::fabs((problem.h(y) - ha) / F(y)); };
  for (int i = 1; i <= 16; ++i) {
    const double y = a + w * (i - 0.5) / 16.0;
    const double v = ratio(y);
    if (!std::isfinite(v)) {
      probe.bounded = false;
      probe.worst_at = y;
      probe.sup = v;
      return probe;
    }
    early = std::max(early, v);
    if (v >= probe.sup) {
      probe.sup = v;
      probe.worst_at = y;
    }
  }
  for (int k = 1; k <= 12; ++k) {
    const double y = a + w * std::pow(10.0, -k);
    near[static_cast<std::size_t>(k - 1)] = ratio(y);
    const double v = near[static_cast<std::size_t>(k - 1)];
    if (!std::isfinite(v)) {
      probe.bounded = false;
      probe.worst_at = y;
      probe.sup = v;
      return probe;
    }
    if (k <= 8) early = std::max(early, v);
    if (v >= probe.sup) {
      probe.sup = v;
      probe.worst_at = y;
    }
  }
  const double late = *std::max_element(near.begin() + 8, near.end());
  probe.bounded = late <= 10.0 * early + 1e-9;
  return probe;
}

ProblemSpec conjugate_problem(const ProblemSpec& problem) {
  if (problem.dim() != 1 || problem.domain.boxes().size() != 1 || !problem.domain.bounded())
    throw HypothesisError("the Sobolev conjugacy needs a bounded interval (a,b)");
  const auto& iv = problem.domain.as_interval();
  const auto probe = probe_conjugacy_hypothesis(problem);
  if (!probe.bounded)
    throw HypothesisError("(h(y) - h(a))/F(y) is not bounded near a: |value| = " + format_double(probe.sup) +
                          " at y = " + format_double(probe.worst_at));
  ProblemSpec cp = problem;
  const double ha = problem.h(iv.lo);
  const Expression fprime = problem.field.front().derivative(0);
  cp.h = fprime + Expression::constant(ha);
  cp.h_shape = MultiplierShape{1.0, ha};
  cp.h_imag.reset();
  cp.rho = Expression::constant(1.0);
  cp.space = Space::Lp;
  return cp;
}

double sobolev_norm(const ProblemSpec& problem, const SobolevFunction& f) {
  ProblemSpec flat = problem;
  flat.rho = Expression::constant(1.0);
  return lp_norm(flat, f.value) + lp_norm(flat, f.derivative);
}

SobolevFunction apply_semigroup_sobolev(const WeightEvolution& we, double t, const SobolevFunction& f) {
  const auto& pr = we.problem();
  if (pr.dim() != 1) throw Error("Sobolev semigroup works on intervals");
  if (t == 0.0) return f;
  SobolevFunction g;
  g.value = we.apply_semigroup(t, f.value);

  const Expression dh = pr.h.derivative(0);
  const bool constant_h = pr.h_constant().has_value();
  // Composite Gauss-Legendre nodes on [0, t] for int_0^t h'(phi(s,x)) d_2phi(s,x) ds.
  std::vector<double> nodes, weights;
  if (!constant_h) {
    std::vector<double> gx, gw;
    gauss_legendre(10, gx, gw);
    const int panels = std::max(1, static_cast<int>(std::ceil(t)));
    const double hlen = t / panels;
    for (int k = 0; k < panels; ++k)
      for (std::size_t i = 0; i < gx.size(); ++i) {
        nodes.push_back(k * hlen + 0.5 * hlen * (gx[i] + 1.0));
        weights.push_back(0.5 * hlen * gw[i]);
      }
  }
  const Semiflow& flow = we.semiflow();
  const Expression h = pr.h;
  struct Data {
    double y, jac, ht, k;
  };
  auto data = [flow, h, dh, nodes, weights, constant_h, t](double x) {
    const double ts[] = {t};
    const auto path = flow.transport(std::span<const double>(&x, 1), ts, Direction::Forward, h);
    const auto& s = path.samples[0];
    if (!s.alive) throw DomainExit(path.exit_time.value_or(t), path.blowup);
    double k = 0.0;
    if (!constant_h) {
      const auto inner = flow.transport(std::span<const double>(&x, 1), nodes, Direction::Forward);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        k += weights[i] * dh(inner.samples[i].point) * inner.samples[i].jacobian;
    }
    return Data{s.point.front(), s.jacobian, std::exp(s.integral), k};
  };

  const auto& sing = f.derivative.singularity();
  const double at = sing ? sing->at : 0.0;
  const std::string desc = "d/dx T(" + format_double(t) + ")[" + f.value.description() + "]";
  if (!(sing && we.in_omega0(std::span<const double>(&at, 1)))) {
    g.derivative = SampledFunction(
        [data, f](double x) {
          const auto d = data(x);
          return d.ht * d.k * f.value(d.y) + d.ht * f.derivative(d.y) * d.jac;
        },
        desc);
    return g;
  }
  const double alpha = sing->exponent;
  const double inward = pr.domain.contains(at + 1e-12) ? 1.0 : -1.0;
  const bool exact = flow.kind() == Semiflow::Kind::ClosedForm;
  g.derivative = SampledFunction::power(
      at, alpha,
      [data, f, at, alpha, inward, exact](double x) {
        if (x == at) x = at + inward * 1e-100;
        const auto d = data(x);
        const double dx = x - at;
        const double ratio = (exact || std::fabs(dx) > 1e-6) ? (d.y - at) / dx : d.jac;
        const double first = d.k == 0.0 ? 0.0 : d.ht * d.k * f.value(d.y) * std::pow(std::fabs(dx), alpha);
        return first + d.ht * f.derivative.regular(d.y) * std::pow(std::fabs(ratio), -alpha) * d.jac;
      },
      desc);
  return g;
}

double sobolev_stability_integral(const ProblemSpec& problem, double y, double t) {
  return stability_integral(conjugate_problem(problem), y, t);
}

std::pair<Verdict, Verdict> classify_stability_sobolev(const ProblemSpec& problem, double horizon,
                                                       const SampleGrid& grid) {
  const ProblemSpec cp = conjugate_problem(problem);
  const double ha = cp.h_shape->offset;
  WeightEvolution we(cp);
  Verdict star = classify_stability_rho1(we, horizon, grid);
  star.method = "conjugate L^p problem (multiplier F' + h(a), rho = 1), " + star.method;
  star.notes.push_back("h(a) = " + format_double(ha));
  const auto fit = we.admissibility_fit(horizon, grid);
  star.admissibility = fit;
  if (fit.refuted) star.notes.push_back("warning: admissibility fit of the conjugate problem refuted");

  Verdict full = star;
  full.method = "W^{1,p}_* verdict and the constant component e^{h(a)t}";
  CriterionResult c;
  c.id = "constant_component";
  c.evidence = {{"h(a)", ha}};
  if (ha < 0.0) {
    c.outcome = Outcome::Pass;
    c.detail = "h(a) = " + format_double(ha) + " < 0: e^{h(a)t} 1 -> 0";
  } else {
    c.outcome = Outcome::Fail;
    c.detail = "h(a) = " + format_double(ha) + " >= 0";
    c.witness = "f = 1: S(t)1 = e^{" + format_double(ha) + " t} does not decay";
  }
  full.criteria.push_back(c);
  full.fold();
  return {star, full};
}

}  // namespace semistab
