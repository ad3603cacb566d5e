#include "semistab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semistab/decay.hpp"
#include "semistab/error.hpp"
#include "semistab/kernels.hpp"
#include "semistab/quadrature.hpp"

namespace semistab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_abs_field(const ProblemSpec& problem) {
  const auto grid = sample_domain(problem.domain, problem.grid);
  double m = 0.0;
  for (const auto& x : grid.points)
    for (const auto& f : problem.field) {
      const double v = std::fabs(f(x));
      if (std::isfinite(v)) m = std::max(m, v);
    }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(std::function<double(double)> f, std::string description)
    : regular_(std::move(f)), description_(std::move(description)) {}

SampledFunction SampledFunction::power(double at, double exponent, std::function<double(double)> regular,
                                       std::string description) {
  SampledFunction f;
  f.regular_ = regular ? std::move(regular) : [](double) { return 1.0; };
  f.singularity_ = Singularity{at, exponent};
  f.description_ = description.empty() ? "|x-" + format_double(at) + "|^(-" + format_double(exponent) + ")"
                                       : std::move(description);
  return f;
}

SampledFunction SampledFunction::from_expression(const Expression& e) {
  return SampledFunction([e](double x) { return e(x); }, e.str());
}

double SampledFunction::regular(double x) const { return regular_ ? regular_(x) : 0.0; }

double SampledFunction::operator()(double x) const {
  const double q = regular(x);
  if (!singularity_) return q;
  return std::pow(std::fabs(x - singularity_->at), -singularity_->exponent) * q;
}

// ---------------------------------------------------------------------------------------------
// WeightEvolution

WeightEvolution::WeightEvolution(ProblemSpec problem) : WeightEvolution(problem, Semiflow::from_problem(problem)) {}

WeightEvolution::WeightEvolution(ProblemSpec problem, Semiflow flow)
    : problem_(std::move(problem)), flow_(std::move(flow)) {
  div_ = problem_.divergence();
  line_integrand_ = problem_.h - div_ / Expression::constant(problem_.p);
  zero_threshold_ = problem_.tol.zero * max_abs_field(problem_);
}

bool WeightEvolution::in_omega0(std::span<const double> x) const {
  double norm = 0.0;
  for (const auto& f : problem_.field) norm = std::max(norm, std::fabs(f(x)));
  return norm <= zero_threshold_;
}

double WeightEvolution::log_cocycle_from(const Transported& sample, double t, bool forward,
                                         std::span<const double>) const {
  if (const auto& shape = problem_.h_shape) {
    const double lj = std::log(std::fabs(sample.jacobian));
    return shape->fprime_coef * (forward ? lj : -lj) + shape->offset * t;
  }
  return sample.integral;
}

double WeightEvolution::log_cocycle(double t, std::span<const double> x) const {
  if (t == 0.0) return 0.0;
  const bool forward = t > 0.0;
  const double ts[] = {std::fabs(t)};
  std::optional<Expression> integrand;
  if (!problem_.h_shape) integrand = problem_.h;
  auto path = flow_.transport(x, ts, forward ? Direction::Forward : Direction::Backward, integrand);
  if (!path.samples[0].alive) throw DomainExit(path.exit_time.value_or(std::fabs(t)), path.blowup);
  return log_cocycle_from(path.samples[0], std::fabs(t), forward, x);
}

double WeightEvolution::multiplier_cocycle(double t, std::span<const double> x) const {
  return std::exp(log_cocycle(t, x));
}

double WeightEvolution::multiplier_cocycle(double t, double x) const {
  return multiplier_cocycle(t, std::span<const double>(&x, 1));
}

std::vector<double> WeightEvolution::log_ratio_path(std::span<const double> y, std::span<const double> times) const {
  std::optional<Expression> integrand;
  if (!problem_.h_shape) integrand = problem_.h;
  const auto path = flow_.transport(y, times, Direction::Forward, integrand);
  const double log_rho_y = std::log(problem_.rho(y));
  std::vector<double> out(times.size(), -INFINITY);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& s = path.samples[k];
    if (!s.alive) continue;
    const double lam = log_cocycle_from(s, times[k], true, y);
    out[k] = problem_.p * lam + log_rho_y - std::log(problem_.rho(s.point)) - std::log(std::fabs(s.jacobian));
  }
  return out;
}

std::vector<double> WeightEvolution::rho_tp_path(std::span<const double> x, std::span<const double> times) const {
  std::vector<double> out(times.size(), 0.0);
  if (!problem_.domain.contains(x)) return out;
  const double p = problem_.p;
  if (problem_.dim() == 1) {
    // Exact equilibria: the flow is stationary and the line integral reduces to t (h - F'/p).
    // Near-zero points go through the transport below, which stays regular as F -> 0.
    if (problem_.field.front()(x) == 0.0) {
      const double rate = p * problem_.h(x) - div_(x);
      for (std::size_t k = 0; k < times.size(); ++k) out[k] = std::exp(rate * times[k]) * problem_.rho(x);
      return out;
    }
    std::optional<Expression> integrand;
    if (!problem_.h_shape) integrand = line_integrand_;
    const auto path = flow_.transport(x, times, Direction::Backward, integrand);
    const double fx = problem_.field.front()(x);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto& s = path.samples[k];
      if (!s.alive) continue;
      double line;
      if (const auto& shape = problem_.h_shape) {
        const double fy = problem_.field.front()(s.point);
        line = shape->offset * times[k] + (shape->fprime_coef - 1.0 / p) * std::log(std::fabs(fx / fy));
      } else {
        line = s.integral;
      }
      out[k] = std::exp(p * line) * problem_.rho(s.point);
    }
    return out;
  }
  std::optional<Expression> integrand;
  if (!problem_.h_shape) integrand = problem_.h;
  const auto path = flow_.transport(x, times, Direction::Backward, integrand);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& s = path.samples[k];
    if (!s.alive) continue;
    const double lam = log_cocycle_from(s, times[k], false, x);
    out[k] = std::exp(p * lam) * problem_.rho(s.point) * std::fabs(s.jacobian);
  }
  return out;
}

double WeightEvolution::rho_tp(double t, std::span<const double> x) const {
  const double ts[] = {t};
  return rho_tp_path(x, ts)[0];
}

double WeightEvolution::rho_tp(double t, double x) const { return rho_tp(t, std::span<const double>(&x, 1)); }

double WeightEvolution::rho_tp_definition(double t, std::span<const double> x) const {
  if (!problem_.domain.contains(x)) return 0.0;
  const double ts[] = {t};
  std::optional<Expression> integrand;
  if (!problem_.h_shape) integrand = problem_.h;
  const auto path = flow_.transport(x, ts, Direction::Backward, integrand);
  const auto& s = path.samples[0];
  if (!s.alive) return 0.0;
  const double lam = log_cocycle_from(s, t, false, x);
  return std::exp(problem_.p * lam) * problem_.rho(s.point) * std::fabs(s.jacobian);
}

double WeightEvolution::rho_tp_definition(double t, double x) const {
  return rho_tp_definition(t, std::span<const double>(&x, 1));
}

std::vector<double> WeightEvolution::rho_minus_tp_path(std::span<const double> x,
                                                       std::span<const double> times) const {
  std::optional<Expression> integrand;
  if (!problem_.h_shape) integrand = problem_.h;
  const auto path = flow_.transport(x, times, Direction::Forward, integrand);
  std::vector<double> out(times.size(), kNaN);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& s = path.samples[k];
    if (!s.alive) continue;
    const double lam = log_cocycle_from(s, times[k], true, x);
    out[k] = std::exp(-problem_.p * lam) * problem_.rho(s.point) * std::fabs(s.jacobian);
  }
  return out;
}

double WeightEvolution::rho_minus_tp(double t, std::span<const double> x) const {
  const double ts[] = {t};
  return rho_minus_tp_path(x, ts)[0];
}

double WeightEvolution::rho_minus_tp(double t, double x) const { return rho_minus_tp(t, std::span<const double>(&x, 1)); }

std::vector<NormEstimate> WeightEvolution::operator_norm_curve(std::span<const double> times,
                                                               const SampleGrid& grid) const {
  if (grid.points.empty()) throw Error("empty grid");
  const bool parallel = problem_.grid.parallel;
  const auto logs = kernels::map(grid.size(), parallel, [&](std::size_t i) { return log_ratio_path(grid.points[i], times); });

  const int rounds = problem_.grid.refine_rounds;
  const int factor = std::max(2, problem_.grid.refine_factor);
  const int dim = grid.dim;
  const double p = problem_.p;

  auto refine = [&](std::size_t k) {
    NormEstimate est;
    est.t = times[k];
    if (times[k] == 0.0) {
      est.argmax = grid.points.front();
      return est;
    }
    std::vector<double> column(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) column[i] = logs[i][k];
    est.evaluations = grid.size();
    const long best = kernels::argmax(column);
    if (best < 0) {
      est.raw_sup = 0.0;
      est.norm = 0.0;
      return est;
    }
    double best_log = column[static_cast<std::size_t>(best)];
    std::vector<double> center = grid.points[static_cast<std::size_t>(best)];
    std::vector<double> half = grid.spacing[static_cast<std::size_t>(best)];
    const double tk[] = {times[k]};
    const int per_dim = dim == 1 ? factor : 5;
    for (int round = 0; round < rounds; ++round) {
      std::vector<double> cand(static_cast<std::size_t>(dim));
      std::vector<int> idx(static_cast<std::size_t>(dim), 0);
      std::vector<double> round_best = center;
      while (true) {
        for (int d = 0; d < dim; ++d)
          cand[static_cast<std::size_t>(d)] =
              center[static_cast<std::size_t>(d)] +
              half[static_cast<std::size_t>(d)] * (2.0 * idx[static_cast<std::size_t>(d)] / per_dim - 1.0);
        if (problem_.domain.contains(cand)) {
          const double v = log_ratio_path(cand, tk)[0];
          ++est.evaluations;
          if (v > best_log) {
            best_log = v;
            round_best = cand;
          }
        }
        int d = 0;
        while (d < dim && ++idx[static_cast<std::size_t>(d)] > per_dim) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == dim) break;
      }
      center = round_best;
      for (auto& h : half) h *= 2.0 / factor;
    }
    est.raw_sup = std::exp(best_log);
    est.norm = std::exp(best_log / p);
    est.argmax = center;
    return est;
  };
  return kernels::map(times.size(), parallel, refine);
}

NormEstimate WeightEvolution::operator_norm(double t, const SampleGrid& grid) const {
  const double ts[] = {t};
  return operator_norm_curve(ts, grid).front();
}

AdmissibilityFit WeightEvolution::admissibility_fit(double horizon, const SampleGrid& grid) const {
  AdmissibilityFit fit;
  fit.grid = grid.description;
  fit.times = time_grid(horizon, problem_.grid.time_samples);
  const auto curve = operator_norm_curve(fit.times, grid);
  for (const auto& e : curve) fit.log_sups.push_back(std::log(e.raw_sup));

  std::vector<double> late_t, late_l, mid_t, mid_l, all_t, all_l;
  for (std::size_t i = 0; i < fit.times.size(); ++i) {
    const double t = fit.times[i];
    const double l = fit.log_sups[i];
    if (!std::isfinite(l)) continue;
    if (t > 0.0) {
      all_t.push_back(t);
      all_l.push_back(l);
    }
    if (t >= horizon / 2.0) {
      late_t.push_back(t);
      late_l.push_back(l);
    }
    if (t >= horizon / 4.0 && t <= horizon / 2.0) {
      mid_t.push_back(t);
      mid_l.push_back(l);
    }
  }
  if (all_t.empty()) return fit;
  fit.omega = late_t.size() >= 2 ? least_squares_slope(late_t, late_l) : least_squares_slope(all_t, all_l);
  if (late_t.size() >= 4 && mid_t.size() >= 2) {
    std::vector<double> q_t(late_t.begin() + static_cast<long>(late_t.size() / 2), late_t.end());
    std::vector<double> q_l(late_l.begin() + static_cast<long>(late_l.size() / 2), late_l.end());
    fit.convexity = least_squares_slope(q_t, q_l) - least_squares_slope(mid_t, mid_l);
  }
  double log_m = 0.0;
  for (std::size_t i = 0; i < fit.times.size(); ++i)
    if (std::isfinite(fit.log_sups[i])) log_m = std::max(log_m, fit.log_sups[i] - fit.omega * fit.times[i]);
  // Round-off in an exactly exponential curve should not inflate M.
  if (log_m < 1e-9) log_m = 0.0;
  fit.M = std::exp(log_m);
  fit.refuted = fit.convexity > problem_.tol.convexity;
  fit.max_violation = admissibility_violation(fit.M, fit.omega, fit);
  return fit;
}

double WeightEvolution::admissibility_violation(double M, double omega, const AdmissibilityFit& curve) const {
  double worst = -INFINITY;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (!std::isfinite(curve.log_sups[i])) continue;
    worst = std::max(worst, std::exp(curve.log_sups[i] - std::log(M) - omega * curve.times[i]) - 1.0);
  }
  return worst;
}

SampledFunction WeightEvolution::apply_semigroup(double t, const SampledFunction& f) const {
  if (problem_.dim() != 1) throw Error("apply_semigroup works on one-dimensional problems");
  if (t == 0.0) return f;
  std::optional<Expression> integrand;
  if (!problem_.h_shape) integrand = problem_.h;

  struct Forward {
    double y, jac, lam;
  };
  auto forward = [this, t, integrand](double x) {
    const double ts[] = {t};
    const auto path = flow_.transport(std::span<const double>(&x, 1), ts, Direction::Forward, integrand);
    const auto& s = path.samples[0];
    if (!s.alive) throw DomainExit(path.exit_time.value_or(t), path.blowup);
    return Forward{s.point.front(), s.jacobian, log_cocycle_from(s, t, true, std::span<const double>(&x, 1))};
  };

  const auto& sing = f.singularity();
  const double at = sing ? sing->at : 0.0;
  const bool carry = sing && in_omega0(std::span<const double>(&at, 1));
  if (!carry) {
    return SampledFunction(
        [forward, f](double x) {
          const auto s = forward(x);
          return std::exp(s.lam) * f(s.y);
        },
        "T(" + format_double(t) + ")[" + f.description() + "]");
  }
  const double alpha = sing->exponent;
  const double inward = problem_.domain.contains(at + 1e-12) ? 1.0 : -1.0;
  const bool exact = flow_.kind() == Semiflow::Kind::ClosedForm;
  auto regular = [forward, f, at, alpha, inward, exact](double x) {
    if (x == at) x = at + inward * 1e-100;
    const auto s = forward(x);
    const double dx = x - at;
    // Numeric flows lose relative accuracy very close to the equilibrium; use the linearisation there.
    const double ratio = (exact || std::fabs(dx) > 1e-6) ? (s.y - at) / dx : s.jac;
    return std::exp(s.lam) * f.regular(s.y) * std::pow(std::fabs(ratio), -alpha);
  };
  return SampledFunction::power(at, alpha, regular, "T(" + format_double(t) + ")[" + f.description() + "]");
}

// ---------------------------------------------------------------------------------------------
// Norms

double lp_integral(const SampledFunction& f, const Interval& iv, double p, const std::function<double(double)>& w,
                   double tol) {
  const auto& sing = f.singularity();
  if (sing && sing->exponent > 0.0 && (sing->at == iv.lo || sing->at == iv.hi)) {
    auto q = [&](double x) {
      const double v = std::pow(std::fabs(f.regular(x)), p);
      return v == 0.0 ? 0.0 : v * w(x);
    };
    return integrate_power_singular(q, iv.lo, iv.hi, sing->at, sing->exponent * p, tol).value;
  }
  // 0 * inf in far tails (e.g. e^x weights) counts as 0
  auto g = [&](double x) {
    const double v = std::pow(std::fabs(f(x)), p);
    return v == 0.0 ? 0.0 : v * w(x);
  };
  return integrate(g, iv.lo, iv.hi, tol).value;
}

double lp_norm(const ProblemSpec& problem, const SampledFunction& f) {
  if (problem.dim() != 1) throw Error("lp_norm works on one-dimensional problems");
  double total = 0.0;
  const auto rho = [&](double x) { return problem.rho(x); };
  for (const auto& box : problem.domain.boxes())
    total += lp_integral(f, box.sides.front(), problem.p, rho, problem.tol.quad);
  return std::pow(total, 1.0 / problem.p);
}

std::pair<double, double> change_of_variables(const WeightEvolution& we, double t, const SampledFunction& f) {
  const auto& problem = we.problem();
  const auto& iv = problem.domain.as_interval();
  const auto g = we.apply_semigroup(t, f);
  const double lhs = lp_integral(g, iv, problem.p, [&](double x) { return problem.rho(x); }, problem.tol.quad);
  const Interval image = we.semiflow().image_interval(t);
  double rhs = 0.0;
  if (image.lo < image.hi)
    rhs = lp_integral(f, image, problem.p, [&](double y) { return we.rho_tp(t, y); }, problem.tol.quad);
  return {lhs, rhs};
}

double detect_endpoint_exponent(const std::function<double(double)>& f, double endpoint, double inward_width) {
  const double d1 = 1e-12 * inward_width, d2 = 1e-10 * inward_width, d3 = 1e-8 * inward_width;
  const double v1 = std::fabs(f(endpoint + d1)), v2 = std::fabs(f(endpoint + d2)), v3 = std::fabs(f(endpoint + d3));
  if (!(v1 > 0.0 && v2 > 0.0 && v3 > 0.0) || !std::isfinite(v1)) return 0.0;
  const double a12 = -std::log(v1 / v2) / std::log(d1 / d2);
  const double a23 = -std::log(v2 / v3) / std::log(d2 / d3);
  if (std::fabs(a12 - a23) > 1e-3 || a12 < 1e-6) return 0.0;
  return a12;
}

SampledFunction function_on_interval(const Expression& e, const Interval& iv) {
  auto f = [e](double x) { return e(x); };
  const double w = iv.bounded() ? iv.width() : 1.0;
  for (const double end : {iv.lo, iv.hi}) {
    if (!std::isfinite(end)) continue;
    const double inward = end == iv.lo ? w : -w;
    const double alpha = detect_endpoint_exponent(f, end, inward);
    if (alpha > 0.0)
      return SampledFunction::power(
          end, alpha, [f, end, alpha](double x) { return f(x) * std::pow(std::fabs(x - end), alpha); }, e.str());
  }
  return SampledFunction(f, e.str());
}

}  // namespace semistab
