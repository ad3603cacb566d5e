#include "semistab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semistab/error.hpp"
#include "semistab/kernels.hpp"
#include "semistab/quadrature.hpp"

namespace semistab {

namespace {

std::string point_str(std::span<const double> x) {
  std::string s;
  for (double v : x) s += (s.empty() ? "" : ",") + format_double(v);
  return x.size() > 1 ? "(" + s + ")" : s;
}

std::string num(double v) { return format_double(v); }

CriterionResult boundedness_from_curve(const std::string& id, std::span<const double> times,
                                       std::span<const double> log_values, double slope_tol,
                                       const std::vector<double>& final_argmax, const std::string& quantity) {
  CriterionResult c;
  c.id = id;
  const auto g = test_bounded(times, log_values, slope_tol);
  c.evidence = {{"linear_slope", g.linear_slope}, {"log_time_slope", g.log_time_slope}, {"max_log", g.max_log}};
  c.low_confidence = g.low_confidence;
  if (g.bounded) {
    c.outcome = Outcome::Pass;
    c.detail = "log " + quantity + " bounded above (slope " + num(g.linear_slope) + ", log-time slope " +
               num(g.log_time_slope) + ")";
    if (g.low_confidence) c.detail += "; low confidence: fewer than three positive times";
    return c;
  }
  c.outcome = Outcome::Fail;
  const bool linear = g.linear_slope > slope_tol;
  c.detail = "log " + quantity + " grows: " +
             (linear ? "growth exponent " + num(g.linear_slope) : "log-time exponent " + num(g.log_time_slope));
  c.witness = (linear ? "growth exponent " + num(g.linear_slope) : "growth ~ t^" + num(g.log_time_slope)) +
              (final_argmax.empty() ? "" : " (sup attained near x = " + point_str(final_argmax) + ")");
  return c;
}

bool closed_form(const Semiflow& f) { return f.kind() == Semiflow::Kind::ClosedForm; }

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Stable: return "Stable";
    case Status::Unstable: return "Unstable";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Unknown: return "unknown";
  }
  return "?";
}

void Verdict::fold() {
  bool all_pass = !criteria.empty();
  for (const auto& c : criteria) {
    if (c.outcome == Outcome::Fail) {
      status = Status::Unstable;
      witness = c.id + ": " + c.witness.value_or(c.detail);
      return;
    }
    if (c.outcome != Outcome::Pass) all_pass = false;
  }
  status = all_pass ? Status::Stable : Status::Inconclusive;
}

// ---------------------------------------------------------------------------------------------

CriterionResult check_boundedness(const WeightEvolution& we, double horizon, const SampleGrid& grid) {
  const auto times = time_grid(horizon, we.problem().grid.time_samples);
  const auto curve = we.operator_norm_curve(times, grid);
  std::vector<double> logs;
  for (const auto& e : curve) logs.push_back(std::log(e.raw_sup));
  auto c = boundedness_from_curve("bounded", times, logs, we.problem().tol.slope, curve.back().argmax,
                                  "sup rho_{t,p}/rho");
  c.evidence.push_back({"final_raw_sup", curve.back().raw_sup});
  return c;
}

CriterionResult check_pointwise_decay(const WeightEvolution& we, double horizon,
                                      const std::vector<std::vector<double>>& points) {
  const auto& pr = we.problem();
  CriterionResult c;
  c.id = "pointwise_decay";
  if (points.empty()) {
    c.outcome = Outcome::Pass;
    c.detail = "no Omega1 samples";
    return c;
  }
  const auto times = time_grid(horizon, pr.grid.time_samples);
  const auto ev = kernels::map(points.size(), pr.grid.parallel, [&](std::size_t i) {
    const auto path = we.rho_tp_path(points[i], times);
    return classify_decay(times, path, pr.tol.slope, pr.tol.value);
  });
  std::size_t decayed = 0, undetermined = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    c.decay.emplace_back(points[i], ev[i]);
    switch (ev[i].classification) {
      case DecayClass::DecaysToZero: ++decayed; break;
      case DecayClass::Undetermined: ++undetermined; break;
      default:
        if (!c.witness)
          c.witness = "x = " + point_str(points[i]) + ": rho_{t,p}(x) " +
                      (ev[i].classification == DecayClass::Grows ? "grows" : "does not vanish") + " (log-slope " +
                      num(ev[i].slope) + ")";
    }
  }
  c.evidence = {{"points", static_cast<double>(points.size())},
                {"decayed", static_cast<double>(decayed)},
                {"undetermined", static_cast<double>(undetermined)}};
  if (c.witness) c.outcome = Outcome::Fail;
  else if (decayed == points.size()) c.outcome = Outcome::Pass;
  else c.outcome = Outcome::Unknown;
  c.detail = std::to_string(decayed) + "/" + std::to_string(points.size()) + " points decay to zero by t = " +
             num(horizon);
  return c;
}

CriterionResult check_omega0_sign(const ProblemSpec& problem, const DomainPartition& partition,
                                  const std::vector<std::vector<double>>& points) {
  CriterionResult c;
  c.id = "omega0_sign";
  if (!partition.omega0_positive_measure()) {
    c.outcome = Outcome::Pass;
    c.detail = "vacuous: Omega0 has measure zero";
    return c;
  }
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end());
  std::size_t violations = 0;
  double max_h = -INFINITY;
  long run_start = -1, run_end = -1;
  bool run_closed = false;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double h = problem.h(sorted[i]);
    max_h = std::max(max_h, h);
    if (h >= 0.0) {
      ++violations;
      if (run_start < 0) run_start = static_cast<long>(i);
      if (!run_closed) run_end = static_cast<long>(i);
    } else if (run_start >= 0) {
      run_closed = true;
    }
  }
  c.evidence = {{"samples", static_cast<double>(sorted.size())},
                {"violations", static_cast<double>(violations)},
                {"max_h", max_h}};
  if (violations == 0) {
    c.outcome = sorted.empty() ? Outcome::Unknown : Outcome::Pass;
    c.detail = sorted.empty() ? "no Omega0 samples" : "h < 0 on all Omega0 samples";
    return c;
  }
  // Witness: centre of the first run of samples with h >= 0.
  std::vector<double> w;
  const auto& a = sorted[static_cast<std::size_t>(run_start)];
  const auto& b = sorted[static_cast<std::size_t>(run_end)];
  for (std::size_t d = 0; d < a.size(); ++d) w.push_back(0.5 * (a[d] + b[d]));
  c.outcome = Outcome::Fail;
  c.witness = "x = " + point_str(w) + " in Omega0 with h(x) = " + num(problem.h(w)) + " >= 0";
  c.detail = std::to_string(violations) + " Omega0 samples with h >= 0";
  return c;
}

CriterionResult check_escape(const Semiflow& flow, double horizon, const std::vector<std::vector<double>>& points) {
  CriterionResult c;
  c.id = "escape";
  const double limit = closed_form(flow) ? INFINITY : horizon;
  std::size_t finite = 0;
  double worst = 0.0;
  for (const auto& x : points) {
    const auto t = flow.escape_time(x, limit);
    if (t) {
      ++finite;
      worst = std::max(worst, *t);
    }
  }
  c.evidence = {{"points", static_cast<double>(points.size())},
                {"escaping", static_cast<double>(finite)},
                {"max_escape_time", worst}};
  if (!points.empty() && finite == points.size()) {
    c.outcome = Outcome::Pass;
    c.detail = "every Omega1 sample leaves phi(t,Omega) by t = " + num(worst);
  } else {
    c.outcome = Outcome::Unknown;
    c.detail = std::to_string(finite) + "/" + std::to_string(points.size()) + " Omega1 samples escape";
  }
  return c;
}

Verdict classify_stability_1d(const ProblemSpec& problem, double horizon, const SampleGrid& grid) {
  if (problem.dim() != 1) throw Error("classify_stability_1d needs a one-dimensional problem");
  WeightEvolution we(problem);
  Verdict v;
  v.method = "three-condition (1D)";
  v.grid = grid.description;
  v.horizon = horizon;
  const auto fit = we.admissibility_fit(horizon, grid);
  if (fit.refuted)
    throw HypothesisError("not a C0-semigroup on this space: sup rho_{t,p}/rho grows faster than exponentially "
                          "(convexity " + num(fit.convexity) + ")");
  v.admissibility = fit;

  // Boundedness from the fit's curve; it uses the same time grid.
  v.criteria.push_back(boundedness_from_curve("bounded", fit.times, fit.log_sups, problem.tol.slope, {},
                                              "sup rho_{t,p}/rho"));

  const auto part = partition_domain(problem, grid);
  v.notes.push_back(part.str());
  auto esc = check_escape(we.semiflow(), horizon, part.samples1);
  if (esc.passed()) {
    v.criteria.push_back(std::move(esc));
  } else {
    v.notes.push_back("escape: " + esc.detail + "; checking pointwise decay instead");
    v.criteria.push_back(check_pointwise_decay(we, horizon, part.samples1));
  }
  v.criteria.push_back(check_omega0_sign(problem, part, part.samples0));
  v.fold();
  return v;
}

double stability_integral(const WeightEvolution& we, double y, double t) {
  if (t == 0.0) return 0.0;
  const auto& pr = we.problem();
  const double p = pr.p;
  if (const auto& shape = pr.h_shape) {
    const double j = we.semiflow().flow_jacobian(t, y);
    return shape->offset * t + (shape->fprime_coef - 1.0 / p) * std::log(std::fabs(j));
  }
  const Expression g = pr.h - pr.divergence() / Expression::constant(p);
  const double ts[] = {t};
  const auto path = we.semiflow().transport(std::span<const double>(&y, 1), ts, Direction::Forward, g);
  if (!path.samples[0].alive) throw DomainExit(path.exit_time.value_or(t), path.blowup);
  return path.samples[0].integral;
}

double stability_integral(const ProblemSpec& problem, double y, double t) {
  return stability_integral(WeightEvolution(problem), y, t);
}

Verdict classify_stability_rho1(const ProblemSpec& problem, double horizon, const SampleGrid& grid) {
  return classify_stability_rho1(WeightEvolution(problem), horizon, grid);
}

Verdict classify_stability_rho1(const WeightEvolution& we, double horizon, const SampleGrid& grid) {
  const auto& pr = we.problem();
  if (!pr.rho_is_one()) throw HypothesisError("the integral criteria require rho = 1");
  const auto part = partition_domain(pr, grid);
  if (!part.samples0.empty())
    throw HypothesisError("the integral criteria require F nonvanishing; F vanishes near x = " +
                          point_str(part.samples0.front()));
  Verdict v;
  v.method = "integral criteria (rho = 1)";
  v.grid = grid.description;
  v.horizon = horizon;

  auto esc = check_escape(we.semiflow(), horizon, part.samples1);
  const double escaping = esc.evidence[1].second;
  const bool case_escape = esc.passed();
  const bool case_surjective = escaping == 0.0;
  v.notes.push_back(case_escape ? "escaping flow: every sample leaves phi(t,Omega)"
                    : case_surjective ? "surjective flow: no sample leaves phi(t,Omega) up to the horizon"
                                      : "mixed: " + esc.detail);

  // (a) M(t) = sup_y I(y,t) bounded above; with rho = 1, log sup rho_{t,p} = p M(t).
  const auto times = time_grid(horizon, pr.grid.time_samples);
  const auto curve = we.operator_norm_curve(times, grid);
  std::vector<double> m;
  for (const auto& e : curve) m.push_back(std::log(e.raw_sup) / pr.p);
  auto a = boundedness_from_curve("integral_bounded", times, m, pr.tol.slope, curve.back().argmax,
                                  "sup_y int (h - F'/p)/F");
  a.evidence.push_back({"final_sup_integral", m.back()});
  v.criteria.push_back(std::move(a));

  if (case_escape) {
    v.criteria.push_back(std::move(esc));
  } else if (case_surjective) {
    // (b) I(y,t) -> -inf for every sample.
    CriterionResult b;
    b.id = "integral_diverges";
    const auto paths = kernels::map(grid.size(), pr.grid.parallel,
                                    [&](std::size_t i) { return we.log_ratio_path(grid.points[i], times); });
    std::size_t ok = 0, unknown = 0;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> ts, is;
      for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= horizon / 2.0 && std::isfinite(paths[i][k])) {
          ts.push_back(times[k]);
          is.push_back(paths[i][k] / pr.p);
        }
      const double final_value = paths[i].back() / pr.p;
      const double slope = least_squares_slope(ts, is);
      worst = std::max(worst, final_value);
      if (final_value < -pr.tol.divergence && slope < 0.0) ++ok;
      else if (slope >= -pr.tol.slope && !b.witness)
        b.witness = "y = " + point_str(grid.points[i]) + ": int stays at " + num(final_value) + " (slope " +
                    num(slope) + ")";
      else ++unknown;
    }
    b.evidence = {{"points", static_cast<double>(grid.size())},
                  {"diverged", static_cast<double>(ok)},
                  {"max_final_integral", worst}};
    b.outcome = b.witness ? Outcome::Fail : ok == grid.size() ? Outcome::Pass : Outcome::Unknown;
    b.detail = std::to_string(ok) + "/" + std::to_string(grid.size()) + " samples below -" +
               num(pr.tol.divergence) + " at t = " + num(horizon);
    v.criteria.push_back(std::move(b));
  } else {
    esc.detail = "neither case verified: " + esc.detail;
    v.criteria.push_back(std::move(esc));
  }
  v.fold();
  return v;
}

CriterionResult check_wstar_integral(const WeightEvolution& we, const Box& Q, double horizon) {
  const int n = Q.dim();
  if (n > 3) throw Error("w*-integral check supports N <= 3, got N = " + std::to_string(n));
  if (!Q.bounded()) throw Error("w*-integral check needs a bounded box, got " + Q.str());
  const auto& pr = we.problem();
  const auto times = time_grid(horizon, pr.grid.time_samples);
  std::vector<double> integrals(times.size(), 0.0);
  if (n == 1 && we.semiflow().kind() == Semiflow::Kind::ClosedForm) {
    // the indicator cuts rho_{t,p} off at the image boundary; integrate only over Q ∩ phi(t,Omega)
    const auto& q = Q.sides.front();
    integrals = kernels::map(times.size(), pr.grid.parallel, [&](std::size_t k) {
      const auto img = we.semiflow().image_interval(times[k]);
      double lo = std::max(q.lo, img.lo), hi = std::min(q.hi, img.hi);
      if (!(lo < hi)) return 0.0;
      // image ends are rounded; stay clear of the indicator jump
      const double pad = 1e-12 * (hi - lo);
      lo += pad;
      hi -= pad;
      return integrate([&](double x) { return we.rho_tp(times[k], x); }, lo, hi, pr.tol.quad).value;
    });
  } else {
    const int panels = n == 1 ? 64 : n == 2 ? 16 : 6;
    const int order = n == 1 ? 8 : n == 2 ? 6 : 4;
    const auto rule = tensor_rule(Q, panels, order);
    const auto paths = kernels::map(rule.points.size(), pr.grid.parallel,
                                    [&](std::size_t i) { return we.rho_tp_path(rule.points[i], times); });
    for (std::size_t i = 0; i < rule.points.size(); ++i)
      for (std::size_t k = 0; k < times.size(); ++k) integrals[k] += rule.weights[i] * paths[i][k];
  }

  CriterionResult c;
  c.id = "wstar_integral";
  const auto ev = classify_decay(times, integrals, pr.tol.slope, pr.tol.value);
  c.evidence = {{"initial", integrals.front()}, {"final", integrals.back()}, {"log_slope", ev.slope}};
  c.decay.emplace_back(std::vector<double>{}, ev);
  const std::string what = "int_Q rho_{t,p} on Q = " + Q.str();
  switch (ev.classification) {
    case DecayClass::DecaysToZero:
      c.outcome = Outcome::Pass;
      c.detail = what + " decays to " + num(integrals.back());
      break;
    case DecayClass::Grows:
    case DecayClass::BoundedNonvanishing:
      c.outcome = Outcome::Fail;
      c.detail = what + " " + to_string(ev.classification);
      c.witness = "Q = " + Q.str() + ": int_Q rho_{t,p} " + to_string(ev.classification) +
                  " (final " + num(integrals.back()) + ", log-slope " + num(ev.slope) + ")";
      break;
    case DecayClass::Undetermined:
      c.outcome = Outcome::Unknown;
      c.detail = what + " undetermined (final " + num(integrals.back()) + ")";
      break;
  }
  return c;
}

std::vector<Box> default_test_boxes(const Domain& domain) {
  std::vector<Box> out;
  for (const auto& box : domain.boxes()) {
    if (box.bounded()) {
      out.push_back(box);
      continue;
    }
    for (double k : {1.0, 5.0}) {
      Box q;
      for (const auto& s : box.sides) q.sides.push_back({std::max(s.lo, -k), std::min(s.hi, k)});
      const bool nonempty =
          std::all_of(q.sides.begin(), q.sides.end(), [](const Interval& s) { return s.lo < s.hi; });
      if (nonempty) out.push_back(q);
    }
  }
  return out;
}

Verdict classify_stability_general(const WeightEvolution& we, double horizon, const std::vector<Box>& boxes,
                                   const SampleGrid& grid) {
  const auto& pr = we.problem();
  Verdict v;
  v.method = "boundedness + w*-integrals";
  v.grid = grid.description;
  v.horizon = horizon;
  const auto fit = we.admissibility_fit(horizon, grid);
  if (fit.refuted)
    throw HypothesisError("not a C0-semigroup on this space: sup rho_{t,p}/rho grows faster than exponentially "
                          "(convexity " + num(fit.convexity) + ")");
  v.admissibility = fit;
  v.criteria.push_back(
      boundedness_from_curve("bounded", fit.times, fit.log_sups, pr.tol.slope, {}, "sup rho_{t,p}/rho"));
  for (const auto& q : boxes) v.criteria.push_back(check_wstar_integral(we, q, horizon));
  v.fold();
  return v;
}

Verdict classify_stability_general(const ProblemSpec& problem, double horizon, const std::vector<Box>& boxes,
                                   const SampleGrid& grid) {
  return classify_stability_general(WeightEvolution(problem), horizon, boxes, grid);
}

Verdict classify_stability(const ProblemSpec& problem, double horizon, const SampleGrid& grid) {
  if (problem.dim() == 1) return classify_stability_1d(problem, horizon, grid);
  return classify_stability_general(problem, horizon, default_test_boxes(problem.domain), grid);
}

}  // namespace semistab
