#include "semistab/lasota.hpp"

#include <algorithm>
#include <cmath>

#include "semistab/error.hpp"
#include "semistab/kernels.hpp"
#include "semistab/quadrature.hpp"
#include "semistab/sobolev.hpp"

namespace semistab {

namespace {

std::string num(double v) { return format_double(v); }

// Decade-by-decade partial integrals of |g| over [10^-k, 1].
ProbeReport probe_l1_at_zero(const std::string& name, const std::function<double(double)>& g) {
  ProbeReport pr{name, true, {}};
  std::vector<double> decades;
  double total = 0.0, first = 0.0;
  // Fixed 20-point rule in log coordinates per decade: magnitudes are all the probe needs, and
  // cancellation in h(x) - h(0) would stall an adaptive rule.
  std::vector<double> gx, gw;
  gauss_legendre(20, gx, gw);
  for (int k = 1; k <= 12; ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double x = std::pow(10.0, -k + 0.5 * (gx[i] + 1.0));
      d += 0.5 * gw[i] * std::fabs(g(x)) * x * std::log(10.0);
    }
    if (!std::isfinite(d)) {
      pr.passed = false;
      pr.detail = "integrand not finite on [1e-" + std::to_string(k) + ", 1e-" + std::to_string(k - 1) + "]";
      return pr;
    }
    decades.push_back(d);
    total += d;
    if (k == 1) first = d;
  }
  const double d8 = decades[7], d12 = decades[11];
  const bool blowup = total > 1e6 * std::max(first, 1e-300) && total > 1e-8;
  const bool steady = d12 > 0.5 * d8 && d12 > 1e-12;
  pr.passed = !(blowup || steady);
  pr.detail = "partial integrals over [1e-k, 1], k <= 12: total " + num(total) + ", last-decade increment " + num(d12) +
              (pr.passed ? " (converging)" : " (diverging)");
  return pr;
}

bool monotone(const std::vector<double>& values, bool increasing) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (increasing ? values[i] < values[i - 1] : values[i] > values[i - 1]) return false;
  return true;
}

}  // namespace

LasotaProblem LasotaProblem::constant(double r, double c, double p, Space space) {
  LasotaProblem lp;
  lp.r = r;
  lp.h = Expression::constant(c);
  lp.p = p;
  lp.space = space;
  lp.shape = MultiplierShape{0.0, c};
  return lp;
}

LasotaProblem LasotaProblem::leading(double r, double kappa, double p, Space space) {
  LasotaProblem lp;
  lp.r = r;
  lp.p = p;
  lp.space = space;
  lp.shape = MultiplierShape{-kappa / r, 0.0};
  lp.h = make_family_problem(lp.family(), *lp.shape, p, Space::Lp).h;
  return lp;
}

FamilySpec LasotaProblem::family() const { return r == 1.0 ? FamilySpec::lasota() : FamilySpec::lasota_r(r); }

ProblemSpec LasotaProblem::to_problem() const {
  if (!(r >= 1.0)) throw Error("LasotaProblem: r must be >= 1");
  if (shape) return make_family_problem(family(), *shape, p, space);
  return make_family_problem(family(), h, p, space);
}

double lasota_semigroup(const std::function<double(double)>& v, const Expression& h, double t, double x) {
  if (!(x > 0.0 && x < 1.0)) throw Error("lasota_semigroup: x must lie in (0,1)");
  if (t == 0.0) return v(x);
  double integral;
  if (auto c = h.constant_value()) {
    integral = *c * t;
  } else {
    if (!std::isfinite(h(0.0))) throw HypothesisError("h is singular at 0");
    // s -> u = x e^s turns int_{-t}^0 h(x e^s) ds into int_{x e^-t}^x h(u)/u du.
    integral = integrate([&](double u) { return h(u) / u; }, x * std::exp(-t), x).value;
  }
  return std::exp(integral) * v(x * std::exp(-t));
}

ThresholdPrediction lasota_threshold(const LasotaProblem& problem) {
  ThresholdPrediction tp;
  tp.r = problem.r;
  tp.p = problem.p;
  const double r = problem.r, p = problem.p;
  const Expression& h = problem.h;
  tp.h0 = h(0.0);
  if (!std::isfinite(tp.h0)) throw HypothesisError("theorem hypotheses not verified: h(0) is not finite");
  tp.lp_threshold = -r / p;
  tp.wstar_threshold = r == 1.0 ? 1.0 - 1.0 / p : 0.0;

  // Leading coefficient of h at 0 against x^{r-1}.
  ProbeReport kappa{"leading_coefficient", true, {}};
  if (r == 1.0) {
    tp.kappa = tp.h0;
    kappa.detail = "kappa = h(0) = " + num(tp.h0);
  } else {
    const double k4 = h(1e-4) / std::pow(1e-4, r - 1.0);
    const double k6 = h(1e-6) / std::pow(1e-6, r - 1.0);
    const double k8 = h(1e-8) / std::pow(1e-8, r - 1.0);
    tp.kappa = k8;
    kappa.passed = std::isfinite(k8) && std::fabs(k8) < 1e8 && std::fabs(k8 - k6) <= 1e-3 * std::max(1.0, std::fabs(k8));
    kappa.detail = "h(x)/x^{r-1} at x = 1e-4, 1e-6, 1e-8: " + num(k4) + ", " + num(k6) + ", " + num(k8) +
                   (kappa.passed ? "" : " (no finite limit)");
  }
  tp.probes.push_back(kappa);

  ProbeReport l1 = probe_l1_at_zero(r == 1.0 ? "(h(x)-h(0))/x in L^1" : "(h(x)-kappa x^{r-1})/x^r in L^1",
                                    [&](double x) { return (h(x) - tp.kappa * std::pow(x, r - 1.0)) / std::pow(x, r); });
  if (!kappa.passed) {
    l1.passed = false;
    l1.detail = "skipped: leading coefficient undefined";
  }
  tp.probes.push_back(l1);

  LasotaProblem sob = problem;
  sob.space = Space::W1pStar;
  const auto linf = probe_conjugacy_hypothesis(sob.to_problem());
  tp.probes.push_back({r == 1.0 ? "(h(x)-h(0))/x in L^inf" : "(h(x)-h(0))/x^r in L^inf", linf.bounded,
                       "sup " + num(linf.sup) + " near x = " + num(linf.worst_at) + " on " + linf.grid});

  if (l1.passed) tp.lp = tp.kappa <= tp.lp_threshold ? Status::Stable : Status::Unstable;
  if (linf.bounded) {
    tp.wstar = tp.h0 <= tp.wstar_threshold ? Status::Stable : Status::Unstable;
    tp.w = (*tp.wstar == Status::Stable && tp.h0 < 0.0) ? Status::Stable : Status::Unstable;
  }
  const bool wanted = problem.space == Space::Lp ? l1.passed : linf.bounded;
  if (!wanted) {
    const auto& failed = problem.space == Space::Lp ? (kappa.passed ? l1 : kappa) : tp.probes.back();
    throw HypothesisError("theorem hypotheses not verified: " + failed.name + ": " + failed.detail);
  }
  return tp;
}

std::vector<double> SequenceSpec::times() const {
  if (!(delta > 0.0) || terms < 2 || !std::isfinite(delta))
    throw Error("sequence must tend to infinity: need delta > 0 and at least two terms");
  std::vector<double> ts;
  for (int n = 1; n <= terms; ++n) ts.push_back(n * delta);
  return ts;
}

HypercyclicityEvidence hypercyclicity_check(const WeightEvolution& we, const std::vector<std::vector<double>>& points,
                                            const SequenceSpec& sequence) {
  const auto& pr = we.problem();
  HypercyclicityEvidence ev;
  ev.sequence = sequence.times();
  ev.points = points;
  for (const auto& x : points) ev.component.push_back(pr.domain.component_of(x));
  const auto part = partition_domain(pr, sample_domain(pr.domain, pr.grid));
  ev.omega0_null = !part.omega0_positive_measure();

  struct Pair {
    double plus, minus;
  };
  const auto vals = kernels::map(points.size(), pr.grid.parallel, [&](std::size_t i) {
    const double r = pr.rho(points[i]);
    return Pair{we.rho_tp_path(points[i], ev.sequence).back() / r, we.rho_minus_tp_path(points[i], ev.sequence).back() / r};
  });
  bool all = !points.empty();
  std::size_t failing = 0;
  for (const auto& v : vals) {
    ev.rho_plus_final.push_back(v.plus);
    ev.rho_minus_final.push_back(v.minus);
    const bool ok = v.plus < pr.tol.value && v.minus < pr.tol.value;  // NaN fails
    if (!ok) ++failing;
    all = all && ok;
  }
  ev.candidate = all && ev.omega0_null;
  const double tn = ev.sequence.back();
  ev.detail = std::to_string(points.size() - failing) + "/" + std::to_string(points.size()) +
              " points with rho_{t_n,p}, rho_{-t_n,p} < " + num(pr.tol.value) + " * rho at t_n = " + num(tn) +
              (ev.omega0_null ? "" : "; Omega0 has positive measure");
  return ev;
}

HypercyclicityEvidence hypercyclicity_check(const WeightEvolution& we, const SequenceSpec& sequence) {
  GridSettings gs = we.problem().grid;
  gs.samples = std::min(gs.samples, 61);
  return hypercyclicity_check(we, sample_domain(we.problem().domain, gs).points, sequence);
}

TrichotomyReport stability_vs_hypercyclicity(const FamilySpec& family, double lambda, double p, double horizon,
                                             std::optional<Domain> domain) {
  TrichotomyReport rep;
  rep.lambda = lambda;
  rep.p = p;
  const Domain dom = domain ? *domain : family.default_domain();
  if (dom.dim() != 1 || dom.boxes().size() != 1) throw HypothesisError("trichotomy needs a single interval");
  const auto& iv = dom.as_interval();
  const Expression F = family.field();
  if (!std::isfinite(iv.lo) || F(iv.lo) != 0.0)
    throw HypothesisError("trichotomy needs F(alpha) = 0 at the left end, F(" + num(iv.lo) + ") = " + num(F(iv.lo)));

  // h = -lambda F' is the shape with coefficient -lambda.
  ProblemSpec problem = make_family_problem(family, MultiplierShape{-lambda, 0.0}, p, Space::Lp, dom);
  const auto grid = sample_domain(problem.domain, problem.grid);
  std::vector<double> fs;
  for (double x : grid.line()) fs.push_back(F(x));
  const bool neg = std::all_of(fs.begin(), fs.end(), [](double v) { return v < 0.0; });
  const bool pos = std::all_of(fs.begin(), fs.end(), [](double v) { return v > 0.0; });
  if (neg && monotone(fs, false)) rep.decreasing = true;
  else if (pos && monotone(fs, true)) rep.decreasing = false;
  else throw HypothesisError("trichotomy needs F monotone and of one sign on the interval");

  const double bound = -1.0 / p;
  if (rep.decreasing) {
    rep.analytic_stable = lambda <= bound;
  } else {
    rep.analytic_stable = lambda >= bound;
    if (lambda == bound)
      rep.flags.push_back("increasing F with lambda = -1/p: rho_{t,p} = rho, the semigroup is an isometry, so the "
                          "inclusive condition predicts stability that does not hold");
  }
  if (rep.decreasing) rep.analytic_hypercyclic = !rep.analytic_stable;

  WeightEvolution we(problem);
  rep.numeric = classify_stability_rho1(we, horizon, grid);
  SequenceSpec seq;
  seq.delta = problem.grid.seq_delta;
  seq.terms = problem.grid.seq_terms;
  rep.hypercyclicity = hypercyclicity_check(we, seq);

  const bool numeric_stable = rep.numeric.status == Status::Stable;
  bool stable_ok = numeric_stable == rep.analytic_stable;
  if (!stable_ok && lambda == bound && rep.numeric.status == Status::Inconclusive) {
    stable_ok = true;
    rep.flags.push_back("boundary lambda = -1/p: numeric verdict Inconclusive accepted");
  }
  rep.consistent = stable_ok &&
                   (!rep.analytic_hypercyclic || rep.hypercyclicity.candidate == *rep.analytic_hypercyclic) &&
                   !(numeric_stable && rep.hypercyclicity.candidate);
  return rep;
}

DecayEvidence decay_rate_experiment(const WeightEvolution& we, const SampledFunction& f, double horizon, int samples) {
  if (samples < 1) throw Error("decay_rate_experiment needs at least one step");
  const auto& pr = we.problem();
  std::vector<double> times, norms;
  for (int i = 0; i <= samples; ++i) times.push_back(horizon * i / samples);
  norms = kernels::map(times.size(), pr.grid.parallel,
                       [&](std::size_t i) { return lp_norm(pr, we.apply_semigroup(times[i], f)); });
  return classify_decay(times, norms, pr.tol.slope, pr.tol.value);
}

}  // namespace semistab
