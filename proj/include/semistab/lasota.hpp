#pragma once

// von Foerster-Lasota family u_t + x^r u_x = h(x) u on (0,1), i.e. F(x) = -x^r:
// closed-form semigroup, analytic thresholds, hypercyclicity evidence and the
// stability / non-hypercyclicity trichotomy for h = -lambda F'.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semistab/stability.hpp"

namespace semistab {

struct LasotaProblem {
  double r = 1.0;
  Expression h = Expression::constant(0.0);
  double p = 2.0;
  Space space = Space::Lp;
  std::optional<MultiplierShape> shape;  // set when h = alpha F' + beta

  static LasotaProblem constant(double r, double c, double p, Space space = Space::Lp);
  /// h = kappa x^{r-1}, the shape (-kappa/r) F'.
  static LasotaProblem leading(double r, double kappa, double p, Space space = Space::Lp);
  FamilySpec family() const;
  ProblemSpec to_problem() const;
};

/// exp(int_{-t}^0 h(x e^s) ds) v(x e^{-t})  (r = 1).
double lasota_semigroup(const std::function<double(double)>& v, const Expression& h, double t, double x);

struct ProbeReport {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ThresholdPrediction {
  double r = 1.0;
  double p = 2.0;
  double h0 = 0.0;     // h(0)
  double kappa = 0.0;  // lim h(x)/x^{r-1}; equals h(0) when r = 1
  double lp_threshold = 0.0;
  double wstar_threshold = 0.0;
  std::optional<Status> lp, wstar, w;
  std::vector<ProbeReport> probes;
};

/// Analytic verdicts from the threshold inequalities. Throws HypothesisError when the probe for the
/// problem's own space fails; the other spaces are filled in only when their probes pass.
ThresholdPrediction lasota_threshold(const LasotaProblem& problem);

struct SequenceSpec {
  double delta = 0.5;
  int terms = 200;
  /// t_n = n delta, n = 1..terms. Throws unless the sequence tends to infinity.
  std::vector<double> times() const;
};

struct HypercyclicityEvidence {
  std::vector<std::vector<double>> points;
  std::vector<int> component;
  std::vector<double> sequence;
  std::vector<double> rho_plus_final;   // rho_{t_n,p}(x) / rho(x) at the last t_n
  std::vector<double> rho_minus_final;  // rho_{-t_n,p}(x) / rho(x)
  bool omega0_null = true;
  bool candidate = false;
  std::string detail;
};

/// Per-point test of rho_{t_n,p}(x) -> 0 and rho_{-t_n,p}(x) -> 0; points are grouped by connected
/// component. A tuple (x_1..x_m) passes iff each of its points does, so checking points covers all tuples.
HypercyclicityEvidence hypercyclicity_check(const WeightEvolution& we, const std::vector<std::vector<double>>& points,
                                            const SequenceSpec& sequence = {});
HypercyclicityEvidence hypercyclicity_check(const WeightEvolution& we, const SequenceSpec& sequence = {});

struct TrichotomyReport {
  double lambda = 0.0;
  double p = 2.0;
  bool decreasing = true;
  bool analytic_stable = false;
  std::optional<bool> analytic_hypercyclic;  // predicted only for decreasing F
  Verdict numeric;
  HypercyclicityEvidence hypercyclicity;
  bool consistent = false;
  std::vector<std::string> flags;
};

/// h = -lambda F' on a registered family whose F vanishes at the left end and is monotone.
/// Decreasing F (F < 0): stable <=> not hypercyclic <=> lambda <= -1/p.
/// Increasing F (F > 0, forward complete, so the interval is unbounded): only stability is predicted,
/// lambda >= -1/p, flagged at equality where the semigroup is an isometry.
TrichotomyReport stability_vs_hypercyclicity(const FamilySpec& family, double lambda, double p, double horizon = 20.0,
                                             std::optional<Domain> domain = std::nullopt);

/// t -> ||T(t) f||_p on `samples` + 1 equally spaced times and the fitted log-slope.
DecayEvidence decay_rate_experiment(const WeightEvolution& we, const SampledFunction& f, double horizon, int samples);

}  // namespace semistab
