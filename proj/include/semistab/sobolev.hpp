#pragma once

// W^{1,p}(a,b) and W^{1,p}_*(a,b) = {u : u(a) = 0}.
//
// On W^{1,p}_* the semigroup is conjugate to the L^p semigroup with multiplier F' + h(a) and rho = 1;
// on W^{1,p} = W^{1,p}_* (+) span{1} the constant component evolves as e^{h(a) t}.

#include <utility>

#include "semistab/stability.hpp"
#include "semistab/weights.hpp"

namespace semistab {

/// Value and derivative evaluators; either may carry an endpoint power singularity.
struct SobolevFunction {
  SampledFunction value;
  SampledFunction derivative;

  double boundary_value(double a) const { return value(a); }
  /// x^beta on (a, b) shifted to a: (x - a)^beta with derivative beta (x - a)^(beta - 1).
  static SobolevFunction power(double a, double beta);
  static SobolevFunction from_expression(const Expression& f);
};

/// (h(y) - h(a)) / F(y) sampled on a geometric grid accumulating at a.
struct BoundednessProbe {
  bool bounded = true;
  double sup = 0.0;
  double worst_at = 0.0;
  std::string grid;
};
BoundednessProbe probe_conjugacy_hypothesis(const ProblemSpec& problem);

/// L^p problem with multiplier F' + h(a) and rho = 1. Throws HypothesisError when the probe fails.
ProblemSpec conjugate_problem(const ProblemSpec& problem);

/// ||f||_p + ||f'||_p with rho = 1.
double sobolev_norm(const ProblemSpec& problem, const SobolevFunction& f);

/// g = h_t f(phi(t,.)),  g' = h_t [int_0^t h'(phi(s,.)) d_2phi(s,.) ds] f(phi(t,.)) + h_t f'(phi(t,.)) d_2phi(t,.).
SobolevFunction apply_semigroup_sobolev(const WeightEvolution& we, double t, const SobolevFunction& f);

/// int_y^{phi(t,y)} (h(a) - (1/p - 1) F'(s)) / F(s) ds.
double sobolev_stability_integral(const ProblemSpec& problem, double y, double t);

/// (verdict on W^{1,p}_*, verdict on W^{1,p}).
std::pair<Verdict, Verdict> classify_stability_sobolev(const ProblemSpec& problem, double horizon,
                                                       const SampleGrid& grid);

}  // namespace semistab
