#pragma once

// Multiplier cocycle h_t, transported weights rho_{t,p} and rho_{-t,p}, operator norms,
// semigroup application, weighted L^p norms and admissibility fits.
//
//   h_t(x)          = exp( int_0^t h(phi(s,x)) ds )
//   rho_{t,p}(x)    = chi_{phi(t,Omega)}(x) h_t(phi(-t,x))^p rho(phi(-t,x)) |det D phi(-t,x)|
//   rho_{-t,p}(x)   = h_t(x)^(-p) rho(phi(t,x)) |det D phi(t,x)|
//   ||T(t)f||_p^p   = int |f|^p rho_{t,p}
//
// The operator norm is exposed both as the raw sup of rho_{t,p}/rho and as its p-th root; the
// change-of-variables identity above makes the p-th root the norm of T(t) on L^p_rho.
//
// Sups are computed in forward form: for x = phi(t,y), rho_{t,p}(x)/rho(x) = rho(y)/rho_{-t,p}(y),
// so sweeping y over Omega covers exactly the image phi(t,Omega) and never samples outside it.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semistab/grid.hpp"
#include "semistab/problem.hpp"
#include "semistab/semiflow.hpp"

namespace semistab {

/// |x - at|^(-exponent) behaviour at a finite domain endpoint.
struct Singularity {
  double at = 0.0;
  double exponent = 0.0;
};

/// A function given by an evaluator, optionally factored as |x - a|^(-alpha) q(x) near an
/// endpoint so that norms can be integrated accurately.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::function<double(double)> f, std::string description = {});
  static SampledFunction power(double at, double exponent, std::function<double(double)> regular = {},
                               std::string description = {});
  static SampledFunction from_expression(const Expression& e);

  double operator()(double x) const;
  /// q(x); equals the value when there is no singularity.
  double regular(double x) const;
  const std::optional<Singularity>& singularity() const { return singularity_; }
  const std::string& description() const { return description_; }

 private:
  std::function<double(double)> regular_;
  std::optional<Singularity> singularity_;
  std::string description_;
};

struct NormEstimate {
  double t = 0.0;
  double raw_sup = 1.0;  // sup rho_{t,p} / rho
  double norm = 1.0;     // raw_sup^(1/p)
  std::vector<double> argmax;
  std::size_t evaluations = 0;
};

struct AdmissibilityFit {
  double M = 1.0;
  double omega = 0.0;
  bool refuted = false;
  double max_violation = 0.0;  // max over samples of sup/(M e^{omega t}) - 1; <= 0 when the fit holds
  double convexity = 0.0;      // late slope minus early slope of log sup
  std::vector<double> times;
  std::vector<double> log_sups;
  std::string grid;
};

class WeightEvolution {
 public:
  explicit WeightEvolution(ProblemSpec problem);
  WeightEvolution(ProblemSpec problem, Semiflow flow);

  const ProblemSpec& problem() const { return problem_; }
  const Semiflow& semiflow() const { return flow_; }

  /// int_0^{|t|} h(phi(+-s, x)) ds, sign following t.
  double log_cocycle(double t, std::span<const double> x) const;
  double multiplier_cocycle(double t, std::span<const double> x) const;
  double multiplier_cocycle(double t, double x) const;

  /// Lemma form: exact Omega0 branch, line-integral Omega1 branch (N = 1), definition otherwise.
  double rho_tp(double t, std::span<const double> x) const;
  double rho_tp(double t, double x) const;
  /// chi h_t(phi(-t,x))^p rho(phi(-t,x)) |det D phi(-t,x)|, straight from the definition.
  double rho_tp_definition(double t, std::span<const double> x) const;
  double rho_tp_definition(double t, double x) const;
  double rho_minus_tp(double t, std::span<const double> x) const;
  double rho_minus_tp(double t, double x) const;

  /// Along one trajectory, at sorted times.
  std::vector<double> rho_tp_path(std::span<const double> x, std::span<const double> times) const;
  std::vector<double> rho_minus_tp_path(std::span<const double> x, std::span<const double> times) const;
  /// log( rho_{t,p}(phi(t,y)) / rho(phi(t,y)) ) = log( rho(y) / rho_{-t,p}(y) ); -inf if phi(t,y) is undefined.
  std::vector<double> log_ratio_path(std::span<const double> y, std::span<const double> times) const;

  /// Sup of rho_{t,p}/rho over the grid with local argmax refinement.
  NormEstimate operator_norm(double t, const SampleGrid& grid) const;
  std::vector<NormEstimate> operator_norm_curve(std::span<const double> times, const SampleGrid& grid) const;

  /// x -> h_t(x) f(phi(t,x)); singularities at equilibrium endpoints are carried along.
  SampledFunction apply_semigroup(double t, const SampledFunction& f) const;

  AdmissibilityFit admissibility_fit(double horizon, const SampleGrid& grid) const;
  /// max over the curve of sup/(M e^{omega t}) - 1 for given constants.
  double admissibility_violation(double M, double omega, const AdmissibilityFit& curve) const;

  /// True when |F(x)| is below the zero tolerance.
  bool in_omega0(std::span<const double> x) const;
  double zero_threshold() const { return zero_threshold_; }

 private:
  double log_cocycle_from(const Transported& sample, double t, bool forward, std::span<const double> x) const;

  ProblemSpec problem_;
  Semiflow flow_;
  Expression div_;
  Expression line_integrand_;  // h - div F / p
  double zero_threshold_ = 0.0;
};

/// (int |f|^p rho)^(1/p) over the domain (1D).
double lp_norm(const ProblemSpec& problem, const SampledFunction& f);
/// int_iv |f|^p w, honouring an endpoint singularity of f.
double lp_integral(const SampledFunction& f, const Interval& iv, double p, const std::function<double(double)>& w,
                   double tol = 1e-10);

/// Both sides of int |T(t)f|^p rho dx = int |f|^p rho_{t,p} dy (1D).
std::pair<double, double> change_of_variables(const WeightEvolution& we, double t, const SampledFunction& f);

/// Estimates the power-law exponent of |f| at a finite endpoint from two scales; 0 when regular.
double detect_endpoint_exponent(const std::function<double(double)>& f, double endpoint, double inward_width);

/// Expression in x on an interval; a power blow-up detected at a finite end is factored out.
SampledFunction function_on_interval(const Expression& e, const Interval& iv);

}  // namespace semistab
