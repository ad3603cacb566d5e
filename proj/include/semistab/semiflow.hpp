#pragma once

// The semiflow phi(t, x) of x' = F(x): forward map, inverse on the image phi(t, Omega),
// Jacobian determinant, image membership and escape times.
//
// Three backends:
//   closed form  registered 1D families, exact formulas and exact exit/escape times
//   numeric      Dormand-Prince with dense output plus the variational equation (N <= 3)
//   closure      user-supplied phi(t, x) and det D phi(t, x) for signed t (typically N >= 2)

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "semistab/domain.hpp"
#include "semistab/expr.hpp"
#include "semistab/ode.hpp"
#include "semistab/problem.hpp"

namespace semistab {

enum class Direction { Forward, Backward };

struct Transported {
  bool alive = false;
  std::vector<double> point;
  double jacobian = 0.0;  // det D phi(+-t, x)
  double integral = 0.0;  // int_0^t g(phi(+-s, x)) ds
};

struct TransportPath {
  std::vector<Transported> samples;
  std::optional<double> exit_time;
  bool blowup = false;
};

class Semiflow {
 public:
  enum class Kind { ClosedForm, Numeric, Closure };
  using FlowClosure = std::function<std::optional<std::vector<double>>(double t, std::span<const double> x)>;
  using JacobianClosure = std::function<double(double t, std::span<const double> x)>;

  static Semiflow closed_form(const FamilySpec& family, Domain domain, double tol_domain = 1e-9);
  static Semiflow numeric(std::vector<Expression> field, Domain domain, OdeSettings settings = {},
                          double tol_domain = 1e-9);
  /// `flow` must accept signed times and return nullopt outside its domain of definition.
  /// `field` is optional and only used for equilibrium detection.
  static Semiflow closure(Domain domain, FlowClosure flow, JacobianClosure jacobian,
                          std::vector<Expression> field = {}, double tol_domain = 1e-9);
  /// Closed form when the problem names a family, numeric otherwise.
  static Semiflow from_problem(const ProblemSpec& problem, bool force_numeric = false);

  Kind kind() const;
  int dim() const;
  const Domain& domain() const;
  const std::optional<FamilySpec>& family() const;
  double tol_domain() const;

  /// phi(t, x) for t >= 0. Throws DomainExit when the trajectory leaves Omega first.
  std::vector<double> flow(double t, std::span<const double> x) const;
  double flow(double t, double x) const;

  /// y with phi(t, y) = x, or nullopt when x is not in phi(t, Omega).
  std::optional<std::vector<double>> inverse_flow(double t, std::span<const double> x) const;
  std::optional<double> inverse_flow(double t, double x) const;

  /// det D phi(t, x) for signed t; t < 0 requires x in phi(|t|, Omega).
  double flow_jacobian(double t, std::span<const double> x) const;
  double flow_jacobian(double t, double x) const;

  bool image_indicator(double t, std::span<const double> x) const;
  bool image_indicator(double t, double x) const;

  /// Smallest t <= horizon with x outside phi(t, Omega). Closed forms are exact; pass an infinite
  /// horizon to get the exact escape time whatever its size.
  std::optional<double> escape_time(std::span<const double> x, double horizon) const;
  std::optional<double> escape_time(double x, double horizon) const;

  /// One pass along the trajectory of x, sampled at sorted non-negative `times`.
  TransportPath transport(std::span<const double> x, std::span<const double> times, Direction direction,
                          const std::optional<Expression>& integrand = std::nullopt) const;

  /// phi(t, I) for a single-interval 1D domain. Infinite ends of numeric flows are assumed invariant.
  Interval image_interval(double t) const;

  void set_cache_enabled(bool enabled) const;
  std::size_t cache_size() const;

  struct State;

 private:
  explicit Semiflow(std::shared_ptr<State> state);
  std::shared_ptr<State> s_;
};

}  // namespace semistab
