#pragma once

// Adaptive Dormand-Prince integration of x' = s F(x) (s = +1 forward, -1 backward) together with
// the variational equation D' = s DF(x) D, D(0) = I, and an optional path integral of g(x(t)).

#include <optional>
#include <span>
#include <vector>

#include "semistab/domain.hpp"
#include "semistab/expr.hpp"

namespace semistab {

struct OdeSettings {
  double rtol = 1e-10;
  double atol = 1e-12;
  double blowup = 1e12;
  /// Distance the state must keep from the domain boundary; negative values widen the domain.
  double margin = 0.0;
  double initial_dt = 1e-3;
  long max_steps = 2'000'000;
};

struct OdeSample {
  bool alive = false;
  std::vector<double> y;
  std::vector<double> D;  // row-major N x N
  double integral = 0.0;
};

struct OdeResult {
  std::vector<OdeSample> samples;  // one per requested time
  std::optional<double> exit_time;
  bool blowup = false;
};

class AugmentedSystem {
 public:
  /// `integrand` may be empty (no path integral).
  AugmentedSystem(std::vector<Expression> field, std::optional<Expression> integrand, int direction);

  int dim() const { return static_cast<int>(field_.size()); }
  void operator()(const std::vector<double>& s, std::vector<double>& ds, double t) const;

  /// `times` must be sorted and non-negative.
  OdeResult integrate(std::span<const double> x0, std::span<const double> times, const Domain& domain,
                      const OdeSettings& settings) const;

 private:
  std::vector<Expression> field_;
  std::vector<Expression> jac_;  // row-major
  std::optional<Expression> integrand_;
  double sign_;
};

}  // namespace semistab
