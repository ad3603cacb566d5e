#pragma once

// Thin layer over Boost.Math quadrature: interval-type dispatch, error policy and
// tensor-product rules. Every routine throws QuadratureError when the requested tolerance
// is not reached and DivergentIntegral for non-finite results.

#include <functional>
#include <span>
#include <vector>

#include "semistab/domain.hpp"

namespace semistab {

using Integrand = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Adaptive integral over (a, b); a and b may be infinite. Endpoint singularities are handled by
/// falling back to tanh-sinh.
QuadResult integrate(const Integrand& f, double a, double b, double tol = 1e-10);

/// Adaptive Gauss-Kronrod on a finite interval (no fallback).
QuadResult integrate_smooth(const Integrand& f, double a, double b, double tol = 1e-10);

/// Double-exponential rule, robust to integrable endpoint singularities.
QuadResult integrate_endpoint_singular(const Integrand& f, double a, double b, double tol = 1e-10);

/// int_a^b |x - s|^(-beta) q(x) dx where s is a or b and beta < 1, via x = s + w u^m with
/// m = 1 / (1 - beta), which turns the integrand into m w^(1-beta) q(x(u)). Throws DivergentIntegral
/// when beta >= 1.
QuadResult integrate_power_singular(const Integrand& q, double a, double b, double s, double beta, double tol = 1e-10);

/// Gauss-Legendre nodes and weights on [-1, 1] (order 2..20).
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Composite tensor Gauss-Legendre rule on a bounded box: `panels` panels per side, `order` points per panel.
struct TensorRule {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};
TensorRule tensor_rule(const Box& box, int panels, int order);

}  // namespace semistab
