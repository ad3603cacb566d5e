#pragma once

// Problem description for a weighted composition semigroup
//     (T(t)f)(x) = h_t(x) f(phi(t,x)),   phi generated by x' = F(x),
// acting on L^p_rho(Omega) or, in one dimension, on W^{1,p}(a,b) / W^{1,p}_*(a,b).
//
// Config documents are flat "key = value" lines; '#' starts a comment. Keys:
//
//   domain          (lo,hi), (-inf,inf), (0,1)x(0,1), boxes joined with U
//   family          translation | affine | lasota | lasota_r     (alternative to F_expr)
//   v, a, b, r      family parameters (translation speed, affine a + b x, lasota_r exponent)
//   F_expr          vector field; components separated by ';' for N > 1
//   h_const         constant multiplier
//   h_expr          multiplier expression
//   h_re_expr       real part of a complex multiplier (requires h_im_expr)
//   h_im_expr       imaginary part; only recorded, the engine works with Re h
//   h_fprime_coef   multiplier alpha * div F + beta, with h_offset = beta
//   h_offset
//   rho_expr        weight, default 1
//   p               exponent >= 1
//   space           Lp | W1p | W1p_star
//   horizon         time horizon of the analyses
//
// plus the tolerance and grid keys listed in Tolerances / GridSettings (same names).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semistab/domain.hpp"
#include "semistab/expr.hpp"

namespace semistab {

enum class Space { Lp, W1p, W1pStar };
enum class ScalarMode { Real, ComplexReduced };
enum class Family { Translation, Affine, Lasota, LasotaR };

std::string to_string(Space s);
std::string to_string(Family f);
Space parse_space(std::string_view text);
std::optional<Family> parse_family(std::string_view text);

/// Closed-form vector field families with known flows.
struct FamilySpec {
  Family tag = Family::Lasota;
  double v = 1.0;   // translation: F = v
  double a = 1.0;   // affine: F = a + b x
  double b = -1.0;
  double r = 1.0;   // lasota_r: F = -x^r

  static FamilySpec translation(double v = 1.0) { return {Family::Translation, v, 1.0, -1.0, 1.0}; }
  static FamilySpec affine(double a, double b) { return {Family::Affine, 1.0, a, b, 1.0}; }
  static FamilySpec lasota() { return {Family::Lasota, 1.0, 1.0, -1.0, 1.0}; }
  static FamilySpec lasota_r(double r) { return {Family::LasotaR, 1.0, 1.0, -1.0, r}; }

  Expression field() const;
  Domain default_domain() const;
  /// Zero of F, when it has one.
  std::optional<double> equilibrium() const;
  std::string str() const;
};

/// Multiplier of the form h = fprime_coef * div F + offset.
/// The cocycle is then exp(offset t) * det(D phi)^fprime_coef, which every analysis uses exactly.
struct MultiplierShape {
  double fprime_coef = 0.0;
  double offset = 0.0;
};

struct Tolerances {
  double zero = 1e-10;        // tol_zero, relative to max|F| on the grid
  double ode_rtol = 1e-10;    // tol_ode_rtol
  double ode_atol = 1e-12;    // tol_ode_atol
  double quad = 1e-10;        // tol_quad
  double domain = 1e-9;       // tol_domain
  double flow = 1e-8;         // tol_flow
  double slope = 1e-3;        // slope_tol
  double value = 1e-6;        // value_tol
  double divergence = 20.0;   // divergence_threshold
  double convexity = 0.5;     // convexity_tol, admissibility refutation
  double fd = 1e-6;           // fd_tol
};

struct GridSettings {
  double horizon = 20.0;      // horizon
  int samples = 121;          // samples, spatial points per dimension (1D)
  int samples_nd = 24;        // samples_nd, points per dimension when N > 1
  int time_samples = 48;      // time_samples
  int refine_rounds = 3;      // refine_rounds
  int refine_factor = 10;     // refine_factor
  double truncation = 10.0;   // truncation, |x| beyond which infinite sides are sampled geometrically
  double seq_delta = 0.5;     // seq_delta, hypercyclicity sequence t_n = n * delta
  int seq_terms = 200;        // seq_terms
  bool parallel = true;       // parallel
};

struct ProblemSpec {
  Domain domain;
  std::optional<FamilySpec> family;
  std::vector<Expression> field;
  Expression h;
  std::optional<MultiplierShape> h_shape;
  std::optional<Expression> h_imag;
  Expression rho = Expression::constant(1.0);
  double p = 2.0;
  Space space = Space::Lp;
  ScalarMode scalar_mode = ScalarMode::Real;
  Tolerances tol;
  GridSettings grid;

  int dim() const { return domain.dim(); }
  bool rho_is_one() const;
  /// Value of h when it is constant.
  std::optional<double> h_constant() const;
  /// div F as an expression.
  Expression divergence() const;
};

/// Builds a problem for a registered family with a shaped multiplier.
ProblemSpec make_family_problem(const FamilySpec& family, MultiplierShape h, double p, Space space = Space::Lp,
                                std::optional<Domain> domain = std::nullopt);
/// Same, with an arbitrary multiplier expression.
ProblemSpec make_family_problem(const FamilySpec& family, const Expression& h, double p, Space space = Space::Lp,
                                std::optional<Domain> domain = std::nullopt);

/// Parses a config document. Throws ParseError carrying line and field.
ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem(const std::string& path);
std::string serialize_problem(const ProblemSpec& spec);

/// Re-checks the structural invariants (p >= 1, Sobolev requirements, rho > 0 on a grid).
void check_invariants(const ProblemSpec& spec);

}  // namespace semistab
