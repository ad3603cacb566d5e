#pragma once

// Equilibrium set Omega0 = {F = 0}, its complement Omega1, and the standing-hypothesis probes.

#include <string>
#include <vector>

#include "semistab/domain.hpp"
#include "semistab/grid.hpp"
#include "semistab/problem.hpp"

namespace semistab {

/// Omega0 pieces are boxes; a degenerate box (lo == hi on every side) is an isolated zero.
struct DomainPartition {
  std::vector<Box> omega0;
  std::vector<Box> omega1;
  double zero_tolerance = 0.0;
  std::vector<std::vector<double>> samples0;
  std::vector<std::vector<double>> samples1;
  bool exact = false;  // zero set known in closed form

  /// True when Omega0 has positive Lebesgue measure (at grid resolution).
  bool omega0_positive_measure() const;
  std::string str() const;
};

DomainPartition partition_domain(const ProblemSpec& problem, const SampleGrid& grid);

struct Finding {
  std::string check;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<Finding> findings;
  double horizon = 0.0;
  std::string grid;

  bool ok() const;
  const Finding* first_failure() const;
};

/// Spot checks of F, forward-completeness probes up to `horizon`, and an injectivity probe
/// (monotonicity of phi(t,.) on 1D grids). Never throws for findings; they are reported.
ValidationReport validate_hypotheses(const ProblemSpec& problem, double horizon);

}  // namespace semistab
