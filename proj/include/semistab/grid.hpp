#pragma once

// Sample grids in space and time. Verdicts are statements about these grids, so every
// grid carries a short description that ends up in reports.

#include <string>
#include <vector>

#include "semistab/domain.hpp"
#include "semistab/problem.hpp"

namespace semistab {

struct SampleGrid {
  int dim = 1;
  std::vector<std::vector<double>> points;
  /// Per-point local spacing in each coordinate, used for argmax refinement.
  std::vector<std::vector<double>> spacing;
  std::string description;

  std::size_t size() const { return points.size(); }
  /// Coordinates of a 1D grid.
  std::vector<double> line() const;
};

/// n points accumulating geometrically at `a` (exclusive), from a + (b-a)*10^-decades up to b.
std::vector<double> geometric_toward(double a, double b, int n, double decades = 12.0);

/// Sorted interior samples of an interval: uniform, plus geometric clustering toward finite ends;
/// infinite sides are sampled uniformly up to |x| = truncation and geometrically beyond, to 10^1.5 * truncation
/// (far enough to expose tail behaviour, near enough that weights such as e^x stay finite).
std::vector<double> sample_interval(const Interval& iv, int n, double truncation = 10.0);

SampleGrid sample_domain(const Domain& domain, const GridSettings& settings);
SampleGrid grid_from_points(std::vector<double> xs, std::string description);

/// {0} ∪ log-spaced points in (0, horizon] ∪ uniform points on [horizon/2, horizon]; sorted, unique.
std::vector<double> time_grid(double horizon, int n);

}  // namespace semistab
