#pragma once

// Time-series evidence: decay classification of sampled curves and boundedness tests.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace semistab {

enum class DecayClass { DecaysToZero, BoundedNonvanishing, Grows, Undetermined };

std::string to_string(DecayClass c);

struct DecayEvidence {
  std::vector<std::pair<double, double>> samples;  // (t, value)
  double slope = 0.0;                              // least-squares slope of log value, last half
  DecayClass classification = DecayClass::Undetermined;
};

/// Classifies t -> value (values >= 0):
///   value 0 from some time on through the end  -> decays_to_zero (indicator/escape)
///   slope < -slope_tol and final < value_tol * initial -> decays_to_zero
///   slope > slope_tol -> grows;  |slope| <= slope_tol -> bounded_nonvanishing;  else undetermined.
DecayEvidence classify_decay(std::span<const double> times, std::span<const double> values, double slope_tol,
                             double value_tol);

double least_squares_slope(std::span<const double> x, std::span<const double> y);

struct GrowthTest {
  double linear_slope = 0.0;    // d log S / dt over the last half
  double log_time_slope = 0.0;  // d log S / d log t over the last half
  double max_log = 0.0;
  bool bounded = true;
  bool low_confidence = false;  // fewer than three positive times
};

/// Tests whether a curve of log values stays bounded above: both slopes must be <= slope_tol.
/// The log-time slope catches logarithmic growth that a linear fit over a finite horizon misses.
GrowthTest test_bounded(std::span<const double> times, std::span<const double> log_values, double slope_tol);

}  // namespace semistab
