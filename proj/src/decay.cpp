#include "semistab/decay.hpp"

#include <algorithm>
#include <cmath>

#include "semistab/error.hpp"

namespace semistab {

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::DecaysToZero: return "decays_to_zero";
    case DecayClass::BoundedNonvanishing: return "bounded_nonvanishing";
    case DecayClass::Grows: return "grows";
    case DecayClass::Undetermined: return "undetermined";
  }
  return "?";
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

DecayEvidence classify_decay(std::span<const double> times, std::span<const double> values, double slope_tol,
                             double value_tol) {
  if (times.size() != values.size() || times.empty()) throw Error("decay evidence needs matching, non-empty samples");
  DecayEvidence ev;
  for (std::size_t i = 0; i < times.size(); ++i) ev.samples.emplace_back(times[i], values[i]);

  const double horizon = times.back();
  if (values.back() == 0.0) {
    ev.slope = -INFINITY;
    ev.classification = DecayClass::DecaysToZero;
    return ev;
  }
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= horizon / 2.0 && values[i] > 0.0 && std::isfinite(values[i])) {
      ts.push_back(times[i]);
      logs.push_back(std::log(values[i]));
    }
  if (ts.size() < 2) {
    ev.classification = DecayClass::Undetermined;
    return ev;
  }
  ev.slope = least_squares_slope(ts, logs);
  const double initial = values.front();
  const double final_value = values.back();
  if (ev.slope < -slope_tol && final_value < value_tol * initial) ev.classification = DecayClass::DecaysToZero;
  else if (ev.slope > slope_tol) ev.classification = DecayClass::Grows;
  else if (std::fabs(ev.slope) <= slope_tol) ev.classification = DecayClass::BoundedNonvanishing;
  else ev.classification = DecayClass::Undetermined;
  return ev;
}

GrowthTest test_bounded(std::span<const double> times, std::span<const double> log_values, double slope_tol) {
  GrowthTest g;
  g.max_log = -INFINITY;
  std::vector<double> ts, lt, ls;
  const double horizon = times.empty() ? 0.0 : times.back();
  for (std::size_t i = 0; i < times.size(); ++i) {
    g.max_log = std::max(g.max_log, log_values[i]);
    if (times[i] > 0.0 && times[i] >= horizon / 2.0 && std::isfinite(log_values[i])) {
      ts.push_back(times[i]);
      lt.push_back(std::log(times[i]));
      ls.push_back(log_values[i]);
    }
  }
  if (ts.size() < 3) {
    g.low_confidence = true;
    g.bounded = !(g.max_log == INFINITY);
    return g;
  }
  g.linear_slope = least_squares_slope(ts, ls);
  g.log_time_slope = least_squares_slope(lt, ls);
  g.bounded = g.linear_slope <= slope_tol && g.log_time_slope <= slope_tol;
  return g;
}

}  // namespace semistab
