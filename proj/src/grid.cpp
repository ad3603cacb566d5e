#include "semistab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "semistab/error.hpp"

namespace semistab {

namespace {

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<double> spacing_of(const std::vector<double>& xs) {
  std::vector<double> h(xs.size(), 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double left = i > 0 ? xs[i] - xs[i - 1] : INFINITY;
    double right = i + 1 < xs.size() ? xs[i + 1] - xs[i] : INFINITY;
    h[i] = std::min(left, right);
    if (!std::isfinite(h[i])) h[i] = std::max(std::fabs(xs[i]), 1.0) * 0.1;
  }
  return h;
}

}  // namespace

std::vector<double> SampleGrid::line() const {
  std::vector<double> xs;
  xs.reserve(points.size());
  for (const auto& p : points) xs.push_back(p.front());
  return xs;
}

std::vector<double> geometric_toward(double a, double b, int n, double decades) {
  std::vector<double> xs;
  if (n <= 0) return xs;
  const double w = b - a;
  for (int i = 0; i < n; ++i) {
    const double e = n == 1 ? 0.0 : -decades * (n - 1 - i) / (n - 1);
    xs.push_back(a + w * std::pow(10.0, e));
  }
  return xs;
}

std::vector<double> sample_interval(const Interval& iv, int n, double truncation) {
  if (n < 1) throw Error("sample grid needs at least one point");
  std::vector<double> xs;
  const double lo = std::isfinite(iv.lo) ? iv.lo : std::min(-truncation, iv.hi - 2.0 * truncation);
  const double hi = std::isfinite(iv.hi) ? iv.hi : std::max(truncation, iv.lo + 2.0 * truncation);
  const int uniform = std::max(1, n - (n >= 20 ? n / 4 : 0));
  for (int i = 0; i < uniform; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / uniform);
  const int cluster = n >= 20 ? n / 8 : 0;
  if (cluster > 0) {
    const double w = hi - lo;
    if (std::isfinite(iv.lo))
      for (double x : geometric_toward(iv.lo, iv.lo + 0.05 * w, cluster)) xs.push_back(x);
    else
      for (int k = 1; k <= cluster; ++k) xs.push_back(lo * std::pow(10.0, 1.5 * k / cluster));
    if (std::isfinite(iv.hi))
      for (double x : geometric_toward(iv.hi, iv.hi - 0.05 * w, cluster)) xs.push_back(x);
    else
      for (int k = 1; k <= cluster; ++k) xs.push_back(hi * std::pow(10.0, 1.5 * k / cluster));
  }
  std::erase_if(xs, [&](double x) { return !iv.contains(x); });
  sort_unique(xs);
  return xs;
}

SampleGrid grid_from_points(std::vector<double> xs, std::string description) {
  if (xs.empty()) throw Error("empty grid");
  sort_unique(xs);
  SampleGrid g;
  g.dim = 1;
  const auto h = spacing_of(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    g.points.push_back({xs[i]});
    g.spacing.push_back({h[i]});
  }
  g.description = std::move(description);
  return g;
}

SampleGrid sample_domain(const Domain& domain, const GridSettings& settings) {
  if (domain.empty()) throw Error("cannot sample an empty domain");
  SampleGrid g;
  g.dim = domain.dim();
  const int n = g.dim == 1 ? settings.samples : settings.samples_nd;
  for (const auto& box : domain.boxes()) {
    std::vector<std::vector<double>> axes, axis_h;
    for (const auto& side : box.sides) {
      axes.push_back(sample_interval(side, n, settings.truncation));
      axis_h.push_back(spacing_of(axes.back()));
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      std::vector<double> p(axes.size()), h(axes.size());
      for (std::size_t d = 0; d < axes.size(); ++d) {
        p[d] = axes[d][idx[d]];
        h[d] = axis_h[d][idx[d]];
      }
      g.points.push_back(std::move(p));
      g.spacing.push_back(std::move(h));
      std::size_t d = 0;
      while (d < axes.size() && ++idx[d] == axes[d].size()) idx[d++] = 0;
      if (d == axes.size()) break;
    }
  }
  g.description = std::to_string(g.points.size()) + " points on " + domain.str() + " (" + std::to_string(n) +
                  " per axis, uniform + geometric clustering, truncation " + format_double(settings.truncation) + ")";
  return g;
}

std::vector<double> time_grid(double horizon, int n) {
  std::vector<double> ts{0.0};
  if (!(horizon > 0.0) || n <= 1) {
    if (horizon > 0.0) ts.push_back(horizon);
    return ts;
  }
  const int nlog = std::max(2, n / 2);
  const double t0 = std::min(1e-3, horizon / 10.0);
  for (int i = 0; i < nlog; ++i) ts.push_back(t0 * std::pow(horizon / t0, static_cast<double>(i) / (nlog - 1)));
  const int nuni = std::max(2, n - nlog);
  for (int i = 0; i < nuni; ++i) ts.push_back(horizon / 2.0 + horizon / 2.0 * i / (nuni - 1));
  sort_unique(ts);
  ts.back() = horizon;
  return ts;
}

}  // namespace semistab
