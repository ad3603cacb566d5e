#include "semistab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semistab/error.hpp"
#include "semistab/semiflow.hpp"

namespace semistab {

namespace {

bool degenerate(const Box& b) {
  return std::all_of(b.sides.begin(), b.sides.end(), [](const Interval& s) { return s.lo == s.hi; });
}

Box point_box(std::span<const double> x) {
  Box b;
  for (double v : x) b.sides.push_back({v, v});
  return b;
}

// Interval pieces of `iv` left after removing the (sorted) Omega0 pieces.
std::vector<Box> complement_1d(const Interval& iv, const std::vector<Box>& zeros) {
  std::vector<Box> out;
  double lo = iv.lo;
  for (const auto& z : zeros) {
    const auto& s = z.sides.front();
    if (s.hi <= iv.lo || s.lo >= iv.hi) continue;
    if (s.lo > lo) out.push_back(Box{{{lo, s.lo}}});
    lo = std::max(lo, s.hi);
  }
  if (lo < iv.hi) out.push_back(Box{{{lo, iv.hi}}});
  return out;
}

std::optional<std::vector<Box>> exact_zero_set(const ProblemSpec& problem) {
  const auto& iv = problem.domain.as_interval();
  std::vector<Box> zeros;
  if (problem.family) {
    const auto& fam = *problem.family;
    switch (fam.tag) {
      case Family::Translation:
        if (fam.v == 0.0) zeros.push_back(Box{{iv}});
        return zeros;
      case Family::Affine:
        if (fam.b == 0.0) {
          if (fam.a == 0.0) zeros.push_back(Box{{iv}});
        } else {
          const double z = -fam.a / fam.b;
          if (iv.contains(z)) zeros.push_back(point_box(std::span<const double>(&z, 1)));
        }
        return zeros;
      case Family::Lasota:
      case Family::LasotaR:
        if (iv.contains(0.0)) zeros.push_back(Box{{{0.0, 0.0}}});
        return zeros;
    }
  }
  return std::nullopt;
}

}  // namespace

bool DomainPartition::omega0_positive_measure() const {
  return std::any_of(omega0.begin(), omega0.end(), [](const Box& b) { return !degenerate(b); });
}

std::string DomainPartition::str() const {
  std::ostringstream os;
  auto list = [&](const std::vector<Box>& boxes) {
    if (boxes.empty()) return std::string("{}");
    std::string s;
    for (const auto& b : boxes) {
      if (!s.empty()) s += " U ";
      if (degenerate(b)) {
        s += "{";
        for (std::size_t i = 0; i < b.sides.size(); ++i) s += (i ? "," : "") + format_double(b.sides[i].lo);
        s += "}";
      } else {
        s += b.str();
      }
    }
    return s;
  };
  os << "omega0 = " << list(omega0) << ", omega1 = " << list(omega1) << (exact ? " (exact)" : " (sampled)");
  return os.str();
}

DomainPartition partition_domain(const ProblemSpec& problem, const SampleGrid& grid) {
  if (grid.points.empty()) throw Error("partition_domain: empty grid");
  DomainPartition part;
  double scale = 0.0;
  std::vector<double> norms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double n = 0.0;
    for (const auto& f : problem.field) n = std::max(n, std::fabs(f(grid.points[i])));
    norms[i] = n;
    if (std::isfinite(n)) scale = std::max(scale, n);
  }
  part.zero_tolerance = problem.tol.zero * scale;
  // F identically zero: everything is Omega0.
  const bool all_constant_zero = std::all_of(problem.field.begin(), problem.field.end(), [](const Expression& f) {
    const auto c = f.constant_value();
    return c && *c == 0.0;
  });

  if (all_constant_zero) {
    part.exact = true;
    part.omega0 = problem.domain.boxes();
    part.samples0 = grid.points;
    return part;
  }

  if (problem.dim() == 1 && problem.domain.boxes().size() == 1) {
    const auto& iv = problem.domain.as_interval();
    if (auto zeros = exact_zero_set(problem)) {
      part.exact = true;
      part.omega0 = *zeros;
      for (const auto& x : grid.points) {
        const bool in0 = std::any_of(zeros->begin(), zeros->end(), [&](const Box& b) {
          const auto& sd = b.sides.front();
          return x[0] >= sd.lo && x[0] <= sd.hi;
        });
        (in0 ? part.samples0 : part.samples1).push_back(x);
      }
    } else {
      // Group runs of consecutive zero samples; isolated zeros become points.
      std::vector<std::size_t> order(grid.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return grid.points[a][0] < grid.points[b][0]; });
      std::vector<bool> zero(grid.size(), false);
      std::size_t k = 0;
      while (k < order.size()) {
        if (norms[order[k]] > part.zero_tolerance) {
          ++k;
          continue;
        }
        std::size_t j = k;
        while (j + 1 < order.size() && norms[order[j + 1]] <= part.zero_tolerance) ++j;
        // A run against an excluded endpoint on which F never vanishes exactly is F -> 0 at the
        // boundary, not an equilibrium inside the domain.
        const bool at_end = (k == 0 && std::isfinite(iv.lo)) || (j + 1 == order.size() && std::isfinite(iv.hi));
        bool exact_zero = false;
        for (std::size_t m = k; m <= j; ++m) exact_zero = exact_zero || norms[order[m]] == 0.0;
        if (!(at_end && !exact_zero)) {
          const double lo = grid.points[order[k]][0], hi = grid.points[order[j]][0];
          part.omega0.push_back(Box{{{lo, hi}}});
          for (std::size_t m = k; m <= j; ++m) zero[order[m]] = true;
        }
        k = j + 1;
      }
      for (std::size_t i = 0; i < grid.size(); ++i) (zero[i] ? part.samples0 : part.samples1).push_back(grid.points[i]);
    }
    part.omega1 = complement_1d(iv, part.omega0);
    return part;
  }

  for (std::size_t i = 0; i < grid.size(); ++i)
    (norms[i] <= part.zero_tolerance ? part.samples0 : part.samples1).push_back(grid.points[i]);
  // N > 1 or several components: zero samples are reported as points.
  for (const auto& x : part.samples0) part.omega0.push_back(point_box(x));
  part.omega1 = problem.domain.boxes();
  return part;
}

bool ValidationReport::ok() const {
  return std::all_of(findings.begin(), findings.end(), [](const Finding& f) { return f.passed; });
}

const Finding* ValidationReport::first_failure() const {
  for (const auto& f : findings)
    if (!f.passed) return &f;
  return nullptr;
}

ValidationReport validate_hypotheses(const ProblemSpec& problem, double horizon) {
  ValidationReport report;
  report.horizon = horizon;
  GridSettings gs = problem.grid;
  gs.samples = std::min(gs.samples, 41);
  gs.samples_nd = std::min(gs.samples_nd, 8);
  const auto grid = sample_domain(problem.domain, gs);
  report.grid = grid.description;

  // (H1) F continuous: finite values; C^1: finite symbolic Jacobian.
  {
    Finding f{"field_finite", true, "F finite on " + std::to_string(grid.size()) + " samples"};
    for (const auto& x : grid.points)
      for (const auto& c : problem.field)
        if (!std::isfinite(c(x))) {
          f.passed = false;
          f.detail = "F not finite at x = " + format_double(x[0]);
          break;
        }
    report.findings.push_back(f);
  }
  {
    Finding f{"field_differentiable", true, "DF finite on samples"};
    try {
      for (const auto& c : problem.field) {
        for (int d = 0; d < problem.dim() && f.passed; ++d) {
          const auto dc = c.derivative(d);
          for (const auto& x : grid.points)
            if (!std::isfinite(dc(x))) {
              f.passed = false;
              f.detail = "DF not finite at x = " + format_double(x[0]);
              break;
            }
        }
      }
    } catch (const std::exception& e) {
      f.passed = false;
      f.detail = e.what();
    }
    report.findings.push_back(f);
  }

  Semiflow flow = Semiflow::from_problem(problem);
  // (H3) forward completeness.
  {
    Finding f{"forward_complete", true, "all probes stay in the domain up to t = " + format_double(horizon)};
    const double ts[] = {horizon};
    for (const auto& x : grid.points) {
      TransportPath path;
      try {
        path = flow.transport(x, ts, Direction::Forward);
      } catch (const std::exception& e) {
        f.passed = false;
        f.detail = std::string("probe failed: ") + e.what();
        break;
      }
      if (!path.samples[0].alive) {
        f.passed = false;
        std::ostringstream os;
        os << (path.blowup ? "blow-up" : "domain exit") << " from x = " << format_double(x[0]);
        if (x.size() > 1) os << ",...";
        if (path.exit_time) os << " at t = " << format_double(*path.exit_time);
        f.detail = os.str();
        break;
      }
    }
    report.findings.push_back(f);
  }
  // Injectivity: phi(t, .) strictly monotone on the 1D grid.
  if (problem.dim() == 1) {
    Finding f{"injective", true, "phi(t,.) strictly increasing on samples"};
    const double t = horizon / 2.0;
    const double ts[] = {t};
    auto xs = grid.line();
    std::sort(xs.begin(), xs.end());
    double prev = -INFINITY;
    for (double x : xs) {
      const auto path = flow.transport(std::span<const double>(&x, 1), ts, Direction::Forward);
      if (!path.samples[0].alive) continue;
      const double y = path.samples[0].point[0];
      // Ties are allowed: images of nearby points can coincide in floating point near an attractor.
      if (y < prev) {
        f.passed = false;
        f.detail = "phi(" + format_double(t) + ",.) not increasing near x = " + format_double(x);
        break;
      }
      prev = std::max(prev, y);
    }
    report.findings.push_back(f);
  } else {
    report.findings.push_back({"injective", true, "not probed for N > 1"});
  }
  return report;
}

}  // namespace semistab
