#include "semistab/semiflow.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "semistab/error.hpp"
#include "semistab/quadrature.hpp"

namespace semistab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- closed-form families (1D) ----

double cf_field(const FamilySpec& f, double x) {
  switch (f.tag) {
    case Family::Translation: return f.v;
    case Family::Affine: return f.a + f.b * x;
    case Family::Lasota: return -x;
    case Family::LasotaR: return -std::pow(x, f.r);
  }
  return kNaN;
}

// phi(t, x) for signed t, assuming the trajectory exists up to |t|.
double cf_flow(const FamilySpec& f, double t, double x) {
  switch (f.tag) {
    case Family::Translation: return x + f.v * t;
    case Family::Affine: {
      if (f.b == 0.0) return x + f.a * t;
      const double xs = -f.a / f.b;
      return xs + (x - xs) * std::exp(f.b * t);
    }
    case Family::Lasota: return x * std::exp(-t);
    case Family::LasotaR: {
      if (f.r == 1.0) return x * std::exp(-t);
      return std::pow((f.r - 1.0) * t + std::pow(x, 1.0 - f.r), 1.0 / (1.0 - f.r));
    }
  }
  return kNaN;
}

double cf_jacobian(const FamilySpec& f, double t, double x) {
  switch (f.tag) {
    case Family::Translation: return 1.0;
    case Family::Affine: return std::exp(f.b * t);
    case Family::Lasota: return std::exp(-t);
    case Family::LasotaR: {
      if (f.r == 1.0) return std::exp(-t);
      return std::pow(1.0 + (f.r - 1.0) * t * std::pow(x, f.r - 1.0), -f.r / (f.r - 1.0));
    }
  }
  return kNaN;
}

// Time for the forward flow to carry a to b (b downstream of a). Infinite when b is an
// equilibrium or unreachable; ends may be infinite.
double cf_travel(const FamilySpec& f, double a, double b) {
  if (a == b) return 0.0;
  double t = kNaN;
  switch (f.tag) {
    case Family::Translation: t = (b - a) / f.v; break;
    case Family::Affine:
      if (f.b == 0.0) {
        t = (b - a) / f.a;
      } else {
        const double xs = -f.a / f.b;
        t = std::log((b - xs) / (a - xs)) / f.b;
      }
      break;
    case Family::Lasota: t = std::log(a / b); break;
    case Family::LasotaR:
      if (f.r == 1.0) t = std::log(a / b);
      else t = (std::pow(b, 1.0 - f.r) - std::pow(a, 1.0 - f.r)) / (f.r - 1.0);
      break;
  }
  if (std::isnan(t)) return INFINITY;
  return std::max(t, 0.0);
}

// Boundary (or equilibrium) the orbit of x approaches in the given time direction.
double cf_end(const FamilySpec& f, const Interval& iv, double x, double sign) {
  const double s = sign * cf_field(f, x);
  double end = s > 0 ? iv.hi : iv.lo;
  if (auto z = f.equilibrium()) {
    if (s > 0 && *z > x && *z < end) end = *z;
    if (s < 0 && *z < x && *z > end) end = *z;
  }
  return end;
}

double cf_exit_forward(const FamilySpec& f, const Interval& iv, double x) {
  if (cf_field(f, x) == 0.0) return INFINITY;
  return cf_travel(f, x, cf_end(f, iv, x, 1.0));
}

double cf_escape(const FamilySpec& f, const Interval& iv, double x) {
  if (cf_field(f, x) == 0.0) return INFINITY;
  return cf_travel(f, cf_end(f, iv, x, -1.0), x);
}

double determinant(const std::vector<double>& D, std::size_t n) {
  switch (n) {
    case 1: return D[0];
    case 2: return D[0] * D[3] - D[1] * D[2];
    case 3:
      return D[0] * (D[4] * D[8] - D[5] * D[7]) - D[1] * (D[3] * D[8] - D[5] * D[6]) +
             D[2] * (D[3] * D[7] - D[4] * D[6]);
    default: throw Error("determinant dimension unsupported");
  }
}

void append_bits(std::string& key, double v) {
  char buf[sizeof(double)];
  std::memcpy(buf, &v, sizeof(double));
  key.append(buf, sizeof(double));
}

}  // namespace

struct Semiflow::State {
  Kind kind = Kind::ClosedForm;
  Domain domain;
  std::optional<FamilySpec> family;
  std::vector<Expression> field;
  OdeSettings ode;
  double tol_domain = 1e-9;
  FlowClosure flow_closure;
  JacobianClosure jacobian_closure;

  mutable std::shared_mutex cache_mutex;
  mutable std::unordered_map<std::string, TransportPath> cache;
  mutable std::atomic<bool> cache_enabled{true};
  static constexpr std::size_t kCacheLimit = 200000;

  const Interval& component(double x) const {
    const int c = domain.component_of(std::span<const double>(&x, 1));
    if (c < 0) throw Error("point " + format_double(x) + " is outside the domain " + domain.str());
    return domain.boxes()[static_cast<std::size_t>(c)].sides.front();
  }
};

Semiflow::Semiflow(std::shared_ptr<State> state) : s_(std::move(state)) {}

Semiflow Semiflow::closed_form(const FamilySpec& family, Domain domain, double tol_domain) {
  if (domain.dim() != 1) throw Error("closed-form families are one-dimensional");
  auto s = std::make_shared<State>();
  s->kind = Kind::ClosedForm;
  s->domain = std::move(domain);
  s->family = family;
  s->field = {family.field()};
  s->tol_domain = tol_domain;
  return Semiflow(s);
}

Semiflow Semiflow::numeric(std::vector<Expression> field, Domain domain, OdeSettings settings, double tol_domain) {
  if (static_cast<int>(field.size()) != domain.dim()) throw Error("vector field and domain dimensions differ");
  auto s = std::make_shared<State>();
  s->kind = Kind::Numeric;
  s->domain = std::move(domain);
  s->field = std::move(field);
  s->ode = settings;
  s->tol_domain = tol_domain;
  return Semiflow(s);
}

Semiflow Semiflow::closure(Domain domain, FlowClosure flow, JacobianClosure jacobian, std::vector<Expression> field,
                           double tol_domain) {
  auto s = std::make_shared<State>();
  s->kind = Kind::Closure;
  s->domain = std::move(domain);
  s->flow_closure = std::move(flow);
  s->jacobian_closure = std::move(jacobian);
  s->field = std::move(field);
  s->tol_domain = tol_domain;
  return Semiflow(s);
}

Semiflow Semiflow::from_problem(const ProblemSpec& problem, bool force_numeric) {
  if (problem.family && !force_numeric) return closed_form(*problem.family, problem.domain, problem.tol.domain);
  OdeSettings ode;
  ode.rtol = problem.tol.ode_rtol;
  ode.atol = problem.tol.ode_atol;
  return numeric(problem.field, problem.domain, ode, problem.tol.domain);
}

Semiflow::Kind Semiflow::kind() const { return s_->kind; }
int Semiflow::dim() const { return s_->domain.dim(); }
const Domain& Semiflow::domain() const { return s_->domain; }
const std::optional<FamilySpec>& Semiflow::family() const { return s_->family; }
double Semiflow::tol_domain() const { return s_->tol_domain; }

TransportPath Semiflow::transport(std::span<const double> x, std::span<const double> times, Direction direction,
                                  const std::optional<Expression>& integrand) const {
  const State& s = *s_;
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  TransportPath path;
  path.samples.resize(times.size());

  if (s.kind == Kind::ClosedForm) {
    const double x0 = x[0];
    const Interval& iv = s.component(x0);
    const double limit = direction == Direction::Forward ? cf_exit_forward(*s.family, iv, x0) : cf_escape(*s.family, iv, x0);
    if (std::isfinite(limit)) path.exit_time = limit;
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double t = times[k];
      if (!(t < limit)) break;
      Transported& out = path.samples[k];
      out.alive = true;
      out.point = {cf_flow(*s.family, sign * t, x0)};
      out.jacobian = cf_jacobian(*s.family, sign * t, x0);
      if (integrand && t > prev) {
        if (auto c = integrand->constant_value()) {
          acc += *c * (t - prev);
        } else {
          auto g = [&](double u) {
            const double y = cf_flow(*s.family, sign * u, x0);
            return (*integrand)(y);
          };
          acc += integrate_smooth(g, prev, t, 1e-12).value;
        }
      }
      prev = t;
      out.integral = acc;
    }
    return path;
  }

  if (s.kind == Kind::Closure) {
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double t = times[k];
      auto y = s.flow_closure(sign * t, x);
      if (!y || !s.domain.contains(*y, direction == Direction::Forward ? -s.tol_domain : s.tol_domain)) {
        path.exit_time = t;
        break;
      }
      Transported& out = path.samples[k];
      out.alive = true;
      out.point = *y;
      out.jacobian = s.jacobian_closure(sign * t, x);
      if (integrand && t > prev) {
        if (auto c = integrand->constant_value()) {
          acc += *c * (t - prev);
        } else {
          auto g = [&](double u) {
            auto yu = s.flow_closure(sign * u, x);
            return yu ? (*integrand)(*yu) : kNaN;
          };
          acc += integrate_smooth(g, prev, t, 1e-12).value;
        }
      }
      prev = t;
      out.integral = acc;
    }
    return path;
  }

  // Numeric: consult the cache first.
  std::string key;
  if (s.cache_enabled) {
    key.reserve(16 + 8 * (x.size() + times.size()));
    key.push_back(direction == Direction::Forward ? 'f' : 'b');
    for (double v : x) append_bits(key, v);
    key.push_back('|');
    for (double v : times) append_bits(key, v);
    key.push_back('|');
    if (integrand) key += integrand->str();
    std::shared_lock lock(s.cache_mutex);
    if (auto it = s.cache.find(key); it != s.cache.end()) return it->second;
  }

  OdeSettings settings = s.ode;
  settings.margin = direction == Direction::Forward ? -s.tol_domain : s.tol_domain;
  AugmentedSystem sys(s.field, integrand, direction == Direction::Forward ? 1 : -1);
  const OdeResult r = sys.integrate(x, times, s.domain, settings);
  path.exit_time = r.exit_time;
  path.blowup = r.blowup;
  const std::size_t n = s.field.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const OdeSample& in = r.samples[k];
    if (!in.alive) continue;
    Transported& out = path.samples[k];
    out.alive = true;
    out.point = in.y;
    out.jacobian = determinant(in.D, n);
    out.integral = in.integral;
  }

  if (s.cache_enabled) {
    std::unique_lock lock(s.cache_mutex);
    if (s.cache.size() >= State::kCacheLimit) s.cache.clear();
    s.cache.emplace(std::move(key), path);
  }
  return path;
}

std::vector<double> Semiflow::flow(double t, std::span<const double> x) const {
  if (t < 0.0) throw Error("flow requires t >= 0; use inverse_flow for negative times");
  if (t == 0.0) return std::vector<double>(x.begin(), x.end());
  const double ts[] = {t};
  auto path = transport(x, ts, Direction::Forward);
  if (!path.samples[0].alive) throw DomainExit(path.exit_time.value_or(t), path.blowup);
  return path.samples[0].point;
}

double Semiflow::flow(double t, double x) const { return flow(t, std::span<const double>(&x, 1)).front(); }

std::optional<std::vector<double>> Semiflow::inverse_flow(double t, std::span<const double> x) const {
  if (t < 0.0) throw Error("inverse_flow requires t >= 0");
  if (!s_->domain.contains(x)) return std::nullopt;
  if (t == 0.0) return std::vector<double>(x.begin(), x.end());
  const double ts[] = {t};
  auto path = transport(x, ts, Direction::Backward);
  if (!path.samples[0].alive) return std::nullopt;
  return path.samples[0].point;
}

std::optional<double> Semiflow::inverse_flow(double t, double x) const {
  auto y = inverse_flow(t, std::span<const double>(&x, 1));
  if (!y) return std::nullopt;
  return y->front();
}

double Semiflow::flow_jacobian(double t, std::span<const double> x) const {
  if (t == 0.0) return 1.0;
  const double ts[] = {std::fabs(t)};
  auto path = transport(x, ts, t > 0 ? Direction::Forward : Direction::Backward);
  if (!path.samples[0].alive) throw DomainExit(path.exit_time.value_or(std::fabs(t)), path.blowup);
  return path.samples[0].jacobian;
}

double Semiflow::flow_jacobian(double t, double x) const { return flow_jacobian(t, std::span<const double>(&x, 1)); }

bool Semiflow::image_indicator(double t, std::span<const double> x) const { return inverse_flow(t, x).has_value(); }

bool Semiflow::image_indicator(double t, double x) const { return image_indicator(t, std::span<const double>(&x, 1)); }

std::optional<double> Semiflow::escape_time(std::span<const double> x, double horizon) const {
  const State& s = *s_;
  if (!s.domain.contains(x)) return 0.0;
  if (s.kind == Kind::ClosedForm) {
    const double te = cf_escape(*s.family, s.component(x[0]), x[0]);
    if (std::isfinite(te) && te <= horizon) return te;
    return std::nullopt;
  }
  if (!std::isfinite(horizon)) throw Error("numeric escape times need a finite horizon");
  if (s.kind == Kind::Numeric) {
    const double ts[] = {horizon};
    auto path = transport(x, ts, Direction::Backward);
    if (path.exit_time && *path.exit_time <= horizon) return *path.exit_time;
    return std::nullopt;
  }
  // Closures: doubling scan, then bisection on the indicator.
  double lo = 0.0, hi = std::min(horizon, 1e-3);
  while (image_indicator(hi, x)) {
    if (hi >= horizon) return std::nullopt;
    lo = hi;
    hi = std::min(horizon, 2.0 * hi);
  }
  for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (image_indicator(mid, x) ? lo : hi) = mid;
  }
  return hi;
}

std::optional<double> Semiflow::escape_time(double x, double horizon) const {
  return escape_time(std::span<const double>(&x, 1), horizon);
}

Interval Semiflow::image_interval(double t) const {
  const State& s = *s_;
  const Interval& iv = s.domain.as_interval();
  if (t == 0.0) return iv;
  if (s.kind == Kind::ClosedForm) {
    double lo = cf_flow(*s.family, t, iv.lo);
    double hi = cf_flow(*s.family, t, iv.hi);
    if (std::isnan(lo)) lo = iv.lo;
    if (std::isnan(hi)) hi = iv.hi;
    return Interval{std::max(lo, iv.lo), std::min(hi, iv.hi)};
  }
  auto end_image = [&](double e, double inward) {
    if (!std::isfinite(e)) return e;
    double fe = 0.0;
    if (!s.field.empty()) fe = s.field.front()(e);
    if (fe * inward <= 0.0) return e;  // equilibrium or outward-pointing end
    try {
      return flow(t, e);
    } catch (const DomainExit&) {
      return e;
    }
  };
  return Interval{end_image(iv.lo, 1.0), end_image(iv.hi, -1.0)};
}

void Semiflow::set_cache_enabled(bool enabled) const {
  std::unique_lock lock(s_->cache_mutex);
  s_->cache_enabled = enabled;
  if (!enabled) s_->cache.clear();
}

std::size_t Semiflow::cache_size() const {
  std::shared_lock lock(s_->cache_mutex);
  return s_->cache.size();
}

}  // namespace semistab
