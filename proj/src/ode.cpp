#include "semistab/ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "semistab/error.hpp"

namespace semistab {

namespace odeint = boost::numeric::odeint;

AugmentedSystem::AugmentedSystem(std::vector<Expression> field, std::optional<Expression> integrand, int direction)
    : field_(std::move(field)), integrand_(std::move(integrand)), sign_(direction >= 0 ? 1.0 : -1.0) {
  const int n = dim();
  jac_.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jac_.push_back(field_[static_cast<std::size_t>(i)].derivative(j));
}

void AugmentedSystem::operator()(const std::vector<double>& s, std::vector<double>& ds, double) const {
  const std::size_t n = field_.size();
  const std::span<const double> y(s.data(), n);
  for (std::size_t i = 0; i < n; ++i) ds[i] = sign_ * field_[i](y);
  // D' = s * DF(y) * D
  double a[9];
  for (std::size_t i = 0; i < n * n; ++i) a[i] = sign_ * jac_[i](y);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * s[n + k * n + j];
      ds[n + i * n + j] = acc;
    }
  ds[n + n * n] = integrand_ ? (*integrand_)(y) : 0.0;
}

OdeResult AugmentedSystem::integrate(std::span<const double> x0, std::span<const double> times, const Domain& domain,
                                     const OdeSettings& settings) const {
  const std::size_t n = field_.size();
  if (n == 0 || n > 3) throw Error("numeric flows support dimensions 1 to 3");
  if (x0.size() != n) throw Error("initial point has the wrong dimension");

  std::vector<double> state(n + n * n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    state[i] = x0[i];
    state[n + i * n + i] = 1.0;
  }

  auto unpack = [&](const std::vector<double>& s) {
    OdeSample out;
    out.alive = true;
    out.y.assign(s.begin(), s.begin() + static_cast<long>(n));
    out.D.assign(s.begin() + static_cast<long>(n), s.begin() + static_cast<long>(n + n * n));
    out.integral = s[n + n * n];
    return out;
  };
  auto bad = [&](const std::vector<double>& s) {
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(s[i]) || std::fabs(s[i]) > settings.blowup) return true;
    for (std::size_t i = n; i < s.size(); ++i)
      if (!std::isfinite(s[i])) return true;
    return !domain.contains(std::span<const double>(s.data(), n), settings.margin);
  };
  auto blew_up = [&](const std::vector<double>& s) {
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(s[i]) || std::fabs(s[i]) > settings.blowup) return true;
    return false;
  };

  OdeResult result;
  result.samples.resize(times.size());
  std::size_t k = 0;
  while (k < times.size() && times[k] <= 0.0) result.samples[k++] = unpack(state);
  if (k == times.size()) return result;

  auto stepper = odeint::make_dense_output(settings.atol, settings.rtol, odeint::runge_kutta_dopri5<std::vector<double>>());
  stepper.initialize(state, 0.0, std::min(settings.initial_dt, times[k]));
  std::vector<double> tmp(state.size());
  long steps = 0;
  const auto& sys = *this;
  while (k < times.size()) {
    if (++steps > settings.max_steps) throw Error("ODE integration exceeded the step budget");
    std::pair<double, double> span;
    try {
      span = stepper.do_step(std::cref(sys));
    } catch (const std::exception&) {
      // Step-size control gave up: treat as a blow-up at the current time.
      result.exit_time = stepper.current_time();
      result.blowup = true;
      break;
    }
    const auto [t0, t1] = span;
    if (bad(stepper.current_state())) {
      double lo = t0, hi = t1;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, tmp);
        (bad(tmp) ? hi : lo) = mid;
      }
      result.exit_time = hi;
      result.blowup = blew_up(stepper.current_state());
      while (k < times.size() && times[k] < lo) {
        stepper.calc_state(times[k], tmp);
        result.samples[k++] = unpack(tmp);
      }
      break;
    }
    while (k < times.size() && times[k] <= t1) {
      stepper.calc_state(times[k], tmp);
      result.samples[k++] = unpack(tmp);
    }
  }
  return result;
}

}  // namespace semistab
