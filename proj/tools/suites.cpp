#include "suites.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "semistab/grid.hpp"
#include "semistab/lasota.hpp"
#include "semistab/sobolev.hpp"
#include "semistab/stability.hpp"

namespace semistab::suites {

namespace {

std::string opt(const std::optional<Status>& s) { return s ? to_string(*s) : "n/a"; }

Row compare(std::string label, const std::optional<Status>& predicted, const Verdict& v) {
  Row row{std::move(label), opt(predicted), to_string(v.status), predicted && *predicted == v.status, {}};
  if (v.witness) row.note = *v.witness;
  return row;
}

Verdict classify(const ProblemSpec& pr) { return classify_stability(pr, pr.grid.horizon, sample_domain(pr.domain, pr.grid)); }

std::string lbl(const std::string& head, std::initializer_list<std::pair<const char*, double>> kv) {
  std::string s = head;
  for (const auto& [k, v] : kv) s += " " + std::string(k) + "=" + format_double(std::round(v * 1e6) / 1e6);
  return s;
}

std::vector<Row> lasota_lp() {
  std::vector<Row> rows;
  for (double p : {1.0, 2.0, 4.0})
    for (double c : {-1.0 / p - 0.1, -1.0 / p, -1.0 / p + 0.1}) {
      const auto lp = LasotaProblem::constant(1.0, c, p);
      rows.push_back(compare(lbl("r=1", {{"p", p}, {"c", c}}), lasota_threshold(lp).lp, classify(lp.to_problem())));
    }
  return rows;
}

std::vector<Row> generalized() {
  std::vector<Row> rows;
  for (double r : {2.0, 3.0})
    for (double p : {1.0, 2.0})
      for (double k : {-r / p - 0.1, -r / p, -r / p + 0.1}) {
        const auto lp = LasotaProblem::leading(r, k, p);
        rows.push_back(compare(lbl("h=k x^(r-1)", {{"r", r}, {"p", p}, {"k", k}}), lasota_threshold(lp).lp,
                               classify(lp.to_problem())));
      }
  // product flow on the unit square: threshold -2/p
  for (double c : {-1.1, -1.0, -0.9}) {
    auto pr = parse_problem("domain = (0,1)x(0,1)\nF_expr = -x; -y\nh_const = " + format_double(c) + "\np = 2\n");
    const auto v = classify_stability_general(pr, pr.grid.horizon, default_test_boxes(pr.domain),
                                              sample_domain(pr.domain, pr.grid));
    rows.push_back(compare(lbl("F=(-x,-y)", {{"p", 2.0}, {"c", c}}),
                           c <= -1.0 ? Status::Stable : Status::Unstable, v));
  }
  return rows;
}

std::vector<Row> lasota_sobolev() {
  std::vector<Row> rows;
  const double p = 2.0;
  auto run_case = [&](double r, double c) {
    const auto lp = LasotaProblem::constant(r, c, p, Space::W1pStar);
    const auto pred = lasota_threshold(lp);
    const auto pr = lp.to_problem();
    const auto [star, full] = classify_stability_sobolev(pr, pr.grid.horizon, sample_domain(pr.domain, pr.grid));
    rows.push_back(compare(lbl("W1p_star", {{"r", r}, {"p", p}, {"c", c}}), pred.wstar, star));
    rows.push_back(compare(lbl("W1p", {{"r", r}, {"p", p}, {"c", c}}), pred.w, full));
  };
  for (double c : {-0.1, 0.0, 0.25, 0.5, 0.6}) run_case(1.0, c);
  for (double c : {-0.1, 0.0, 0.1}) run_case(2.0, c);
  return rows;
}

std::vector<Row> hypercyclicity() {
  std::vector<Row> rows;
  auto add = [&](const FamilySpec& fam, std::optional<Domain> dom, double lambda, const char* tag, double horizon) {
    const auto rep = stability_vs_hypercyclicity(fam, lambda, 2.0, horizon, dom);
    Row row;
    row.label = lbl(tag, {{"p", 2.0}, {"lambda", lambda}});
    row.prediction = std::string(rep.analytic_stable ? "Stable" : "Unstable");
    if (rep.analytic_hypercyclic) row.prediction += *rep.analytic_hypercyclic ? ", candidate" : ", not candidate";
    row.engine = to_string(rep.numeric.status) + (rep.hypercyclicity.candidate ? ", candidate" : ", not candidate");
    row.agree = rep.consistent;
    for (const auto& f : rep.flags) row.note += (row.note.empty() ? "" : "; ") + f;
    rows.push_back(std::move(row));
  };
  for (double lambda : {-1.0, -0.75, -0.5, -0.25, 0.0}) add(FamilySpec::lasota(), std::nullopt, lambda, "F=-x", 20.0);
  // increasing field F = x on (0,inf): stability only; lambda = -1/p is an isometry and left out.
  // The stability integral is -(lambda + 1/p) t, so reaching the divergence threshold takes a long horizon.
  for (double lambda : {-1.0, -0.75, -0.25, 0.0})
    add(FamilySpec::affine(0.0, 1.0), Domain::interval(0.0, INFINITY), lambda, "F=x on (0,inf)", 100.0);
  return rows;
}

// The worked examples state iff-conditions directly in terms of rho:
//   translation   sup_{x,t} rho(x-t)/rho(x) < inf           and rho(x) -> 0 as x -> -inf
//   F = 1 - x     sup_{x,t} rho(1+(x-1)e^t) e^t/rho(x) < inf  and rho(r) r -> 0 as |r| -> inf
// Evaluated here on sample points, independently of the engine's rho_{t,p} machinery.
struct ExampleCheck {
  bool bounded = false, vanishes = false;
  std::string detail;
};

ExampleCheck example_conditions(const std::function<double(double, double)>& ratio,
                                const std::function<double(double)>& tail, std::vector<double> ends) {
  std::vector<double> xs = sample_interval(Interval{-INFINITY, INFINITY}, 121);
  for (int k = 1; k <= 10; ++k) {
    xs.push_back(1.0 + std::pow(10.0, -k));
    xs.push_back(1.0 - std::pow(10.0, -k));
  }
  double early = 0.0, late = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.5 * i;
    for (double x : xs) {
      const double v = ratio(x, t);
      if (!std::isfinite(v)) continue;
      (t <= 10.0 ? early : late) = std::max(t <= 10.0 ? early : late, v);
    }
  }
  ExampleCheck c;
  c.bounded = late <= 10.0 * early;
  bool vanish = true;
  for (double sgn : ends) {
    double prev = INFINITY;
    const double first = std::fabs(tail(sgn * 1e2));
    for (int k = 2; k <= 8; ++k) {
      const double v = std::fabs(tail(sgn * std::pow(10.0, k)));
      vanish = vanish && v <= prev;
      prev = v;
    }
    vanish = vanish && prev < 1e-3 * first;
  }
  c.vanishes = vanish;
  c.detail = "sup ratio t<=10: " + format_double(early) + ", 10<t<=20: " + format_double(late) +
             (c.vanishes ? "; tail -> 0" : "; tail does not vanish");
  return c;
}

std::vector<Row> examples_sec2() {
  std::vector<Row> rows;
  auto run_case = [&](const std::string& label, const std::string& cfg, const ExampleCheck& chk) {
    const auto pr = parse_problem(cfg);
    const Status predicted = chk.bounded && chk.vanishes ? Status::Stable : Status::Unstable;
    Row row = compare(label, predicted, classify(pr));
    row.note = chk.detail + (row.note.empty() ? "" : "; engine: " + row.note);
    rows.push_back(std::move(row));
  };
  auto translation = [](std::function<double(double)> rho) {
    return example_conditions([rho](double x, double t) { return rho(x - t) / rho(x); }, rho, {-1.0});
  };
  auto contraction = [](std::function<double(double)> rho) {
    return example_conditions([rho](double x, double t) { return rho(1.0 + (x - 1.0) * std::exp(t)) * std::exp(t) / rho(x); },
                              [rho](double r) { return rho(r) * r; }, {-1.0, 1.0});
  };
  run_case("translation, rho = e^x", "family = translation\nh_const = 0\nrho_expr = exp(x)\np = 2\n",
           translation([](double x) { return std::exp(x); }));
  run_case("translation, rho = 1", "family = translation\nh_const = 0\np = 2\n",
           translation([](double) { return 1.0; }));
  // Continuous positive rho cannot satisfy the bound near x = 1, where the ratio is e^t.
  run_case("F = 1 - x, rho = (1+|x-1|)^-3",
           "family = affine\na = 1\nb = -1\nh_const = 0\nrho_expr = (1+abs(x-1))^(-3)\np = 2\n",
           contraction([](double x) { return std::pow(1.0 + std::fabs(x - 1.0), -3.0); }));
  // ...a weight with a |x-1|^-1 singularity does (C = 1).
  run_case("F = 1 - x, rho = |x-1|^-1 (1+|x-1|)^-1",
           "family = affine\na = 1\nb = -1\nh_const = 0\nrho_expr = abs(x-1)^(-1)*(1+abs(x-1))^(-1)\np = 2\n",
           contraction([](double x) { return 1.0 / (std::fabs(x - 1.0) * (1.0 + std::fabs(x - 1.0))); }));
  return rows;
}

const std::map<std::string, std::function<std::vector<Row>()>>& table() {
  static const std::map<std::string, std::function<std::vector<Row>()>> t = {
      {"lasota_lp", lasota_lp},
      {"lasota_sobolev", lasota_sobolev},
      {"generalized", generalized},
      {"hypercyclicity", hypercyclicity},
      {"examples_sec2", examples_sec2},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"lasota_lp", "lasota_sobolev", "generalized", "hypercyclicity",
                                             "examples_sec2"};
  return n;
}

std::vector<Row> run(const std::string& suite) {
  const auto it = table().find(suite);
  if (it == table().end()) throw std::invalid_argument("unknown suite '" + suite + "'");
  return it->second();
}

}  // namespace semistab::suites
