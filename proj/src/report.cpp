#include "semistab/report.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace semistab {

namespace {

// nlohmann writes NaN/inf as null; keep the information as strings instead.
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json point_json(const std::vector<double>& x) {
  json a = json::array();
  for (double v : x) a.push_back(num(v));
  return a;
}

std::string point_str(const std::vector<double>& x) {
  if (x.size() == 1) return format_double(x[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + format_double(x[i]);
  return s + ")";
}

}  // namespace

std::string csv_number(double v) { return format_double(v); }

json problem_json(const ProblemSpec& spec) {
  json j = json::object();
  std::istringstream in(serialize_problem(spec));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), value = line.substr(eq + 3);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (!value.empty() && end == value.c_str() + value.size() && std::isfinite(v))
      j[key] = v;
    else if (value == "true" || value == "false")
      j[key] = value == "true";
    else
      j[key] = value;
  }
  return j;
}

json to_json(const DecayEvidence& e) {
  json j;
  j["classification"] = to_string(e.classification);
  j["slope"] = num(e.slope);
  json s = json::array();
  for (const auto& [t, v] : e.samples) s.push_back({num(t), num(v)});
  j["samples"] = std::move(s);
  return j;
}

json to_json(const CriterionResult& c) {
  json j;
  j["id"] = c.id;
  j["outcome"] = to_string(c.outcome);
  j["detail"] = c.detail;
  json ev = json::object();
  for (const auto& [k, v] : c.evidence) ev[k] = num(v);
  j["evidence"] = std::move(ev);
  if (c.witness) j["witness"] = *c.witness;
  if (c.low_confidence) j["low_confidence"] = true;
  if (!c.decay.empty()) {
    json d = json::array();
    for (const auto& [x, e] : c.decay) {
      json item = to_json(e);
      item["at"] = point_json(x);
      d.push_back(std::move(item));
    }
    j["decay"] = std::move(d);
  }
  return j;
}

json to_json(const Verdict& v) {
  json j;
  j["status"] = to_string(v.status);
  j["method"] = v.method;
  if (v.witness) j["witness"] = *v.witness;
  j["grid"] = v.grid;
  j["horizon"] = num(v.horizon);
  json cs = json::array();
  for (const auto& c : v.criteria) cs.push_back(to_json(c));
  j["criteria"] = std::move(cs);
  if (v.admissibility) j["admissibility"] = to_json(*v.admissibility, false);
  if (!v.notes.empty()) j["notes"] = v.notes;
  return j;
}

json to_json(const AdmissibilityFit& f, bool with_curve) {
  json j;
  j["M"] = num(f.M);
  j["omega"] = num(f.omega);
  j["refuted"] = f.refuted;
  j["max_violation"] = num(f.max_violation);
  j["convexity"] = num(f.convexity);
  j["grid"] = f.grid;
  if (with_curve) {
    json c = json::array();
    for (std::size_t i = 0; i < f.times.size(); ++i) c.push_back({num(f.times[i]), num(f.log_sups[i])});
    j["log_sup_curve"] = std::move(c);
  }
  return j;
}

json to_json(const ValidationReport& r) {
  json j;
  j["ok"] = r.ok();
  j["horizon"] = num(r.horizon);
  j["grid"] = r.grid;
  json fs = json::array();
  for (const auto& f : r.findings) fs.push_back({{"check", f.check}, {"passed", f.passed}, {"detail", f.detail}});
  j["findings"] = std::move(fs);
  return j;
}

json to_json(const ThresholdPrediction& t) {
  json j;
  j["r"] = num(t.r);
  j["p"] = num(t.p);
  j["h0"] = num(t.h0);
  j["kappa"] = num(t.kappa);
  j["lp_threshold"] = num(t.lp_threshold);
  j["wstar_threshold"] = num(t.wstar_threshold);
  auto opt = [](const std::optional<Status>& s) -> json { return s ? json(to_string(*s)) : json(nullptr); };
  j["Lp"] = opt(t.lp);
  j["W1p_star"] = opt(t.wstar);
  j["W1p"] = opt(t.w);
  json ps = json::array();
  for (const auto& p : t.probes) ps.push_back({{"name", p.name}, {"passed", p.passed}, {"detail", p.detail}});
  j["probes"] = std::move(ps);
  return j;
}

json to_json(const HypercyclicityEvidence& e) {
  json j;
  j["candidate"] = e.candidate;
  j["omega0_null"] = e.omega0_null;
  j["detail"] = e.detail;
  if (!e.sequence.empty()) {
    j["sequence"] = {{"first", num(e.sequence.front())},
                     {"last", num(e.sequence.back())},
                     {"terms", e.sequence.size()}};
  }
  json pts = json::array();
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    json p;
    p["x"] = point_json(e.points[i]);
    if (i < e.component.size()) p["component"] = e.component[i];
    if (i < e.rho_plus_final.size()) p["rho_plus_ratio"] = num(e.rho_plus_final[i]);
    if (i < e.rho_minus_final.size()) p["rho_minus_ratio"] = num(e.rho_minus_final[i]);
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

json to_json(const TrichotomyReport& r) {
  json j;
  j["lambda"] = num(r.lambda);
  j["p"] = num(r.p);
  j["F_decreasing"] = r.decreasing;
  j["analytic_stable"] = r.analytic_stable;
  j["analytic_hypercyclic"] = r.analytic_hypercyclic ? json(*r.analytic_hypercyclic) : json(nullptr);
  j["numeric"] = to_json(r.numeric);
  j["hypercyclicity"] = to_json(r.hypercyclicity);
  j["consistent"] = r.consistent;
  j["flags"] = r.flags;
  return j;
}

json tolerances_json(const Tolerances& t) {
  return {{"tol_zero", t.zero},   {"tol_ode_rtol", t.ode_rtol}, {"tol_ode_atol", t.ode_atol},
          {"tol_quad", t.quad},   {"tol_domain", t.domain},     {"tol_flow", t.flow},
          {"slope_tol", t.slope}, {"value_tol", t.value},       {"divergence_threshold", t.divergence},
          {"convexity_tol", t.convexity}, {"fd_tol", t.fd}};
}

json to_json(const Report& r) {
  json j;
  j["problem"] = problem_json(r.problem);
  if (r.validation) j["validation"] = to_json(*r.validation);
  if (r.admissibility) j["admissibility"] = to_json(*r.admissibility);
  json vs = json::object();
  for (const auto& [space, v] : r.verdicts) vs[space] = to_json(v);
  j["verdicts"] = std::move(vs);
  const auto& g = r.problem.grid;
  j["metadata"] = {{"grid", r.grid},
                   {"horizon", num(r.horizon)},
                   {"samples", g.samples},
                   {"samples_nd", g.samples_nd},
                   {"time_samples", g.time_samples},
                   {"refine_rounds", g.refine_rounds},
                   {"refine_factor", g.refine_factor},
                   {"truncation", num(g.truncation)},
                   {"parallel", g.parallel},
                   {"threads", r.threads},
                   {"tolerances", tolerances_json(r.problem.tol)},
                   {"wall_time_s", num(r.wall_time)}};
  return j;
}

std::string render_text(const Verdict& v, const std::string& title) {
  std::ostringstream os;
  if (!title.empty()) os << title << ": ";
  os << to_string(v.status);
  if (v.witness) os << "  [witness: " << *v.witness << "]";
  os << "\n  method:  " << v.method << "\n  horizon: " << format_double(v.horizon) << "\n  grid:    " << v.grid
     << "\n";
  for (const auto& c : v.criteria) {
    os << "  - " << c.id << ": " << to_string(c.outcome) << (c.low_confidence ? " (low confidence)" : "") << "\n";
    if (!c.detail.empty()) os << "      " << c.detail << "\n";
    for (const auto& [k, x] : c.evidence) os << "      " << k << " = " << format_double(x) << "\n";
    if (c.witness) os << "      witness: " << *c.witness << "\n";
    std::size_t shown = 0;
    for (const auto& [x, e] : c.decay) {
      if (shown++ == 4) {
        os << "      ... " << c.decay.size() - 4 << " more\n";
        break;
      }
      os << "      at " << point_str(x) << ": " << to_string(e.classification)
         << ", slope " << format_double(e.slope) << "\n";
    }
  }
  for (const auto& n : v.notes) os << "  note: " << n << "\n";
  return os.str();
}

std::string render_text(const AdmissibilityFit& f) {
  std::ostringstream os;
  os << "admissibility: " << (f.refuted ? "REFUTED" : "fit") << "  M = " << format_double(f.M)
     << ", omega = " << format_double(f.omega) << "\n  max violation " << format_double(f.max_violation)
     << ", convexity " << format_double(f.convexity) << "\n  grid: " << f.grid << "\n";
  return os.str();
}

std::string render_text(const ValidationReport& r) {
  std::ostringstream os;
  os << "hypotheses: " << (r.ok() ? "ok" : "FAILED") << " (horizon " << format_double(r.horizon) << ")\n";
  for (const auto& f : r.findings)
    os << "  - " << f.check << ": " << (f.passed ? "pass" : "fail") << (f.detail.empty() ? "" : "  " + f.detail)
       << "\n";
  return os.str();
}

std::string render_text(const Report& r) {
  std::ostringstream os;
  os << "problem\n";
  std::istringstream in(serialize_problem(r.problem));
  for (std::string line; std::getline(in, line);) os << "  " << line << "\n";
  if (r.validation) os << render_text(*r.validation);
  if (r.admissibility) os << render_text(*r.admissibility);
  for (const auto& [space, v] : r.verdicts) os << render_text(v, space);
  os << "run: grid " << r.grid << ", horizon " << format_double(r.horizon) << ", threads " << r.threads
     << ", " << format_double(std::round(r.wall_time * 1000.0) / 1000.0) << " s\n";
  return os.str();
}

}  // namespace semistab
