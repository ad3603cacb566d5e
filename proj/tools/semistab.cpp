// semistab: stability and hypercyclicity analysis of weighted composition semigroups.
//
// exit codes
//   analyze         0 Stable, 1 Unstable, 2 Inconclusive
//   hypercyclicity  0 candidate, 1 not a candidate
//   reproduce       0 all rows agree, 1 some row disagrees
//   admissibility   0 fit holds, 1 refuted
//   simulate        0
//   any verb        3 usage / config / IO error, 4 numerical or hypothesis failure

#include <omp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "semistab/error.hpp"
#include "semistab/lasota.hpp"
#include "semistab/report.hpp"
#include "semistab/sobolev.hpp"
#include "suites.hpp"

using namespace semistab;

namespace {

constexpr int kUsage = 3;
constexpr int kNumerical = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerance / grid flags. Each writes into a copy of the defaults and is applied only when given.
struct Overrides {
  Tolerances tol;
  GridSettings grid;
  std::vector<std::pair<CLI::Option*, std::function<void(ProblemSpec&)>>> set;
  bool serial = false;
  int threads = 0;

  void attach(CLI::App* app) {
    auto real = [&](const char* name, double& slot, const char* help, std::function<void(ProblemSpec&)> apply) {
      auto* o = app->add_option(name, slot, help)->capture_default_str()->group("Tolerances and grids");
      set.emplace_back(o, std::move(apply));
    };
    real("--tol-zero", tol.zero, "|F| <= tol_zero * max|F| counts as an equilibrium",
         [this](ProblemSpec& s) { s.tol.zero = tol.zero; });
    real("--tol-ode-rtol", tol.ode_rtol, "ODE relative tolerance",
         [this](ProblemSpec& s) { s.tol.ode_rtol = tol.ode_rtol; });
    real("--tol-ode-atol", tol.ode_atol, "ODE absolute tolerance",
         [this](ProblemSpec& s) { s.tol.ode_atol = tol.ode_atol; });
    real("--tol-quad", tol.quad, "quadrature tolerance", [this](ProblemSpec& s) { s.tol.quad = tol.quad; });
    real("--tol-domain", tol.domain, "distance to the boundary treated as exit",
         [this](ProblemSpec& s) { s.tol.domain = tol.domain; });
    real("--tol-flow", tol.flow, "flow consistency tolerance",
         [this](ProblemSpec& s) { s.tol.flow = tol.flow; });
    real("--slope-tol", tol.slope, "log-slope below which a curve counts as flat",
         [this](ProblemSpec& s) { s.tol.slope = tol.slope; });
    real("--value-tol", tol.value, "final/initial ratio below which a curve counts as decayed",
         [this](ProblemSpec& s) { s.tol.value = tol.value; });
    real("--divergence-threshold", tol.divergence, "|integral| beyond which it counts as divergent",
         [this](ProblemSpec& s) { s.tol.divergence = tol.divergence; });
    real("--convexity-tol", tol.convexity, "late-minus-early slope refuting an exponential bound",
         [this](ProblemSpec& s) { s.tol.convexity = tol.convexity; });
    real("--fd-tol", tol.fd, "finite-difference tolerance", [this](ProblemSpec& s) { s.tol.fd = tol.fd; });
    real("--horizon", grid.horizon, "time horizon",
         [this](ProblemSpec& s) { s.grid.horizon = grid.horizon; });
    real("--truncation", grid.truncation, "|x| beyond which infinite sides are sampled geometrically",
         [this](ProblemSpec& s) { s.grid.truncation = grid.truncation; });
    auto integer = [&](const char* name, int& slot, const char* help, std::function<void(ProblemSpec&)> apply) {
      auto* o = app->add_option(name, slot, help)->capture_default_str()->group("Tolerances and grids");
      o->check(CLI::PositiveNumber);
      set.emplace_back(o, std::move(apply));
    };
    integer("--samples", grid.samples, "spatial samples (1D)",
            [this](ProblemSpec& s) { s.grid.samples = grid.samples; });
    integer("--samples-nd", grid.samples_nd, "samples per dimension when N > 1",
            [this](ProblemSpec& s) { s.grid.samples_nd = grid.samples_nd; });
    integer("--time-samples", grid.time_samples, "time samples",
            [this](ProblemSpec& s) { s.grid.time_samples = grid.time_samples; });
    integer("--refine-rounds", grid.refine_rounds, "argmax refinement rounds",
            [this](ProblemSpec& s) { s.grid.refine_rounds = grid.refine_rounds; });
    integer("--refine-factor", grid.refine_factor, "points per refinement round",
            [this](ProblemSpec& s) { s.grid.refine_factor = grid.refine_factor; });
    app->add_flag("--serial", serial, "run the serial reference kernels");
    app->add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  }

  ProblemSpec load(const std::string& path) const {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ProblemSpec spec = parse_problem(buf.str());
    for (const auto& [opt, apply] : set)
      if (opt->count()) apply(spec);
    if (serial) spec.grid.parallel = false;
    if (threads > 0) omp_set_num_threads(threads);
    if (!(spec.grid.horizon > 0.0)) throw ParseError("horizon must be positive", 0, "horizon");
    check_invariants(spec);
    return spec;
  }
};

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Output {
  std::string path;
  std::ostream& stream() {
    if (path.empty()) return std::cout;
    if (!file.is_open()) {
      file.open(path);
      if (!file) throw UsageError("cannot write '" + path + "'");
    }
    return file;
  }
  std::ofstream file;
};

int status_code(Status s) { return s == Status::Stable ? 0 : s == Status::Unstable ? 1 : 2; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- analyze ---------------------------------------------------------------------------------------

int analyze(const Overrides& ov, const std::string& config, bool as_json, Output& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec spec = ov.load(config);
  const double T = spec.grid.horizon;
  Report rep;
  rep.problem = spec;
  rep.horizon = T;
  rep.threads = spec.grid.parallel ? omp_get_max_threads() : 1;

  rep.validation = validate_hypotheses(spec, T);
  const auto grid = sample_domain(spec.domain, spec.grid);
  rep.grid = grid.description;

  int code = 2;
  std::string failure;
  try {
    if (!rep.validation->ok()) {
      const auto* f = rep.validation->first_failure();
      throw HypothesisError("standing hypothesis '" + f->check + "' failed: " + f->detail);
    }
    if (spec.space == Space::Lp) {
      rep.admissibility = WeightEvolution(spec).admissibility_fit(T, grid);
      const Verdict v = classify_stability(spec, T, grid);
      rep.verdicts[to_string(Space::Lp)] = v;
      code = status_code(v.status);
    } else {
      auto [star, full] = classify_stability_sobolev(spec, T, grid);
      rep.admissibility = star.admissibility;
      code = status_code(spec.space == Space::W1pStar ? star.status : full.status);
      rep.verdicts[to_string(Space::W1pStar)] = std::move(star);
      rep.verdicts[to_string(Space::W1p)] = std::move(full);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    failure = e.what();
    code = kNumerical;
  }
  rep.wall_time = seconds_since(t0);

  auto& os = out.stream();
  if (as_json) {
    json j = to_json(rep);
    if (!failure.empty()) j["error"] = failure;
    os << j.dump(2) << "\n";
  } else {
    os << render_text(rep);
    if (!failure.empty()) os << "error: " << failure << "\n";
  }
  if (!failure.empty()) std::cerr << "semistab: " << failure << "\n";
  return code;
}

// ---- simulate --------------------------------------------------------------------------------------

int simulate(const Overrides& ov, const std::string& config, const std::string& function, int steps, bool sobolev,
             bool as_json, Output& out) {
  ProblemSpec spec = ov.load(config);
  if (spec.dim() != 1 || spec.domain.boxes().size() != 1) throw UsageError("simulate works on a single interval");
  if (steps < 1) throw UsageError("steps must be >= 1");
  const double T = spec.grid.horizon;
  const auto& iv = spec.domain.as_interval();
  const Expression fe = Expression::parse(function, 1);

  std::vector<double> times(static_cast<std::size_t>(steps) + 1), norms(times.size());
  for (int i = 0; i <= steps; ++i) times[static_cast<std::size_t>(i)] = T * i / steps;

  auto not_in_space = [&](const SampledFunction& f, const DivergentIntegral& e, const std::string& space) {
    std::string msg = "f = " + function + " is not in " + space;
    if (const auto& s = f.singularity())
      msg += ": |f| ~ |x - " + format_double(s->at) + "|^(-" + format_double(s->exponent) + ") and alpha p = " +
             format_double(s->exponent * spec.p) + " >= 1";
    else
      msg += std::string(": ") + e.what();
    return UsageError(msg);
  };

  if (!sobolev) {
    if (spec.space != Space::Lp) throw UsageError("config selects a Sobolev space; pass --sobolev");
    const WeightEvolution we(spec);
    const SampledFunction f = function_on_interval(fe, iv);
    try {
      norms[0] = lp_norm(spec, f);
    } catch (const DivergentIntegral& e) {
      throw not_in_space(f, e, "L^" + format_double(spec.p) + "_rho");
    }
    for (std::size_t i = 1; i < times.size(); ++i) norms[i] = lp_norm(spec, we.apply_semigroup(times[i], f));
  } else {
    if (spec.space == Space::Lp) throw UsageError("--sobolev needs space = W1p or W1p_star in the config");
    const WeightEvolution we(spec);
    const SobolevFunction f{function_on_interval(fe, iv), function_on_interval(fe.derivative(0), iv)};
    if (spec.space == Space::W1pStar && std::fabs(f.value(iv.lo)) > spec.tol.value)
      throw UsageError("f(a) = " + format_double(f.value(iv.lo)) + " != 0, so f is not in W1p_star");
    try {
      norms[0] = sobolev_norm(spec, f);
    } catch (const DivergentIntegral& e) {
      throw not_in_space(f.derivative, e, "W^{1," + format_double(spec.p) + "} (derivative)");
    }
    for (std::size_t i = 1; i < times.size(); ++i)
      norms[i] = sobolev_norm(spec, apply_semigroup_sobolev(we, times[i], f));
  }

  auto& os = out.stream();
  if (as_json) {
    json j;
    j["problem"] = problem_json(spec);
    j["function"] = function;
    j["norm"] = sobolev ? "sobolev" : "lp";
    json rows = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({{"t", times[i]}, {"norm", norms[i]}});
    j["curve"] = std::move(rows);
    const auto ev = classify_decay(times, norms, spec.tol.slope, spec.tol.value);
    j["decay"] = {{"classification", to_string(ev.classification)}, {"slope", ev.slope}};
    os << j.dump(2) << "\n";
  } else {
    os << "# generated " << timestamp() << "\n" << "t,norm\n";
    for (std::size_t i = 0; i < times.size(); ++i) os << csv_number(times[i]) << "," << csv_number(norms[i]) << "\n";
  }
  return 0;
}

// ---- admissibility ---------------------------------------------------------------------------------

int admissibility(const Overrides& ov, const std::string& config, bool as_json, bool as_csv, Output& out) {
  ProblemSpec spec = ov.load(config);
  if (spec.space != Space::Lp) spec = conjugate_problem(spec);
  const WeightEvolution we(spec);
  const auto grid = sample_domain(spec.domain, spec.grid);
  const auto fit = we.admissibility_fit(spec.grid.horizon, grid);
  auto& os = out.stream();
  if (as_csv) {
    os << "# generated " << timestamp() << "\n" << "t,norm\n";
    for (std::size_t i = 0; i < fit.times.size(); ++i)
      os << csv_number(fit.times[i]) << "," << csv_number(std::exp(fit.log_sups[i] / spec.p)) << "\n";
  } else if (as_json) {
    json j;
    j["problem"] = problem_json(spec);
    j["admissibility"] = to_json(fit);
    os << j.dump(2) << "\n";
  } else {
    os << render_text(fit);
  }
  return fit.refuted ? 1 : 0;
}

// ---- hypercyclicity --------------------------------------------------------------------------------

int hypercyclicity(const Overrides& ov, const std::string& config, double delta, int terms, bool as_json,
                   Output& out) {
  ProblemSpec spec = ov.load(config);
  if (spec.space != Space::Lp) throw UsageError("the hypercyclicity criterion is evaluated on L^p_rho");
  SequenceSpec seq{spec.grid.seq_delta, spec.grid.seq_terms};
  if (delta > 0.0) seq.delta = delta;
  if (terms > 0) seq.terms = terms;
  const WeightEvolution we(spec);
  const auto ev = hypercyclicity_check(we, seq);
  auto& os = out.stream();
  if (as_json) {
    json j;
    j["problem"] = problem_json(spec);
    j["hypercyclicity"] = to_json(ev);
    os << j.dump(2) << "\n";
  } else {
    os << (ev.candidate ? "candidate" : "not a candidate") << "\n  " << ev.detail << "\n  t_n = n * "
       << format_double(seq.delta) << ", n = 1.." << seq.terms << ", " << ev.points.size() << " points\n";
  }
  return ev.candidate ? 0 : 1;
}

// ---- reproduce -------------------------------------------------------------------------------------

int reproduce(const std::string& suite, bool as_json, Output& out) {
  std::vector<suites::Row> rows;
  try {
    rows = suites::run(suite);
  } catch (const std::invalid_argument& e) {
    std::string known;
    for (const auto& n : suites::names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError(std::string(e.what()) + " (known: " + known + ")");
  }
  bool all = true;
  for (const auto& r : rows) all = all && r.agree;
  auto& os = out.stream();
  if (as_json) {
    json j;
    j["suite"] = suite;
    j["all_agree"] = all;
    json a = json::array();
    for (const auto& r : rows)
      a.push_back({{"case", r.label}, {"prediction", r.prediction}, {"engine", r.engine}, {"agree", r.agree},
                   {"note", r.note}});
    j["rows"] = std::move(a);
    os << j.dump(2) << "\n";
  } else {
    std::size_t w0 = 4, w1 = 10, w2 = 6;
    for (const auto& r : rows) {
      w0 = std::max(w0, r.label.size());
      w1 = std::max(w1, r.prediction.size());
      w2 = std::max(w2, r.engine.size());
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - std::min(w, s.size()), ' '); };
    os << pad("case", w0) << "  " << pad("prediction", w1) << "  " << pad("engine", w2) << "  agree\n";
    for (const auto& r : rows) {
      os << pad(r.label, w0) << "  " << pad(r.prediction, w1) << "  " << pad(r.engine, w2) << "  "
         << (r.agree ? "yes" : "NO");
      if (!r.agree && !r.note.empty()) os << "  (" << r.note << ")";
      os << "\n";
    }
    os << suite << ": " << (all ? "all rows agree" : "DISAGREEMENT") << "\n";
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability and hypercyclicity analysis of weighted composition semigroups "
               "(T(t)f)(x) = h_t(x) f(phi(t,x))"};
  app.require_subcommand(1);
  Overrides ov;
  std::string config, function = "1", suite, out_path;
  bool as_json = false, as_csv = false, sobolev = false;
  int steps = 20, terms = 0;
  double delta = 0.0;

  auto common = [&](CLI::App* sub, bool with_config = true) {
    if (with_config) sub->add_option("config", config, "problem config (key = value lines)")->required();
    sub->add_option("-o,--out", out_path, "write to this file instead of stdout");
    sub->add_flag("--json", as_json, "structured JSON report");
  };
  auto* an = app.add_subcommand("analyze", "validate hypotheses, fit admissibility, classify stability");
  common(an);
  ov.attach(an);
  auto* si = app.add_subcommand("simulate", "norm of T(t)f on an equally spaced time grid (CSV t,norm)");
  common(si);
  si->add_option("-f,--function", function, "f as an expression in x")->capture_default_str();
  si->add_option("--steps", steps, "time steps; steps + 1 rows")->capture_default_str();
  si->add_flag("--sobolev", sobolev, "W^{1,p} norm ||f||_p + ||f'||_p");
  si->add_flag("--csv", as_csv, "CSV output (the default)");
  ov.attach(si);
  auto* ad = app.add_subcommand("admissibility", "fit ||T(t)|| <= M e^{omega t}");
  common(ad);
  ad->add_flag("--csv", as_csv, "CSV of t,norm along the fitted curve");
  ov.attach(ad);
  auto* hc = app.add_subcommand("hypercyclicity", "evaluate the hypercyclicity criterion along t_n = n delta");
  common(hc);
  hc->add_option("--delta", delta, "sequence step (default seq_delta)")->check(CLI::PositiveNumber);
  hc->add_option("--terms", terms, "sequence length (default seq_terms)")->check(CLI::PositiveNumber);
  ov.attach(hc);
  auto* re = app.add_subcommand("reproduce", "prediction-vs-engine table for a named suite");
  common(re, false);
  re->add_option("suite", suite, "lasota_lp | lasota_sobolev | generalized | hypercyclicity | examples_sec2")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  Output out{out_path, {}};
  try {
    if (*an) return analyze(ov, config, as_json, out);
    if (*si) return simulate(ov, config, function, steps, sobolev, as_json && !as_csv, out);
    if (*ad) return admissibility(ov, config, as_json, as_csv, out);
    if (*hc) return hypercyclicity(ov, config, delta, terms, as_json, out);
    if (*re) return reproduce(suite, as_json, out);
  } catch (const ParseError& e) {
    std::cerr << "semistab: parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "semistab: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "semistab: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
