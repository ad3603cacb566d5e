#include "semistab/problem.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "semistab/error.hpp"
#include "semistab/grid.hpp"

namespace semistab {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

struct Entry {
  std::string value;
  int line;
};

double max_abs_field(const ProblemSpec& spec) {
  const auto grid = sample_domain(spec.domain, spec.grid);
  double m = 0.0;
  for (const auto& x : grid.points)
    for (const auto& f : spec.field) m = std::max(m, std::fabs(f(x)));
  return m;
}

}  // namespace

std::string to_string(Space s) {
  switch (s) {
    case Space::Lp: return "Lp";
    case Space::W1p: return "W1p";
    case Space::W1pStar: return "W1p_star";
  }
  return "?";
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Translation: return "translation";
    case Family::Affine: return "affine";
    case Family::Lasota: return "lasota";
    case Family::LasotaR: return "lasota_r";
  }
  return "?";
}

Space parse_space(std::string_view text) {
  if (text == "Lp" || text == "L^p" || text == "lp") return Space::Lp;
  if (text == "W1p" || text == "W^{1,p}" || text == "w1p") return Space::W1p;
  if (text == "W1p_star" || text == "W1p*" || text == "w1p_star") return Space::W1pStar;
  throw ParseError("unknown space '" + std::string(text) + "' (expected Lp, W1p or W1p_star)");
}

std::optional<Family> parse_family(std::string_view text) {
  if (text == "translation") return Family::Translation;
  if (text == "affine") return Family::Affine;
  if (text == "lasota") return Family::Lasota;
  if (text == "lasota_r") return Family::LasotaR;
  return std::nullopt;
}

Expression FamilySpec::field() const {
  const auto x = Expression::variable(0);
  switch (tag) {
    case Family::Translation: return Expression::constant(v);
    case Family::Affine: return Expression::constant(a) + Expression::constant(b) * x;
    case Family::Lasota: return -x;
    case Family::LasotaR: return -pow(x, Expression::constant(r));
  }
  return Expression();
}

Domain FamilySpec::default_domain() const {
  switch (tag) {
    case Family::Translation:
    case Family::Affine: return Domain::interval(-INFINITY, INFINITY);
    case Family::Lasota:
    case Family::LasotaR: return Domain::interval(0.0, 1.0);
  }
  return Domain();
}

std::optional<double> FamilySpec::equilibrium() const {
  switch (tag) {
    case Family::Translation: return std::nullopt;
    case Family::Affine:
      if (b == 0.0) return std::nullopt;
      return -a / b;
    case Family::Lasota:
    case Family::LasotaR: return 0.0;
  }
  return std::nullopt;
}

std::string FamilySpec::str() const {
  switch (tag) {
    case Family::Translation: return "translation(v=" + format_double(v) + ")";
    case Family::Affine: return "affine(a=" + format_double(a) + ", b=" + format_double(b) + ")";
    case Family::Lasota: return "lasota";
    case Family::LasotaR: return "lasota_r(r=" + format_double(r) + ")";
  }
  return "?";
}

bool ProblemSpec::rho_is_one() const {
  auto c = rho.constant_value();
  return c && *c == 1.0;
}

std::optional<double> ProblemSpec::h_constant() const { return h.constant_value(); }

Expression ProblemSpec::divergence() const {
  Expression div = Expression::constant(0.0);
  for (std::size_t i = 0; i < field.size(); ++i) div = div + field[i].derivative(static_cast<int>(i));
  return div;
}

namespace {

Expression shaped_multiplier(const ProblemSpec& spec, MultiplierShape shape) {
  return Expression::constant(shape.fprime_coef) * spec.divergence() + Expression::constant(shape.offset);
}

}  // namespace

ProblemSpec make_family_problem(const FamilySpec& family, MultiplierShape h, double p, Space space,
                                std::optional<Domain> domain) {
  ProblemSpec spec;
  spec.family = family;
  spec.domain = domain ? *domain : family.default_domain();
  spec.field = {family.field()};
  spec.h_shape = h;
  spec.h = shaped_multiplier(spec, h);
  spec.p = p;
  spec.space = space;
  check_invariants(spec);
  return spec;
}

ProblemSpec make_family_problem(const FamilySpec& family, const Expression& h, double p, Space space,
                                std::optional<Domain> domain) {
  ProblemSpec spec;
  spec.family = family;
  spec.domain = domain ? *domain : family.default_domain();
  spec.field = {family.field()};
  spec.h = h;
  if (auto c = h.constant_value()) spec.h_shape = MultiplierShape{0.0, *c};
  spec.p = p;
  spec.space = space;
  check_invariants(spec);
  return spec;
}

void check_invariants(const ProblemSpec& spec) {
  if (spec.domain.empty()) throw ParseError("domain is empty", 0, "domain");
  if (!(spec.p >= 1.0)) throw ParseError("p must be ≥ 1", 0, "p");
  if (static_cast<int>(spec.field.size()) != spec.dim())
    throw ParseError("F has " + std::to_string(spec.field.size()) + " components but the domain has dimension " +
                         std::to_string(spec.dim()),
                     0, "F_expr");
  if (spec.family && spec.family->tag == Family::LasotaR) {
    if (!(spec.family->r >= 1.0)) throw ParseError("lasota_r requires r ≥ 1", 0, "r");
    for (const auto& box : spec.domain.boxes())
      if (box.sides.front().lo < 0.0) throw ParseError("lasota_r requires a domain inside (0,inf)", 0, "domain");
  }
  if (spec.space != Space::Lp) {
    if (spec.dim() != 1 || spec.domain.boxes().size() != 1)
      throw ParseError("Sobolev spaces require a single interval (a,b)", 0, "space");
    const auto& iv = spec.domain.as_interval();
    if (!iv.bounded()) throw ParseError("Sobolev spaces require a bounded interval, got " + iv.str(), 0, "space");
    const double fa = spec.field.front()(iv.lo);
    const double scale = std::max(max_abs_field(spec), 1e-300);
    if (!(std::fabs(fa) <= spec.tol.zero * scale))
      throw ParseError("Sobolev spaces require F(a) = 0, got F(" + format_double(iv.lo) + ") = " + format_double(fa), 0,
                       "space");
  }
  const auto grid = sample_domain(spec.domain, spec.grid);
  for (const auto& x : grid.points) {
    const double r = spec.rho(x);
    if (!(r > 0.0) || !std::isfinite(r)) {
      std::string where;
      for (double c : x) where += (where.empty() ? "" : ",") + format_double(c);
      throw ParseError("rho must be positive and finite, rho(" + where + ") = " + format_double(r), 0, "rho_expr");
    }
  }
}

ProblemSpec parse_problem(std::string_view text) {
  std::map<std::string, Entry> entries;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      const std::string line = trim(raw);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
      const std::string key = trim(std::string_view(line).substr(0, eq));
      if (key.empty()) throw ParseError("missing key", line_no);
      if (entries.count(key)) throw ParseError("duplicate key", line_no, key);
      entries[key] = Entry{unquote(trim(std::string_view(line).substr(eq + 1))), line_no};
    }
  }

  std::map<std::string, bool> used;
  auto get = [&](const std::string& key) -> const Entry* {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    used[key] = true;
    return &it->second;
  };
  auto number = [&](const std::string& key, double& out) {
    if (const Entry* e = get(key)) {
      try {
        auto expr = Expression::parse(e->value, 0);
        out = *expr.constant_value();
      } catch (const ParseError& err) {
        throw ParseError(err.what(), e->line, key);
      }
    }
  };
  auto integer = [&](const std::string& key, int& out) {
    double v = out;
    number(key, v);
    if (v != std::floor(v) || v < 0) throw ParseError("expected a non-negative integer", get(key)->line, key);
    out = static_cast<int>(v);
  };
  auto with_context = [&](const std::string& key, auto&& fn) {
    const Entry* e = get(key);
    try {
      return fn(e);
    } catch (const ParseError& err) {
      if (err.line() > 0) throw;
      throw ParseError(err.what(), e ? e->line : 0, key);
    }
  };

  ProblemSpec spec;

  const Entry* family_entry = get("family");
  if (family_entry) {
    auto tag = parse_family(family_entry->value);
    if (!tag) throw ParseError("unknown family '" + family_entry->value + "'", family_entry->line, "family");
    FamilySpec fam{*tag};
    if (*tag == Family::Affine) {
      fam.a = 1.0;
      fam.b = -1.0;
    }
    number("v", fam.v);
    number("a", fam.a);
    number("b", fam.b);
    number("r", fam.r);
    if (*tag == Family::LasotaR && !get("r")) throw ParseError("lasota_r requires r", family_entry->line, "r");
    spec.family = fam;
  }

  if (const Entry* e = get("domain")) {
    spec.domain = with_context("domain", [&](const Entry*) { return Domain::parse(e->value); });
  } else if (spec.family) {
    spec.domain = spec.family->default_domain();
  } else {
    throw ParseError("missing required key", 0, "domain");
  }
  const int dims = spec.domain.dim();

  if (const Entry* e = get("F_expr")) {
    if (spec.family) throw ParseError("give either family or F_expr, not both", e->line, "F_expr");
    std::string_view rest = e->value;
    while (true) {
      const auto semi = rest.find(';');
      const std::string piece = trim(rest.substr(0, semi));
      spec.field.push_back(with_context("F_expr", [&](const Entry*) { return Expression::parse(piece, dims); }));
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
    }
  } else if (spec.family) {
    if (dims != 1) throw ParseError("registered families are one-dimensional", family_entry->line, "domain");
    spec.field = {spec.family->field()};
  } else {
    throw ParseError("missing required key (family or F_expr)", 0, "F_expr");
  }

  auto parse_expr = [&](const std::string& key) {
    return with_context(key, [&](const Entry* e) { return Expression::parse(e->value, dims); });
  };

  int h_forms = 0;
  if (const Entry* e = get("h")) {
    ++h_forms;
    std::string v = e->value;
    if (v.rfind("const:", 0) == 0) {
      double c = 0.0;
      auto expr = with_context("h", [&](const Entry*) { return Expression::parse(v.substr(6), 0); });
      c = *expr.constant_value();
      spec.h_shape = MultiplierShape{0.0, c};
    } else {
      spec.h = parse_expr("h");
    }
  }
  if (get("h_const")) {
    ++h_forms;
    MultiplierShape s;
    number("h_const", s.offset);
    spec.h_shape = s;
  }
  if (get("h_expr")) {
    ++h_forms;
    spec.h = parse_expr("h_expr");
  }
  if (get("h_re_expr") || get("h_im_expr")) {
    ++h_forms;
    if (!get("h_re_expr") || !get("h_im_expr"))
      throw ParseError("complex multipliers need both h_re_expr and h_im_expr", 0, "h_re_expr");
    spec.h = parse_expr("h_re_expr");
    spec.h_imag = parse_expr("h_im_expr");
    spec.scalar_mode = ScalarMode::ComplexReduced;
  }
  if (get("h_fprime_coef") || get("h_offset")) {
    ++h_forms;
    MultiplierShape s;
    number("h_fprime_coef", s.fprime_coef);
    number("h_offset", s.offset);
    spec.h_shape = s;
  }
  if (h_forms > 1) throw ParseError("give exactly one multiplier form", 0, "h");
  if (spec.h_shape) spec.h = shaped_multiplier(spec, *spec.h_shape);
  else if (auto c = spec.h.constant_value()) spec.h_shape = MultiplierShape{0.0, *c};

  if (get("rho_expr")) spec.rho = parse_expr("rho_expr");
  number("p", spec.p);
  if (const Entry* e = get("space")) spec.space = with_context("space", [&](const Entry*) { return parse_space(e->value); });

  auto& t = spec.tol;
  number("tol_zero", t.zero);
  number("tol_ode_rtol", t.ode_rtol);
  number("tol_ode_atol", t.ode_atol);
  number("tol_quad", t.quad);
  number("tol_domain", t.domain);
  number("tol_flow", t.flow);
  number("slope_tol", t.slope);
  number("value_tol", t.value);
  number("divergence_threshold", t.divergence);
  number("convexity_tol", t.convexity);
  number("fd_tol", t.fd);

  auto& g = spec.grid;
  number("horizon", g.horizon);
  integer("samples", g.samples);
  integer("samples_nd", g.samples_nd);
  integer("time_samples", g.time_samples);
  integer("refine_rounds", g.refine_rounds);
  integer("refine_factor", g.refine_factor);
  number("truncation", g.truncation);
  number("seq_delta", g.seq_delta);
  integer("seq_terms", g.seq_terms);
  if (const Entry* e = get("parallel")) {
    if (e->value == "true" || e->value == "1") g.parallel = true;
    else if (e->value == "false" || e->value == "0") g.parallel = false;
    else throw ParseError("expected true or false", e->line, "parallel");
  }
  if (!(g.horizon > 0.0)) throw ParseError("horizon must be positive", get("horizon")->line, "horizon");

  for (const auto& [key, entry] : entries)
    if (!used.count(key)) throw ParseError("unknown key", entry.line, key);

  try {
    check_invariants(spec);
  } catch (const ParseError& err) {
    const Entry* e = entries.count(err.field()) ? &entries.at(err.field()) : nullptr;
    if (e && err.line() == 0) {
      // Re-raise with the line of the offending key; the message already names the field.
      std::string msg = err.what();
      const std::string prefix = "field '" + err.field() + "': ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      throw ParseError(msg, e->line, err.field());
    }
    throw;
  }
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string serialize_problem(const ProblemSpec& spec) {
  std::ostringstream out;
  out << "domain = " << spec.domain.str() << "\n";
  if (spec.family) {
    const auto& f = *spec.family;
    out << "family = " << to_string(f.tag) << "\n";
    switch (f.tag) {
      case Family::Translation: out << "v = " << format_double(f.v) << "\n"; break;
      case Family::Affine:
        out << "a = " << format_double(f.a) << "\n";
        out << "b = " << format_double(f.b) << "\n";
        break;
      case Family::LasotaR: out << "r = " << format_double(f.r) << "\n"; break;
      case Family::Lasota: break;
    }
  } else {
    out << "F_expr = ";
    for (std::size_t i = 0; i < spec.field.size(); ++i) out << (i ? "; " : "") << spec.field[i].str();
    out << "\n";
  }
  if (spec.scalar_mode == ScalarMode::ComplexReduced) {
    out << "h_re_expr = " << spec.h.str() << "\n";
    out << "h_im_expr = " << (spec.h_imag ? spec.h_imag->str() : "0") << "\n";
  } else if (spec.h_shape && spec.h_shape->fprime_coef == 0.0) {
    out << "h_const = " << format_double(spec.h_shape->offset) << "\n";
  } else if (spec.h_shape) {
    out << "h_fprime_coef = " << format_double(spec.h_shape->fprime_coef) << "\n";
    out << "h_offset = " << format_double(spec.h_shape->offset) << "\n";
  } else {
    out << "h_expr = " << spec.h.str() << "\n";
  }
  out << "rho_expr = " << spec.rho.str() << "\n";
  out << "p = " << format_double(spec.p) << "\n";
  out << "space = " << to_string(spec.space) << "\n";
  const auto& t = spec.tol;
  out << "tol_zero = " << format_double(t.zero) << "\n";
  out << "tol_ode_rtol = " << format_double(t.ode_rtol) << "\n";
  out << "tol_ode_atol = " << format_double(t.ode_atol) << "\n";
  out << "tol_quad = " << format_double(t.quad) << "\n";
  out << "tol_domain = " << format_double(t.domain) << "\n";
  out << "tol_flow = " << format_double(t.flow) << "\n";
  out << "slope_tol = " << format_double(t.slope) << "\n";
  out << "value_tol = " << format_double(t.value) << "\n";
  out << "divergence_threshold = " << format_double(t.divergence) << "\n";
  out << "convexity_tol = " << format_double(t.convexity) << "\n";
  out << "fd_tol = " << format_double(t.fd) << "\n";
  const auto& g = spec.grid;
  out << "horizon = " << format_double(g.horizon) << "\n";
  out << "samples = " << g.samples << "\n";
  out << "samples_nd = " << g.samples_nd << "\n";
  out << "time_samples = " << g.time_samples << "\n";
  out << "refine_rounds = " << g.refine_rounds << "\n";
  out << "refine_factor = " << g.refine_factor << "\n";
  out << "truncation = " << format_double(g.truncation) << "\n";
  out << "seq_delta = " << format_double(g.seq_delta) << "\n";
  out << "seq_terms = " << g.seq_terms << "\n";
  out << "parallel = " << (g.parallel ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace semistab
