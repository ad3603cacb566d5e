#include "semistab/domain.hpp"

#include <cctype>
#include <cmath>

#include "semistab/error.hpp"
#include "semistab/expr.hpp"

namespace semistab {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_bound(std::string_view text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  auto e = Expression::parse(t, 0);
  return *e.constant_value();
}

Interval parse_interval(std::string_view text) {
  const std::string t = trim(text);
  if (t.size() < 5 || t.front() != '(' || t.back() != ')')
    throw ParseError("interval '" + t + "' must have the form (lo,hi)");
  const std::string body = t.substr(1, t.size() - 2);
  const auto comma = body.find(',');
  if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
    throw ParseError("interval '" + t + "' must have exactly two bounds");
  Interval iv{parse_bound(std::string_view(body).substr(0, comma)), parse_bound(std::string_view(body).substr(comma + 1))};
  if (!(iv.lo < iv.hi)) throw ParseError("interval '" + t + "' is empty");
  return iv;
}

// Splits on `sep` at parenthesis depth zero.
std::vector<std::string> split_top(std::string_view text, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    else if (text[i] == ')') --depth;
    else if (depth == 0 && text[i] == sep) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(text.substr(start)));
  return parts;
}

}  // namespace

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

bool Interval::contains(double x, double margin) const {
  if (!std::isfinite(x)) return false;
  const double a = std::isfinite(lo) ? lo + margin : lo;
  const double b = std::isfinite(hi) ? hi - margin : hi;
  return x > a && x < b;
}

std::string Interval::str() const { return "(" + format_double(lo) + "," + format_double(hi) + ")"; }

bool Box::bounded() const {
  for (const auto& s : sides)
    if (!s.bounded()) return false;
  return true;
}

bool Box::contains(std::span<const double> x, double margin) const {
  if (x.size() != sides.size()) return false;
  for (std::size_t i = 0; i < sides.size(); ++i)
    if (!sides[i].contains(x[i], margin)) return false;
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (const auto& s : sides) v *= s.width();
  return v;
}

std::string Box::str() const {
  std::string out;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (i) out += "x";
    out += sides[i].str();
  }
  return out;
}

Domain::Domain(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
  for (const auto& b : boxes_)
    if (b.dim() != boxes_.front().dim()) throw ParseError("domain boxes have different dimensions");
}

Domain Domain::interval(double lo, double hi) { return Domain({Box{{Interval{lo, hi}}}}); }

Domain Domain::parse(std::string_view text) {
  std::vector<Box> boxes;
  for (const auto& piece : split_top(text, 'U')) {
    if (piece.empty()) throw ParseError("empty box in domain '" + std::string(text) + "'");
    Box box;
    for (const auto& side : split_top(piece, 'x')) box.sides.push_back(parse_interval(side));
    boxes.push_back(std::move(box));
  }
  return Domain(std::move(boxes));
}

int Domain::dim() const { return boxes_.empty() ? 0 : boxes_.front().dim(); }

bool Domain::bounded() const {
  for (const auto& b : boxes_)
    if (!b.bounded()) return false;
  return true;
}

bool Domain::contains(std::span<const double> x, double margin) const { return component_of(x, margin) >= 0; }

int Domain::component_of(std::span<const double> x) const { return component_of(x, 0.0); }

int Domain::component_of(std::span<const double> x, double margin) const {
  for (std::size_t i = 0; i < boxes_.size(); ++i)
    if (boxes_[i].contains(x, margin)) return static_cast<int>(i);
  return -1;
}

const Interval& Domain::as_interval() const {
  if (dim() != 1 || boxes_.size() != 1) throw Error("domain " + str() + " is not a single interval");
  return boxes_.front().sides.front();
}

std::string Domain::str() const {
  std::string out;
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (i) out += " U ";
    out += boxes_[i].str();
  }
  return out;
}

}  // namespace semistab
