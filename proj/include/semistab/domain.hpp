#pragma once

// Open regions of R^N given as finite unions of open boxes.
//
// Text form: a box is a product of intervals "(lo,hi)x(lo,hi)"; boxes are joined with "U".
// Bounds accept numbers, "inf", "-inf" and the constants of the expression grammar.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semistab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool bounded() const;
  double width() const { return hi - lo; }
  /// Strictly inside, at distance > margin from each finite end (margin may be negative).
  bool contains(double x, double margin = 0.0) const;
  std::string str() const;
};

struct Box {
  std::vector<Interval> sides;

  int dim() const { return static_cast<int>(sides.size()); }
  bool bounded() const;
  bool contains(std::span<const double> x, double margin = 0.0) const;
  double volume() const;
  std::string str() const;
};

class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Box> boxes);

  static Domain interval(double lo, double hi);
  static Domain parse(std::string_view text);

  int dim() const;
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }
  bool bounded() const;

  bool contains(std::span<const double> x, double margin = 0.0) const;
  bool contains(double x, double margin = 0.0) const { return contains(std::span<const double>(&x, 1), margin); }

  /// Index of the box containing x (at the given margin), or -1.
  int component_of(std::span<const double> x) const;
  int component_of(std::span<const double> x, double margin) const;

  /// The single interval of a one-box 1D domain; throws otherwise.
  const Interval& as_interval() const;

  std::string str() const;

 private:
  std::vector<Box> boxes_;
};

}  // namespace semistab
