#ifndef SOBLAB_GEOMETRY_HPP
#define SOBLAB_GEOMETRY_HPP

#include <functional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soblab/constants.hpp"
#include "soblab/measures.hpp"

namespace soblab {

using PointFn = std::function<double(const Vec&)>;

// Planar set bounded by closed polylines. Outer loops are counterclockwise
// (positive signed area); clockwise loops are holes. n = 2 only; the n = 1
// analogue is an interval union handled by interval_* helpers below.
class PolygonSet {
 public:
  using Loop = std::vector<Vec>;

  PolygonSet() = default;
  explicit PolygonSet(std::vector<Loop> loops, bool check_simple = true);

  const std::vector<Loop>& loops() const { return loops_; }
  bool empty() const { return loops_.empty(); }

  double area() const;       // signed sum over loops (holes subtract)
  double perimeter() const;  // total edge length over all loops
  bool contains(const Vec& x) const;  // even-odd rule

  // Simplicity: no proper edge crossings within or between loops.
  void validate_simple() const;

  static PolygonSet regular_ngon(const Vec& center, double radius, int k);
  static PolygonSet rectangle(const Vec& lo, const Vec& hi);

  nlohmann::json to_json() const;
  static PolygonSet from_json(const nlohmann::json& j);

 private:
  std::vector<Loop> loops_;
};

// int_{boundary} w dH^1 by per-edge Gauss-Legendre quadrature on segments of
// length <= max_seg (4 nodes per segment).
double weighted_perimeter(const PolygonSet& e, const PointFn& w, double max_seg);
double weighted_perimeter(const PolygonSet& e, const GridField& w);  // interp, max_seg = h

// Marching-squares contour of {u > t} with linear interpolation on cell-center
// edges. Loops close inside the grid because the outer layer of u vanishes.
PolygonSet level_set_polygon(const GridField& u, double t);

struct CoareaResult {
  double lhs = 0.0;     // int |grad u| w dx
  double rhs = 0.0;     // sum over levels of Per({u > t}, w) dt
  double rel_err = 0.0;
  bool flagged = false;  // lhs == 0 with rhs != 0
};

// Weighted coarea identity on the midpoint t-grid of (0, max u).
CoareaResult coarea_check(const GridField& u, const PointFn& w,
                          int levels = defaults::kCoareaLevels);

struct RelativeIsoResult {
  double lhs = 0.0;    // min(|B cap E|, |B \ E|)^{(n-1)/n}
  double rhs = 0.0;    // H^1(boundary of E inside B)
  double ratio = 0.0;  // lhs / rhs (0 when lhs = 0)
  bool flagged = false;  // rhs = 0 with lhs > 0
};

RelativeIsoResult relative_iso_check(const PolygonSet& e, const Ball& ball);

struct IsoRatioResult {
  double mu_e = 0.0;          // mu(E)
  double weighted_per = 0.0;  // int_{boundary E} (M_alpha mu)^{1/q} dH^1
  double ratio = 0.0;
  int perturbed_nodes = 0;    // quadrature nodes nudged off atoms
};

// mu(E)^{1/q} / Per(E, (M_alpha mu)^{1/q}); requires alpha = n - q(n-1).
IsoRatioResult isoperimetric_ratio(const Measure& mu, const PolygonSet& e,
                                   double alpha, double q, double max_seg);

// Measure of a polygon: atoms inside, density cells inside, or exact area.
double measure_polygon(const Measure& mu, const PolygonSet& e, double area_h = 0.0);

// n = 1 trivial case: finite unions of intervals, perimeter = endpoint count.
struct IntervalSet {
  std::vector<std::pair<double, double>> intervals;  // disjoint, sorted
  double length() const;
  double perimeter() const { return 2.0 * static_cast<double>(intervals.size()); }
};

IntervalSet level_set_intervals(const GridField& u, double t);

}  // namespace soblab

#endif
