#ifndef SOBLAB_MEASURES_HPP
#define SOBLAB_MEASURES_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soblab/common.hpp"

namespace soblab {

enum class BallKind { open, closed };

struct Ball {
  Vec center;
  double radius = 0.0;
  BallKind kind = BallKind::closed;

  Ball() = default;
  Ball(Vec c, double r, BallKind k = BallKind::closed);

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const Vec& x) const;
};

// Finite atomic Borel measure: nonnegative masses at points of R^n.
class PointMeasure {
 public:
  struct Atom {
    Vec location;
    double mass;
  };

  PointMeasure(int dim, std::vector<Atom> atoms);
  static PointMeasure dirac(Vec location, double mass = 1.0);
  static PointMeasure zero(int dim) { return PointMeasure(dim, {}); }

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  bool empty() const { return atoms_.empty(); }

  PointMeasure operator+(const PointMeasure& other) const;
  PointMeasure scaled(double c) const;

 private:
  int dim_;
  std::vector<Atom> atoms_;
  double total_mass_;
};

// weight/function/density carry the compact-support invariant (zero outer
// layer); derived marks internally computed fields (sampled maximal
// functions and the like) that have no reason to vanish at the box edge.
enum class FieldRole { weight, function, density, derived };

// Function or weight sampled at the centers of a uniform grid with compact
// support inside the grid: the outermost cell layer is identically zero.
class GridField {
 public:
  GridField(Vec origin, double h, IndexVec shape, FieldRole role,
            Eigen::ArrayXd values);

  // Samples fn at cell centers and zeroes the outer layer.
  static GridField sample(int dim, const Vec& origin, double h, const IndexVec& shape,
                          FieldRole role, const std::function<double(const Vec&)>& fn);
  // Symmetric box [-extent, extent]^n with cell count 2*extent/h per axis.
  static GridField sample_box(int dim, double extent, double h, FieldRole role,
                              const std::function<double(const Vec&)>& fn);
  static GridField zeros_like(const GridField& other, FieldRole role);

  int dim() const { return dim_; }
  double h() const { return h_; }
  const Vec& origin() const { return origin_; }
  const IndexVec& shape() const { return shape_; }
  Eigen::Index cell_count() const { return values_.size(); }
  FieldRole role() const { return role_; }
  const Eigen::ArrayXd& values() const { return values_; }
  Eigen::ArrayXd& values() { return values_; }

  double cell_volume() const;
  Eigen::Index flatten(const IndexVec& idx) const;
  IndexVec unflatten(Eigen::Index flat) const;
  Vec center(Eigen::Index flat) const;
  Vec center(const IndexVec& idx) const;
  bool in_grid(const IndexVec& idx) const;

  double operator[](Eigen::Index flat) const { return values_[flat]; }

  // Index of the cell whose center is nearest to x (clamped to the grid).
  Eigen::Index nearest_cell(const Vec& x) const;
  // Value at the nearest cell center; grid operators evaluate here.
  double nearest_value(const Vec& x) const;
  // Multilinear interpolation, used by boundary-line quadrature.
  double interp(const Vec& x) const;

  // Bounding box of the grid.
  Vec box_lo() const { return origin_; }
  Vec box_hi() const;

  double total_mass() const;  // h^n * sum(values); measure semantics
  double max_abs() const { return values_.abs().maxCoeff(); }

  void validate() const;

 private:
  int dim_;
  Vec origin_;
  double h_;
  IndexVec shape_;
  FieldRole role_;
  Eigen::ArrayXd values_;
};

// Summed-area table over the cells of a grid field: sums over index boxes
// [lo, hi) clipped to the grid are O(1), cells outside count as zero.
class BoxSumTable {
 public:
  explicit BoxSumTable(const GridField& f);
  double box_sum(IndexVec lo, IndexVec hi) const;
  int dim() const { return dim_; }

 private:
  Eigen::Index flatten(const IndexVec& idx) const;
  int dim_;
  IndexVec shape_;
  Eigen::ArrayXd sat_;
};

// Lebesgue measure, admitted so the exact identities M_0(L) = 1 and
// L(polygon) = area are available without grid truncation.
struct LebesgueMeasure {
  int dim = 2;
};

// A locally finite Borel measure in one of the three concrete forms.
class Measure {
 public:
  Measure(PointMeasure m) : rep_(std::move(m)) {}
  Measure(GridField f);
  Measure(LebesgueMeasure l) : rep_(l) {}

  int dim() const;
  bool is_atomic() const { return std::holds_alternative<PointMeasure>(rep_); }
  bool is_grid() const { return std::holds_alternative<GridField>(rep_); }
  bool is_lebesgue() const { return std::holds_alternative<LebesgueMeasure>(rep_); }
  const PointMeasure& atomic() const { return std::get<PointMeasure>(rep_); }
  const GridField& grid() const { return std::get<GridField>(rep_); }

  double total_mass() const;  // +inf for Lebesgue

 private:
  std::variant<PointMeasure, GridField, LebesgueMeasure> rep_;
};

// mu(B): atoms strictly inside (open) or within distance r (closed).
double measure_ball(const PointMeasure& mu, const Ball& ball);

// Center-in-cell quadrature of int_B w dx. Exactly monotone in the radius.
double grid_mass_ball(const GridField& w, const Ball& ball);

double measure_ball(const Measure& mu, const Ball& ball);

// Restriction mu |_ B: keeps only the atoms / cells inside the ball.
PointMeasure restrict_measure(const PointMeasure& mu, const Ball& ball);
GridField restrict_measure(const GridField& w, const Ball& ball);

// JSON construction:
//   {"kind":"atoms","dim":2,"atoms":[[x,y,mass],...]}
//   {"kind":"grid","origin":[...],"h":0.01,"shape":[...],"values_file":"path"}
//   {"kind":"lebesgue","dim":2}
// values_file holds a flat little-endian float64 array in cell order.
Measure measure_from_json(const nlohmann::json& spec,
                          const std::string& base_dir = "");

std::vector<double> read_f64_file(const std::string& path, std::size_t expect);
void write_f64_file(const std::string& path, const std::vector<double>& data);

}  // namespace soblab

#endif
