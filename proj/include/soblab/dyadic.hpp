#ifndef SOBLAB_DYADIC_HPP
#define SOBLAB_DYADIC_HPP

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soblab/measures.hpp"

namespace soblab {

// Shift vector t in {0, 1/3}^n, one bit per axis.
struct Shift {
  std::uint8_t mask = 0;
  int dim = 1;

  double component(int axis) const { return (mask >> axis) & 1 ? 1.0 / 3.0 : 0.0; }
  static std::vector<Shift> all(int dim);
};

// Cube 2^k([0,1)^n + m + (-1)^k t) of the shifted grid D_t.
struct DyadicCube {
  Shift shift;
  int level = 0;                 // side length 2^level
  IndexVec index;                // m

  int dim() const { return shift.dim; }
  double side() const { return std::ldexp(1.0, level); }
  double lower(int axis) const;
  Vec lower_corner() const;
  bool contains(const Vec& x) const;  // floor-test, consistent with cube_at
  double volume() const;
  bool operator==(const DyadicCube& o) const {
    return shift.mask == o.shift.mask && level == o.level && index == o.index;
  }
};

// The cube of D_t at the given level containing x.
DyadicCube cube_at(const Vec& x, int level, const Shift& t);

// 1/3-trick: a shifted dyadic cube containing the ball with side <= 12 r(B).
// Searches levels upward from the smallest that could fit and returns the
// first hit; existence is guaranteed.
std::pair<Shift, DyadicCube> containing_cube(const Ball& ball);

// Exact dyadic fractional maximal function of an atomic measure:
//   sup over cubes of D_t containing x of side^alpha mu(Q)/|Q|.
// +inf iff x carries an atom (alpha < n). The supremum is a maximum over
// finitely many levels because mu(Q_k(x)) is a step function of the level;
// levels are scanned until the tail bound side^(alpha-n) * total mass
// cannot beat the running maximum.
double dyadic_frac_maximal(const PointMeasure& mu, double alpha, const Vec& x,
                           const Shift& t);

// Maximal cubes of D_t with side^alpha mu(Q)/|Q| > lambda. Their disjoint
// union is exactly the super-level set {M_alpha^{D_t} mu > lambda}.
std::vector<DyadicCube> stopping_cubes(const PointMeasure& mu, double alpha,
                                       double lambda, const Shift& t);

struct HausdorffBound {
  double sum = 0.0;    // sum of side^{n-alpha} over the stopping cubes
  double bound = 0.0;  // mu(R^n) / lambda
  std::vector<DyadicCube> cubes;
};

// Content bound sum <= bound, an identity of the stopping construction.
HausdorffBound hausdorff_content_bound(const PointMeasure& mu, double alpha,
                                       double lambda);

// ---------------------------------------------------------------------------
// Grid-aligned dyadic tree and sparse families.
//
// For grid fields the dyadic system is taken in cell-index space: cubes of
// side 2^j cells, zero-padded to the enclosing power-of-two root. Averages
// over these cubes are exact cell sums, so the CZ selection and the sparse
// domination below are verified in exact arithmetic. Cube volumes |Q| count
// lattice cells of the zero-extended field.

struct GridCube {
  int level = 0;   // side 2^level cells
  IndexVec base;   // lower cell index (multiples of 2^level, may be negative padding)
};

struct SparseEntry {
  GridCube cube;
  double alpha_average = 0.0;           // side^alpha * (cell avg of f over Q)
  std::int64_t cube_cells = 0;          // |Q| in lattice cells (2^{level*n})
  std::int64_t major_cells = 0;         // |E_Q| in lattice cells
  std::vector<Eigen::Index> e_cells;    // E_Q restricted to real grid cells
};

struct SparseFamily {
  std::vector<SparseEntry> entries;
  double constant = 0.0;  // domination constant produced by the construction
  int root_level = 0;
};

// CZ sparse family for a nonnegative grid field. Selection threshold: a child
// is a stopping cube when its side^alpha-weighted average exceeds 2^{n+1}
// times its stopping parent's. E_Q = Q minus the stopping children. Yields
// |E_Q| >= (1 - 2^{-(n+1)}) |Q|, pairwise disjoint E_Q, and the pointwise
// domination  M_alpha^D f <= 2^{n+1} sum side^alpha (avg_Q f) 1_{E_Q}
// at every grid cell center.
SparseFamily sparse_family(const GridField& f, double alpha);

// Exact dyadic maximal function of the grid field over the same index tree,
// evaluated at every cell center (used to verify the domination).
Eigen::ArrayXd grid_dyadic_maximal(const GridField& f, double alpha);

// Evaluates the sparse sum at every cell center.
Eigen::ArrayXd sparse_sum(const GridField& f, const SparseFamily& fam, double alpha);

nlohmann::json sparse_family_to_json(const SparseFamily& fam);

struct DominationCheck {
  double max_ratio = 0.0;       // max over samples of M mu / sum_t M^{D_t} mu
  int excluded_points = 0;      // samples carrying atoms (both sides infinite)
};

// Ratio check for M_alpha mu <= c sum over the 2^n shifts of M^{D_t} mu.
DominationCheck dyadic_domination_check(const PointMeasure& mu, double alpha,
                                        const std::vector<Vec>& samples);

}  // namespace soblab

#endif
