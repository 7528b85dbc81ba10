#ifndef SOBLAB_OPERATORS_HPP
#define SOBLAB_OPERATORS_HPP

#include <vector>

#include "soblab/constants.hpp"
#include "soblab/measures.hpp"

namespace soblab {

// Exact fractional maximal function of an atomic measure:
//   M_alpha mu(x) = sup_{r>0} r^alpha mu(B_r(x)) / (v_n r^n).
// The supremum over open balls equals the maximum over closed balls at the
// distinct atom distances, which is what is evaluated. +inf iff x carries an
// atom (alpha < n).
double frac_maximal_point(const PointMeasure& mu, double alpha, const Vec& x);

// Grid maximal function: max over the given radii of
// r^alpha grid_mass_ball(w, B_r(x)) / (v_n r^n). A certified lower bound of
// the true supremum up to the center-in-cell quadrature; nondecreasing under
// refinement of the radius set.
double frac_maximal_grid(const GridField& w, double alpha, const Vec& x,
                         const std::vector<double>& radii);

// Log-spaced default radius sweep covering [1.5 h, diam(grid) + dist(x, grid)].
std::vector<double> default_radii(const GridField& w, const Vec& x,
                                  int count = defaults::kMaximalSweepRadii);

// M_alpha of a measure in any concrete form (atomic exact, grid via sweep,
// Lebesgue analytic: alpha = 0 gives identically 1).
double frac_maximal_measure(const Measure& mu, double alpha, const Vec& x);

// Centered-cube maximal function over a dyadic side sweep, O(1) per cube via
// a summed-area table. Equivalent to the ball operator up to dimensional
// constants; bulk field evaluations use it, the ball-exact forms above serve
// pinned values and point queries.
std::vector<double> cube_side_sweep(const GridField& f, int count = 32);
GridField cube_maximal_field(const GridField& w, double alpha,
                             const std::vector<double>& sides = {});
double cube_maximal_point(const GridField& w, double alpha, const Vec& x);

// Reusable point-query form: one summed-area table, many evaluations.
class CubeMaximal {
 public:
  CubeMaximal(GridField w, double alpha, std::vector<double> sides = {});
  double operator()(const Vec& x) const;

 private:
  GridField field_;
  BoxSumTable sums_;
  double alpha_;
  std::vector<double> sides_;
};

// Riesz potential I_alpha f(x) = gamma(alpha)^{-1} int f(y) |x-y|^{alpha-n} dy
// by cell quadrature. The singular cell is replaced by the ball of equal
// volume and the kernel integrated analytically over it.
double riesz_potential(const GridField& f, double alpha, const Vec& x);

// Vector Riesz transform R f = -grad I_1 f via principal-value quadrature
//   (n-1)/gamma(1) * sum (x-y)/|x-y|^{n+1} (f(y) - f(x)) h^n.
// The f(x)-subtraction runs over the largest x-centered ball inside the grid,
// where the lattice is symmetric and the odd kernel cancels the constant mode
// exactly; outside that ball the plain kernel sum is used. n >= 2.
Vec riesz_transform(const GridField& f, const Vec& x);

// Central-difference gradient; one vector component per axis.
std::vector<GridField> gradient(const GridField& u);

// Pointwise Euclidean norm of the gradient.
GridField gradient_magnitude(const GridField& u);

// Positive fractional derivative
//   D^s u(x) = int |u(x)-u(y)| / |x-y|^{n+s} dy,  0 < s < 1.
// Grid quadrature plus (a) a local-Lipschitz analytic bound over the
// equal-volume ball for the singular cell and (b) the analytic tail
// |u(x)| int_{R^n \ box} |x-y|^{-n-s} dy over the grid complement.
double positive_frac_derivative(const GridField& u, double s, const Vec& x);

// D^s u sampled at every grid cell center.
GridField positive_frac_derivative_field(const GridField& u, double s);

}  // namespace soblab

#endif
