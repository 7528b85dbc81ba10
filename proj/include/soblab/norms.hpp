#ifndef SOBLAB_NORMS_HPP
#define SOBLAB_NORMS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "soblab/measures.hpp"
#include "soblab/operators.hpp"

namespace soblab {

// Young function Psi(t) = t^a [log(e+t)]^b with a >= 1, b >= 0.
class YoungFunction {
 public:
  YoungFunction(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  double operator()(double t) const;
  // Numeric inverse on [0, inf); Psi(inverse(y)) = y to relative 1e-12.
  double inverse(double y) const;

 private:
  double a_, b_;
};

// Axis-aligned cube used by cube-family suprema.
struct Cube {
  Vec lower;
  double side = 0.0;

  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const { return std::pow(side, dim()); }
  bool contains(const Vec& x) const;
};

// Scalar experiment parameters; relations are validated where cases use them.
struct ExperimentParams {
  double p = 1.0, q = 1.0;
  double alpha = 0.0, beta = 0.0, s = 0.5;
  double epsilon = 0.0, lambda = 0.0;

  double p_conj() const { return p / (p - 1.0); }           // p'
  double q_conj() const { return q / (q - 1.0); }           // q'
  static double sobolev_conj(double p, int n) {             // p* = np/(n-p)
    require(p < n, "p* requires p < n");
    return n * p / (n - p);
  }
};

// ---------------------------------------------------------------------------
// Norms.

// (sum |f|^p w h^n)^{1/p}; pass nullptr weight for Lebesgue.
double lp_norm(const GridField& f, const GridField* w, double p);

// (sum_atoms |fn(loc)|^p mass)^{1/p}.
double lp_norm_atomic(const std::function<double(const Vec&)>& fn,
                      const PointMeasure& mu, double p);

// Lorentz functional of a simple function given by (value, mass) pairs:
//   ||f||_{L^{r,s}}^s = r int_0^inf t^{s-1} mu(|f|>t)^{s/r} dt  (exact,
//   piecewise evaluation), and sup_t t mu(|f|>t)^{1/r} for s = inf.
double lorentz_norm_simple(std::vector<std::pair<double, double>> value_mass,
                           double r, double s);

double lorentz_norm(const GridField& f, const Measure& mu, double r, double s);
double lorentz_norm_atomic(const std::function<double(const Vec&)>& fn,
                           const PointMeasure& mu, double r, double s);

// Weak-norm supremum over log-spaced thresholds (exact for simple functions).
double weak_threshold_sup(const std::vector<std::pair<double, double>>& value_mass,
                          double r, int thresholds = defaults::kWeakNormThresholds);

// ---------------------------------------------------------------------------
// Orlicz machinery. Averages accept any increasing Phi with Phi(0)=0 so the
// numeric associate can be used in the dual slot.

using ScalarFn = std::function<double(double)>;

// Luxemburg average inf{lambda : avg_Q Psi(|f|/lambda) <= 1} over the cells
// of Q (cube volume normalizes; cells outside the grid count as f = 0).
double orlicz_average(const GridField& f, const Cube& q, const ScalarFn& psi);
double orlicz_average(const GridField& f, const Cube& q, const YoungFunction& psi);

// Associate (Legendre transform) sup_{s>0} (s t - Psi(s)) by log-grid scan
// plus golden-section refinement.
double young_associate(const YoungFunction& psi, double t);
ScalarFn young_associate_fn(const YoungFunction& psi);

// B_{p,q} tail classifier for the integral int_1^inf Psi(t)^{q/p} t^{-q-1} dt.
struct BpqResult {
  bool converges = false;
  double fitted_slope = 0.0;  // log-log slope of the integrand's tail
  double integral_to_T = 0.0;
  bool borderline = false;    // resolved analytically from (a, b)
};

// Numeric classification of an arbitrary integrand t -> Psi(t); when the
// power-log parameters (a, b) are supplied, exact borderline resolution.
BpqResult bpq_check(const ScalarFn& psi, double p, double q, double t_max,
                    std::optional<std::pair<double, double>> power_log = std::nullopt);
BpqResult bpq_check(const YoungFunction& psi, double p, double q, double t_max = 1e12);

// Orlicz fractional maximal function over an explicit cube family:
//   max over Q of side^alpha ||w||_{Luxemburg(Q)}.
double orlicz_frac_maximal(const GridField& w, double alpha, const ScalarFn& theta,
                           const Vec& x, const std::vector<Cube>& cubes);

// Default point-anchored family: dyadic index-cubes containing x plus
// log-spaced enlargement cubes containing x and the grid support.
std::vector<Cube> default_cube_family(const GridField& w, const Vec& x);

// Family for x-free suprema: every dyadic index cube of the grid tree plus
// enlargements of the grid box.
std::vector<Cube> grid_cube_family(const GridField& w);

// Orlicz maximal field over the shared dyadic tree of the grid plus box
// enlargements (one Luxemburg solve per cube, shared by its cells).
GridField orlicz_maximal_field(const GridField& w, double alpha, const ScalarFn& theta);

// sup over the family of side(Q) ||w^{1/p}||_{Luxemburg Psi(Q)} (avg_Q v^{1-p'})^{1/p'};
// +inf when v vanishes somewhere on a cube where w does not.
double bump_condition_sup(const GridField& w, const GridField& v, double p,
                          const YoungFunction& psi, const std::vector<Cube>& cubes);

// Plain two-weight form with power averages:
//   sup over Q of side^alpha |Q|^{1/q-1/p} (avg_Q w)^{1/q} (avg_Q v^{1-p'})^{1/p'}.
double muckenhoupt_apq_sup(const GridField& w, const GridField& v, double p,
                           double q, double alpha, const std::vector<Cube>& cubes);

// Sawyer testing-condition ratio:
//   sup over Q of (int_Q I_alpha(1_Q w)^{p'} v^{1-p'})^{1/p'} / w(Q)^{1/q'}.
double sawyer_testing(const GridField& w, const GridField& v, double p, double q,
                      double alpha, const std::vector<Cube>& cubes);

}  // namespace soblab

#endif
