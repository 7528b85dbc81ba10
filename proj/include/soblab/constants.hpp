#ifndef SOBLAB_CONSTANTS_HPP
#define SOBLAB_CONSTANTS_HPP

#include <cmath>

#include "soblab/common.hpp"

namespace soblab {

// Kernel and geometric constants attached to a dimension.
//   riesz_gamma(a) = 2^a pi^{n/2} Gamma(a/2) / Gamma((n-a)/2)
//   unit_ball_volume v_n = pi^{n/2} / Gamma(n/2 + 1)
//   sphere_area omega_{n-1} = n v_n
//   talenti c_n = n v_n^{1/n}
struct KernelConstants {
  int n;

  explicit KernelConstants(int dim) : n(dim) {
    require(dim >= 1 && dim <= 3, "KernelConstants: dimension must be 1, 2 or 3");
  }

  double unit_ball_volume() const {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  }
  double sphere_area() const { return n * unit_ball_volume(); }
  double riesz_gamma(double alpha) const {
    require(alpha > 0.0 && alpha < n, "riesz_gamma: need 0 < alpha < n");
    return std::pow(2.0, alpha) * std::pow(M_PI, 0.5 * n) *
           std::tgamma(0.5 * alpha) / std::tgamma(0.5 * (n - alpha));
  }
  double talenti() const { return n * std::pow(unit_ball_volume(), 1.0 / n); }
};

inline double unit_ball_volume(int n) { return KernelConstants(n).unit_ball_volume(); }
inline double sphere_area(int n) { return KernelConstants(n).sphere_area(); }
inline double riesz_gamma(int n, double alpha) { return KernelConstants(n).riesz_gamma(alpha); }

// Every quadrature tolerance and sampling default lives here.
namespace defaults {

// Luxemburg functional bisection.
inline constexpr double kLuxemburgResidual = 1e-8;
inline constexpr int kLuxemburgMaxIter = 200;

// Young-function numeric inverse.
inline constexpr double kYoungInverseRelTol = 1e-12;

// Legendre transform (associate Young function): coarse log-grid scan
// followed by golden-section refinement.
inline constexpr int kAssociateScanPoints = 240;
inline constexpr double kAssociateSMin = 1e-9;
inline constexpr double kAssociateSMax = 1e12;

// Weak-norm suprema sample this many log-spaced thresholds.
inline constexpr int kWeakNormThresholds = 64;

// Coarea formula level count (midpoint rule in (0, max u)).
inline constexpr int kCoareaLevels = 64;

// Gauss-Legendre nodes per boundary-edge segment.
inline constexpr int kEdgeGaussNodes = 4;

// Radius sweep size for grid maximal functions.
inline constexpr int kMaximalSweepRadii = 48;

// Log-spaced cube enlargements appended to point-anchored cube families.
inline constexpr int kCubeEnlargements = 12;
inline constexpr double kCubeEnlargementSpan = 16.0;

// Angular samples for the analytic outside-the-grid tail of D^s.
inline constexpr int kTailAngularSamples = 512;

// B_{p,q} classifier: log-log slope thresholds per the borderline rule.
inline constexpr double kBpqSlopeMargin = 1e-3;

}  // namespace defaults

}  // namespace soblab

#endif
