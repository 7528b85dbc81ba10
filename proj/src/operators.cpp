#include "soblab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace soblab {

double frac_maximal_point(const PointMeasure& mu, double alpha, const Vec& x) {
  const int n = mu.dim();
  require(alpha >= 0.0 && alpha < n, "frac_maximal_point: need 0 <= alpha < n");
  require(x.size() == n, "frac_maximal_point: point dimension mismatch");
  if (mu.empty()) return 0.0;

  std::vector<std::pair<double, double>> dist_mass;
  dist_mass.reserve(mu.atoms().size());
  for (const auto& a : mu.atoms()) {
    double d = (a.location - x).norm();
    if (d == 0.0) return kInf;
    dist_mass.push_back({d, a.mass});
  }
  std::sort(dist_mass.begin(), dist_mass.end());

  const double vn = unit_ball_volume(n);
  double best = 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < dist_mass.size(); ++i) {
    cum += dist_mass[i].second;
    // ties: evaluate only after the full mass at this distance is absorbed
    if (i + 1 < dist_mass.size() && dist_mass[i + 1].first == dist_mass[i].first)
      continue;
    double d = dist_mass[i].first;
    best = std::max(best, std::pow(d, alpha - n) * cum / vn);
  }
  return best;
}

double frac_maximal_grid(const GridField& w, double alpha, const Vec& x,
                         const std::vector<double>& radii) {
  const int n = w.dim();
  require(alpha >= 0.0 && alpha < n, "frac_maximal_grid: need 0 <= alpha < n");
  require(!radii.empty(), "frac_maximal_grid: radius list must be nonempty");
  const double vn = unit_ball_volume(n);
  double best = 0.0;
  for (double r : radii) {
    require(r > 0.0, "frac_maximal_grid: radii must be positive");
    double m = grid_mass_ball(w, Ball(x, r, BallKind::closed));
    best = std::max(best, std::pow(r, alpha - n) * m / vn);
  }
  return best;
}

std::vector<double> default_radii(const GridField& w, const Vec& x, int count) {
  double r_lo = 1.5 * w.h();
  Vec lo = w.box_lo(), hi = w.box_hi();
  double far2 = 0.0;
  for (int i = 0; i < w.dim(); ++i) {
    double d = std::max(std::abs(x[i] - lo[i]), std::abs(hi[i] - x[i]));
    far2 += d * d;
  }
  double r_hi = std::max(std::sqrt(far2) * 1.05, r_lo * 2.0);
  std::vector<double> radii(count);
  for (int i = 0; i < count; ++i)
    radii[i] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (count - 1));
  return radii;
}

double frac_maximal_measure(const Measure& mu, double alpha, const Vec& x) {
  if (mu.is_atomic()) return frac_maximal_point(mu.atomic(), alpha, x);
  if (mu.is_grid()) return frac_maximal_grid(mu.grid(), alpha, x, default_radii(mu.grid(), x));
  require(alpha == 0.0, "frac_maximal_measure: Lebesgue measure requires alpha = 0");
  return 1.0;  // sup_r r^0 * v_n r^n / (v_n r^n)
}

double riesz_potential(const GridField& f, double alpha, const Vec& x) {
  const int n = f.dim();
  require(alpha > 0.0 && alpha < n, "riesz_potential: need 0 < alpha < n");
  require(x.size() == n, "riesz_potential: point dimension mismatch");
  const KernelConstants kc(n);
  const double gamma = kc.riesz_gamma(alpha);
  const double hn = f.cell_volume();
  const double h = f.h();

  // Snap to the singular cell only if x actually lies inside it.
  Eigen::Index sing = f.nearest_cell(x);
  Vec xs = f.center(sing);
  bool singular = (xs - x).cwiseAbs().maxCoeff() <= 0.5 * h + 1e-14;
  const Vec& xe = singular ? xs : x;

  double acc = 0.0;
  if (n == 2) {
    // structured sweep: incremental coordinates, reciprocal fast path for
    // the alpha = 1 kernel
    const Eigen::Index nx = f.shape()[0], ny = f.shape()[1];
    const double* vals = f.values().data();
    const bool recip = std::abs(alpha - 1.0) < 1e-15;
    const double expo = 0.5 * (alpha - n);  // applied to squared distances
    Eigen::Index flat = 0;
    for (Eigen::Index i = 0; i < nx; ++i) {
      double dx = f.origin()[0] + (i + 0.5) * h - xe[0];
      double dx2 = dx * dx;
      for (Eigen::Index j = 0; j < ny; ++j, ++flat) {
        if (singular && flat == sing) continue;
        double v = vals[flat];
        if (v == 0.0) continue;
        double dy = f.origin()[1] + (j + 0.5) * h - xe[1];
        double d2 = dx2 + dy * dy;
        acc += recip ? v / std::sqrt(d2) : v * std::pow(d2, expo);
      }
    }
  } else {
    for (Eigen::Index flat = 0; flat < f.cell_count(); ++flat) {
      if (singular && flat == sing) continue;
      double v = f[flat];
      if (v == 0.0) continue;
      double d = (f.center(flat) - xe).norm();
      acc += v * std::pow(d, alpha - n);
    }
  }
  acc *= hn;
  if (singular && f[sing] != 0.0) {
    // Equal-volume ball: int_{B_rho} |y|^{alpha-n} dy = omega_{n-1} rho^alpha / alpha.
    double rho = h / std::pow(kc.unit_ball_volume(), 1.0 / n);
    acc += f[sing] * kc.sphere_area() * std::pow(rho, alpha) / alpha;
  }
  return acc / gamma;
}

Vec riesz_transform(const GridField& f, const Vec& x) {
  const int n = f.dim();
  require(n >= 2, "riesz_transform: needs dimension >= 2");
  require(x.size() == n, "riesz_transform: point dimension mismatch");
  const KernelConstants kc(n);
  const double c = (n - 1) / kc.riesz_gamma(1.0);
  const double hn = f.cell_volume();
  const double h = f.h();

  Eigen::Index cidx = f.nearest_cell(x);
  Vec xc = f.center(cidx);
  bool inside_cell = (xc - x).cwiseAbs().maxCoeff() <= 0.5 * h + 1e-14;
  Vec xe = inside_cell ? xc : x;
  double fx = inside_cell ? f[cidx] : 0.0;

  // Largest xe-centered ball inside the grid box: the cell lattice is
  // symmetric about xe there, so the odd kernel annihilates the constant
  // mode exactly under the f(x)-subtraction.
  Vec lo = f.box_lo(), hi = f.box_hi();
  double rho = kInf;
  for (int i = 0; i < n; ++i)
    rho = std::min({rho, xe[i] - lo[i], hi[i] - xe[i]});

  Vec acc = Vec::Zero(n);
  if (n == 2) {
    const Eigen::Index nx = f.shape()[0], ny = f.shape()[1];
    const double* vals = f.values().data();
    const double rho2 = rho * rho;
    double ax = 0.0, ay = 0.0;
    Eigen::Index flat = 0;
    for (Eigen::Index i = 0; i < nx; ++i) {
      double ux = xe[0] - (f.origin()[0] + (i + 0.5) * h);
      double ux2 = ux * ux;
      for (Eigen::Index j = 0; j < ny; ++j, ++flat) {
        double uy = xe[1] - (f.origin()[1] + (j + 0.5) * h);
        double d2 = ux2 + uy * uy;
        if (d2 <= 1e-28) continue;
        double w = d2 < rho2 ? vals[flat] - fx : vals[flat];
        if (w == 0.0) continue;
        double d = std::sqrt(d2);
        double k = w / (d2 * d);
        ax += ux * k;
        ay += uy * k;
      }
    }
    acc[0] = ax;
    acc[1] = ay;
  } else {
    for (Eigen::Index flat = 0; flat < f.cell_count(); ++flat) {
      Vec u = xe - f.center(flat);
      double d = u.norm();
      if (d <= 1e-14) continue;
      double w = d < rho ? f[flat] - fx : f[flat];
      if (w == 0.0) continue;
      acc += u * (w * std::pow(d, -(n + 1.0)));
    }
  }
  return acc * (c * hn);
}

namespace {

// centered cube of side s about x, in cell indices
std::pair<IndexVec, IndexVec> cube_index_range(const GridField& f, const Vec& x,
                                               double s) {
  IndexVec lo(f.dim()), hi(f.dim());
  for (int i = 0; i < f.dim(); ++i) {
    double a = (x[i] - 0.5 * s - f.origin()[i]) / f.h() - 0.5;
    double b = (x[i] + 0.5 * s - f.origin()[i]) / f.h() - 0.5;
    lo[i] = static_cast<Eigen::Index>(std::ceil(a - 1e-12));
    hi[i] = static_cast<Eigen::Index>(std::floor(b + 1e-12)) + 1;
  }
  return {lo, hi};
}

double cube_maximal_at(const BoxSumTable& sums, const GridField& f, double alpha,
                       const Vec& x, const std::vector<double>& sides) {
  double hn = f.cell_volume();
  double best = 0.0;
  for (double s : sides) {
    auto [lo, hi] = cube_index_range(f, x, s);
    double mass = sums.box_sum(lo, hi) * hn;
    if (mass > 0.0)
      best = std::max(best, std::pow(s, alpha) * mass / std::pow(s, f.dim()));
  }
  return best;
}

}  // namespace

std::vector<double> cube_side_sweep(const GridField& f, int count) {
  double lo = f.h();
  double hi = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    hi = std::max(hi, static_cast<double>(f.shape()[i]) * f.h());
  hi *= 2.5;
  std::vector<double> sides(count);
  for (int i = 0; i < count; ++i)
    sides[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return sides;
}

GridField cube_maximal_field(const GridField& w, double alpha,
                             const std::vector<double>& sides_in) {
  BoxSumTable sums(w);
  std::vector<double> sides = sides_in.empty() ? cube_side_sweep(w) : sides_in;
  Eigen::ArrayXd out(w.cell_count());
  for (Eigen::Index i = 0; i < w.cell_count(); ++i)
    out[i] = cube_maximal_at(sums, w, alpha, w.center(i), sides);
  return GridField(w.origin(), w.h(), w.shape(), FieldRole::derived, std::move(out));
}

CubeMaximal::CubeMaximal(GridField w, double alpha, std::vector<double> sides)
    : field_(std::move(w)),
      sums_(field_),
      alpha_(alpha),
      sides_(sides.empty() ? cube_side_sweep(field_) : std::move(sides)) {}

double CubeMaximal::operator()(const Vec& x) const {
  return cube_maximal_at(sums_, field_, alpha_, x, sides_);
}

double cube_maximal_point(const GridField& w, double alpha, const Vec& x) {
  BoxSumTable sums(w);
  // enlarge the sweep so distant points still see the support
  auto sides = cube_side_sweep(w);
  double far = 0.0;
  Vec lo = w.box_lo(), hi = w.box_hi();
  for (int i = 0; i < w.dim(); ++i)
    far = std::max({far, std::abs(x[i] - lo[i]), std::abs(hi[i] - x[i])});
  for (int k = 0; k < 8; ++k) sides.push_back(2.2 * far * std::pow(1.5, k / 7.0));
  return cube_maximal_at(sums, w, alpha, x, sides);
}

std::vector<GridField> gradient(const GridField& u) {
  require(u.role() == FieldRole::function, "gradient: field role must be function");
  const int n = u.dim();
  const double inv2h = 1.0 / (2.0 * u.h());
  std::vector<GridField> out;
  out.reserve(n);
  for (int axis = 0; axis < n; ++axis) {
    Eigen::ArrayXd g = Eigen::ArrayXd::Zero(u.cell_count());
    for (Eigen::Index flat = 0; flat < u.cell_count(); ++flat) {
      IndexVec idx = u.unflatten(flat);
      if (idx[axis] == 0 || idx[axis] == u.shape()[axis] - 1) continue;
      IndexVec p = idx, m = idx;
      p[axis] += 1;
      m[axis] -= 1;
      g[flat] = (u[u.flatten(p)] - u[u.flatten(m)]) * inv2h;
    }
    // keep the compact-support invariant of the output fields
    GridField gf(u.origin(), u.h(), u.shape(), FieldRole::function, std::move(g));
    out.push_back(std::move(gf));
  }
  return out;
}

GridField gradient_magnitude(const GridField& u) {
  auto g = gradient(u);
  Eigen::ArrayXd mag = Eigen::ArrayXd::Zero(u.cell_count());
  for (const auto& comp : g) mag += comp.values().square();
  mag = mag.sqrt();
  return GridField(u.origin(), u.h(), u.shape(), FieldRole::function, std::move(mag));
}

namespace {

// int_{R^n \ box} |x-y|^{-n-s} dy by exact radial integration along sampled
// directions: for each direction the integrand contributes rho(theta)^{-s}/s,
// rho(theta) the exit distance from x to the box boundary.
double complement_tail(const GridField& u, double s, const Vec& x) {
  const int n = u.dim();
  Vec lo = u.box_lo(), hi = u.box_hi();
  for (int i = 0; i < n; ++i)
    if (x[i] <= lo[i] || x[i] >= hi[i]) return kInf;  // caller guards

  auto exit_dist = [&](const Vec& dir) {
    double t = kInf;
    for (int i = 0; i < n; ++i) {
      if (dir[i] > 1e-15) t = std::min(t, (hi[i] - x[i]) / dir[i]);
      if (dir[i] < -1e-15) t = std::min(t, (lo[i] - x[i]) / dir[i]);
    }
    return t;
  };

  if (n == 1) {
    double rp = hi[0] - x[0], rm = x[0] - lo[0];
    return (std::pow(rp, -s) + std::pow(rm, -s)) / s;
  }
  if (n == 2) {
    int m = defaults::kTailAngularSamples;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      double th = 2.0 * M_PI * (j + 0.5) / m;
      Vec dir = make_vec({std::cos(th), std::sin(th)});
      acc += std::pow(exit_dist(dir), -s);
    }
    return acc * (2.0 * M_PI / m) / s;
  }
  // n == 3: product rule on the sphere
  int mt = 64, mp = 128;
  double acc = 0.0;
  for (int a = 0; a < mt; ++a) {
    double th = M_PI * (a + 0.5) / mt;
    for (int b = 0; b < mp; ++b) {
      double ph = 2.0 * M_PI * (b + 0.5) / mp;
      Vec dir(3);
      dir[0] = std::sin(th) * std::cos(ph);
      dir[1] = std::sin(th) * std::sin(ph);
      dir[2] = std::cos(th);
      acc += std::pow(exit_dist(dir), -s) * std::sin(th);
    }
  }
  return acc * (M_PI / mt) * (2.0 * M_PI / mp) / s;
}

double local_lipschitz(const GridField& u, Eigen::Index flat) {
  IndexVec idx = u.unflatten(flat);
  double lip = 0.0;
  for (int i = 0; i < u.dim(); ++i) {
    for (int d : {-1, 1}) {
      IndexVec j = idx;
      j[i] += d;
      if (u.in_grid(j))
        lip = std::max(lip, std::abs(u[u.flatten(j)] - u[flat]) / u.h());
    }
  }
  return lip;
}

}  // namespace

double positive_frac_derivative(const GridField& u, double s, const Vec& x) {
  const int n = u.dim();
  require(s > 0.0 && s < 1.0, "positive_frac_derivative: need 0 < s < 1");
  require(x.size() == n, "positive_frac_derivative: point dimension mismatch");
  const KernelConstants kc(n);
  const double h = u.h();
  const double hn = u.cell_volume();

  Eigen::Index sing = u.nearest_cell(x);
  Vec xs = u.center(sing);
  bool inside = (xs - x).cwiseAbs().maxCoeff() <= 0.5 * h + 1e-14;
  const Vec& xe = inside ? xs : x;
  double ux = inside ? u[sing] : 0.0;

  double acc = 0.0;
  if (n == 2) {
    const Eigen::Index nx = u.shape()[0], ny = u.shape()[1];
    const double* vals = u.values().data();
    const double expo = -0.5 * (n + s);  // on squared distances
    Eigen::Index flat = 0;
    for (Eigen::Index i = 0; i < nx; ++i) {
      double dx = u.origin()[0] + (i + 0.5) * h - xe[0];
      double dx2 = dx * dx;
      for (Eigen::Index j = 0; j < ny; ++j, ++flat) {
        if (inside && flat == sing) continue;
        double diff = std::abs(ux - vals[flat]);
        if (diff == 0.0) continue;
        double dy = u.origin()[1] + (j + 0.5) * h - xe[1];
        acc += diff * std::pow(dx2 + dy * dy, expo);
      }
    }
  } else {
    for (Eigen::Index flat = 0; flat < u.cell_count(); ++flat) {
      if (inside && flat == sing) continue;
      double diff = std::abs(ux - u[flat]);
      if (diff == 0.0) continue;
      double d = (u.center(flat) - xe).norm();
      acc += diff * std::pow(d, -(n + s));
    }
  }
  acc *= hn;

  if (inside) {
    // Singular cell bounded by Lip * int_{B_rho} |y|^{1-n-s} dy over the
    // equal-volume ball: omega_{n-1} rho^{1-s} / (1-s).
    double rho = h / std::pow(kc.unit_ball_volume(), 1.0 / n);
    acc += local_lipschitz(u, sing) * kc.sphere_area() * std::pow(rho, 1.0 - s) / (1.0 - s);
    if (ux != 0.0) acc += std::abs(ux) * complement_tail(u, s, xe);
  } else {
    // x outside the grid: u(x) = 0 there, remaining tail integrand vanishes.
    Vec lo = u.box_lo(), hi = u.box_hi();
    bool in_box = true;
    for (int i = 0; i < n; ++i)
      if (xe[i] <= lo[i] || xe[i] >= hi[i]) in_box = false;
    if (in_box && ux != 0.0) acc += std::abs(ux) * complement_tail(u, s, xe);
  }
  return acc;
}

GridField positive_frac_derivative_field(const GridField& u, double s) {
  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(u.cell_count());
  std::vector<double> buf(static_cast<std::size_t>(u.cell_count()));
  parallel_for(static_cast<std::size_t>(u.cell_count()), [&](std::size_t i) {
    buf[i] = positive_frac_derivative(u, s, u.center(static_cast<Eigen::Index>(i)));
  });
  for (Eigen::Index i = 0; i < u.cell_count(); ++i) vals[i] = buf[static_cast<std::size_t>(i)];
  return GridField(u.origin(), u.h(), u.shape(), FieldRole::derived, std::move(vals));
}

}  // namespace soblab
