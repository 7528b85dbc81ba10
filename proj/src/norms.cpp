#include "soblab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace soblab {

YoungFunction::YoungFunction(double a, double b) : a_(a), b_(b) {
  require(a >= 1.0, "YoungFunction: exponent a must be >= 1");
  require(b >= 0.0, "YoungFunction: log exponent b must be >= 0");
  require(a > 1.0 || b > 0.0, "YoungFunction: Psi(t)/t must grow (a > 1 or b > 0)");
}

double YoungFunction::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  return std::pow(t, a_) * std::pow(std::log(M_E + t), b_);
}

double YoungFunction::inverse(double y) const {
  require(y >= 0.0, "YoungFunction::inverse: argument must be >= 0");
  if (y == 0.0) return 0.0;
  double hi = 1.0;
  while ((*this)(hi) < y) hi *= 2.0;
  double lo = hi * 0.5;
  while ((*this)(lo) > y) {
    hi = lo;
    lo *= 0.5;
  }
  for (int it = 0; it < 200 && (hi - lo) > defaults::kYoungInverseRelTol * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    ((*this)(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool Cube::contains(const Vec& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] >= lower[i] + side) return false;
  return true;
}

double lp_norm(const GridField& f, const GridField* w, double p) {
  require(p >= 1.0, "lp_norm: need p >= 1");
  const Eigen::ArrayXd& v = f.values();
  double s;
  if (w) {
    require(w->cell_count() == f.cell_count(), "lp_norm: weight layout mismatch");
    s = (v.abs().pow(p) * w->values()).sum();
  } else {
    s = v.abs().pow(p).sum();
  }
  return std::pow(s * f.cell_volume(), 1.0 / p);
}

double lp_norm_atomic(const std::function<double(const Vec&)>& fn,
                      const PointMeasure& mu, double p) {
  require(p >= 1.0, "lp_norm_atomic: need p >= 1");
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += std::pow(std::abs(fn(a.location)), p) * a.mass;
  return std::pow(s, 1.0 / p);
}

double lorentz_norm_simple(std::vector<std::pair<double, double>> value_mass,
                           double r, double s) {
  require(r >= 1.0, "lorentz_norm: need r >= 1");
  require(s >= 1.0, "lorentz_norm: need s >= 1 (or +inf)");
  // distinct |values| ascending with cumulative mass from above
  for (auto& vm : value_mass) vm.first = std::abs(vm.first);
  std::erase_if(value_mass, [](const auto& vm) { return vm.first == 0.0 || vm.second == 0.0; });
  if (value_mass.empty()) return 0.0;
  std::sort(value_mass.begin(), value_mass.end());

  std::vector<double> vals;   // distinct values ascending
  std::vector<double> tail;   // mass of {|f| >= vals[j]}
  for (const auto& [v, m] : value_mass) {
    if (vals.empty() || v != vals.back()) {
      vals.push_back(v);
      tail.push_back(m);
    } else {
      tail.back() += m;
    }
  }
  for (int j = static_cast<int>(tail.size()) - 2; j >= 0; --j) tail[j] += tail[j + 1];

  if (std::isinf(s)) {
    double best = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j)
      best = std::max(best, vals[j] * std::pow(tail[j], 1.0 / r));
    return best;
  }
  // On t in [v_{j-1}, v_j) the distribution function equals tail[j].
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j) {
    acc += std::pow(tail[j], s / r) * (std::pow(vals[j], s) - std::pow(prev, s));
    prev = vals[j];
  }
  return std::pow(r / s * acc, 1.0 / s);
}

namespace {

std::vector<std::pair<double, double>> pairs_on_measure(const GridField& f,
                                                        const Measure& mu) {
  std::vector<std::pair<double, double>> vm;
  if (mu.is_atomic()) {
    for (const auto& a : mu.atomic().atoms()) vm.push_back({f.interp(a.location), a.mass});
    return vm;
  }
  const GridField* density = mu.is_grid() ? &mu.grid() : nullptr;
  if (density)
    require(density->cell_count() == f.cell_count(),
            "lorentz_norm: measure grid layout mismatch");
  double hn = f.cell_volume();
  vm.reserve(static_cast<std::size_t>(f.cell_count()));
  for (Eigen::Index i = 0; i < f.cell_count(); ++i) {
    double m = density ? (*density)[i] * hn : hn;
    if (m > 0.0) vm.push_back({f[i], m});
  }
  return vm;
}

}  // namespace

double lorentz_norm(const GridField& f, const Measure& mu, double r, double s) {
  return lorentz_norm_simple(pairs_on_measure(f, mu), r, s);
}

double lorentz_norm_atomic(const std::function<double(const Vec&)>& fn,
                           const PointMeasure& mu, double r, double s) {
  std::vector<std::pair<double, double>> vm;
  for (const auto& a : mu.atoms()) vm.push_back({fn(a.location), a.mass});
  return lorentz_norm_simple(std::move(vm), r, s);
}

double weak_threshold_sup(const std::vector<std::pair<double, double>>& value_mass,
                          double r, int thresholds) {
  std::vector<std::pair<double, double>> vm;
  for (const auto& [v, m] : value_mass)
    if (std::abs(v) > 0.0 && m > 0.0) vm.push_back({std::abs(v), m});
  if (vm.empty()) return 0.0;
  std::sort(vm.begin(), vm.end());
  double vmin = vm.front().first, vmax = vm.back().first;

  // Log-spaced thresholds; appending the distinct values keeps the sup exact
  // for simple functions with few levels.
  std::vector<double> ts;
  for (int j = 0; j < thresholds; ++j)
    ts.push_back(vmin * std::pow(vmax / vmin, static_cast<double>(j) / std::max(1, thresholds - 1)));
  std::vector<double> distinct;
  for (const auto& [v, m] : vm)
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
  if (static_cast<int>(distinct.size()) <= thresholds)
    ts.insert(ts.end(), distinct.begin(), distinct.end());

  double best = 0.0;
  for (double t : ts) {
    double mass_ge = 0.0;  // mass of {|f| >= t}: the left limit of the
                           // distribution function, where the sup lives
    for (const auto& [v, m] : vm)
      if (v >= t) mass_ge += m;
    best = std::max(best, t * std::pow(mass_ge, 1.0 / r));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Orlicz.

namespace {

// Iterates the grid cells whose centers lie in the cube.
template <typename F>
void for_cells_in_cube(const GridField& f, const Cube& q, F&& fn) {
  const int n = f.dim();
  IndexVec lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    double a = (q.lower[i] - f.origin()[i]) / f.h() - 0.5;
    double b = (q.lower[i] + q.side - f.origin()[i]) / f.h() - 0.5;
    lo[i] = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(a - 1e-12)));
    hi[i] = std::min<Eigen::Index>(f.shape()[i] - 1,
                                   static_cast<Eigen::Index>(std::floor(b + 1e-12)));
    if (lo[i] > hi[i]) return;
  }
  IndexVec idx = lo;
  while (true) {
    Vec c = f.center(idx);
    if (q.contains(c)) fn(f.flatten(idx));
    int axis = n - 1;
    while (axis >= 0) {
      if (++idx[axis] <= hi[axis]) break;
      idx[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

}  // namespace

double orlicz_average(const GridField& f, const Cube& q, const ScalarFn& psi) {
  require(q.dim() == f.dim(), "orlicz_average: cube dimension mismatch");
  std::vector<double> cells;
  double fmax = 0.0;
  for_cells_in_cube(f, q, [&](Eigen::Index flat) {
    double v = std::abs(f[flat]);
    require(std::isfinite(v), "orlicz_average: unbounded value on cube");
    cells.push_back(v);
    fmax = std::max(fmax, v);
  });
  if (fmax == 0.0) return 0.0;

  const double scale = f.cell_volume() / q.volume();
  auto G = [&](double lambda) {
    double s = 0.0;
    for (double v : cells)
      if (v > 0.0) s += psi(v / lambda);
    return s * scale;
  };

  double hi = fmax;
  while (G(hi) > 1.0) hi *= 2.0;
  double lo = hi;
  while (G(lo * 0.5) <= 1.0) lo *= 0.5;
  lo *= 0.5;
  // G is continuous and strictly decreasing on [lo, hi]; G(lo) > 1 >= G(hi).
  double mid = hi;
  for (int it = 0; it < defaults::kLuxemburgMaxIter; ++it) {
    mid = 0.5 * (lo + hi);
    double g = G(mid);
    if (std::abs(g - 1.0) <= defaults::kLuxemburgResidual) return mid;
    (g > 1.0 ? lo : hi) = mid;
  }
  if (std::abs(G(mid) - 1.0) > 1e-6)
    throw std::logic_error("orlicz_average: Luxemburg bisection did not converge");
  return mid;
}

double orlicz_average(const GridField& f, const Cube& q, const YoungFunction& psi) {
  return orlicz_average(f, q, [&psi](double t) { return psi(t); });
}

double young_associate(const YoungFunction& psi, double t) {
  require(t >= 0.0, "young_associate: argument must be >= 0");
  if (t == 0.0) return 0.0;
  const int m = defaults::kAssociateScanPoints;
  const double s_lo = defaults::kAssociateSMin, s_hi = defaults::kAssociateSMax;
  auto value = [&](double s) { return s * t - psi(s); };

  int best_i = 0;
  double best = -kInf;
  std::vector<double> grid(m);
  for (int i = 0; i < m; ++i) {
    grid[i] = s_lo * std::pow(s_hi / s_lo, static_cast<double>(i) / (m - 1));
    double v = value(grid[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = grid[std::max(0, best_i - 1)];
  double b = grid[std::min(m - 1, best_i + 1)];
  // golden-section refinement on the bracketing interval
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 160; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = value(x1);
    }
  }
  return std::max({best, f1, f2, 0.0});
}

ScalarFn young_associate_fn(const YoungFunction& psi) {
  return [psi](double t) { return young_associate(psi, t); };
}

BpqResult bpq_check(const ScalarFn& psi, double p, double q, double t_max,
                    std::optional<std::pair<double, double>> power_log) {
  require(p > 1.0 && q > 1.0, "bpq_check: need p, q > 1");
  BpqResult out;
  auto integrand = [&](double t) { return std::pow(psi(t), q / p) * std::pow(t, -q - 1.0); };

  // log-grid trapezoid of int_1^T g(t) dt = int g(t) t dlog t
  const int per_decade = 64;
  int decades = static_cast<int>(std::ceil(std::log10(t_max)));
  int m = per_decade * decades + 1;
  double dlt = std::log(t_max) / (m - 1);
  std::vector<double> lt(m), lg(m);
  double integral = 0.0;
  for (int i = 0; i < m; ++i) {
    lt[i] = i * dlt;
    double t = std::exp(lt[i]);
    double g = integrand(t);
    lg[i] = std::log(std::max(g, 1e-300));
    double w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    integral += w * g * t * dlt;
  }
  out.integral_to_T = integral;

  // least-squares slope of log g vs log t over the last two decades
  int tail_from = std::max(0, m - 2 * per_decade - 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = tail_from; i < m; ++i) {
    sx += lt[i];
    sy += lg[i];
    sxx += lt[i] * lt[i];
    sxy += lt[i] * lg[i];
    ++cnt;
  }
  out.fitted_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);

  if (power_log) {
    // Exact resolution from Psi(t) = t^a log(e+t)^b: the integrand is
    // t^{aq/p - q - 1} log^{bq/p}, so the power part decides unless a = p.
    double E = power_log->first * q / p - q - 1.0;
    double L = power_log->second * q / p;
    if (std::abs(E + 1.0) <= 1e-9) {
      out.borderline = true;
      out.converges = L < -1.0;
    } else {
      out.converges = E < -1.0;
    }
    return out;
  }

  if (out.fitted_slope < -1.0 - defaults::kBpqSlopeMargin &&
      out.fitted_slope > -1.0 - 0.05) {
    // Near-borderline: the power slope sits at -1 and a log factor decides.
    // Fit g(t) t ~ C log^L t over the last four decades and compare L to -1.
    out.borderline = true;
    int from = std::max(0, m - 4 * per_decade - 1);
    double ax = 0, ay = 0, axx = 0, axy = 0;
    int k = 0;
    for (int i = from; i < m; ++i) {
      if (lt[i] <= 1.0) continue;
      double xx = std::log(lt[i]);
      double yy = lg[i] + lt[i];  // log(g t)
      ax += xx;
      ay += yy;
      axx += xx * xx;
      axy += xx * yy;
      ++k;
    }
    double L = (k * axy - ax * ay) / (k * axx - ax * ax);
    out.converges = L < -1.0 - defaults::kBpqSlopeMargin;
    return out;
  }

  out.converges = out.fitted_slope < -1.0 - defaults::kBpqSlopeMargin;
  return out;
}

BpqResult bpq_check(const YoungFunction& psi, double p, double q, double t_max) {
  return bpq_check([&psi](double t) { return psi(t); }, p, q, t_max,
                   std::make_pair(psi.a(), psi.b()));
}

double orlicz_frac_maximal(const GridField& w, double alpha, const ScalarFn& theta,
                           const Vec& x, const std::vector<Cube>& cubes) {
  require(alpha >= 0.0 && alpha < w.dim(), "orlicz_frac_maximal: need 0 <= alpha < n");
  double best = 0.0;
  for (const Cube& q : cubes) {
    require(q.contains(x), "orlicz_frac_maximal: cube family member must contain x");
    best = std::max(best, std::pow(q.side, alpha) * orlicz_average(w, q, theta));
  }
  return best;
}

std::vector<Cube> default_cube_family(const GridField& w, const Vec& x) {
  const int n = w.dim();
  std::vector<Cube> out;

  // dyadic index cubes containing x, from a single cell up to the grid root
  Vec lo = w.box_lo(), hi = w.box_hi();
  bool inside = true;
  IndexVec idx(n);
  for (int i = 0; i < n; ++i) {
    if (x[i] < lo[i] || x[i] >= hi[i]) inside = false;
  }
  if (inside) {
    Eigen::Index m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, w.shape()[i]);
    int root = 0;
    while ((Eigen::Index{1} << root) < m) ++root;
    IndexVec cidx = w.unflatten(w.nearest_cell(x));
    for (int level = 0; level <= root; ++level) {
      Cube q;
      q.lower.resize(n);
      q.side = std::ldexp(1.0, level) * w.h();
      for (int i = 0; i < n; ++i)
        q.lower[i] = w.origin()[i] +
                     static_cast<double>((cidx[i] >> level) << level) * w.h();
      if (q.contains(x)) out.push_back(q);
    }
  }

  // log-spaced enlargements covering both x and the grid box
  double span = 0.0;
  Vec mid(n);
  for (int i = 0; i < n; ++i) {
    double a = std::min(x[i], lo[i]), b = std::max(x[i], hi[i]);
    span = std::max(span, b - a);
    mid[i] = 0.5 * (a + b);
  }
  span *= 1.0 + 1e-9;
  for (int k = 0; k < defaults::kCubeEnlargements; ++k) {
    double side = span * std::pow(defaults::kCubeEnlargementSpan,
                                  static_cast<double>(k) /
                                      (defaults::kCubeEnlargements - 1));
    Cube q;
    q.side = side;
    q.lower = mid - Vec::Constant(n, side / 2.0);
    out.push_back(q);
  }
  return out;
}

std::vector<Cube> grid_cube_family(const GridField& w) {
  const int n = w.dim();
  std::vector<Cube> out;
  Eigen::Index m = 0;
  for (int i = 0; i < n; ++i) m = std::max(m, w.shape()[i]);
  int root = 0;
  while ((Eigen::Index{1} << root) < m) ++root;
  for (int level = 0; level <= root; ++level) {
    Eigen::Index step = Eigen::Index{1} << level;
    IndexVec counts(n);
    for (int i = 0; i < n; ++i) counts[i] = (w.shape()[i] + step - 1) / step;
    IndexVec it = IndexVec::Zero(n);
    while (true) {
      Cube q;
      q.lower.resize(n);
      q.side = static_cast<double>(step) * w.h();
      for (int i = 0; i < n; ++i)
        q.lower[i] = w.origin()[i] + static_cast<double>(it[i] * step) * w.h();
      out.push_back(q);
      int axis = n - 1;
      while (axis >= 0) {
        if (++it[axis] < counts[axis]) break;
        it[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  Vec lo = w.box_lo(), hi = w.box_hi();
  Vec mid = 0.5 * (lo + hi);
  double span = (hi - lo).maxCoeff() * (1.0 + 1e-9);
  for (int k = 1; k <= defaults::kCubeEnlargements; ++k) {
    Cube q;
    q.side = span * std::pow(defaults::kCubeEnlargementSpan,
                             static_cast<double>(k) / defaults::kCubeEnlargements);
    q.lower = mid - Vec::Constant(n, q.side / 2.0);
    out.push_back(q);
  }
  return out;
}

GridField orlicz_maximal_field(const GridField& w, double alpha, const ScalarFn& theta) {
  const int n = w.dim();
  Eigen::Index m = 0;
  for (int i = 0; i < n; ++i) m = std::max(m, w.shape()[i]);
  int root = 0;
  while ((Eigen::Index{1} << root) < m) ++root;

  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(w.cell_count());
  // one Luxemburg solve per dyadic cube, shared by all its cells
  for (int level = 0; level <= root; ++level) {
    Eigen::Index step = Eigen::Index{1} << level;
    IndexVec counts(n);
    for (int i = 0; i < n; ++i) counts[i] = (w.shape()[i] + step - 1) / step;
    IndexVec it = IndexVec::Zero(n);
    while (true) {
      Cube q;
      q.lower.resize(n);
      q.side = static_cast<double>(step) * w.h();
      for (int i = 0; i < n; ++i)
        q.lower[i] = w.origin()[i] + static_cast<double>(it[i] * step) * w.h();
      double val = std::pow(q.side, alpha) * orlicz_average(w, q, theta);
      if (val > 0.0) {
        IndexVec lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
          lo[i] = it[i] * step;
          hi[i] = std::min<Eigen::Index>(w.shape()[i], (it[i] + 1) * step);
        }
        IndexVec idx = lo;
        while (true) {
          Eigen::Index flat = w.flatten(idx);
          out[flat] = std::max(out[flat], val);
          int axis = n - 1;
          while (axis >= 0) {
            if (++idx[axis] < hi[axis]) break;
            idx[axis] = lo[axis];
            --axis;
          }
          if (axis < 0) break;
        }
      }
      int axis = n - 1;
      while (axis >= 0) {
        if (++it[axis] < counts[axis]) break;
        it[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  // box enlargements, shared by every cell
  Vec lo = w.box_lo(), hi = w.box_hi();
  Vec mid = 0.5 * (lo + hi);
  double span = (hi - lo).maxCoeff() * (1.0 + 1e-9);
  for (int k = 1; k <= 3; ++k) {
    Cube q;
    q.side = span * std::pow(4.0, k / 3.0);
    q.lower = mid - Vec::Constant(n, q.side / 2.0);
    double val = std::pow(q.side, alpha) * orlicz_average(w, q, theta);
    out = out.max(val);
  }
  return GridField(w.origin(), w.h(), w.shape(), FieldRole::derived, std::move(out));
}

double bump_condition_sup(const GridField& w, const GridField& v, double p,
                          const YoungFunction& psi, const std::vector<Cube>& cubes) {
  require(p > 1.0, "bump_condition_sup: need p > 1");
  const double pc = p / (p - 1.0);
  GridField wp = w;
  wp.values() = w.values().pow(1.0 / p);

  double best = 0.0;
  for (const Cube& q : cubes) {
    double wn = orlicz_average(wp, q, psi);
    if (wn == 0.0) continue;
    // avg of v^{1-p'} over the cube, cells outside the grid excluded from
    // the average (v is only known on its grid)
    double s = 0.0;
    Eigen::Index cnt = 0;
    bool zero_v = false;
    for_cells_in_cube(v, q, [&](Eigen::Index flat) {
      double vv = v[flat];
      if (vv <= 0.0) {
        zero_v = true;
        return;
      }
      s += std::pow(vv, 1.0 - pc);
      ++cnt;
    });
    if (zero_v) return kInf;
    if (cnt == 0) continue;
    double vpart = std::pow(s / static_cast<double>(cnt), 1.0 / pc);
    best = std::max(best, q.side * wn * vpart);
  }
  return best;
}

double muckenhoupt_apq_sup(const GridField& w, const GridField& v, double p,
                           double q, double alpha, const std::vector<Cube>& cubes) {
  require(p > 1.0 && q >= p, "muckenhoupt_apq_sup: need 1 < p <= q");
  const double pc = p / (p - 1.0);
  double best = 0.0;
  for (const Cube& c : cubes) {
    double wsum = 0.0, vsum = 0.0;
    Eigen::Index cnt = 0;
    bool zero_v = false;
    for_cells_in_cube(w, c, [&](Eigen::Index flat) {
      wsum += w[flat];
      double vv = v[flat];
      if (vv <= 0.0)
        zero_v = true;
      else
        vsum += std::pow(vv, 1.0 - pc);
      ++cnt;
    });
    if (cnt == 0) continue;
    if (zero_v && wsum > 0.0) return kInf;
    double wavg = wsum / static_cast<double>(cnt);
    double vavg = vsum / static_cast<double>(cnt);
    double vol = c.volume();
    best = std::max(best, std::pow(c.side, alpha) * std::pow(vol, 1.0 / q - 1.0 / p) *
                              std::pow(wavg, 1.0 / q) * std::pow(vavg, 1.0 / pc));
  }
  return best;
}

double sawyer_testing(const GridField& w, const GridField& v, double p, double q,
                      double alpha, const std::vector<Cube>& cubes) {
  require(p > 1.0 && q > 1.0, "sawyer_testing: need p, q > 1");
  const double pc = p / (p - 1.0);
  const double qc = q / (q - 1.0);
  const double hn = w.cell_volume();

  double best = 0.0;
  for (const Cube& c : cubes) {
    std::vector<Eigen::Index> cells;
    for_cells_in_cube(w, c, [&](Eigen::Index flat) { cells.push_back(flat); });
    if (cells.empty()) continue;

    GridField wq = GridField::zeros_like(w, w.role());
    double wmass = 0.0;
    for (Eigen::Index flat : cells) {
      wq.values()[flat] = w[flat];
      wmass += w[flat];
    }
    wmass *= hn;
    if (wmass == 0.0) continue;  // numerator vanishes too: 0/0 -> 0

    double num = 0.0;
    bool infinite = false;
    for (Eigen::Index flat : cells) {
      double t = riesz_potential(wq, alpha, w.center(flat));
      double vv = v[flat];
      if (t == 0.0) continue;
      if (vv <= 0.0) {
        infinite = true;
        break;
      }
      num += std::pow(t, pc) * std::pow(vv, 1.0 - pc);
    }
    if (infinite) return kInf;
    num = std::pow(num * hn, 1.0 / pc);
    best = std::max(best, num / std::pow(wmass, 1.0 / qc));
  }
  return best;
}

}  // namespace soblab
