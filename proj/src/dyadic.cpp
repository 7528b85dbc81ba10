#include "soblab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "soblab/operators.hpp"

namespace soblab {

std::vector<Shift> Shift::all(int dim) {
  std::vector<Shift> out;
  for (int mask = 0; mask < (1 << dim); ++mask)
    out.push_back(Shift{static_cast<std::uint8_t>(mask), dim});
  return out;
}

namespace {

inline int parity_sign(int level) { return (level & 1) ? -1 : 1; }

inline std::int64_t cube_index_1d(double x, int level, double t_component) {
  double side = std::ldexp(1.0, level);
  double u = x / side - parity_sign(level) * t_component;
  double f = std::floor(u);
  if (std::abs(f) > 4.0e15)
    throw UnsupportedError("dyadic: coordinate/level out of indexable range");
  return static_cast<std::int64_t>(f);
}

}  // namespace

double DyadicCube::lower(int axis) const {
  return std::ldexp(static_cast<double>(index[axis]) +
                        parity_sign(level) * shift.component(axis),
                    level);
}

Vec DyadicCube::lower_corner() const {
  Vec v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = lower(i);
  return v;
}

bool DyadicCube::contains(const Vec& x) const {
  for (int i = 0; i < dim(); ++i)
    if (cube_index_1d(x[i], level, shift.component(i)) != index[i]) return false;
  return true;
}

double DyadicCube::volume() const { return std::pow(side(), dim()); }

DyadicCube cube_at(const Vec& x, int level, const Shift& t) {
  DyadicCube q;
  q.shift = t;
  q.level = level;
  q.index.resize(x.size());
  for (int i = 0; i < static_cast<int>(x.size()); ++i)
    q.index[i] = cube_index_1d(x[i], level, t.component(i));
  return q;
}

std::pair<Shift, DyadicCube> containing_cube(const Ball& ball) {
  const int dim = ball.dim();
  const double r = ball.radius;
  int k_lo = static_cast<int>(std::floor(std::log2(2.0 * r)));
  int k_hi = static_cast<int>(std::floor(std::log2(12.0 * r))) + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    double side = std::ldexp(1.0, k);
    if (side > 12.0 * r * (1.0 + 1e-12)) break;
    for (const Shift& t : Shift::all(dim)) {
      DyadicCube q = cube_at(ball.center, k, t);
      bool fits = true;
      for (int i = 0; i < dim && fits; ++i) {
        double lo = q.lower(i);
        if (ball.center[i] - r < lo - 1e-12 * side ||
            ball.center[i] + r > lo + side + 1e-12 * side)
          fits = false;
      }
      if (fits) return {t, q};
    }
  }
  throw std::logic_error("containing_cube: no cube found within side 12 r");
}

double dyadic_frac_maximal(const PointMeasure& mu, double alpha, const Vec& x,
                           const Shift& t) {
  const int n = mu.dim();
  require(alpha >= 0.0 && alpha < n, "dyadic_frac_maximal: need 0 <= alpha < n");
  require(x.size() == n, "dyadic_frac_maximal: point dimension mismatch");
  if (mu.empty()) return 0.0;

  double d_min = kInf;
  double coord_max = x.cwiseAbs().maxCoeff();
  for (const auto& a : mu.atoms()) {
    double d = (a.location - x).norm();
    if (d == 0.0) return kInf;
    d_min = std::min(d_min, d);
    coord_max = std::max(coord_max, a.location.cwiseAbs().maxCoeff());
  }

  // mu(Q_k(x)) changes at finitely many levels; below k_lo the cube holds no
  // atom, and past k_cap every atom that can ever share a cube with x has
  // joined (the 1/3-shifted axes join once 2^k > 3 max|coord|; the unshifted
  // axes join by 2^k > max|coord| or never, for opposite signs).
  int k_lo = static_cast<int>(std::floor(std::log2(d_min))) - 1;
  int k_cap = static_cast<int>(std::ceil(std::log2(3.0 * (coord_max + 1.0)))) + 3;

  double best = 0.0;
  const double total = mu.total_mass();
  for (int k = k_lo; k <= k_cap; ++k) {
    double side = std::ldexp(1.0, k);
    double tail = std::pow(side, alpha - n) * total;
    if (tail <= best) break;  // larger cubes only decay
    DyadicCube q = cube_at(x, k, t);
    double mass = 0.0;
    for (const auto& a : mu.atoms())
      if (q.contains(a.location)) mass += a.mass;
    if (mass > 0.0) best = std::max(best, std::pow(side, alpha - n) * mass);
  }
  return best;
}

std::vector<DyadicCube> stopping_cubes(const PointMeasure& mu, double alpha,
                                       double lambda, const Shift& t) {
  const int n = mu.dim();
  require(alpha >= 0.0 && alpha < n, "stopping_cubes: need 0 <= alpha < n");
  require(lambda > 0.0, "stopping_cubes: lambda must be positive");
  if (!std::isfinite(mu.total_mass()))
    throw UnsupportedError("stopping_cubes: measure must have finite total mass");
  if (mu.empty()) return {};

  const double total = mu.total_mass();
  // Above k_top every cube average side^{alpha-n} mu(Q) <= lambda.
  int k_top = static_cast<int>(std::ceil(std::log2(total / lambda) / (n - alpha)));
  double m_min = kInf;
  for (const auto& a : mu.atoms()) m_min = std::min(m_min, a.mass);
  int k_bot = static_cast<int>(std::floor(std::log2(m_min / lambda) / (n - alpha))) - 4;

  std::vector<DyadicCube> selected;
  std::vector<bool> covered(mu.atoms().size(), false);
  std::size_t n_covered = 0;

  for (int k = k_top - 1; k >= k_bot && n_covered < mu.atoms().size(); --k) {
    // Group uncovered atoms by their containing cube at this level. Atoms of
    // one cube are either all covered or all uncovered (nesting).
    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
      if (covered[i]) continue;
      DyadicCube q = cube_at(mu.atoms()[i].location, k, t);
      std::vector<std::int64_t> key(q.index.begin(), q.index.end());
      groups[key].push_back(i);
    }
    double side = std::ldexp(1.0, k);
    double scale = std::pow(side, alpha - n);
    for (const auto& [key, members] : groups) {
      double mass = 0.0;
      for (std::size_t i : members) mass += mu.atoms()[i].mass;
      if (scale * mass > lambda) {
        DyadicCube q = cube_at(mu.atoms()[members.front()].location, k, t);
        selected.push_back(q);
        for (std::size_t i : members) {
          covered[i] = true;
          ++n_covered;
        }
      }
    }
  }
  if (n_covered < mu.atoms().size())
    throw std::logic_error("stopping_cubes: scan ended with uncovered atoms");
  return selected;
}

HausdorffBound hausdorff_content_bound(const PointMeasure& mu, double alpha,
                                       double lambda) {
  HausdorffBound out;
  Shift t0;
  t0.mask = 0;
  t0.dim = mu.dim();
  out.cubes = stopping_cubes(mu, alpha, lambda, t0);
  for (const auto& q : out.cubes) out.sum += std::pow(q.side(), mu.dim() - alpha);
  out.bound = mu.total_mass() / lambda;
  return out;
}

// ---------------------------------------------------------------------------
// Grid-aligned dyadic tree.

namespace {

int grid_root_level(const GridField& f) {
  Eigen::Index m = 0;
  for (int i = 0; i < f.dim(); ++i) m = std::max(m, f.shape()[i]);
  int j = 0;
  while ((Eigen::Index{1} << j) < m) ++j;
  return j;
}

struct GridCubeKey {
  int level;
  std::int64_t packed;
  bool operator==(const GridCubeKey& o) const {
    return level == o.level && packed == o.packed;
  }
};

struct GridCubeKeyHash {
  std::size_t operator()(const GridCubeKey& k) const {
    return std::hash<std::int64_t>()(k.packed * 37 + k.level);
  }
};

std::int64_t pack_base(const IndexVec& base, int dim) {
  std::int64_t p = 0;
  for (int i = 0; i < dim; ++i) p = p * (1 << 21) + (base[i] + 4);
  return p;
}

}  // namespace

SparseFamily sparse_family(const GridField& f, double alpha) {
  const int n = f.dim();
  require(alpha >= 0.0 && alpha < n, "sparse_family: need 0 <= alpha < n");
  require((f.values() >= 0.0).all(), "sparse_family: field values must be >= 0");

  SparseFamily fam;
  fam.root_level = grid_root_level(f);
  fam.constant = std::ldexp(1.0, n + 1);  // 2^{n+1}
  if ((f.values() == 0.0).all()) return fam;

  BoxSumTable sums(f);
  const double h = f.h();
  const double tau = fam.constant;

  auto cube_sum = [&](const GridCube& q) {
    IndexVec hi = q.base;
    for (int i = 0; i < n; ++i) hi[i] += (Eigen::Index{1} << q.level);
    return sums.box_sum(q.base, hi);
  };
  auto alpha_avg = [&](const GridCube& q, double sum) {
    double side = std::ldexp(1.0, q.level) * h;
    double cells = std::ldexp(1.0, q.level * n);
    return std::pow(side, alpha) * (sum / cells);
  };

  GridCube root;
  root.level = fam.root_level;
  root.base = IndexVec::Zero(n);

  // Top-down CZ selection on side^alpha-weighted averages.
  std::vector<std::pair<GridCube, double>> stack;  // cube, its alpha-average
  std::vector<SparseEntry> entries;
  std::unordered_map<GridCubeKey, std::size_t, GridCubeKeyHash> entry_of;

  double root_avg = alpha_avg(root, cube_sum(root));
  stack.push_back({root, root_avg});
  entries.push_back(SparseEntry{root, root_avg,
                                std::int64_t{1} << (root.level * n), 0, {}});
  entry_of[{root.level, pack_base(root.base, n)}] = 0;

  while (!stack.empty()) {
    auto [q, q_avg] = stack.back();
    stack.pop_back();
    std::size_t self = entry_of[{q.level, pack_base(q.base, n)}];
    std::int64_t child_cells = 0;

    // Depth-first search for the maximal descendants whose alpha-average
    // exceeds tau * q_avg.
    std::vector<GridCube> probe;
    if (q.level > 0) probe.push_back(q);
    while (!probe.empty()) {
      GridCube p = probe.back();
      probe.pop_back();
      Eigen::Index half = Eigen::Index{1} << (p.level - 1);
      for (int corner = 0; corner < (1 << n); ++corner) {
        GridCube c;
        c.level = p.level - 1;
        c.base = p.base;
        for (int i = 0; i < n; ++i)
          if (corner & (1 << i)) c.base[i] += half;
        double s = cube_sum(c);
        if (s <= 0.0) continue;
        double c_avg = alpha_avg(c, s);
        if (c_avg > tau * q_avg) {
          child_cells += std::int64_t{1} << (c.level * n);
          std::size_t id = entries.size();
          entries.push_back(SparseEntry{c, c_avg,
                                        std::int64_t{1} << (c.level * n), 0, {}});
          entry_of[{c.level, pack_base(c.base, n)}] = id;
          stack.push_back({c, c_avg});
        } else if (c.level > 0) {
          probe.push_back(c);
        }
      }
    }
    entries[self].major_cells = entries[self].cube_cells - child_cells;
  }

  // Assign each real cell to its minimal selected cube.
  for (Eigen::Index flat = 0; flat < f.cell_count(); ++flat) {
    IndexVec idx = f.unflatten(flat);
    for (int level = 0; level <= fam.root_level; ++level) {
      IndexVec base(n);
      for (int i = 0; i < n; ++i)
        base[i] = (idx[i] >> level) << level;
      auto it = entry_of.find({level, pack_base(base, n)});
      if (it != entry_of.end()) {
        entries[it->second].e_cells.push_back(flat);
        break;
      }
    }
  }

  fam.entries = std::move(entries);
  return fam;
}

Eigen::ArrayXd grid_dyadic_maximal(const GridField& f, double alpha) {
  const int n = f.dim();
  require(alpha >= 0.0 && alpha < n, "grid_dyadic_maximal: need 0 <= alpha < n");
  BoxSumTable sums(f);
  int root = grid_root_level(f);
  Eigen::ArrayXd out(f.cell_count());
  for (Eigen::Index flat = 0; flat < f.cell_count(); ++flat) {
    IndexVec idx = f.unflatten(flat);
    double best = 0.0;
    for (int level = 0; level <= root; ++level) {
      IndexVec lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        lo[i] = (idx[i] >> level) << level;
        hi[i] = lo[i] + (Eigen::Index{1} << level);
      }
      double s = sums.box_sum(lo, hi);
      double side = std::ldexp(1.0, level) * f.h();
      double cells = std::ldexp(1.0, level * n);
      best = std::max(best, std::pow(side, alpha) * (s / cells));
    }
    out[flat] = best;
  }
  return out;
}

Eigen::ArrayXd sparse_sum(const GridField& f, const SparseFamily& fam, double) {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.cell_count());
  for (const auto& e : fam.entries)
    for (Eigen::Index flat : e.e_cells) out[flat] += e.alpha_average;
  return out;
}

nlohmann::json sparse_family_to_json(const SparseFamily& fam) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : fam.entries) {
    nlohmann::json cells = nlohmann::json::array();
    for (Eigen::Index c : e.e_cells) cells.push_back(c);
    std::vector<std::int64_t> m(e.cube.base.begin(), e.cube.base.end());
    arr.push_back({{"t", 0},
                   {"k", e.cube.level},
                   {"m", m},
                   {"cells_of_E_Q", std::move(cells)}});
  }
  return nlohmann::json{{"constant", fam.constant},
                        {"root_level", fam.root_level},
                        {"cubes", std::move(arr)}};
}

DominationCheck dyadic_domination_check(const PointMeasure& mu, double alpha,
                                        const std::vector<Vec>& samples) {
  DominationCheck out;
  auto shifts = Shift::all(mu.dim());
  for (const Vec& x : samples) {
    double lhs = frac_maximal_point(mu, alpha, x);
    if (std::isinf(lhs)) {
      ++out.excluded_points;
      continue;
    }
    double rhs = 0.0;
    for (const Shift& t : shifts) rhs += dyadic_frac_maximal(mu, alpha, x, t);
    double ratio = (lhs == 0.0 && rhs == 0.0) ? 0.0 : lhs / rhs;
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

}  // namespace soblab
