#include "soblab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "soblab/operators.hpp"

namespace soblab {

namespace {

constexpr double kGaussNode[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double kGaussWeight[2] = {0.6521451548625461, 0.34785484513745385};

// 4-point Gauss-Legendre on the segment [a, b] of a scalar line integrand.
double gauss_segment(const Vec& a, const Vec& b, const PointFn& w) {
  double len = (b - a).norm();
  double acc = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      double t = 0.5 + 0.5 * sgn * kGaussNode[i];
      acc += 0.5 * kGaussWeight[i] * w(a + t * (b - a));
    }
  }
  return acc * len;
}

bool proper_crossing(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  auto orient = [](const Vec& p, const Vec& q, const Vec& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
         o3 != 0 && o4 != 0;
}

}  // namespace

PolygonSet::PolygonSet(std::vector<Loop> loops, bool check_simple)
    : loops_(std::move(loops)) {
  for (auto& loop : loops_) {
    require(loop.size() >= 3, "PolygonSet: loops need at least 3 vertices");
    for (const Vec& v : loop) {
      require(v.size() == 2, "PolygonSet: vertices must be planar");
      require(v.allFinite(), "PolygonSet: vertices must be finite");
    }
  }
  if (check_simple) validate_simple();
}

void PolygonSet::validate_simple() const {
  // pairwise proper-crossing sweep; adjacent edges share endpoints and are exempt
  struct Edge {
    Vec a, b;
    std::size_t loop, pos;
  };
  std::vector<Edge> edges;
  for (std::size_t l = 0; l < loops_.size(); ++l) {
    const Loop& loop = loops_[l];
    for (std::size_t i = 0; i < loop.size(); ++i)
      edges.push_back({loop[i], loop[(i + 1) % loop.size()], l, i});
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const Edge& e = edges[i];
      const Edge& f = edges[j];
      if (e.loop == f.loop) {
        std::size_t m = loops_[e.loop].size();
        std::size_t d = (f.pos + m - e.pos) % m;
        if (d == 1 || d == m - 1) continue;  // consecutive
      }
      if (proper_crossing(e.a, e.b, f.a, f.b))
        throw ParamError("PolygonSet: loops are not simple (edges cross)");
    }
  }
}

double PolygonSet::area() const {
  double total = 0.0;
  for (const Loop& loop : loops_) {
    double s = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec& a = loop[i];
      const Vec& b = loop[(i + 1) % loop.size()];
      s += a[0] * b[1] - b[0] * a[1];
    }
    total += 0.5 * s;
  }
  return total;
}

double PolygonSet::perimeter() const {
  double total = 0.0;
  for (const Loop& loop : loops_)
    for (std::size_t i = 0; i < loop.size(); ++i)
      total += (loop[(i + 1) % loop.size()] - loop[i]).norm();
  return total;
}

bool PolygonSet::contains(const Vec& x) const {
  bool inside = false;
  for (const Loop& loop : loops_) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec& a = loop[i];
      const Vec& b = loop[(i + 1) % loop.size()];
      if ((a[1] > x[1]) != (b[1] > x[1])) {
        double xi = a[0] + (x[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
        if (x[0] < xi) inside = !inside;
      }
    }
  }
  return inside;
}

PolygonSet PolygonSet::regular_ngon(const Vec& center, double radius, int k) {
  require(k >= 3, "regular_ngon: need k >= 3");
  Loop loop;
  loop.reserve(k);
  for (int i = 0; i < k; ++i) {
    double th = 2.0 * M_PI * i / k;
    loop.push_back(center + make_vec({radius * std::cos(th), radius * std::sin(th)}));
  }
  return PolygonSet({std::move(loop)}, false);
}

PolygonSet PolygonSet::rectangle(const Vec& lo, const Vec& hi) {
  Loop loop = {make_vec({lo[0], lo[1]}), make_vec({hi[0], lo[1]}),
               make_vec({hi[0], hi[1]}), make_vec({lo[0], hi[1]})};
  return PolygonSet({std::move(loop)}, false);
}

nlohmann::json PolygonSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Loop& loop : loops_) {
    nlohmann::json jl = nlohmann::json::array();
    for (const Vec& v : loop) jl.push_back({v[0], v[1]});
    arr.push_back(std::move(jl));
  }
  return nlohmann::json{{"loops", std::move(arr)}};
}

PolygonSet PolygonSet::from_json(const nlohmann::json& j) {
  std::vector<Loop> loops;
  for (const auto& jl : j.at("loops")) {
    Loop loop;
    for (const auto& jv : jl) loop.push_back(make_vec({jv[0].get<double>(), jv[1].get<double>()}));
    loops.push_back(std::move(loop));
  }
  return PolygonSet(std::move(loops));
}

double weighted_perimeter(const PolygonSet& e, const PointFn& w, double max_seg) {
  require(max_seg > 0.0, "weighted_perimeter: max_seg must be positive");
  double total = 0.0;
  for (const auto& loop : e.loops()) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec& a = loop[i];
      const Vec& b = loop[(i + 1) % loop.size()];
      double len = (b - a).norm();
      if (len == 0.0) continue;  // degenerate edge, skip
      int pieces = std::max(1, static_cast<int>(std::ceil(len / max_seg)));
      for (int k = 0; k < pieces; ++k) {
        Vec p = a + (static_cast<double>(k) / pieces) * (b - a);
        Vec q = a + (static_cast<double>(k + 1) / pieces) * (b - a);
        total += gauss_segment(p, q, w);
      }
    }
  }
  return total;
}

double weighted_perimeter(const PolygonSet& e, const GridField& w) {
  return weighted_perimeter(
      e, [&w](const Vec& x) { return w.interp(x); }, w.h());
}

// ---------------------------------------------------------------------------
// Marching squares.

namespace {

struct EdgeKey {
  Eigen::Index cell;  // flat index of the lower lattice point
  int axis;
  bool operator==(const EdgeKey& o) const { return cell == o.cell && axis == o.axis; }
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const {
    return std::hash<Eigen::Index>()(k.cell * 2 + k.axis);
  }
};

}  // namespace

PolygonSet level_set_polygon(const GridField& u, double t) {
  require(u.dim() == 2, "level_set_polygon: needs a 2-d field");
  require(t > 0.0, "level_set_polygon: threshold must be positive");
  if (t >= u.values().maxCoeff()) return PolygonSet();

  const Eigen::Index nx = u.shape()[0], ny = u.shape()[1];
  auto flat = [&](Eigen::Index i, Eigen::Index j) { return i * ny + j; };
  auto vertex_on_edge = [&](Eigen::Index i, Eigen::Index j, int axis) {
    double a = u[flat(i, j)];
    double b = axis == 0 ? u[flat(i + 1, j)] : u[flat(i, j + 1)];
    double s = (t - a) / (b - a);
    IndexVec idx(2);
    idx[0] = i;
    idx[1] = j;
    Vec p = u.center(idx);
    p[axis] += s * u.h();
    return p;
  };

  struct Segment {
    EdgeKey a, b;
  };
  std::vector<Segment> segments;
  std::unordered_map<EdgeKey, Vec, EdgeKeyHash> coords;

  for (Eigen::Index i = 0; i + 1 < nx; ++i) {
    for (Eigen::Index j = 0; j + 1 < ny; ++j) {
      bool A = u[flat(i, j)] > t;
      bool B = u[flat(i + 1, j)] > t;
      bool C = u[flat(i + 1, j + 1)] > t;
      bool D = u[flat(i, j + 1)] > t;
      int mask = (A ? 1 : 0) | (B ? 2 : 0) | (C ? 4 : 0) | (D ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      // crossing edges: bottom (A-B), right (B-C), top (D-C), left (A-D)
      std::vector<EdgeKey> keys;
      auto add = [&](bool crossing, EdgeKey k, Eigen::Index vi, Eigen::Index vj, int axis) {
        if (!crossing) return;
        keys.push_back(k);
        if (!coords.count(k)) coords[k] = vertex_on_edge(vi, vj, axis);
      };
      add(A != B, {flat(i, j), 0}, i, j, 0);
      add(B != C, {flat(i + 1, j), 1}, i + 1, j, 1);
      add(D != C, {flat(i, j + 1), 0}, i, j + 1, 0);
      add(A != D, {flat(i, j), 1}, i, j, 1);

      if (keys.size() == 2) {
        segments.push_back({keys[0], keys[1]});
      } else if (keys.size() == 4) {
        // saddle: keys order is [bottom, right, top, left]
        double center = 0.25 * (u[flat(i, j)] + u[flat(i + 1, j)] +
                                u[flat(i + 1, j + 1)] + u[flat(i, j + 1)]);
        bool diag_ac = A;  // A and C share classification in a saddle
        bool center_high = center > t;
        if (diag_ac == center_high) {
          segments.push_back({keys[0], keys[1]});  // bottom-right
          segments.push_back({keys[2], keys[3]});  // top-left
        } else {
          segments.push_back({keys[0], keys[3]});  // bottom-left
          segments.push_back({keys[1], keys[2]});  // right-top
        }
      }
    }
  }

  // chain segments into closed loops via shared lattice-edge keys
  std::unordered_map<EdgeKey, std::vector<std::size_t>, EdgeKeyHash> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].a].push_back(s);
    incident[segments[s].b].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<PolygonSet::Loop> loops;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    PolygonSet::Loop loop;
    EdgeKey start = segments[s0].a;
    EdgeKey cur = start;
    std::size_t seg = s0;
    while (true) {
      used[seg] = true;
      loop.push_back(coords[cur]);
      EdgeKey nxt = (segments[seg].a == cur) ? segments[seg].b : segments[seg].a;
      if (nxt == start) break;
      const auto& inc = incident[nxt];
      std::size_t follow = inc[0] == seg ? inc[1] : inc[0];
      cur = nxt;
      seg = follow;
      if (used[seg]) break;  // defensive: should close at start
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }

  // orient: the super-level region lies on the left of travel
  for (auto& loop : loops) {
    std::size_t best = 0;
    double best_len = -1.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      double len = (loop[(i + 1) % loop.size()] - loop[i]).norm();
      if (len > best_len) {
        best_len = len;
        best = i;
      }
    }
    const Vec& a = loop[best];
    const Vec& b = loop[(best + 1) % loop.size()];
    Vec mid = 0.5 * (a + b);
    Vec dir = (b - a).normalized();
    Vec left = make_vec({-dir[1], dir[0]});
    double probe = u.interp(mid + left * (0.25 * u.h()));
    if (probe <= t) std::reverse(loop.begin(), loop.end());
  }
  return PolygonSet(std::move(loops), false);
}

CoareaResult coarea_check(const GridField& u, const PointFn& w, int levels) {
  require((u.values() >= 0.0).all(), "coarea_check: u must be nonnegative");
  CoareaResult out;

  GridField gm = gradient_magnitude(u);
  double hn = u.cell_volume();
  for (Eigen::Index i = 0; i < u.cell_count(); ++i)
    if (gm[i] != 0.0) out.lhs += gm[i] * w(u.center(i)) * hn;

  double umax = u.values().maxCoeff();
  if (umax <= 0.0) {
    out.rhs = 0.0;
    out.rel_err = 0.0;
    return out;
  }
  double dt = umax / levels;
  for (int j = 0; j < levels; ++j) {
    double t = (j + 0.5) * dt;
    PolygonSet et = level_set_polygon(u, t);
    if (!et.empty()) out.rhs += weighted_perimeter(et, w, u.h()) * dt;
  }
  if (out.lhs == 0.0) {
    out.flagged = out.rhs != 0.0;
    out.rel_err = out.flagged ? kInf : 0.0;
  } else {
    out.rel_err = std::abs(out.lhs - out.rhs) / out.lhs;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relative isoperimetric inequality.

namespace {

// Sutherland-Hodgman clip of one loop against the convex clip polygon.
PolygonSet::Loop clip_loop_convex(const PolygonSet::Loop& subject,
                                  const PolygonSet::Loop& clip) {
  PolygonSet::Loop poly = subject;
  for (std::size_t e = 0; e < clip.size() && !poly.empty(); ++e) {
    const Vec& ca = clip[e];
    const Vec& cb = clip[(e + 1) % clip.size()];
    auto inside = [&](const Vec& p) {
      return (cb[0] - ca[0]) * (p[1] - ca[1]) - (cb[1] - ca[1]) * (p[0] - ca[0]) >= 0.0;
    };
    auto intersect = [&](const Vec& p, const Vec& q) {
      double a1 = (cb[0] - ca[0]) * (p[1] - ca[1]) - (cb[1] - ca[1]) * (p[0] - ca[0]);
      double a2 = (cb[0] - ca[0]) * (q[1] - ca[1]) - (cb[1] - ca[1]) * (q[0] - ca[0]);
      double s = a1 / (a1 - a2);
      return Vec(p + s * (q - p));
    };
    PolygonSet::Loop next;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec& p = poly[i];
      const Vec& q = poly[(i + 1) % poly.size()];
      bool pin = inside(p), qin = inside(q);
      if (pin) next.push_back(p);
      if (pin != qin) next.push_back(intersect(p, q));
    }
    poly = std::move(next);
  }
  return poly;
}

double loop_signed_area(const PolygonSet::Loop& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec& a = loop[i];
    const Vec& b = loop[(i + 1) % loop.size()];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

}  // namespace

RelativeIsoResult relative_iso_check(const PolygonSet& e, const Ball& ball) {
  require(ball.dim() == 2, "relative_iso_check: planar only");
  RelativeIsoResult out;
  const int kBallGon = 384;
  PolygonSet ball_gon = PolygonSet::regular_ngon(ball.center, ball.radius, kBallGon);
  double ball_area = ball_gon.area();

  double inter = 0.0;
  for (const auto& loop : e.loops()) {
    auto clipped = clip_loop_convex(loop, ball_gon.loops()[0]);
    if (clipped.size() >= 3) inter += loop_signed_area(clipped);
  }
  inter = std::clamp(inter, 0.0, ball_area);
  double min_area = std::min(inter, ball_area - inter);
  // clipping computes areas only to rounding accuracy; a ball fully inside
  // or outside the set must give an exact zero here
  if (min_area <= 1e-9 * ball_area) min_area = 0.0;
  out.lhs = std::sqrt(min_area);

  // length of (boundary E) inside the open ball, by exact segment-circle clipping
  for (const auto& loop : e.loops()) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec& a = loop[i];
      const Vec& b = loop[(i + 1) % loop.size()];
      Vec d = b - a;
      double len = d.norm();
      if (len == 0.0) continue;
      Vec rel = a - ball.center;
      double A = d.squaredNorm();
      double B = 2.0 * rel.dot(d);
      double C = rel.squaredNorm() - ball.radius * ball.radius;
      double disc = B * B - 4.0 * A * C;
      if (disc <= 0.0) continue;
      double sq = std::sqrt(disc);
      double t0 = std::clamp((-B - sq) / (2.0 * A), 0.0, 1.0);
      double t1 = std::clamp((-B + sq) / (2.0 * A), 0.0, 1.0);
      if (t1 > t0) out.rhs += (t1 - t0) * len;
    }
  }

  if (out.rhs == 0.0) {
    out.flagged = out.lhs > 0.0;
    out.ratio = out.flagged ? kInf : 0.0;
  } else {
    out.ratio = out.lhs / out.rhs;
  }
  return out;
}

double measure_polygon(const Measure& mu, const PolygonSet& e, double area_h) {
  if (mu.is_atomic()) {
    double s = 0.0;
    for (const auto& a : mu.atomic().atoms())
      if (e.contains(a.location)) s += a.mass;
    return s;
  }
  if (mu.is_grid()) {
    const GridField& w = mu.grid();
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.cell_count(); ++i)
      if (w[i] != 0.0 && e.contains(w.center(i))) s += w[i];
    return s * w.cell_volume();
  }
  (void)area_h;
  return e.area();
}

IsoRatioResult isoperimetric_ratio(const Measure& mu, const PolygonSet& e,
                                   double alpha, double q, double max_seg) {
  const int n = 2;
  require(q >= 1.0 && q <= double(n) / (n - 1), "isoperimetric_ratio: need 1 <= q <= n'");
  require(std::abs(alpha - (n - q * (n - 1))) < 1e-9,
          "isoperimetric_ratio: requires alpha = n - q(n-1)");

  IsoRatioResult out;
  int perturbed = 0;
  // grid measures go through one summed-area table; atomic and Lebesgue
  // measures are evaluated exactly per node
  std::optional<CubeMaximal> cm;
  if (mu.is_grid()) cm.emplace(mu.grid(), alpha);
  auto weight = [&](const Vec& x) -> double {
    Vec xe = x;
    if (mu.is_atomic()) {
      for (const auto& a : mu.atomic().atoms()) {
        if ((a.location - xe).norm() < 1e-12) {
          // quadrature node on an atom: nudge and flag
          xe[0] += max_seg / 10.0;
          ++perturbed;
          break;
        }
      }
    }
    double m = cm ? (*cm)(xe) : frac_maximal_measure(mu, alpha, xe);
    return std::pow(m, 1.0 / q);
  };
  out.weighted_per = weighted_perimeter(e, weight, max_seg);
  out.perturbed_nodes = perturbed;
  out.mu_e = measure_polygon(mu, e);
  out.ratio = out.weighted_per == 0.0
                  ? (out.mu_e == 0.0 ? 0.0 : kInf)
                  : std::pow(out.mu_e, 1.0 / q) / out.weighted_per;
  return out;
}

double IntervalSet::length() const {
  double s = 0.0;
  for (const auto& [a, b] : intervals) s += b - a;
  return s;
}

IntervalSet level_set_intervals(const GridField& u, double t) {
  require(u.dim() == 1, "level_set_intervals: needs a 1-d field");
  require(t > 0.0, "level_set_intervals: threshold must be positive");
  IntervalSet out;
  const Eigen::Index n = u.shape()[0];
  auto x_at = [&](Eigen::Index i) { return u.origin()[0] + (i + 0.5) * u.h(); };
  bool open = false;
  double entry = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    double a = u[i], b = u[i + 1];
    if ((a > t) != (b > t)) {
      double x = x_at(i) + (t - a) / (b - a) * u.h();
      if (!open && b > t) {
        open = true;
        entry = x;
      } else if (open && a > t) {
        open = false;
        out.intervals.push_back({entry, x});
      }
    }
  }
  return out;
}

}  // namespace soblab
