#include "soblab/measures.hpp"

#include "soblab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace soblab {

Ball::Ball(Vec c, double r, BallKind k) : center(std::move(c)), radius(r), kind(k) {
  require(radius > 0.0 && std::isfinite(radius), "Ball: radius must be positive and finite");
}

bool Ball::contains(const Vec& x) const {
  double d = (x - center).norm();
  return kind == BallKind::open ? d < radius : d <= radius;
}

PointMeasure::PointMeasure(int dim, std::vector<Atom> atoms)
    : dim_(dim), atoms_(std::move(atoms)), total_mass_(0.0) {
  require(dim_ >= 1 && dim_ <= 3, "PointMeasure: dimension must be 1, 2 or 3");
  for (const Atom& a : atoms_) {
    require(a.location.size() == dim_, "PointMeasure: atom dimension mismatch");
    require(a.mass >= 0.0 && std::isfinite(a.mass), "PointMeasure: masses must be finite and >= 0");
    require(a.location.allFinite(), "PointMeasure: atom coordinates must be finite");
    total_mass_ += a.mass;
  }
  // Zero-mass atoms carry no information; dropping them keeps the
  // candidate-radius sets minimal.
  std::erase_if(atoms_, [](const Atom& a) { return a.mass == 0.0; });
}

PointMeasure PointMeasure::dirac(Vec location, double mass) {
  int d = static_cast<int>(location.size());
  return PointMeasure(d, {Atom{std::move(location), mass}});
}

PointMeasure PointMeasure::operator+(const PointMeasure& other) const {
  require(dim_ == other.dim_, "PointMeasure: dimension mismatch in sum");
  std::vector<Atom> all = atoms_;
  all.insert(all.end(), other.atoms_.begin(), other.atoms_.end());
  return PointMeasure(dim_, std::move(all));
}

PointMeasure PointMeasure::scaled(double c) const {
  require(c >= 0.0, "PointMeasure: scale factor must be >= 0");
  std::vector<Atom> all = atoms_;
  for (Atom& a : all) a.mass *= c;
  return PointMeasure(dim_, std::move(all));
}

GridField::GridField(Vec origin, double h, IndexVec shape, FieldRole role,
                     Eigen::ArrayXd values)
    : dim_(static_cast<int>(origin.size())),
      origin_(std::move(origin)),
      h_(h),
      shape_(std::move(shape)),
      role_(role),
      values_(std::move(values)) {
  validate();
}

void GridField::validate() const {
  require(dim_ >= 1 && dim_ <= 3, "GridField: dimension must be 1, 2 or 3");
  require(h_ > 0.0 && std::isfinite(h_), "GridField: spacing must be positive");
  require(shape_.size() == dim_, "GridField: shape rank mismatch");
  Eigen::Index n = 1;
  for (int i = 0; i < dim_; ++i) {
    require(shape_[i] >= 3, "GridField: need at least 3 cells per axis");
    n *= shape_[i];
  }
  require(values_.size() == n, "GridField: value count does not match shape");
  require(values_.allFinite(), "GridField: values must be finite");
  if (role_ == FieldRole::weight || role_ == FieldRole::density) {
    require((values_ >= 0.0).all(), "GridField: weight/density values must be >= 0");
  }
  if (role_ == FieldRole::derived) return;
  // Compact support: the outermost cell layer must vanish.
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    IndexVec idx = unflatten(flat);
    bool boundary = false;
    for (int i = 0; i < dim_; ++i)
      if (idx[i] == 0 || idx[i] == shape_[i] - 1) boundary = true;
    if (boundary && values_[flat] != 0.0)
      throw ParamError("GridField: outermost cell layer must be zero (compact support)");
  }
}

GridField GridField::sample(int dim, const Vec& origin, double h, const IndexVec& shape,
                            FieldRole role, const std::function<double(const Vec&)>& fn) {
  Eigen::Index n = 1;
  for (int i = 0; i < dim; ++i) n *= shape[i];
  Eigen::ArrayXd vals(n);
  GridField proto(origin, h, shape, FieldRole::function, Eigen::ArrayXd::Zero(n));
  bool keep_boundary = role == FieldRole::derived;
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    IndexVec idx = proto.unflatten(flat);
    bool boundary = false;
    for (int i = 0; i < dim; ++i)
      if (idx[i] == 0 || idx[i] == shape[i] - 1) boundary = true;
    vals[flat] = (boundary && !keep_boundary) ? 0.0 : fn(proto.center(idx));
  }
  return GridField(origin, h, shape, role, std::move(vals));
}

GridField GridField::sample_box(int dim, double extent, double h, FieldRole role,
                                const std::function<double(const Vec&)>& fn) {
  IndexVec shape(dim);
  Eigen::Index cells = static_cast<Eigen::Index>(std::llround(2.0 * extent / h));
  require(cells >= 3, "sample_box: box too small for spacing");
  Vec origin(dim);
  for (int i = 0; i < dim; ++i) {
    shape[i] = cells;
    origin[i] = -extent;
  }
  return sample(dim, origin, h, shape, role, fn);
}

GridField GridField::zeros_like(const GridField& other, FieldRole role) {
  return GridField(other.origin_, other.h_, other.shape_, role,
                   Eigen::ArrayXd::Zero(other.values_.size()));
}

double GridField::cell_volume() const { return std::pow(h_, dim_); }

Eigen::Index GridField::flatten(const IndexVec& idx) const {
  Eigen::Index flat = 0;
  for (int i = 0; i < dim_; ++i) flat = flat * shape_[i] + idx[i];
  return flat;
}

IndexVec GridField::unflatten(Eigen::Index flat) const {
  IndexVec idx(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    idx[i] = flat % shape_[i];
    flat /= shape_[i];
  }
  return idx;
}

Vec GridField::center(const IndexVec& idx) const {
  Vec x(dim_);
  for (int i = 0; i < dim_; ++i) x[i] = origin_[i] + (idx[i] + 0.5) * h_;
  return x;
}

Vec GridField::center(Eigen::Index flat) const { return center(unflatten(flat)); }

bool GridField::in_grid(const IndexVec& idx) const {
  for (int i = 0; i < dim_; ++i)
    if (idx[i] < 0 || idx[i] >= shape_[i]) return false;
  return true;
}

Eigen::Index GridField::nearest_cell(const Vec& x) const {
  require(x.size() == dim_, "GridField: point dimension mismatch");
  IndexVec idx(dim_);
  for (int i = 0; i < dim_; ++i) {
    double t = (x[i] - origin_[i]) / h_ - 0.5;
    Eigen::Index j = static_cast<Eigen::Index>(std::llround(t));
    idx[i] = std::clamp<Eigen::Index>(j, 0, shape_[i] - 1);
  }
  return flatten(idx);
}

double GridField::nearest_value(const Vec& x) const { return values_[nearest_cell(x)]; }

double GridField::interp(const Vec& x) const {
  require(x.size() == dim_, "GridField: point dimension mismatch");
  IndexVec base(dim_);
  Vec frac(dim_);
  for (int i = 0; i < dim_; ++i) {
    double t = (x[i] - origin_[i]) / h_ - 0.5;
    double f = std::floor(t);
    base[i] = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(f), 0, shape_[i] - 2);
    frac[i] = std::clamp(t - static_cast<double>(base[i]), 0.0, 1.0);
  }
  double acc = 0.0;
  int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    IndexVec idx = base;
    double wgt = 1.0;
    for (int i = 0; i < dim_; ++i) {
      if (c & (1 << i)) {
        idx[i] += 1;
        wgt *= frac[i];
      } else {
        wgt *= 1.0 - frac[i];
      }
    }
    acc += wgt * values_[flatten(idx)];
  }
  return acc;
}

Vec GridField::box_hi() const {
  Vec hi(dim_);
  for (int i = 0; i < dim_; ++i) hi[i] = origin_[i] + shape_[i] * h_;
  return hi;
}

double GridField::total_mass() const { return values_.sum() * cell_volume(); }

BoxSumTable::BoxSumTable(const GridField& f) : dim_(f.dim()), shape_(f.shape()) {
  const auto& vals = f.values();
  sat_.resize(vals.size());
  for (Eigen::Index flat = 0; flat < vals.size(); ++flat) {
    IndexVec idx = f.unflatten(flat);
    double s = vals[flat];
    // inclusion-exclusion over the lower corner offsets
    for (int bits = 1; bits < (1 << dim_); ++bits) {
      IndexVec j = idx;
      int sign = 0;
      bool ok = true;
      for (int i = 0; i < dim_ && ok; ++i) {
        if (bits & (1 << i)) {
          j[i] -= 1;
          ++sign;
          if (j[i] < 0) ok = false;
        }
      }
      if (ok) s += (sign % 2 ? 1.0 : -1.0) * sat_[flatten(j)];
    }
    sat_[flat] = s;
  }
}

Eigen::Index BoxSumTable::flatten(const IndexVec& idx) const {
  Eigen::Index flat = 0;
  for (int i = 0; i < dim_; ++i) flat = flat * shape_[i] + idx[i];
  return flat;
}

double BoxSumTable::box_sum(IndexVec lo, IndexVec hi) const {
  for (int i = 0; i < dim_; ++i) {
    lo[i] = std::max<Eigen::Index>(lo[i], 0);
    hi[i] = std::min<Eigen::Index>(hi[i], shape_[i]);
    if (lo[i] >= hi[i]) return 0.0;
  }
  double s = 0.0;
  for (int bits = 0; bits < (1 << dim_); ++bits) {
    IndexVec corner(dim_);
    int lo_count = 0;
    for (int i = 0; i < dim_; ++i) {
      if (bits & (1 << i)) {
        corner[i] = lo[i] - 1;
        ++lo_count;
      } else {
        corner[i] = hi[i] - 1;
      }
    }
    bool ok = true;
    for (int i = 0; i < dim_; ++i)
      if (corner[i] < 0) ok = false;
    if (ok) s += (lo_count % 2 ? -1.0 : 1.0) * sat_[flatten(corner)];
  }
  return s;
}

Measure::Measure(GridField f) : rep_(std::move(f)) {
  const GridField& g = std::get<GridField>(rep_);
  require(g.role() == FieldRole::density || g.role() == FieldRole::weight,
          "Measure: grid form requires a density or weight field");
}

int Measure::dim() const {
  if (is_atomic()) return atomic().dim();
  if (is_grid()) return grid().dim();
  return std::get<LebesgueMeasure>(rep_).dim;
}

double Measure::total_mass() const {
  if (is_atomic()) return atomic().total_mass();
  if (is_grid()) return grid().total_mass();
  return kInf;
}

double measure_ball(const PointMeasure& mu, const Ball& ball) {
  if (ball.dim() != mu.dim())
    throw ConfigError("measure_ball: ball/measure dimension mismatch");
  double s = 0.0;
  for (const auto& a : mu.atoms())
    if (ball.contains(a.location)) s += a.mass;
  return s;
}

double grid_mass_ball(const GridField& w, const Ball& ball) {
  if (ball.dim() != w.dim())
    throw ConfigError("grid_mass_ball: ball/field dimension mismatch");
  require(w.role() != FieldRole::function, "grid_mass_ball: field must be a weight or density");
  // Center-in-cell rule; only cells in the bounding box of the ball can hit.
  IndexVec lo(w.dim()), hi(w.dim());
  for (int i = 0; i < w.dim(); ++i) {
    double a = (ball.center[i] - ball.radius - w.origin()[i]) / w.h() - 0.5;
    double b = (ball.center[i] + ball.radius - w.origin()[i]) / w.h() - 0.5;
    lo[i] = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor(a)));
    hi[i] = std::min<Eigen::Index>(w.shape()[i] - 1, static_cast<Eigen::Index>(std::ceil(b)));
    if (lo[i] > hi[i]) return 0.0;
  }
  double s = 0.0;
  IndexVec idx = lo;
  while (true) {
    if (ball.contains(w.center(idx))) s += w[w.flatten(idx)];
    int axis = w.dim() - 1;
    while (axis >= 0) {
      if (++idx[axis] <= hi[axis]) break;
      idx[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  return s * w.cell_volume();
}

double measure_ball(const Measure& mu, const Ball& ball) {
  if (mu.is_atomic()) return measure_ball(mu.atomic(), ball);
  if (mu.is_grid()) return grid_mass_ball(mu.grid(), ball);
  return unit_ball_volume(mu.dim()) * std::pow(ball.radius, mu.dim());
}

PointMeasure restrict_measure(const PointMeasure& mu, const Ball& ball) {
  std::vector<PointMeasure::Atom> kept;
  for (const auto& a : mu.atoms())
    if (ball.contains(a.location)) kept.push_back(a);
  return PointMeasure(mu.dim(), std::move(kept));
}

GridField restrict_measure(const GridField& w, const Ball& ball) {
  GridField out = w;
  for (Eigen::Index flat = 0; flat < w.cell_count(); ++flat)
    if (!ball.contains(w.center(flat))) out.values()[flat] = 0.0;
  return out;
}

std::vector<double> read_f64_file(const std::string& path, std::size_t expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open values_file: " + path);
  in.seekg(0, std::ios::end);
  std::size_t bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  if (bytes != expect * sizeof(double))
    throw ConfigError("values_file has wrong size: " + path);
  std::vector<double> data(expect);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw ConfigError("short read on values_file: " + path);
  return data;
}

void write_f64_file(const std::string& path, const std::vector<double>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write values_file: " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

Measure measure_from_json(const nlohmann::json& spec, const std::string& base_dir) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw ConfigError("measure: expected object with \"kind\"");
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "atoms") {
    int dim = spec.at("dim").get<int>();
    std::vector<PointMeasure::Atom> atoms;
    for (const auto& row : spec.at("atoms")) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim + 1)
        throw ConfigError("measure: atom rows must be [coords..., mass]");
      Vec loc(dim);
      for (int i = 0; i < dim; ++i) loc[i] = row[i].get<double>();
      atoms.push_back({loc, row[dim].get<double>()});
    }
    return Measure(PointMeasure(dim, std::move(atoms)));
  }
  if (kind == "grid") {
    auto origin_json = spec.at("origin");
    int dim = static_cast<int>(origin_json.size());
    Vec origin(dim);
    for (int i = 0; i < dim; ++i) origin[i] = origin_json[i].get<double>();
    double h = spec.at("h").get<double>();
    IndexVec shape(dim);
    Eigen::Index cells = 1;
    for (int i = 0; i < dim; ++i) {
      shape[i] = spec.at("shape")[i].get<Eigen::Index>();
      cells *= shape[i];
    }
    std::string path = spec.at("values_file").get<std::string>();
    if (!base_dir.empty() && !path.empty() && path[0] != '/')
      path = base_dir + "/" + path;
    auto raw = read_f64_file(path, static_cast<std::size_t>(cells));
    Eigen::ArrayXd vals =
        Eigen::Map<const Eigen::ArrayXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
    try {
      return Measure(GridField(origin, h, shape, FieldRole::density, std::move(vals)));
    } catch (const ParamError& e) {
      // Malformed numerical payload is an invariant failure, not a schema error.
      throw InvariantViolation(std::string("measure grid field invalid: ") + e.what());
    }
  }
  if (kind == "lebesgue") {
    return Measure(LebesgueMeasure{spec.at("dim").get<int>()});
  }
  throw ConfigError("measure: unknown kind \"" + kind + "\"");
}

}  // namespace soblab
