#ifndef SOBLAB_COMMON_HPP
#define SOBLAB_COMMON_HPP

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace soblab {

// Coordinate vector in R^n, n <= 3. Fixed capacity keeps it off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using IndexVec = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Bad user-supplied configuration (dimension mismatch, schema violation, ...).
// The CLI maps this to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside an operator's admissible range (alpha >= n, p < 1, ...).
class ParamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally valid input the implementation does not support
// (infinite total mass, unbounded integrand on a cube, ...).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An asserted mathematical invariant failed at runtime. Exit code 2.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ParamError(msg);
}

// Deterministic RNG. mt19937_64 output is pinned by the standard; the
// distributions below avoid std::uniform_real_distribution, whose mapping
// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0,1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double log_uniform(double a, double b) {
    return std::exp(uniform(std::log(a), std::log(b)));
  }
  std::uint64_t bits() { return eng_(); }
  Eigen::Index index(Eigen::Index n) {
    return static_cast<Eigen::Index>(eng_() % static_cast<std::uint64_t>(n));
  }
  Vec point_in_box(int dim, double lo, double hi) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

// Global worker count for data-parallel loops; values never depend on it.
unsigned thread_count();
void set_thread_count(unsigned n);

// Runs fn(i) for i in [0,n). Disjoint index slots keep results deterministic
// regardless of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace soblab

#endif
