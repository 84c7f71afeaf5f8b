#ifndef QGEO_COMMON_HPP
#define QGEO_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qgeo {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed; the message carries row/column context.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to converge or produced inconsistent output.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A state or frame could not be prepared from the available samples.
class PreparationError : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::vector<std::string>;

inline void warn(WarningSink* sink, std::string msg) {
  if (sink != nullptr) {
    sink->push_back(std::move(msg));
  } else {
    std::cerr << "qgeo: warning: " << msg << '\n';
  }
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and salts.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt_a = 0,
                              std::uint64_t salt_b = 0) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= salt_a;
  (void)splitmix64(s);
  s ^= salt_b;
  return splitmix64(s);
}

/// mt19937_64 with hand-rolled variate transforms so that streams are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  Index uniform_index(Index n) {
    return static_cast<Index>(engine_() % static_cast<std::uint64_t>(n));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * EIGEN_PI * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  /// Uniformly random unit vector in R^dim.
  Vector unit_vector(Index dim) {
    Vector v(dim);
    double norm = 0.0;
    do {
      for (Index i = 0; i < dim; ++i) v[i] = normal();
      norm = v.norm();
    } while (norm < 1e-300);
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Runs fn(begin, end) over a static partition of [0, n). Each chunk owns a
/// disjoint index range, so writes keyed by index stay deterministic.
template <typename Fn>
void parallel_for(Index n, Fn&& fn, unsigned workers = 0) {
  if (n <= 0) return;
  unsigned hw = workers != 0 ? workers : std::thread::hardware_concurrency();
  if (hw <= 1 || n < 2) {
    fn(Index{0}, n);
    return;
  }
  hw = static_cast<unsigned>(std::min<Index>(hw, n));
  std::vector<std::thread> pool;
  pool.reserve(hw);
  const Index chunk = (n + static_cast<Index>(hw) - 1) / static_cast<Index>(hw);
  for (unsigned w = 0; w < hw; ++w) {
    const Index begin = static_cast<Index>(w) * chunk;
    const Index end = std::min<Index>(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qgeo

#endif  // QGEO_COMMON_HPP
