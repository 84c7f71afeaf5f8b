#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qgeo/laplacian.hpp"
#include "qgeo/manifolds.hpp"

using namespace qgeo;

namespace {

// Direct-formula reference written with plain loops over std::vector, kept
// independent of the Eigen implementation path.
struct ReferenceLaplacian {
  std::vector<std::vector<double>> kernel;
  std::vector<std::vector<double>> laplacian;
};

ReferenceLaplacian reference_laplacian(const Matrix& points, double epsilon,
                                       double lambda) {
  const size_t n = static_cast<size_t>(points.rows());
  ReferenceLaplacian ref;
  ref.kernel.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (Eigen::Index c = 0; c < points.cols(); ++c) {
        const double diff = points(static_cast<Eigen::Index>(i), c) -
                            points(static_cast<Eigen::Index>(j), c);
        d2 += diff * diff;
      }
      ref.kernel[i][j] = std::exp(-d2 / (2.0 * epsilon));
    }
  }
  std::vector<double> sigma(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) sigma[i] += ref.kernel[i][j];
  }
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      w[i][j] = ref.kernel[i][j] / (std::pow(sigma[i], lambda) *
                                    std::pow(sigma[j], lambda));
    }
  }
  std::vector<double> degree(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) degree[i] += w[i][j];
  }
  ref.laplacian.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const double markov = w[i][j] / degree[i];
      const double identity = i == j ? 1.0 : 0.0;
      ref.laplacian[i][j] = 2.0 / epsilon * (identity - markov);
    }
  }
  return ref;
}

Matrix random_points(Index n, Index dim, std::uint64_t seed) {
  Rng rng(seed);
  Matrix points(n, dim);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim; ++j) points(i, j) = rng.normal();
  }
  return points;
}

}  // namespace

TEST_CASE("kernel of coincident points is one") {
  Matrix points(2, 3);
  points << 1.0, 2.0, 3.0, 1.0, 2.0, 3.0;
  const KernelGraph kg = build_kernel(points, 0.5);
  CHECK(kg.kernel(0, 1) == 1.0);
  CHECK(kg.kernel(0, 0) == 1.0);
}

TEST_CASE("kernel at squared distance 2 epsilon is exp(-1)") {
  const double epsilon = 0.37;
  Matrix points(2, 1);
  points << 0.0, std::sqrt(2.0 * epsilon);
  const KernelGraph kg = build_kernel(points, epsilon);
  CHECK(kg.kernel(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("kernel matches the direct formula entrywise") {
  const Matrix points = random_points(5, 3, 11);
  const double epsilon = 0.2;
  const KernelGraph kg = build_kernel(points, epsilon);
  const auto ref = reference_laplacian(points, epsilon, 1.0);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      CHECK(kg.kernel(i, j) ==
            doctest::Approx(ref.kernel[static_cast<size_t>(i)]
                                      [static_cast<size_t>(j)])
                .epsilon(1e-15));
    }
  }
  CHECK(kg.kernel.isApprox(kg.kernel.transpose(), 0.0));
  CHECK((kg.kernel.array() > 0.0).all());
  CHECK((kg.kernel.array() <= 1.0).all());
}

TEST_CASE("two identical points give the closed-form laplacian") {
  const double epsilon = 0.25;
  Matrix points(2, 2);
  points << 3.0, -1.0, 3.0, -1.0;
  KernelGraph kg = build_kernel(points, epsilon);
  const Matrix lap = build_laplacian(kg, 1.0);
  const double scale = 1.0 / epsilon;
  CHECK(lap(0, 0) == doctest::Approx(scale).epsilon(1e-14));
  CHECK(lap(0, 1) == doctest::Approx(-scale).epsilon(1e-14));
  CHECK(lap(1, 0) == doctest::Approx(-scale).epsilon(1e-14));
  CHECK(lap(1, 1) == doctest::Approx(scale).epsilon(1e-14));
}

TEST_CASE("laplacian rows sum to zero") {
  const Matrix points = random_points(20, 4, 5);
  const double epsilon = 0.8;
  KernelGraph kg = build_kernel(points, epsilon);
  const Matrix lap = build_laplacian(kg, 0.5);
  const Vector row_sums = lap.rowwise().sum();
  CHECK(row_sums.cwiseAbs().maxCoeff() <= 1e-10 * (2.0 / epsilon));
}

TEST_CASE("laplacian matches the direct formula for both normalizations") {
  const Matrix points = random_points(6, 3, 21);
  const double epsilon = 0.3;
  for (double lambda : {0.0, 1.0}) {
    KernelGraph kg = build_kernel(points, epsilon);
    const Matrix lap = build_laplacian(kg, lambda);
    const auto ref = reference_laplacian(points, epsilon, lambda);
    double worst = 0.0;
    for (Index i = 0; i < 6; ++i) {
      for (Index j = 0; j < 6; ++j) {
        worst = std::max(worst,
                         std::abs(lap(i, j) - ref.laplacian[static_cast<size_t>(
                                                  i)][static_cast<size_t>(j)]));
      }
    }
    CHECK(worst <= 1e-12 * (2.0 / epsilon));
  }
}

TEST_CASE("two-point spectrum is analytic") {
  const double epsilon = 0.25;
  Matrix points(2, 2);
  points << 3.0, -1.0, 3.0, -1.0;
  KernelGraph kg = build_kernel(points, epsilon);
  const Matrix lap = build_laplacian(kg, 1.0);
  const SpectralLaplacian spec = decompose(lap, kg);
  CHECK(spec.eigvals[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(spec.eigvals[1] == doctest::Approx(2.0 / epsilon).epsilon(1e-12));
}

TEST_CASE("decomposition invariants hold on random data") {
  const Matrix points = random_points(50, 3, 31);
  const double epsilon = 0.5;
  KernelGraph kg = build_kernel(points, epsilon);
  const Matrix lap = build_laplacian(kg, 1.0);
  const SpectralLaplacian spec = decompose(lap, kg);

  CHECK(std::abs(spec.eigvals[0]) <= 1e-8 * spec.eigvals[49]);
  CHECK((spec.eigvals.array() >= 0.0).all());

  const Matrix gram = spec.eigvecs.transpose() * spec.eigvecs;
  CHECK((gram - Matrix::Identity(50, 50)).cwiseAbs().maxCoeff() <= 1e-10);

  const Matrix rebuilt = spec.dvec_sqrt.cwiseInverse().asDiagonal() *
                         spec.eigvecs * spec.eigvals.asDiagonal() *
                         spec.eigvecs.transpose() *
                         spec.dvec_sqrt.asDiagonal();
  CHECK((rebuilt - lap).norm() <= 1e-8 * lap.norm());

  // The kernel of the symmetrized operator is spanned by sqrt(degree).
  const Vector null_vec = spec.eigvecs.col(0);
  const Vector expected = spec.dvec_sqrt / spec.dvec_sqrt.norm();
  const double align = std::abs(null_vec.dot(expected));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("strongly negative eigenvalues are flagged") {
  Matrix bogus_lap(2, 2);
  bogus_lap << -1.0, 0.0, 0.0, 1.0;
  Vector dvec = Vector::Ones(2);
  CHECK_THROWS_AS(decompose(bogus_lap, dvec, 0.5, 1.0), NumericError);
}
