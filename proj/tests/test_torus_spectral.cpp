#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qgeo/torus_spectral.hpp"

using namespace qgeo;

namespace {

const TorusSpec kSpec{0.8, 2.0};

ComplexVector modal_span_state(const TruncatedPropagator& prop,
                               std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix out = ComplexMatrix::Zero(prop.n_theta, prop.n_phi);
  for (const auto& block : prop.blocks) {
    ComplexVector fourier(prop.n_phi);
    for (Index j = 0; j < prop.n_phi; ++j) {
      const double phi = 2.0 * EIGEN_PI * j / static_cast<double>(prop.n_phi);
      fourier[j] = std::polar(1.0 / std::sqrt(static_cast<double>(prop.n_phi)),
                              block.k * phi);
    }
    ComplexVector coeffs(block.lambda.size());
    for (Index m = 0; m < coeffs.size(); ++m) {
      coeffs[m] = std::complex<double>(rng.normal(), rng.normal());
    }
    out += (block.basis * coeffs) * fourier.transpose();
  }
  out = prop.sqrt_weight.cwiseInverse().asDiagonal() * out;
  ComplexVector state(prop.grid_size());
  Eigen::Map<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(state.data(), prop.n_theta,
                                             prop.n_phi) = out;
  return state;
}

double weighted_grid_norm(const TruncatedPropagator& prop,
                          const ComplexVector& state) {
  Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                 Eigen::Dynamic, Eigen::RowMajor>>
      grid(state.data(), prop.n_theta, prop.n_phi);
  return (prop.sqrt_weight.asDiagonal() * ComplexMatrix(grid)).norm();
}

}  // namespace

TEST_CASE("lowest mode is the zero mode with a constant eigenfunction") {
  const auto prop = torus_truncated_propagator(kSpec, 50, 101, 120, 0.1);
  CHECK(prop.eigvals[0] == 0.0);
  for (Index i = 1; i < prop.modes(); ++i) {
    CHECK(prop.eigvals[i] >= prop.eigvals[i - 1]);
  }
  for (const auto& block : prop.blocks) {
    if (block.k != 0) continue;
    // Physical eigenfunction = basis / sqrt(rho); the zero mode is constant.
    const Vector physical =
        prop.sqrt_weight.cwiseInverse().asDiagonal() * block.basis.col(0);
    const double spread = physical.maxCoeff() - physical.minCoeff();
    CHECK(std::abs(spread) <= 1e-10 * physical.cwiseAbs().maxCoeff());
    CHECK(block.lambda[0] == 0.0);
  }
}

TEST_CASE("eigenvalues converge at second order in the grid spacing") {
  const double coarse = torus_truncated_propagator(kSpec, 40, 101, 120, 0.1)
                            .eigvals[10];
  const double medium = torus_truncated_propagator(kSpec, 40, 201, 120, 0.1)
                            .eigvals[10];
  const double fine = torus_truncated_propagator(kSpec, 40, 401, 120, 0.1)
                          .eigvals[10];
  const double ratio = (coarse - medium) / (medium - fine);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("800-mode truncation reaches the expected spectral ceiling") {
  const auto prop = torus_truncated_propagator(kSpec, 800, 171, 300, 0.1);
  CHECK(prop.modes() == 800);
  CHECK(prop.eigvals[799] == doctest::Approx(156.5).epsilon(0.03));
}

TEST_CASE("propagation preserves the weighted grid norm on the modal span") {
  const auto prop = torus_truncated_propagator(kSpec, 120, 101, 120, 0.07);
  const ComplexVector state = modal_span_state(prop, 21);
  const ComplexVector moved = truncated_propagate(prop, state, 5);
  const double before = weighted_grid_norm(prop, state);
  const double after = weighted_grid_norm(prop, moved);
  CHECK(std::abs(after - before) <= 1e-8 * before);
}

TEST_CASE("zero steps is the identity on the modal span") {
  const auto prop = torus_truncated_propagator(kSpec, 80, 101, 120, 0.3);
  const ComplexVector state = modal_span_state(prop, 5);
  const ComplexVector same = truncated_propagate(prop, state, 0);
  CHECK((same - state).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("grid dataset lies on the torus and indexes by theta major") {
  const auto grid = torus_grid_dataset(kSpec, 24, 36);
  CHECK(grid.size() == 24 * 36);
  for (Index i = 0; i < grid.size(); i += 17) {
    const auto p = grid.points.row(i);
    const double ring = std::hypot(p[0], p[1]) - kSpec.R;
    CHECK(std::abs(ring * ring + p[2] * p[2] - kSpec.r * kSpec.r) <= 1e-12);
  }
  const auto prop = torus_truncated_propagator(kSpec, 10, 24, 36, 0.1);
  CHECK(torus_grid_theta(prop, 36 * 3 + 5) ==
        doctest::Approx(2.0 * EIGEN_PI * 3 / 24).epsilon(1e-14));
  CHECK(torus_grid_phi(prop, 36 * 3 + 5) ==
        doctest::Approx(2.0 * EIGEN_PI * 5 / 36).epsilon(1e-14));
}

TEST_CASE("mode budget beyond the grid capacity is rejected") {
  CHECK_THROWS_AS(torus_truncated_propagator(kSpec, 100000, 24, 36, 0.1),
                  ValidationError);
}
