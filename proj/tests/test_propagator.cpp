#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qgeo/coherent.hpp"
#include "qgeo/laplacian.hpp"
#include "qgeo/manifolds.hpp"
#include "qgeo/propagator.hpp"

using namespace qgeo;

namespace {

SpectralLaplacian decompose_points(const Matrix& points, double epsilon,
                                   double lambda) {
  KernelGraph kg = build_kernel(points, epsilon);
  const Matrix lap = build_laplacian(kg, lambda);
  return decompose(lap, kg);
}

Matrix random_points(Index n, Index dim, std::uint64_t seed) {
  Rng rng(seed);
  Matrix points(n, dim);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim; ++j) points(i, j) = rng.normal();
  }
  return points;
}

ComplexVector random_state(Index n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexVector state(n);
  for (Index i = 0; i < n; ++i) {
    state[i] = std::complex<double>(rng.normal(), rng.normal());
  }
  return state / state.norm();
}

}  // namespace

TEST_CASE("h is derived from epsilon and alpha") {
  const Matrix points = random_points(8, 2, 1);
  const SpectralLaplacian spec = decompose_points(points, std::exp(-4.7), 1.0);

  const Propagator prop =
      make_propagator(spec, std::exp(-4.7), 1.6, 0.1);
  CHECK(prop.h == doctest::Approx(std::exp(-4.7 / 3.6)).epsilon(1e-12));
  CHECK(prop.h == doctest::Approx(0.27105).epsilon(5e-5));

  const Propagator torus_like =
      make_propagator(spec, std::exp(-3.8), 1.8, 0.1);
  CHECK(torus_like.h == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("zero time step is the identity") {
  const Matrix points = random_points(12, 3, 2);
  const SpectralLaplacian spec = decompose_points(points, 0.4, 1.0);
  const Propagator prop = make_propagator(spec, 0.4, 1.0, 0.0);
  for (Index i = 0; i < prop.phase_table.size(); ++i) {
    CHECK(prop.phase_table[i] == std::complex<double>(1.0, 0.0));
  }
  const ComplexVector state = random_state(12, 3);
  const ComplexVector moved = propagate(prop, state, 1);
  CHECK((moved - state).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("phase table entries stay on the unit circle") {
  const Matrix points = random_points(30, 3, 4);
  const SpectralLaplacian spec = decompose_points(points, 0.2, 0.3);
  const Propagator prop = make_propagator(spec, 0.2, 1.4, 0.7);
  for (Index i = 0; i < prop.phase_table.size(); ++i) {
    CHECK(std::abs(std::abs(prop.phase_table[i]) - 1.0) <= 1e-14);
  }
}

TEST_CASE("two steps equal one doubled step") {
  const Matrix points = random_points(40, 3, 5);
  const SpectralLaplacian spec = decompose_points(points, 0.3, 1.0);
  const Propagator single = make_propagator(spec, 0.3, 1.2, 0.05);
  const Propagator doubled = make_propagator(spec, 0.3, 1.2, 0.10);
  const ComplexVector state = random_state(40, 6);
  const ComplexVector via_two = propagate(single, state, 2);
  const ComplexVector via_one = propagate(doubled, state, 1);
  CHECK((via_two - via_one).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("composition matches the summed time") {
  const Matrix points = random_points(150, 3, 7);
  const SpectralLaplacian spec = decompose_points(points, 0.5, 1.0);
  const Propagator first = make_propagator(spec, 0.5, 1.0, 0.21);
  const Propagator second = make_propagator(spec, 0.5, 1.0, 0.33);
  const Propagator joint = make_propagator(spec, 0.5, 1.0, 0.54);
  const ComplexVector state = random_state(150, 8);
  const ComplexVector composed = propagate(second, propagate(first, state, 1), 1);
  const ComplexVector direct = propagate(joint, state, 1);
  CHECK((composed - direct).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("degree-weighted norm is preserved") {
  const Matrix points = random_points(120, 4, 9);
  const SpectralLaplacian spec = decompose_points(points, 0.6, 1.0);
  const Propagator prop = make_propagator(spec, 0.6, 1.5, 0.4);
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const ComplexVector state = random_state(120, seed);
    const ComplexVector moved = propagate(prop, state, 3);
    const double before = weighted_norm(spec, state);
    const double after = weighted_norm(spec, moved);
    CHECK(std::abs(after - before) <= 1e-8 * before);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  const Matrix points = random_points(10, 2, 13);
  const SpectralLaplacian spec = decompose_points(points, 0.4, 1.0);
  const Propagator prop = make_propagator(spec, 0.4, 1.0, 0.1);
  CHECK_THROWS_AS(propagate(prop, random_state(11, 1), 1), ValidationError);
  CHECK_THROWS_AS(propagate(prop, random_state(10, 1), 0), ValidationError);
}

TEST_CASE("alpha below one is rejected") {
  const Matrix points = random_points(10, 2, 14);
  const SpectralLaplacian spec = decompose_points(points, 0.4, 1.0);
  CHECK_THROWS_AS(make_propagator(spec, 0.4, 0.99, 0.1), ValidationError);
}

TEST_CASE("spectral truncation tracks the full propagation on the sphere") {
  const Index n = 2000;
  const double epsilon = std::exp(-3.5);
  const double alpha = 1.6;
  const Dataset sphere = sample_sphere(n, 2024);
  const SpectralLaplacian spec = decompose_points(sphere.points, epsilon, 1.0);

  const Propagator full = make_propagator(spec, epsilon, alpha, 0.1);
  const Propagator truncated =
      make_propagator(spec, epsilon, alpha, 0.1, Index{100});
  const double h = full.h;

  const CoherentState state = make_state_extrinsic(sphere, 17, 1, h);

  auto position_mean = [&](const ComplexVector& psi) {
    const Vector q = psi.cwiseAbs2();
    return Vector((sphere.points.transpose() * q) / q.sum());
  };

  const ComplexVector full_t = propagate(full, state.amplitudes, 10);
  const ComplexVector cut_t = propagate(truncated, state.amplitudes, 10);
  const Vector mean_full = position_mean(full_t);
  const Vector mean_cut = position_mean(cut_t);
  CHECK((mean_full - mean_cut).norm() <= 2.0 * h);

  // The propagated packet concentrates a geodesic distance ~t from its start.
  const Vector q = full_t.cwiseAbs2();
  Index peak;
  q.maxCoeff(&peak);
  const double travelled = sphere_geodesic_distance(
      sphere.points.row(peak).transpose(), sphere.points.row(17).transpose());
  CHECK(travelled == doctest::Approx(1.0).epsilon(2.0 * h));
}
