#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qgeo/kmeans.hpp"
#include "qgeo/layout.hpp"

using namespace qgeo;

namespace {

GeodesicDistanceMatrix ring_graph(Index n, double edge) {
  GeodesicDistanceMatrix g;
  g.n = n;
  for (Index i = 0; i < n; ++i) g.update_min(i, (i + 1) % n, edge);
  return g;
}

/// Optimal 2-partition inertia by enumerating all assignments.
double exhaustive_two_cluster_inertia(const Matrix& pts) {
  const Index n = pts.rows();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    Eigen::RowVectorXd first = Eigen::RowVectorXd::Zero(pts.cols());
    Eigen::RowVectorXd second = first;
    int n0 = 0, n1 = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        first += pts.row(i);
        ++n0;
      } else {
        second += pts.row(i);
        ++n1;
      }
    }
    first /= n0;
    second /= n1;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      inertia += (mask & (1u << i)) ? (pts.row(i) - first).squaredNorm()
                                    : (pts.row(i) - second).squaredNorm();
    }
    best = std::min(best, inertia);
  }
  return best;
}

}  // namespace

TEST_CASE("two bodies settle near their target separation") {
  for (double target : {0.5, 1.0, 2.0}) {
    GeodesicDistanceMatrix g;
    g.n = 2;
    g.update_min(0, 1, target);
    const Embedding e = force_layout(g, 3, 500, 1);
    const double sep = (e.coords.row(0) - e.coords.row(1)).norm();
    CHECK(std::abs(sep - target) <= 0.05 * target);
  }
}

TEST_CASE("an equilateral triangle stays equilateral") {
  GeodesicDistanceMatrix g;
  g.n = 3;
  g.update_min(0, 1, 1.0);
  g.update_min(0, 2, 1.0);
  g.update_min(1, 2, 1.0);
  const Embedding e = force_layout(g, 2, 500, 2);
  const double a = (e.coords.row(0) - e.coords.row(1)).norm();
  const double b = (e.coords.row(0) - e.coords.row(2)).norm();
  const double c = (e.coords.row(1) - e.coords.row(2)).norm();
  const double mean = (a + b + c) / 3.0;
  const double var = ((a - mean) * (a - mean) + (b - mean) * (b - mean) +
                      (c - mean) * (c - mean)) /
                     3.0;
  CHECK(std::sqrt(var) / mean <= 0.05);
}

TEST_CASE("layout output is centered and deterministic") {
  const GeodesicDistanceMatrix g = ring_graph(24, 0.4);
  const Embedding first = force_layout(g, 3, 150, 7);
  CHECK(first.coords.colwise().mean().cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(first.iterations_run == 150);
  CHECK(first.final_stress >= 0.0);
  const Embedding second = force_layout(g, 3, 150, 7);
  CHECK(first.coords == second.coords);
  const Embedding other_seed = force_layout(g, 3, 150, 8);
  CHECK(first.coords != other_seed.coords);
}

TEST_CASE("permuting vertex labels permutes layout rows") {
  const Index n = 30;
  const GeodesicDistanceMatrix g = ring_graph(n, 0.3);
  Matrix init(n, 2);
  for (Index i = 0; i < n; ++i) {
    Rng rng(mix_seed(9, static_cast<std::uint64_t>(i)));
    init(i, 0) = rng.uniform(-1.0, 1.0);
    init(i, 1) = rng.uniform(-1.0, 1.0);
  }
  const Embedding base = force_layout_from(g, init, 200);

  const auto perm = [n](Index i) { return (i * 7 + 3) % n; };
  GeodesicDistanceMatrix permuted;
  permuted.n = n;
  for (const auto& [key, dist] : g.entries) {
    permuted.update_min(perm(key.first), perm(key.second), dist);
  }
  Matrix permuted_init(n, 2);
  for (Index i = 0; i < n; ++i) permuted_init.row(perm(i)) = init.row(i);
  const Embedding moved = force_layout_from(permuted, permuted_init, 200);

  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    worst = std::max(
        worst, (moved.coords.row(perm(i)) - base.coords.row(i)).norm());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("isolated vertices are placed by repulsion without error") {
  GeodesicDistanceMatrix g;
  g.n = 4;  // vertex 3 has no edges
  g.update_min(0, 1, 1.0);
  g.update_min(1, 2, 1.0);
  const Embedding e = force_layout(g, 2, 100, 3);
  CHECK(e.coords.rows() == 4);
  CHECK(e.coords.allFinite());
}

TEST_CASE("empty graphs cannot be laid out") {
  GeodesicDistanceMatrix g;
  g.n = 5;
  CHECK_THROWS_AS(force_layout(g, 3, 100, 1), ValidationError);
}

TEST_CASE("each point its own cluster has zero inertia") {
  Rng rng(21);
  Matrix pts(6, 3);
  for (Index i = 0; i < 6; ++i) {
    pts.row(i) << rng.normal(), rng.normal(), rng.normal();
  }
  const Clustering c = kmeans(pts, 6, 5);
  CHECK(c.inertia == 0.0);
  std::vector<int> sorted = c.labels;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 6; ++i) CHECK(sorted[static_cast<size_t>(i)] == i);
}

TEST_CASE("well separated blobs split exactly") {
  Rng rng(22);
  Matrix pts(40, 2);
  for (Index i = 0; i < 20; ++i) pts.row(i) << rng.normal(), rng.normal();
  for (Index i = 20; i < 40; ++i) {
    pts.row(i) << 50.0 + rng.normal(), rng.normal();
  }
  const Clustering c = kmeans(pts, 2, 3);
  for (Index i = 1; i < 20; ++i) CHECK(c.labels[static_cast<size_t>(i)] == c.labels[0]);
  for (Index i = 21; i < 40; ++i) CHECK(c.labels[static_cast<size_t>(i)] == c.labels[20]);
  CHECK(c.labels[0] != c.labels[20]);
}

TEST_CASE("small instances reach the exhaustive-partition optimum") {
  Rng rng(12);
  Matrix pts(8, 2);
  for (Index i = 0; i < 4; ++i) {
    pts.row(i) << rng.normal() * 0.5, rng.normal() * 0.5;
  }
  for (Index i = 4; i < 8; ++i) {
    pts.row(i) << 4.0 + rng.normal() * 0.8, 1.0 + rng.normal() * 0.8;
  }
  const double optimum = exhaustive_two_cluster_inertia(pts);
  const Clustering c = kmeans(pts, 2, 1);
  CHECK(c.inertia == doctest::Approx(optimum).epsilon(1e-12));
}

TEST_CASE("inertia never increases across iterations") {
  Rng rng(23);
  Matrix pts(120, 3);
  for (Index i = 0; i < 120; ++i) {
    pts.row(i) << rng.normal(), rng.normal(), rng.normal();
  }
  std::vector<double> history;
  (void)kmeans(pts, 6, 9, 100, KMeansInit::PlusPlus, &history);
  REQUIRE(history.size() >= 2);
  for (size_t i = 1; i < history.size(); ++i) {
    CHECK(history[i] <= history[i - 1] + 1e-12);
  }
}

TEST_CASE("duplicate-heavy data keeps every cluster populated") {
  Matrix pts(4, 2);
  pts << 0, 0, 0, 0, 0, 0, 5, 5;
  const Clustering c = kmeans(pts, 3, 9);
  std::vector<int> counts(3, 0);
  for (int label : c.labels) counts[static_cast<size_t>(label)] += 1;
  for (int count : counts) CHECK(count >= 1);
  CHECK(c.inertia == doctest::Approx(0.0));
}

TEST_CASE("rotating the data does not change the partition") {
  Rng rng(24);
  Matrix pts(60, 3);
  for (Index i = 0; i < 60; ++i) {
    const double shift = i % 3 == 0 ? 0.0 : (i % 3 == 1 ? 6.0 : -6.0);
    pts.row(i) << shift + rng.normal(), rng.normal(), rng.normal();
  }
  Matrix gaussian(3, 3);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) gaussian(i, j) = rng.normal();
  }
  const Matrix rotation = Eigen::HouseholderQR<Matrix>(gaussian).householderQ();
  const Matrix rotated = pts * rotation.transpose();

  const Clustering plain = kmeans(pts, 3, 31, 100, KMeansInit::FarthestFirst);
  const Clustering turned =
      kmeans(rotated, 3, 31, 100, KMeansInit::FarthestFirst);
  CHECK(plain.labels == turned.labels);
}

TEST_CASE("cluster count is validated") {
  Matrix pts = Matrix::Random(5, 2);
  CHECK_THROWS_AS(kmeans(pts, 6, 1), ValidationError);
  CHECK_THROWS_AS(kmeans(pts, 0, 1), ValidationError);
}
