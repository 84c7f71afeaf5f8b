#ifndef QGEO_KMEANS_HPP
#define QGEO_KMEANS_HPP

#include <vector>

#include "qgeo/common.hpp"

namespace qgeo {

struct Clustering {
  std::vector<int> labels;  ///< length N, values in [0, k).
  Matrix centroids;         ///< k x dim.
  double inertia = 0.0;     ///< sum of squared distances to own centroid.
};

enum class KMeansInit {
  PlusPlus,       ///< squared-distance-weighted seeding.
  FarthestFirst,  ///< deterministic max-min seeding after a seeded start.
};

namespace detail {

inline Index nearest_centroid(const Matrix& centroids, Index k,
                              const Eigen::RowVectorXd& point) {
  Index best = 0;
  double best_dist = (centroids.row(0) - point).squaredNorm();
  for (Index c = 1; c < k; ++c) {
    const double d = (centroids.row(c) - point).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

inline Matrix seed_centroids(const Matrix& coords, Index k, Rng& rng,
                             KMeansInit init) {
  const Index n = coords.rows();
  Matrix centroids(k, coords.cols());
  centroids.row(0) = coords.row(rng.uniform_index(n));
  Vector min_dist(n);
  for (Index i = 0; i < n; ++i) {
    min_dist[i] = (coords.row(i) - centroids.row(0)).squaredNorm();
  }
  for (Index c = 1; c < k; ++c) {
    Index pick = 0;
    if (init == KMeansInit::FarthestFirst) {
      min_dist.maxCoeff(&pick);
    } else {
      const double total = min_dist.sum();
      if (total <= 0.0) {
        pick = rng.uniform_index(n);
      } else {
        const double target = rng.uniform() * total;
        double running = 0.0;
        pick = n - 1;
        for (Index i = 0; i < n; ++i) {
          running += min_dist[i];
          if (running >= target) {
            pick = i;
            break;
          }
        }
      }
    }
    centroids.row(c) = coords.row(pick);
    for (Index i = 0; i < n; ++i) {
      min_dist[i] = std::min(
          min_dist[i], (coords.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace detail

/// Lloyd iterations from a seeded initialization. Assignment ties break to
/// the lower centroid index; an emptied cluster is reseeded at the point
/// farthest from its own centroid. Iterations stop when labels stabilize.
/// The per-iteration inertia trace, which never increases, can be captured
/// through `inertia_history`.
inline Clustering kmeans(const Matrix& coords, Index k, std::uint64_t seed,
                         int max_iter = 100,
                         KMeansInit init = KMeansInit::PlusPlus,
                         std::vector<double>* inertia_history = nullptr) {
  const Index n = coords.rows();
  if (n < 1) throw ValidationError("no points to cluster");
  if (k < 1 || k > n) {
    throw ValidationError("cluster count must be in [1, N]");
  }
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");

  Rng rng(mix_seed(seed, 0x6b6dULL));
  Matrix centroids = detail::seed_centroids(coords, k, rng, init);
  Clustering out;
  out.labels.assign(static_cast<size_t>(n), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = iter == 0;
    for (Index i = 0; i < n; ++i) {
      const int label =
          static_cast<int>(detail::nearest_centroid(centroids, k, coords.row(i)));
      if (label != out.labels[static_cast<size_t>(i)]) changed = true;
      out.labels[static_cast<size_t>(i)] = label;
    }

    std::vector<Index> counts(static_cast<size_t>(k), 0);
    Matrix sums = Matrix::Zero(k, coords.cols());
    for (Index i = 0; i < n; ++i) {
      const auto label = static_cast<size_t>(out.labels[static_cast<size_t>(i)]);
      counts[label] += 1;
      sums.row(static_cast<Index>(label)) += coords.row(i);
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) {
        // Reseed at the point farthest from its current centroid.
        Index farthest = 0;
        double farthest_dist = -1.0;
        for (Index i = 0; i < n; ++i) {
          const Index own = out.labels[static_cast<size_t>(i)];
          const double d =
              (coords.row(i) - centroids.row(own)).squaredNorm();
          if (d > farthest_dist) {
            farthest_dist = d;
            farthest = i;
          }
        }
        centroids.row(c) = coords.row(farthest);
        out.labels[static_cast<size_t>(farthest)] = static_cast<int>(c);
        changed = true;
      } else {
        centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
      }
    }

    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      inertia += (coords.row(i) -
                  centroids.row(out.labels[static_cast<size_t>(i)]))
                     .squaredNorm();
    }
    if (inertia_history) inertia_history->push_back(inertia);
    out.inertia = inertia;
    if (!changed) break;
  }

  out.centroids = std::move(centroids);
  return out;
}

}  // namespace qgeo

#endif  // QGEO_KMEANS_HPP
