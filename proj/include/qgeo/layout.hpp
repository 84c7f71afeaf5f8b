#ifndef QGEO_LAYOUT_HPP
#define QGEO_LAYOUT_HPP

#include <vector>

#include "qgeo/common.hpp"
#include "qgeo/pipeline.hpp"

namespace qgeo {

struct Embedding {
  Matrix coords;  ///< N x dim, centered at the origin.
  std::uint64_t seed = 0;
  int iterations_run = 0;
  double final_stress = 0.0;  ///< sum over edges of (separation - target)^2.
};

namespace detail {

struct LayoutEdge {
  Index other;
  double target;
};

/// Per-vertex adjacency from the stored distance entries.
inline std::vector<std::vector<LayoutEdge>> layout_adjacency(
    const GeodesicDistanceMatrix& g) {
  std::vector<std::vector<LayoutEdge>> adj(static_cast<size_t>(g.n));
  for (const auto& [key, dist] : g.entries) {
    adj[static_cast<size_t>(key.first)].push_back({key.second, dist});
    adj[static_cast<size_t>(key.second)].push_back({key.first, dist});
  }
  return adj;
}

inline double mean_edge_target(const GeodesicDistanceMatrix& g) {
  double total = 0.0;
  for (const auto& [key, dist] : g.entries) total += dist;
  return total / static_cast<double>(g.entries.size());
}

}  // namespace detail

/// Spring layout from explicit initial coordinates. Stored pairs attract
/// toward their target separation with force (s / target) (s - target); all
/// pairs repel with c / s^2; the step cap cools linearly to zero. The result
/// is centered. Each vertex accumulates its forces over a fixed scan order,
/// so rows permute with vertex labels when the initial rows are permuted.
inline Embedding force_layout_from(const GeodesicDistanceMatrix& g,
                                   Matrix init, int iters) {
  if (g.n < 1 || g.entries.empty()) {
    throw ValidationError("distance matrix has no entries to lay out");
  }
  if (init.rows() != g.n) {
    throw ValidationError("initial coordinates do not match vertex count");
  }
  if (iters < 1) throw ValidationError("iters must be >= 1");

  const Index n = g.n;
  const Index dim = init.cols();
  const auto adjacency = detail::layout_adjacency(g);
  const double scale = detail::mean_edge_target(g);
  const double repulsion = 0.01 * scale * scale * scale;
  const double step0 = 0.2 * scale;

  Matrix pos = std::move(init);
  Matrix disp(n, dim);
  for (int iter = 0; iter < iters; ++iter) {
    const double step = step0 * (1.0 - static_cast<double>(iter) / iters);
    parallel_for(n, [&](Index begin, Index end) {
      for (Index i = begin; i < end; ++i) {
        Eigen::RowVectorXd force = Eigen::RowVectorXd::Zero(dim);
        for (Index j = 0; j < n; ++j) {
          if (j == i) continue;
          Eigen::RowVectorXd delta = pos.row(i) - pos.row(j);
          double sep = delta.norm();
          if (sep < 1e-12) {
            // Coincident vertices: push apart along a fixed axis, away for
            // the larger index so the pair separates deterministically.
            delta = Eigen::RowVectorXd::Zero(dim);
            delta[0] = i > j ? 1.0 : -1.0;
            sep = 1.0;
          }
          force += delta * (repulsion / (sep * sep * sep));
        }
        for (const detail::LayoutEdge& edge : adjacency[static_cast<size_t>(i)]) {
          Eigen::RowVectorXd delta = pos.row(i) - pos.row(edge.other);
          double sep = delta.norm();
          if (sep < 1e-12) {
            delta = Eigen::RowVectorXd::Zero(dim);
            delta[0] = i > edge.other ? 1.0 : -1.0;
            sep = 1e-12;
          }
          const double pull = (sep / edge.target) * (sep - edge.target);
          force -= delta * (pull / sep);
        }
        const double magnitude = force.norm();
        if (magnitude > step) force *= step / magnitude;
        disp.row(i) = force;
      }
    });
    pos += disp;
  }
  pos.rowwise() -= pos.colwise().mean();

  Embedding out;
  out.coords = std::move(pos);
  out.iterations_run = iters;
  out.final_stress = 0.0;
  for (const auto& [key, dist] : g.entries) {
    const double sep =
        (out.coords.row(key.first) - out.coords.row(key.second)).norm();
    out.final_stress += (sep - dist) * (sep - dist);
  }
  return out;
}

/// Seeded entry point: vertex i starts from an independent stream derived
/// from (seed, i), inside a box sized for the edge-length scale.
inline Embedding force_layout(const GeodesicDistanceMatrix& g, int dim,
                              int iters, std::uint64_t seed) {
  if (dim != 2 && dim != 3) throw ValidationError("layout dimension must be 2 or 3");
  if (g.n < 1 || g.entries.empty()) {
    throw ValidationError("distance matrix has no entries to lay out");
  }
  const double scale = detail::mean_edge_target(g);
  const double side =
      scale * std::pow(static_cast<double>(g.n), 1.0 / dim);
  Matrix init(g.n, dim);
  for (Index i = 0; i < g.n; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i), 0x6c61796fULL));
    for (Index d = 0; d < dim; ++d) init(i, d) = rng.uniform(-side / 2, side / 2);
  }
  Embedding out = force_layout_from(g, std::move(init), iters);
  out.seed = seed;
  return out;
}

}  // namespace qgeo

#endif  // QGEO_LAYOUT_HPP
