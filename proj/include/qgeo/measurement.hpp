#ifndef QGEO_MEASUREMENT_HPP
#define QGEO_MEASUREMENT_HPP

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"
#include "qgeo/lpca.hpp"

namespace qgeo {

/// Probability mass over samples induced by a state, q_i = |psi_i|^2 / sum.
struct SampleDistribution {
  Vector q;             ///< nonnegative, sums to 1.
  Index argmax = -1;    ///< lowest index on ties.
};

inline SampleDistribution to_distribution(const ComplexVector& state) {
  if (state.size() == 0) throw ValidationError("empty state");
  SampleDistribution dist;
  dist.q = state.cwiseAbs2();
  const double total = dist.q.sum();
  if (!(total > 0.0)) throw ValidationError("state has zero norm");
  dist.q /= total;
  dist.argmax = 0;
  for (Index i = 1; i < dist.q.size(); ++i) {
    if (dist.q[i] > dist.q[dist.argmax]) dist.argmax = i;
  }
  return dist;
}

inline Index max_position(const SampleDistribution& dist) {
  return dist.argmax;
}

/// Sample closest to the mass-weighted mean in extrinsic coordinates.
inline Index mean_position_extrinsic(const Dataset& data,
                                     const SampleDistribution& dist) {
  if (dist.q.size() != data.size()) {
    throw ValidationError("distribution size does not match dataset");
  }
  const Vector mean = data.points.transpose() * dist.q;
  Index best = 0;
  double best_dist = (data.points.row(0).transpose() - mean).squaredNorm();
  for (Index i = 1; i < data.size(); ++i) {
    const double d = (data.points.row(i).transpose() - mean).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

/// Sample closest to the mean in the frame coordinates of the distribution
/// maximum. Mass is restricted to the frame neighborhood and renormalized
/// before averaging. Passing `dim` pins the chart dimension, which the
/// singular-value gap cannot resolve on large curved neighborhoods; pipelines
/// forward the dimension of the initial-state frame. Falls back to the
/// extrinsic mean when the local frame cannot be built.
inline Index mean_position_lpca(const Dataset& data,
                                const SampleDistribution& dist,
                                double delta_pca,
                                LpcaFrameCache* cache = nullptr,
                                WarningSink* warnings = nullptr,
                                std::optional<Index> dim = {}) {
  if (dist.q.size() != data.size()) {
    throw ValidationError("distribution size does not match dataset");
  }
  const Index peak = dist.argmax;
  std::shared_ptr<const LpcaFrame> owned;
  const LpcaFrame* frame = nullptr;
  try {
    if (cache != nullptr) {
      owned = cache->get(peak, delta_pca, dim);
    } else {
      owned =
          std::make_shared<const LpcaFrame>(lpca(data, peak, delta_pca, dim));
    }
    frame = owned.get();
  } catch (const PreparationError& e) {
    warn(warnings, std::string("frame at distribution maximum is degenerate (") +
                       e.what() + "); using the extrinsic mean");
    return mean_position_extrinsic(data, dist);
  }

  const Index count = static_cast<Index>(frame->neighborhood.size());
  double mass = 0.0;
  for (Index local = 0; local < count; ++local) {
    mass += dist.q[frame->neighborhood[static_cast<size_t>(local)]];
  }
  if (!(mass > 0.0)) {
    warn(warnings, "no probability mass inside the local frame; using the extrinsic mean");
    return mean_position_extrinsic(data, dist);
  }
  Vector mean = Vector::Zero(frame->dim());
  for (Index local = 0; local < count; ++local) {
    mean += (dist.q[frame->neighborhood[static_cast<size_t>(local)]] / mass) *
            frame->coords.row(local).transpose();
  }
  Index best_local = 0;
  double best_dist =
      (frame->coords.row(0).transpose() - mean).squaredNorm();
  for (Index local = 1; local < count; ++local) {
    const double d = (frame->coords.row(local).transpose() - mean).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best_local = local;
    }
  }
  return frame->neighborhood[static_cast<size_t>(best_local)];
}

/// Linear baseline: the neighborhood sample whose frame coordinates are
/// closest to theta_0 + p t. The nearest sample is returned even when the
/// target leaves the neighborhood hull.
inline Index euclidean_propagation_baseline(const Dataset& data,
                                            const LpcaFrame& frame,
                                            const Vector& momentum, double t) {
  if (frame.neighborhood.empty() || frame.neighborhood.back() >= data.size()) {
    throw ValidationError("frame does not belong to this dataset");
  }
  if (!(t >= 0.0)) throw ValidationError("t must be >= 0");
  if (momentum.size() != frame.dim()) {
    throw ValidationError("momentum dimension does not match the frame");
  }
  const Vector target = momentum * t;
  const Index count = static_cast<Index>(frame.neighborhood.size());
  Index best_local = 0;
  double best_dist = (frame.coords.row(0).transpose() - target).squaredNorm();
  for (Index local = 1; local < count; ++local) {
    const double d =
        (frame.coords.row(local).transpose() - target).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best_local = local;
    }
  }
  return frame.neighborhood[static_cast<size_t>(best_local)];
}

}  // namespace qgeo

#endif  // QGEO_MEASUREMENT_HPP
