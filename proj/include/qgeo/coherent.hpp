#ifndef QGEO_COHERENT_HPP
#define QGEO_COHERENT_HPP

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"
#include "qgeo/lpca.hpp"

namespace qgeo {

enum class StateKind { Extrinsic, Lpca };

/// Unit-norm wavepacket localized at a sample with a momentum direction.
/// Extrinsic states live on all samples; frame states are supported on the
/// support frame's neighborhood only.
struct CoherentState {
  ComplexVector amplitudes;  ///< length N, unit 2-norm.
  Index base = -1;
  Vector momentum;           ///< unit; length n (extrinsic) or frame dim.
  double h = 0.0;
  StateKind kind = StateKind::Extrinsic;
};

namespace detail {

/// Sample indices sorted by distance to `center` (ascending, index-ordered on
/// ties), excluding the center itself.
inline std::vector<Index> neighbors_by_distance(const Matrix& points,
                                                Index center) {
  std::vector<std::pair<double, Index>> order;
  order.reserve(static_cast<size_t>(points.rows()) - 1);
  for (Index i = 0; i < points.rows(); ++i) {
    if (i == center) continue;
    order.emplace_back((points.row(i) - points.row(center)).squaredNorm(), i);
  }
  std::sort(order.begin(), order.end());
  std::vector<Index> out(order.size());
  for (size_t i = 0; i < order.size(); ++i) out[i] = order[i].second;
  return out;
}

}  // namespace detail

/// The `rank`-th nearest distinct sample to `base`; coincident samples
/// (distance zero) are skipped.
inline Index nearest_neighbor(const Dataset& data, Index base, int rank) {
  if (rank < 1) throw ValidationError("neighbor rank must be >= 1");
  const auto order = detail::neighbors_by_distance(data.points, base);
  int seen = 0;
  for (Index idx : order) {
    if ((data.points.row(idx) - data.points.row(base)).squaredNorm() == 0.0) {
      continue;
    }
    if (++seen == rank) return idx;
  }
  throw PreparationError("no distinct neighbor of rank " +
                         std::to_string(rank) + " for sample " +
                         std::to_string(base));
}

/// Wavepacket in extrinsic coordinates with an explicit momentum direction:
/// entries exp(i (v - v0)^T p / h) exp(-|v - v0|^2 / (2h)), unit-normalized.
inline CoherentState make_state_extrinsic(const Dataset& data, Index base,
                                          const Vector& momentum, double h) {
  if (base < 0 || base >= data.size()) {
    throw ValidationError("base index out of range");
  }
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  if (momentum.size() != data.dim()) {
    throw ValidationError("momentum dimension does not match the dataset");
  }
  const double norm = momentum.norm();
  if (!(norm > 0.0)) throw ValidationError("momentum must be nonzero");

  CoherentState state;
  state.base = base;
  state.momentum = momentum / norm;
  state.h = h;
  state.kind = StateKind::Extrinsic;
  state.amplitudes.resize(data.size());
  const auto base_point = data.points.row(base);
  for (Index i = 0; i < data.size(); ++i) {
    const Vector offset = data.points.row(i) - base_point;
    state.amplitudes[i] =
        std::polar(std::exp(-offset.squaredNorm() / (2.0 * h)),
                   offset.dot(state.momentum) / h);
  }
  state.amplitudes /= state.amplitudes.norm();
  return state;
}

/// Same, with momentum toward the `neighbor_rank`-th nearest neighbor.
inline CoherentState make_state_extrinsic(const Dataset& data, Index base,
                                          int neighbor_rank, double h) {
  validate(data);
  const Index target = nearest_neighbor(data, base, neighbor_rank);
  const Vector momentum = data.points.row(target) - data.points.row(base);
  return make_state_extrinsic(data, base, momentum, h);
}

/// Wavepacket built in frame coordinates. The coordinate frame (a
/// gamma-scaled ball) supplies the basis; the support frame (the full ball)
/// supplies the nonzero entries. Both must be centered at the same sample.
inline CoherentState make_state_lpca(const Dataset& data,
                                     const LpcaFrame& coord_frame,
                                     const LpcaFrame& support_frame,
                                     const Vector& momentum, double h) {
  if (coord_frame.center != support_frame.center) {
    throw ValidationError("coordinate and support frames have different centers");
  }
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  if (momentum.size() != coord_frame.dim()) {
    throw ValidationError("momentum dimension does not match the frame");
  }
  const double norm = momentum.norm();
  if (!(norm > 0.0)) throw ValidationError("momentum must be nonzero");
  if (support_frame.neighborhood.size() < 3) {
    throw PreparationError("support neighborhood has fewer than 3 samples");
  }

  CoherentState state;
  state.base = coord_frame.center;
  state.momentum = momentum / norm;
  state.h = h;
  state.kind = StateKind::Lpca;
  state.amplitudes = ComplexVector::Zero(data.size());
  const auto base_point = data.points.row(coord_frame.center);
  for (Index idx : support_frame.neighborhood) {
    const Vector theta =
        coord_frame.basis * (data.points.row(idx) - base_point).transpose();
    state.amplitudes[idx] =
        std::polar(std::exp(-theta.squaredNorm() / (2.0 * h)),
                   theta.dot(state.momentum) / h);
  }
  state.amplitudes /= state.amplitudes.norm();
  return state;
}

}  // namespace qgeo

#endif  // QGEO_COHERENT_HPP
