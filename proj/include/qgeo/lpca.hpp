#ifndef QGEO_LPCA_HPP
#define QGEO_LPCA_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"

namespace qgeo {

/// Tangent-frame estimate at one sample: an orthonormal basis of the leading
/// principal directions of the neighborhood, and the neighborhood samples
/// expressed in those coordinates (the center maps to the origin).
struct LpcaFrame {
  Index center = -1;
  std::vector<Index> neighborhood;  ///< ascending; squared dist <= delta.
  Matrix basis;                     ///< dim x n, rows orthonormal.
  Matrix coords;                    ///< |neighborhood| x dim, row per member.
  Vector singvals;                  ///< descending.
  double delta = 0.0;

  Index dim() const { return basis.rows(); }

  /// Position of sample `idx` inside `neighborhood`, or -1.
  Index local_index(Index idx) const {
    const auto it =
        std::lower_bound(neighborhood.begin(), neighborhood.end(), idx);
    if (it == neighborhood.end() || *it != idx) return -1;
    return static_cast<Index>(it - neighborhood.begin());
  }
};

namespace detail {

/// Fix each basis row's sign so its largest-magnitude entry is positive,
/// making the SVD output reproducible.
inline void canonicalize_rows(Matrix& basis) {
  for (Index i = 0; i < basis.rows(); ++i) {
    Index at = 0;
    basis.row(i).cwiseAbs().maxCoeff(&at);
    if (basis(i, at) < 0.0) basis.row(i) = -basis.row(i);
  }
}

}  // namespace detail

/// Local PCA around `center` over all samples with squared distance at most
/// `delta_pca`. If `dim` is not given, the frame dimension is placed at the
/// largest ratio gap between consecutive singular values.
inline LpcaFrame lpca(const Dataset& data, Index center, double delta_pca,
                      std::optional<Index> dim = {}) {
  if (center < 0 || center >= data.size()) {
    throw ValidationError("center index out of range");
  }
  if (!(delta_pca > 0.0)) throw ValidationError("delta_pca must be > 0");

  LpcaFrame frame;
  frame.center = center;
  frame.delta = delta_pca;
  const auto center_point = data.points.row(center);
  for (Index i = 0; i < data.size(); ++i) {
    if ((data.points.row(i) - center_point).squaredNorm() <= delta_pca) {
      frame.neighborhood.push_back(i);
    }
  }
  const Index count = static_cast<Index>(frame.neighborhood.size());
  if (count < 2) {
    throw PreparationError("neighborhood around sample " +
                           std::to_string(center) +
                           " is too small for local PCA");
  }

  Matrix centered(count, data.dim());
  for (Index i = 0; i < count; ++i) {
    centered.row(i) = data.points.row(frame.neighborhood[static_cast<size_t>(i)]) -
                      center_point;
  }
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  frame.singvals = svd.singularValues();
  if (frame.singvals.maxCoeff() < 1e-12) {
    throw PreparationError("degenerate neighborhood: all singular values vanish");
  }

  const Index max_dim = std::min<Index>(data.dim(), count - 1);
  Index chosen;
  if (dim) {
    chosen = *dim;
    if (chosen < 1 || chosen > data.dim()) {
      throw ValidationError("requested frame dimension out of range");
    }
    if (chosen > max_dim) {
      throw PreparationError("neighborhood too small for a " +
                             std::to_string(chosen) + "-dimensional frame");
    }
  } else {
    // Keep c components where the drop sigma[c-1] / sigma[c] is largest.
    const Index upper = std::min<Index>(max_dim, frame.singvals.size() - 1);
    chosen = 1;
    double best_ratio = -1.0;
    for (Index c = 1; c <= upper; ++c) {
      const double hi = frame.singvals[c - 1];
      const double lo = frame.singvals[c];
      const double ratio = lo > 0.0 ? hi / lo
                           : (hi > 0.0 ? std::numeric_limits<double>::infinity()
                                       : 0.0);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        chosen = c;
      }
    }
  }

  frame.basis = svd.matrixV().leftCols(chosen).transpose();
  detail::canonicalize_rows(frame.basis);
  frame.coords = centered * frame.basis.transpose();
  return frame;
}

/// Read-mostly cache of frames keyed by (center, delta, dim). Fills are
/// guarded so concurrent pipeline workers can share one cache.
class LpcaFrameCache {
 public:
  explicit LpcaFrameCache(const Dataset& data) : data_(&data) {}

  std::shared_ptr<const LpcaFrame> get(Index center, double delta_pca,
                                       std::optional<Index> dim = {}) {
    const std::tuple<Index, double, Index> key{center, delta_pca,
                                               dim.value_or(0)};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = frames_.find(key);
      if (it != frames_.end()) return it->second;
    }
    auto frame =
        std::make_shared<const LpcaFrame>(lpca(*data_, center, delta_pca, dim));
    std::lock_guard<std::mutex> lock(mutex_);
    return frames_.emplace(key, std::move(frame)).first->second;
  }

 private:
  const Dataset* data_;
  std::map<std::tuple<Index, double, Index>,
           std::shared_ptr<const LpcaFrame>>
      frames_;
  std::mutex mutex_;
};

}  // namespace qgeo

#endif  // QGEO_LPCA_HPP
