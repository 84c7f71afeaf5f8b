#ifndef QGEO_DATASET_HPP
#define QGEO_DATASET_HPP

#include <set>
#include <string>
#include <vector>

#include "qgeo/common.hpp"

namespace qgeo {

/// A point cloud of N samples with extrinsic coordinates in R^n.
struct Dataset {
  Matrix points;                 ///< N x n, row per sample.
  std::vector<std::string> ids;  ///< empty, or one unique id per sample.

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

inline void validate(const Dataset& data) {
  if (data.size() < 2) {
    throw ValidationError("dataset must contain at least 2 samples, got " +
                          std::to_string(data.size()));
  }
  if (data.dim() < 1) {
    throw ValidationError("dataset must have at least 1 coordinate");
  }
  if (!data.points.allFinite()) {
    for (Index i = 0; i < data.size(); ++i) {
      for (Index j = 0; j < data.dim(); ++j) {
        if (!std::isfinite(data.points(i, j))) {
          throw ValidationError("non-finite entry at sample " +
                                std::to_string(i) + ", coordinate " +
                                std::to_string(j));
        }
      }
    }
  }
  if (!data.ids.empty()) {
    if (static_cast<Index>(data.ids.size()) != data.size()) {
      throw ValidationError("id count does not match sample count");
    }
    std::set<std::string> seen(data.ids.begin(), data.ids.end());
    if (static_cast<Index>(seen.size()) != data.size()) {
      throw ValidationError("sample ids are not unique");
    }
  }
}

/// Rescales coordinates to [0, 1]. With per_feature each column is scaled by
/// its own range, otherwise one global min/max is used for all entries.
inline Dataset normalize_minmax(const Dataset& data, bool per_feature = false) {
  validate(data);
  Dataset out = data;
  if (per_feature) {
    for (Index j = 0; j < data.dim(); ++j) {
      const double lo = data.points.col(j).minCoeff();
      const double hi = data.points.col(j).maxCoeff();
      if (hi <= lo) {
        throw ValidationError("column " + std::to_string(j) +
                              " is constant, cannot min-max normalize");
      }
      out.points.col(j) = (data.points.col(j).array() - lo) / (hi - lo);
    }
  } else {
    const double lo = data.points.minCoeff();
    const double hi = data.points.maxCoeff();
    if (hi <= lo) {
      throw ValidationError("dataset is constant, cannot min-max normalize");
    }
    out.points = (data.points.array() - lo) / (hi - lo);
  }
  return out;
}

}  // namespace qgeo

#endif  // QGEO_DATASET_HPP
