#ifndef QGEO_FORMATS_HPP
#define QGEO_FORMATS_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "qgeo/config.hpp"
#include "qgeo/io.hpp"
#include "qgeo/kmeans.hpp"
#include "qgeo/laplacian.hpp"
#include "qgeo/layout.hpp"
#include "qgeo/pipeline.hpp"

namespace qgeo {

// Geodesic distance matrices travel as (i, j, distance) triplet CSV plus a
// JSON sidecar with the settings that produced them.

inline void save_distance_csv(const GeodesicDistanceMatrix& g,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "i,j,distance\n";
  for (const auto& [key, dist] : g.entries) {
    out << key.first << ',' << key.second << ','
        << detail::format_double(dist) << '\n';
  }
}

inline void save_distance_meta(const GeodesicDistanceMatrix& g,
                               const std::string& path) {
  nlohmann::json j;
  j["n"] = g.n;
  j["entries"] = g.entries.size();
  j["config"] = config_to_json(g.meta);
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << j.dump(2) << '\n';
}

inline GeodesicDistanceMatrix load_distance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) !=
          std::vector<std::string>{"i", "j", "distance"}) {
    throw FormatError("expected header 'i,j,distance' in " + path);
  }
  GeodesicDistanceMatrix g;
  Index max_index = 0;
  for (Index row = 1; std::getline(in, line); ++row) {
    if (line.empty() && in.eof()) break;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) {
      throw FormatError("row " + std::to_string(row) + " is not a triplet");
    }
    const auto i = static_cast<Index>(detail::parse_double(fields[0], row, 0));
    const auto j = static_cast<Index>(detail::parse_double(fields[1], row, 1));
    const double dist = detail::parse_double(fields[2], row, 2);
    if (i < 0 || j < 0 || !(dist > 0.0) || !std::isfinite(dist)) {
      throw FormatError("invalid triplet at row " + std::to_string(row));
    }
    g.update_min(i, j, dist);
    max_index = std::max({max_index, i, j});
  }
  if (g.entries.empty()) throw FormatError("no distance entries in " + path);
  g.n = max_index + 1;
  return g;
}

inline void save_scan_csv(const DeviationGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "epsilon,alpha,deviation\n";
  for (Index e = 0; e < grid.eps_values.size(); ++e) {
    for (Index a = 0; a < grid.alpha_values.size(); ++a) {
      out << detail::format_double(grid.eps_values[e]) << ','
          << detail::format_double(grid.alpha_values[a]) << ','
          << detail::format_double(grid.deviations(e, a)) << '\n';
    }
  }
}

/// Embedding CSV: id,x,y[,z]. Ids fall back to row indices.
inline void save_embedding_csv(const Embedding& embedding,
                               const std::vector<std::string>& ids,
                               const std::string& path) {
  const Index n = embedding.coords.rows();
  const Index dim = embedding.coords.cols();
  if (!ids.empty() && static_cast<Index>(ids.size()) != n) {
    throw ValidationError("id count does not match embedding rows");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "id,x,y" << (dim >= 3 ? ",z" : "") << '\n';
  for (Index i = 0; i < n; ++i) {
    if (ids.empty()) {
      out << i;
    } else {
      out << ids[static_cast<size_t>(i)];
    }
    for (Index d = 0; d < dim; ++d) {
      out << ',' << detail::format_double(embedding.coords(i, d));
    }
    out << '\n';
  }
}

struct LabeledEmbedding {
  Matrix coords;
  std::vector<std::string> ids;
};

inline LabeledEmbedding load_embedding_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty embedding file");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "id") {
    throw FormatError("expected header id,x,y[,z] in " + path);
  }
  const Index dim = static_cast<Index>(header.size()) - 1;
  LabeledEmbedding result;
  std::vector<double> values;
  Index rows = 0;
  for (Index row = 1; std::getline(in, line); ++row) {
    if (line.empty() && in.eof()) break;
    const auto fields = detail::split_csv_line(line);
    if (static_cast<Index>(fields.size()) != dim + 1) {
      throw FormatError("row " + std::to_string(row) + " has wrong arity");
    }
    result.ids.push_back(fields[0]);
    for (Index d = 0; d < dim; ++d) {
      values.push_back(detail::parse_double(fields[static_cast<size_t>(d) + 1],
                                            row, d));
    }
    ++rows;
  }
  result.coords = Eigen::Map<
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, dim);
  return result;
}

/// Clustered embedding CSV: id,x,y[,z],cluster.
inline void save_cluster_csv(const LabeledEmbedding& embedding,
                             const Clustering& clustering,
                             const std::string& path) {
  const Index n = embedding.coords.rows();
  if (static_cast<Index>(clustering.labels.size()) != n) {
    throw ValidationError("label count does not match embedding rows");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "id,x,y" << (embedding.coords.cols() >= 3 ? ",z" : "") << ",cluster\n";
  for (Index i = 0; i < n; ++i) {
    out << embedding.ids[static_cast<size_t>(i)];
    for (Index d = 0; d < embedding.coords.cols(); ++d) {
      out << ',' << detail::format_double(embedding.coords(i, d));
    }
    out << ',' << clustering.labels[static_cast<size_t>(i)] << '\n';
  }
}

/// Spectral data as four QGEO blocks: eigenvalues (N x 1), eigenvectors
/// (N x N), sqrt degree vector (N x 1), and (epsilon, lambda) as 2 x 1.
inline void save_spectral(const SpectralLaplacian& spectral,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);
  write_qgeo_block(out, spectral.eigvals);
  write_qgeo_block(out, spectral.eigvecs);
  write_qgeo_block(out, spectral.dvec_sqrt);
  Matrix params(2, 1);
  params << spectral.epsilon, spectral.lambda;
  write_qgeo_block(out, params);
}

inline SpectralLaplacian load_spectral(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  const Matrix eigvals = read_qgeo_block(in);
  const Matrix eigvecs = read_qgeo_block(in);
  const Matrix dvec_sqrt = read_qgeo_block(in);
  const Matrix params = read_qgeo_block(in);
  if (eigvals.cols() != 1 || dvec_sqrt.cols() != 1 || params.rows() != 2 ||
      params.cols() != 1 || eigvecs.rows() != eigvals.rows() ||
      eigvecs.cols() != eigvals.rows() || dvec_sqrt.rows() != eigvals.rows()) {
    throw FormatError("inconsistent spectral blocks in " + path);
  }
  SpectralLaplacian spectral;
  spectral.eigvals = eigvals.col(0);
  spectral.eigvecs = eigvecs;
  spectral.dvec_sqrt = dvec_sqrt.col(0);
  spectral.epsilon = params(0, 0);
  spectral.lambda = params(1, 0);
  return spectral;
}

}  // namespace qgeo

#endif  // QGEO_FORMATS_HPP
