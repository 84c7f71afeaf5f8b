#ifndef QGEO_PIPELINE_HPP
#define QGEO_PIPELINE_HPP

#include <atomic>
#include <map>
#include <utility>
#include <vector>

#include "qgeo/coherent.hpp"
#include "qgeo/config.hpp"
#include "qgeo/laplacian.hpp"
#include "qgeo/measurement.hpp"
#include "qgeo/propagator.hpp"

namespace qgeo {

/// Sparse symmetric matrix of extracted geodesic distances. Every stored
/// value is a positive multiple of the time step; the diagonal is absent.
struct GeodesicDistanceMatrix {
  std::map<std::pair<Index, Index>, double> entries;  ///< key (i, j), i < j.
  Index n = 0;
  PipelineConfig meta;

  /// Keeps the smaller of the stored and offered distances.
  void update_min(Index i, Index j, double distance) {
    if (i == j) return;
    if (j < i) std::swap(i, j);
    auto [it, inserted] = entries.try_emplace({i, j}, distance);
    if (!inserted && distance < it->second) it->second = distance;
  }

  /// Stored distance, or 0 when the pair is absent or on the diagonal.
  double at(Index i, Index j) const {
    if (i == j) return 0.0;
    if (j < i) std::swap(i, j);
    const auto it = entries.find({i, j});
    return it == entries.end() ? 0.0 : it->second;
  }
};

/// Deviation |h^2 <state|L|state> - 1| scored on an (epsilon, alpha) grid,
/// averaged over probe states.
struct DeviationGrid {
  Vector eps_values;
  Vector alpha_values;
  Matrix deviations;  ///< eps-major: deviations(i, j) for (eps_i, alpha_j).
  std::vector<Index> probe_indices;
};

struct SprayHit {
  Index endpoint = -1;
  double distance = 0.0;
};

struct SprayResult {
  std::vector<SprayHit> hits;
  int failed_momenta = 0;
};

/// |h^2 psi^dag L psi - 1| for a unit-norm state.
inline double deviation(const Matrix& laplacian, const ComplexVector& state,
                        double h) {
  if (state.size() != laplacian.rows()) {
    throw ValidationError("state dimension does not match the operator");
  }
  const std::complex<double> expectation =
      state.dot(laplacian * state);  // dot conjugates the left argument
  return std::abs(h * h * expectation - 1.0);
}

namespace detail {

/// Neighborhood members sorted by frame-coordinate distance to the center
/// (ascending, index-ordered on ties). Coincident samples are skipped.
inline std::vector<Index> frame_neighbor_order(const LpcaFrame& frame) {
  std::vector<std::pair<double, Index>> order;
  order.reserve(frame.neighborhood.size());
  for (Index local = 0; local < static_cast<Index>(frame.neighborhood.size());
       ++local) {
    if (frame.neighborhood[static_cast<size_t>(local)] == frame.center) continue;
    const double d2 = frame.coords.row(local).squaredNorm();
    if (d2 == 0.0) continue;
    order.emplace_back(d2, local);
  }
  std::sort(order.begin(), order.end());
  std::vector<Index> locals(order.size());
  for (size_t i = 0; i < order.size(); ++i) locals[i] = order[i].second;
  return locals;
}

/// Momentum direction toward the `rank`-th closest neighborhood member in
/// frame coordinates.
inline Vector frame_neighbor_momentum(const LpcaFrame& frame,
                                      const std::vector<Index>& order,
                                      int rank) {
  if (static_cast<int>(order.size()) < rank) {
    throw PreparationError("frame has no neighbor of rank " +
                           std::to_string(rank));
  }
  Vector momentum = frame.coords.row(order[static_cast<size_t>(rank - 1)]);
  return momentum / momentum.norm();
}

/// One initial state per momentum index m = 1..n_coll at a base point,
/// following the configured construction. Failed momenta are skipped.
inline std::vector<CoherentState> base_states(const Dataset& data,
                                              const PipelineConfig& cfg,
                                              Index base,
                                              LpcaFrameCache* coord_cache,
                                              LpcaFrameCache* support_cache,
                                              int* failed,
                                              WarningSink* warnings) {
  const double h = cfg.h();
  std::vector<CoherentState> states;
  states.reserve(static_cast<size_t>(cfg.n_coll));
  std::shared_ptr<const LpcaFrame> coord_frame;
  std::shared_ptr<const LpcaFrame> support_frame;
  std::vector<Index> neighbor_order;
  if (cfg.use_pca) {
    try {
      coord_frame = coord_cache->get(base, cfg.gamma * cfg.delta_pca);
      support_frame = support_cache->get(base, cfg.delta_pca);
      if (!cfg.random_momentum) {
        neighbor_order = frame_neighbor_order(*coord_frame);
      }
    } catch (const Error& e) {
      warn(warnings, "base " + std::to_string(base) +
                         ": cannot build frames (" + e.what() + ")");
      *failed += cfg.n_coll;
      return states;
    }
  }
  for (int m = 1; m <= cfg.n_coll; ++m) {
    try {
      if (cfg.use_pca) {
        Vector momentum;
        if (cfg.random_momentum) {
          Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(base),
                           static_cast<std::uint64_t>(m)));
          momentum = rng.unit_vector(coord_frame->dim());
        } else {
          momentum = frame_neighbor_momentum(*coord_frame, neighbor_order, m);
        }
        states.push_back(
            make_state_lpca(data, *coord_frame, *support_frame, momentum, h));
      } else if (cfg.random_momentum) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(base),
                         static_cast<std::uint64_t>(m)));
        states.push_back(
            make_state_extrinsic(data, base, rng.unit_vector(data.dim()), h));
      } else {
        states.push_back(make_state_extrinsic(data, base, m, h));
      }
    } catch (const Error& e) {
      warn(warnings, "base " + std::to_string(base) + ", momentum " +
                         std::to_string(m) + ": " + e.what());
      ++*failed;
    }
  }
  return states;
}

inline Index measure_endpoint(const Dataset& data, const PipelineConfig& cfg,
                              const ComplexVector& state,
                              LpcaFrameCache* support_cache,
                              WarningSink* warnings,
                              std::optional<Index> frame_dim = {}) {
  const SampleDistribution dist = to_distribution(state);
  switch (cfg.resolved_estimator()) {
    case Estimator::Max:
      return max_position(dist);
    case Estimator::Mean:
      return mean_position_extrinsic(data, dist);
    case Estimator::MeanLpca:
      return mean_position_lpca(data, dist, cfg.delta_pca, support_cache,
                                warnings, frame_dim);
  }
  return max_position(dist);
}

}  // namespace detail

/// Propagates n_coll states from one base point for n_prop steps and records
/// the measured endpoint with its travel time after every step.
inline SprayResult geodesic_spray(const Dataset& data, const Propagator& prop,
                                  Index base, const PipelineConfig& cfg,
                                  LpcaFrameCache* coord_cache,
                                  LpcaFrameCache* support_cache,
                                  WarningSink* warnings = nullptr) {
  if (base < 0 || base >= data.size()) {
    throw ValidationError("base index out of range");
  }
  SprayResult result;
  const auto states =
      detail::base_states(data, cfg, base, coord_cache, support_cache,
                          &result.failed_momenta, warnings);
  if (states.empty()) return result;

  ComplexMatrix batch(data.size(), static_cast<Index>(states.size()));
  for (Index c = 0; c < batch.cols(); ++c) {
    batch.col(c) = states[static_cast<size_t>(c)].amplitudes;
  }
  ComplexMatrix modal = to_modal(prop, batch);
  for (int step = 1; step <= cfg.n_prop; ++step) {
    advance_modal(prop, modal);
    const ComplexMatrix propagated = from_modal(prop, modal);
    for (Index c = 0; c < propagated.cols(); ++c) {
      // Frame states carry the chart dimension in their momentum length.
      const auto& state = states[static_cast<size_t>(c)];
      const std::optional<Index> frame_dim =
          state.kind == StateKind::Lpca
              ? std::optional<Index>(state.momentum.size())
              : std::nullopt;
      const Index endpoint = detail::measure_endpoint(
          data, cfg, propagated.col(c), support_cache, warnings, frame_dim);
      result.hits.push_back({endpoint, step * cfg.dt});
    }
  }
  return result;
}

/// Runs sprays from every sample and keeps the shortest travel time seen for
/// each endpoint pair, in either direction. Fails when more than 10% of all
/// (base, momentum) states cannot be prepared.
inline GeodesicDistanceMatrix build_distance_matrix(
    const Dataset& data, const PipelineConfig& cfg,
    WarningSink* warnings = nullptr) {
  validate(data);
  validate(cfg);
  KernelGraph kg = build_kernel(data, cfg.epsilon);
  const Matrix laplacian = build_laplacian(kg, cfg.lambda);
  const SpectralLaplacian spectral = decompose(laplacian, kg);
  const Propagator prop =
      make_propagator(spectral, cfg.epsilon, cfg.alpha, cfg.dt,
                      cfg.spectral_cutoff
                          ? std::optional<Index>(*cfg.spectral_cutoff)
                          : std::nullopt);

  LpcaFrameCache coord_cache(data);
  LpcaFrameCache support_cache(data);

  GeodesicDistanceMatrix result;
  result.n = data.size();
  result.meta = cfg;

  const unsigned workers =
      std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::vector<SprayHit>> worker_hits(workers);
  std::vector<std::vector<Index>> worker_bases(workers);
  std::vector<WarningSink> worker_warnings(workers);
  std::atomic<long> failed{0};

  const Index n = data.size();
  const Index chunk = (n + static_cast<Index>(workers) - 1) /
                      static_cast<Index>(workers);
  parallel_for(
      static_cast<Index>(workers),
      [&](Index wbegin, Index wend) {
        for (Index w = wbegin; w < wend; ++w) {
          const Index begin = w * chunk;
          const Index end = std::min(begin + chunk, n);
          for (Index base = begin; base < end; ++base) {
            SprayResult spray =
                geodesic_spray(data, prop, base, cfg, &coord_cache,
                               &support_cache, &worker_warnings[w]);
            failed += spray.failed_momenta;
            for (const SprayHit& hit : spray.hits) {
              worker_hits[w].push_back(hit);
              worker_bases[w].push_back(base);
            }
          }
        }
      },
      workers);

  for (unsigned w = 0; w < workers; ++w) {
    for (const std::string& msg : worker_warnings[w]) warn(warnings, msg);
    for (size_t i = 0; i < worker_hits[w].size(); ++i) {
      result.update_min(worker_bases[w][i], worker_hits[w][i].endpoint,
                        worker_hits[w][i].distance);
    }
  }

  const long total = static_cast<long>(data.size()) * cfg.n_coll;
  if (failed.load() * 10 > total) {
    throw Error("more than 10% of initial states failed (" +
                std::to_string(failed.load()) + " of " + std::to_string(total) +
                ")");
  }
  return result;
}

/// Deterministic, stride-stratified probe indices for the parameter scan.
inline std::vector<Index> scan_probes(Index n, int n_probes,
                                      std::uint64_t seed) {
  if (n_probes < 1) throw ValidationError("n_probes must be >= 1");
  const Index count = std::min<Index>(n_probes, n);
  const Index stride = n / count;
  Rng rng(mix_seed(seed, 0x5ca9));
  const Index offset = stride > 1 ? rng.uniform_index(stride) : 0;
  std::vector<Index> probes(static_cast<size_t>(count));
  for (Index i = 0; i < count; ++i) probes[static_cast<size_t>(i)] = (offset + i * stride) % n;
  return probes;
}

/// Scores every (epsilon, alpha) grid pair by the average deviation of probe
/// states. Only kernel and Laplacian assembly is needed, no spectral work.
inline DeviationGrid deviation_scan(const Dataset& data,
                                    const Vector& eps_values,
                                    const Vector& alpha_values, int n_probes,
                                    const PipelineConfig& cfg,
                                    WarningSink* warnings = nullptr) {
  validate(data);
  if (eps_values.size() == 0 || alpha_values.size() == 0) {
    throw ValidationError("scan grids must be nonempty");
  }
  DeviationGrid grid;
  grid.eps_values = eps_values;
  grid.alpha_values = alpha_values;
  grid.deviations.resize(eps_values.size(), alpha_values.size());
  grid.probe_indices = scan_probes(data.size(), n_probes, cfg.seed);

  LpcaFrameCache coord_cache(data);
  LpcaFrameCache support_cache(data);
  for (Index e = 0; e < eps_values.size(); ++e) {
    const double eps = eps_values[e];
    PipelineConfig local = cfg;
    local.epsilon = eps;
    KernelGraph kg = build_kernel(data, eps);
    const Matrix laplacian = build_laplacian(kg, cfg.lambda);
    for (Index a = 0; a < alpha_values.size(); ++a) {
      local.alpha = alpha_values[a];
      const double h = local.h();
      double total = 0.0;
      int used = 0;
      for (Index probe : grid.probe_indices) {
        try {
          CoherentState state;
          if (cfg.use_pca) {
            const auto coord_frame =
                coord_cache.get(probe, cfg.gamma * cfg.delta_pca);
            const auto support_frame = support_cache.get(probe, cfg.delta_pca);
            Vector momentum;
            if (cfg.random_momentum) {
              Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(probe), 1));
              momentum = rng.unit_vector(coord_frame->dim());
            } else {
              const auto order = detail::frame_neighbor_order(*coord_frame);
              momentum = detail::frame_neighbor_momentum(*coord_frame, order, 1);
            }
            state = make_state_lpca(data, *coord_frame, *support_frame,
                                    momentum, h);
          } else {
            state = make_state_extrinsic(data, probe, 1, h);
          }
          total += deviation(laplacian, state.amplitudes, h);
          ++used;
        } catch (const Error& err) {
          warn(warnings, "scan probe " + std::to_string(probe) + " at eps=" +
                             std::to_string(eps) + ": " + err.what());
        }
      }
      if (used == 0) {
        throw Error("all probe states failed at eps=" + std::to_string(eps));
      }
      grid.deviations(e, a) = total / used;
    }
  }
  return grid;
}

/// Grid argmin of the averaged deviation; first entry wins ties
/// (eps-major order).
inline std::pair<double, double> select_parameters(const DeviationGrid& grid) {
  Index best_e = 0, best_a = 0;
  double best = grid.deviations(0, 0);
  for (Index e = 0; e < grid.deviations.rows(); ++e) {
    for (Index a = 0; a < grid.deviations.cols(); ++a) {
      if (grid.deviations(e, a) < best) {
        best = grid.deviations(e, a);
        best_e = e;
        best_a = a;
      }
    }
  }
  return {grid.eps_values[best_e], grid.alpha_values[best_a]};
}

}  // namespace qgeo

#endif  // QGEO_PIPELINE_HPP
