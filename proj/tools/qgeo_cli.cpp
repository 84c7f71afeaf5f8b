// Command-line front end for the quantized-dynamics manifold learning
// pipeline: dataset synthesis, Laplacian spectra, geodesic distance
// extraction, parameter scans, force-directed embedding, clustering, and
// analytic validation runs against sphere/torus ground truth.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "qgeo/config.hpp"
#include "qgeo/dataset.hpp"
#include "qgeo/formats.hpp"
#include "qgeo/io.hpp"
#include "qgeo/kmeans.hpp"
#include "qgeo/laplacian.hpp"
#include "qgeo/layout.hpp"
#include "qgeo/manifolds.hpp"
#include "qgeo/measurement.hpp"
#include "qgeo/pipeline.hpp"
#include "qgeo/torus_spectral.hpp"

namespace {

using namespace qgeo;

DatasetFormat format_of(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv"
             ? DatasetFormat::Csv
             : DatasetFormat::Binary;
}

void print_warnings(const WarningSink& warnings) {
  for (const auto& w : warnings) std::cerr << "qgeo: warning: " << w << '\n';
}

struct ConfigOverrides {
  std::optional<std::string> estimator;
  std::optional<bool> use_pca;
  std::optional<double> delta_pca;
  std::optional<double> gamma;

  void apply(PipelineConfig& cfg) const {
    if (estimator) cfg.estimator = parse_estimator(*estimator);
    if (use_pca) cfg.use_pca = *use_pca;
    if (delta_pca) cfg.delta_pca = *delta_pca;
    if (gamma) cfg.gamma = *gamma;
    validate(cfg);
  }
};

void add_override_flags(CLI::App* cmd, ConfigOverrides& overrides) {
  cmd->add_option("--estimator", overrides.estimator,
                  "endpoint estimator: mean, mean-lpca or max");
  cmd->add_flag("--use-pca,!--no-use-pca", overrides.use_pca,
                "build states and measurements in local PCA frames");
  cmd->add_option("--delta-pca", overrides.delta_pca,
                  "squared-distance cutoff for PCA neighborhoods");
  cmd->add_option("--gamma", overrides.gamma,
                  "scale factor for the coordinate-frame ball");
}

struct TrackingTable {
  std::vector<double> t;
  std::vector<double> mean_q, std_q, mean_e, std_e, dir_q, dir_e;
  bool with_directions = false;
};

void write_tracking_csv(const TrackingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "t,mean_dg,std_dg,mean_dg_euclidean,std_dg_euclidean";
  if (table.with_directions) out << ",mean_dir_err,mean_dir_err_euclidean";
  out << '\n';
  for (size_t i = 0; i < table.t.size(); ++i) {
    out << detail::format_double(table.t[i]) << ','
        << detail::format_double(table.mean_q[i]) << ','
        << detail::format_double(table.std_q[i]) << ','
        << detail::format_double(table.mean_e[i]) << ','
        << detail::format_double(table.std_e[i]);
    if (table.with_directions) {
      out << ',' << detail::format_double(table.dir_q[i]) << ','
          << detail::format_double(table.dir_e[i]);
    }
    out << '\n';
  }
}

struct Moments {
  double mean = 0.0, stddev = 0.0;
};

Moments moments(const std::vector<double>& values) {
  Moments m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return m;
}

/// Sphere tracking experiment: m propagations from random base points with
/// frame states, measured with the configured estimator and compared against
/// straight-line propagation in the base frame.
TrackingTable run_sphere_validation(const Dataset& sphere,
                                    const PipelineConfig& cfg, int m,
                                    WarningSink* warnings) {
  KernelGraph kg = build_kernel(sphere, cfg.epsilon);
  const Matrix lap = build_laplacian(kg, cfg.lambda);
  const SpectralLaplacian spectral = decompose(lap, kg);
  const Propagator prop =
      make_propagator(spectral, cfg.epsilon, cfg.alpha, cfg.dt,
                      cfg.spectral_cutoff
                          ? std::optional<Index>(*cfg.spectral_cutoff)
                          : std::nullopt);
  LpcaFrameCache coord_cache(sphere), support_cache(sphere);

  const int steps = cfg.n_prop;
  std::vector<std::vector<double>> dg_q(steps), dg_e(steps), dir_q(steps),
      dir_e(steps);
  Rng rng(mix_seed(cfg.seed, 0x76616c69ULL));
  for (int trial = 0; trial < m; ++trial) {
    const Index base = rng.uniform_index(sphere.size());
    try {
      const auto coord_frame = coord_cache.get(base, cfg.gamma * cfg.delta_pca);
      const auto support_frame = support_cache.get(base, cfg.delta_pca);
      Vector momentum;
      if (cfg.random_momentum) {
        momentum = rng.unit_vector(coord_frame->dim());
      } else {
        const auto order = detail::frame_neighbor_order(*coord_frame);
        momentum = detail::frame_neighbor_momentum(*coord_frame, order, 1);
      }
      const CoherentState state = make_state_lpca(
          sphere, *coord_frame, *support_frame, momentum, cfg.h());

      // exp(+i t sqrt(L)) transports along -p0; use the effective direction
      // for the misalignment diagnostics.
      const Eigen::Vector3d base_point = sphere.points.row(base).transpose();
      Eigen::Vector3d effective =
          -(coord_frame->basis.transpose() * momentum);
      effective -= effective.dot(base_point) * base_point;
      effective.normalize();

      // The straight-line baseline works in the support frame, whose basis
      // differs from the coordinate frame's; convert through ambient space.
      Vector support_momentum =
          support_frame->basis * (coord_frame->basis.transpose() * momentum);
      support_momentum.normalize();

      ComplexMatrix modal = to_modal(prop, ComplexMatrix(state.amplitudes));
      for (int step = 1; step <= steps; ++step) {
        advance_modal(prop, modal);
        const ComplexMatrix out = from_modal(prop, modal);
        const double t = step * cfg.dt;
        const Index quantum = detail::measure_endpoint(
            sphere, cfg, out.col(0), &support_cache, warnings,
            coord_frame->dim());
        const Index euclid = euclidean_propagation_baseline(
            sphere, *support_frame, support_momentum, t);
        const Eigen::Vector3d q_point = sphere.points.row(quantum).transpose();
        const Eigen::Vector3d e_point = sphere.points.row(euclid).transpose();
        dg_q[static_cast<size_t>(step - 1)].push_back(
            sphere_geodesic_distance(q_point, base_point));
        dg_e[static_cast<size_t>(step - 1)].push_back(
            sphere_geodesic_distance(e_point, base_point));
        try {
          dir_q[static_cast<size_t>(step - 1)].push_back(
              sphere_direction_error(base_point, effective, q_point, t));
          // The straight-line baseline walks along +p0 in the frame.
          dir_e[static_cast<size_t>(step - 1)].push_back(
              sphere_direction_error(base_point, -effective, e_point, t));
        } catch (const Error&) {
          // endpoint coincided with the base; skip the direction sample
        }
      }
    } catch (const Error& e) {
      warn(warnings, "validation trial " + std::to_string(trial) + ": " +
                         e.what());
    }
  }

  TrackingTable table;
  table.with_directions = true;
  for (int step = 1; step <= steps; ++step) {
    const auto q = moments(dg_q[static_cast<size_t>(step - 1)]);
    const auto e = moments(dg_e[static_cast<size_t>(step - 1)]);
    table.t.push_back(step * cfg.dt);
    table.mean_q.push_back(q.mean);
    table.std_q.push_back(q.stddev);
    table.mean_e.push_back(e.mean);
    table.std_e.push_back(e.stddev);
    table.dir_q.push_back(moments(dir_q[static_cast<size_t>(step - 1)]).mean);
    table.dir_e.push_back(moments(dir_e[static_cast<size_t>(step - 1)]).mean);
  }
  return table;
}

/// Torus tracking experiment; with `truncated` the spectrally exact grid
/// propagator replaces the data-driven one.
TrackingTable run_torus_validation(const TorusSpec& spec,
                                   const PipelineConfig& cfg, Index n, int m,
                                   bool truncated, Index n_theta, Index n_phi,
                                   Index modes, WarningSink* warnings) {
  TrackingTable table;
  GeodesicOptions oracle;
  oracle.coarse_shots = 360;

  if (truncated) {
    const auto prop = torus_truncated_propagator(spec, modes, n_theta, n_phi,
                                                 cfg.dt);
    const Dataset grid = torus_grid_dataset(spec, n_theta, n_phi);
    LpcaFrameCache coord_cache(grid), support_cache(grid);
    const int steps = cfg.n_prop;
    std::vector<std::vector<double>> dg(steps);
    Rng rng(mix_seed(cfg.seed, 0x746f72ULL));
    for (int trial = 0; trial < m; ++trial) {
      const Index base = rng.uniform_index(grid.size());
      try {
        const auto coord_frame = coord_cache.get(base, cfg.gamma * cfg.delta_pca);
        const auto support_frame = support_cache.get(base, cfg.delta_pca);
        const Vector momentum = rng.unit_vector(coord_frame->dim());
        const CoherentState state = make_state_lpca(
            grid, *coord_frame, *support_frame, momentum, cfg.h());
        ComplexVector psi = state.amplitudes;
        for (int step = 1; step <= steps; ++step) {
          psi = truncated_propagate(prop, psi, 1);
          const Index end = mean_position_lpca(grid, to_distribution(psi),
                                               cfg.delta_pca, &support_cache,
                                               warnings, coord_frame->dim());
          oracle.max_time = step * cfg.dt + 1.2;
          dg[static_cast<size_t>(step - 1)].push_back(torus_geodesic_distance(
              spec, grid.points.row(base).transpose(),
              grid.points.row(end).transpose(), oracle));
        }
      } catch (const Error& e) {
        warn(warnings, "truncated trial " + std::to_string(trial) + ": " +
                           e.what());
      }
    }
    for (int step = 1; step <= steps; ++step) {
      const auto q = moments(dg[static_cast<size_t>(step - 1)]);
      table.t.push_back(step * cfg.dt);
      table.mean_q.push_back(q.mean);
      table.std_q.push_back(q.stddev);
      table.mean_e.push_back(0.0);
      table.std_e.push_back(0.0);
    }
    return table;
  }

  const Dataset torus = sample_torus(n, spec, cfg.seed);
  KernelGraph kg = build_kernel(torus, cfg.epsilon);
  const Matrix lap = build_laplacian(kg, cfg.lambda);
  const SpectralLaplacian spectral = decompose(lap, kg);
  const Propagator prop =
      make_propagator(spectral, cfg.epsilon, cfg.alpha, cfg.dt,
                      cfg.spectral_cutoff
                          ? std::optional<Index>(*cfg.spectral_cutoff)
                          : std::nullopt);
  LpcaFrameCache coord_cache(torus), support_cache(torus);
  const int steps = cfg.n_prop;
  std::vector<std::vector<double>> dg_q(steps), dg_e(steps);
  Rng rng(mix_seed(cfg.seed, 0x746f72ULL));
  for (int trial = 0; trial < m; ++trial) {
    const Index base = rng.uniform_index(torus.size());
    try {
      const auto coord_frame = coord_cache.get(base, cfg.gamma * cfg.delta_pca);
      const auto support_frame = support_cache.get(base, cfg.delta_pca);
      Vector momentum;
      if (cfg.random_momentum) {
        momentum = rng.unit_vector(coord_frame->dim());
      } else {
        const auto order = detail::frame_neighbor_order(*coord_frame);
        momentum = detail::frame_neighbor_momentum(*coord_frame, order, 1);
      }
      const CoherentState state = make_state_lpca(
          torus, *coord_frame, *support_frame, momentum, cfg.h());
      Vector support_momentum =
          support_frame->basis * (coord_frame->basis.transpose() * momentum);
      support_momentum.normalize();
      ComplexMatrix modal = to_modal(prop, ComplexMatrix(state.amplitudes));
      for (int step = 1; step <= steps; ++step) {
        advance_modal(prop, modal);
        const ComplexMatrix out = from_modal(prop, modal);
        const double t = step * cfg.dt;
        const Index quantum = detail::measure_endpoint(
            torus, cfg, out.col(0), &support_cache, warnings,
            coord_frame->dim());
        const Index euclid = euclidean_propagation_baseline(
            torus, *support_frame, support_momentum, t);
        oracle.max_time = t + 1.5;
        dg_q[static_cast<size_t>(step - 1)].push_back(torus_geodesic_distance(
            spec, torus.points.row(base).transpose(),
            torus.points.row(quantum).transpose(), oracle));
        dg_e[static_cast<size_t>(step - 1)].push_back(torus_geodesic_distance(
            spec, torus.points.row(base).transpose(),
            torus.points.row(euclid).transpose(), oracle));
      }
    } catch (const Error& e) {
      warn(warnings, "validation trial " + std::to_string(trial) + ": " +
                         e.what());
    }
  }
  for (int step = 1; step <= steps; ++step) {
    const auto q = moments(dg_q[static_cast<size_t>(step - 1)]);
    const auto e = moments(dg_e[static_cast<size_t>(step - 1)]);
    table.t.push_back(step * cfg.dt);
    table.mean_q.push_back(q.mean);
    table.std_q.push_back(q.stddev);
    table.mean_e.push_back(e.mean);
    table.std_e.push_back(e.stddev);
  }
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"manifold learning via quantized free-particle dynamics"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, meta_path, embedding_path;
  std::string g_path;
  ConfigOverrides overrides;

  // --- sample ---------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "generate sphere/torus datasets");
  std::string sample_kind;
  Index sample_n = 3000;
  std::uint64_t sample_seed = 0;
  double torus_r = 0.8, torus_R = 2.0;
  sample->add_option("kind", sample_kind, "sphere or torus")->required();
  sample->add_option("--config", config_path, "pipeline config (seed default)");
  sample->add_option("--n", sample_n, "number of samples");
  sample->add_option("--seed", sample_seed, "sampler seed");
  sample->add_option("--r", torus_r, "torus minor radius");
  sample->add_option("--R", torus_R, "torus major radius");
  sample->add_option("--out", out_path, "output dataset (.csv or binary)")
      ->required();

  // --- normalize ------------------------------------------------------
  auto* normalize = app.add_subcommand("normalize", "min-max rescale a dataset");
  bool per_feature = false;
  normalize->add_option("--config", config_path, "pipeline config (unused)");
  normalize->add_option("--data", data_path, "input dataset")->required();
  normalize->add_option("--out", out_path, "output dataset")->required();
  normalize->add_flag("--per-feature", per_feature,
                      "rescale each column separately");

  // --- laplacian ------------------------------------------------------
  auto* laplacian_cmd =
      app.add_subcommand("laplacian", "eigendecomposition of the operator");
  laplacian_cmd->add_option("--config", config_path, "pipeline config")
      ->required();
  laplacian_cmd->add_option("--data", data_path, "input dataset")->required();
  laplacian_cmd->add_option("--out", out_path, "spectral output (binary)")
      ->required();

  // --- geodesics ------------------------------------------------------
  auto* geodesics =
      app.add_subcommand("geodesics", "extract the geodesic distance matrix");
  geodesics->add_option("--config", config_path, "pipeline config")->required();
  geodesics->add_option("--data", data_path, "input dataset")->required();
  geodesics->add_option("--out", out_path, "triplet CSV output")->required();
  geodesics->add_option("--meta", meta_path, "meta JSON (default <out>.meta.json)");
  add_override_flags(geodesics, overrides);

  // --- scan -----------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "deviation scan over (epsilon, alpha)");
  double eps_min = std::exp(-6.0), eps_max = std::exp(-1.0);
  int eps_count = 6;
  double alpha_min = 1.0, alpha_max = 2.0;
  int alpha_count = 3;
  int probes = 28;
  scan->add_option("--config", config_path, "pipeline config")->required();
  scan->add_option("--data", data_path, "input dataset")->required();
  scan->add_option("--out", out_path, "grid CSV output")->required();
  scan->add_option("--eps-min", eps_min, "smallest epsilon");
  scan->add_option("--eps-max", eps_max, "largest epsilon");
  scan->add_option("--eps-count", eps_count, "epsilon grid size (log-spaced)");
  scan->add_option("--alpha-min", alpha_min, "smallest alpha");
  scan->add_option("--alpha-max", alpha_max, "largest alpha");
  scan->add_option("--alpha-count", alpha_count, "alpha grid size");
  scan->add_option("--probes", probes, "number of probe states");
  add_override_flags(scan, overrides);

  // --- embed ----------------------------------------------------------
  auto* embed = app.add_subcommand("embed", "force-directed layout of a distance matrix");
  int embed_dim = 0, iters = 500;
  embed->add_option("--config", config_path, "pipeline config")->required();
  embed->add_option("--g", g_path, "distance matrix CSV")->required();
  embed->add_option("--out", out_path, "embedding CSV output")->required();
  embed->add_option("--dim", embed_dim, "2 or 3 (default from config)");
  embed->add_option("--iters", iters, "layout iterations");
  embed->add_option("--data", data_path, "dataset (sample ids for the output)");

  // --- cluster --------------------------------------------------------
  auto* cluster = app.add_subcommand("cluster", "k-means on embedded coordinates");
  int k_clusters = 0;
  cluster->add_option("--config", config_path, "pipeline config")->required();
  cluster->add_option("--embedding", embedding_path, "embedding CSV")->required();
  cluster->add_option("--out", out_path, "clustered CSV output")->required();
  cluster->add_option("--k", k_clusters, "cluster count (default from config)");

  // --- validate -------------------------------------------------------
  auto* validate_cmd = app.add_subcommand(
      "validate", "geodesic tracking against analytic ground truth");
  std::string validate_kind;
  Index validate_n = 3000;
  int validate_m = 20;
  bool truncated = false;
  Index n_theta = 171, n_phi = 300, modes = 800;
  validate_cmd->add_option("kind", validate_kind, "sphere or torus")->required();
  validate_cmd->add_option("--config", config_path, "pipeline config")->required();
  validate_cmd->add_option("--out", out_path, "tracking table CSV")->required();
  validate_cmd->add_option("--n", validate_n, "sample count");
  validate_cmd->add_option("--m", validate_m, "number of propagations");
  validate_cmd->add_flag("--truncated", truncated,
                         "use the spectrally truncated torus propagator");
  validate_cmd->add_option("--r", torus_r, "torus minor radius");
  validate_cmd->add_option("--R", torus_R, "torus major radius");
  validate_cmd->add_option("--n-theta", n_theta, "grid points around the tube");
  validate_cmd->add_option("--n-phi", n_phi, "grid points around the axis");
  validate_cmd->add_option("--modes", modes, "kept eigenmodes");
  add_override_flags(validate_cmd, overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    WarningSink warnings;
    if (sample->parsed()) {
      std::uint64_t seed = sample_seed;
      if (!config_path.empty() && sample->count("--seed") == 0) {
        seed = load_config(config_path, &warnings).seed;
      }
      Dataset data;
      if (sample_kind == "sphere") {
        data = sample_sphere(sample_n, seed);
      } else if (sample_kind == "torus") {
        data = sample_torus(sample_n, TorusSpec{torus_r, torus_R}, seed);
      } else {
        throw ValidationError("kind must be sphere or torus");
      }
      save_dataset(data, out_path, format_of(out_path));
      std::printf("wrote %lld samples to %s\n",
                  static_cast<long long>(data.size()), out_path.c_str());
    } else if (normalize->parsed()) {
      const Dataset data = load_dataset(data_path, format_of(data_path));
      save_dataset(normalize_minmax(data, per_feature), out_path,
                   format_of(out_path));
    } else if (laplacian_cmd->parsed()) {
      const PipelineConfig cfg = load_config(config_path, &warnings);
      const Dataset data = load_dataset(data_path, format_of(data_path));
      KernelGraph kg = build_kernel(data, cfg.epsilon);
      const Matrix lap = build_laplacian(kg, cfg.lambda);
      save_spectral(decompose(lap, kg), out_path);
      std::printf("wrote spectral data for %lld samples to %s\n",
                  static_cast<long long>(data.size()), out_path.c_str());
    } else if (geodesics->parsed()) {
      PipelineConfig cfg = load_config(config_path, &warnings);
      overrides.apply(cfg);
      const Dataset data = load_dataset(data_path, format_of(data_path));
      const GeodesicDistanceMatrix g = build_distance_matrix(data, cfg, &warnings);
      save_distance_csv(g, out_path);
      save_distance_meta(g, meta_path.empty() ? out_path + ".meta.json"
                                              : meta_path);
      std::printf("wrote %zu distance entries to %s\n", g.entries.size(),
                  out_path.c_str());
    } else if (scan->parsed()) {
      PipelineConfig cfg = load_config(config_path, &warnings);
      overrides.apply(cfg);
      const Dataset data = load_dataset(data_path, format_of(data_path));
      if (eps_count < 1 || alpha_count < 1) {
        throw ValidationError("grid counts must be >= 1");
      }
      Vector eps_values(eps_count), alpha_values(alpha_count);
      for (int i = 0; i < eps_count; ++i) {
        const double f = eps_count == 1 ? 0.0
                                        : static_cast<double>(i) / (eps_count - 1);
        eps_values[i] = std::exp(std::log(eps_min) +
                                 f * (std::log(eps_max) - std::log(eps_min)));
      }
      for (int i = 0; i < alpha_count; ++i) {
        const double f =
            alpha_count == 1 ? 0.0 : static_cast<double>(i) / (alpha_count - 1);
        alpha_values[i] = alpha_min + f * (alpha_max - alpha_min);
      }
      const DeviationGrid grid =
          deviation_scan(data, eps_values, alpha_values, probes, cfg, &warnings);
      save_scan_csv(grid, out_path);
      const auto [eps_sel, alpha_sel] = select_parameters(grid);
      std::printf("wrote scan grid to %s; minimum at epsilon=%.6g alpha=%.3g\n",
                  out_path.c_str(), eps_sel, alpha_sel);
    } else if (embed->parsed()) {
      const PipelineConfig cfg = load_config(config_path, &warnings);
      const GeodesicDistanceMatrix g = load_distance_csv(g_path);
      const int dim = embed_dim != 0 ? embed_dim : cfg.embed_dim;
      const Embedding embedding = force_layout(g, dim, iters, cfg.seed);
      std::vector<std::string> ids;
      if (!data_path.empty()) {
        ids = load_dataset(data_path, format_of(data_path)).ids;
      }
      save_embedding_csv(embedding, ids, out_path);
      std::printf("wrote %lld embedded points to %s (stress %.6g)\n",
                  static_cast<long long>(embedding.coords.rows()),
                  out_path.c_str(), embedding.final_stress);
    } else if (cluster->parsed()) {
      const PipelineConfig cfg = load_config(config_path, &warnings);
      const LabeledEmbedding embedding = load_embedding_csv(embedding_path);
      const Index k = k_clusters != 0 ? k_clusters : cfg.k_clusters;
      const Clustering clustering = kmeans(embedding.coords, k, cfg.seed);
      save_cluster_csv(embedding, clustering, out_path);
      std::printf("wrote %zu labeled points to %s (inertia %.6g)\n",
                  clustering.labels.size(), out_path.c_str(),
                  clustering.inertia);
    } else if (validate_cmd->parsed()) {
      PipelineConfig cfg = load_config(config_path, &warnings);
      overrides.apply(cfg);
      TrackingTable table;
      if (validate_kind == "sphere") {
        const Dataset sphere = sample_sphere(validate_n, cfg.seed);
        table = run_sphere_validation(sphere, cfg, validate_m, &warnings);
      } else if (validate_kind == "torus") {
        table = run_torus_validation(TorusSpec{torus_r, torus_R}, cfg,
                                     validate_n, validate_m, truncated,
                                     n_theta, n_phi, modes, &warnings);
      } else {
        throw ValidationError("kind must be sphere or torus");
      }
      write_tracking_csv(table, out_path);
      std::printf("wrote tracking table to %s\n", out_path.c_str());
    }
    print_warnings(warnings);
  } catch (const Error& e) {
    std::cerr << "qgeo: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qgeo: unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
