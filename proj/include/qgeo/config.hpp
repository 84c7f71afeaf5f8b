#ifndef QGEO_CONFIG_HPP
#define QGEO_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "qgeo/common.hpp"

namespace qgeo {

enum class Estimator { Mean, MeanLpca, Max };

inline std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Mean: return "mean";
    case Estimator::MeanLpca: return "mean-lpca";
    case Estimator::Max: return "max";
  }
  return "mean";
}

inline Estimator parse_estimator(const std::string& name) {
  if (name == "mean") return Estimator::Mean;
  if (name == "mean-lpca") return Estimator::MeanLpca;
  if (name == "max") return Estimator::Max;
  throw ValidationError("unknown estimator '" + name +
                        "' (expected mean, mean-lpca or max)");
}

/// All pipeline tunables. The uncertainty scale h is always derived from
/// (epsilon, alpha) and never stored.
struct PipelineConfig {
  double epsilon = 0.0;   ///< kernel scale, > 0
  double alpha = 0.0;     ///< uncertainty scaling exponent, >= 1
  double lambda = 1.0;    ///< kernel density normalization, in [0, 1]
  double dt = 0.0;        ///< propagation time step, > 0
  int n_prop = 0;         ///< number of time steps per state
  int n_coll = 0;         ///< number of initial states per base point
  bool use_pca = false;   ///< build states/measurements in local PCA frames
  double delta_pca = 0.0; ///< squared-distance cutoff for PCA neighborhoods
  double gamma = 0.1;     ///< scale factor for the coordinate-frame ball
  int k_clusters = 0;
  int embed_dim = 3;      ///< 2 or 3
  std::uint64_t seed = 0;
  std::optional<int> spectral_cutoff;    ///< keep only the k lowest eigenpairs
  std::optional<Estimator> estimator;    ///< default: mean-lpca if use_pca
  bool random_momentum = false;          ///< random frame momenta instead of
                                         ///< nearest-neighbor directions

  double h() const { return std::pow(epsilon, 1.0 / (2.0 + alpha)); }

  Estimator resolved_estimator() const {
    if (estimator) return *estimator;
    return use_pca ? Estimator::MeanLpca : Estimator::Mean;
  }

  bool operator==(const PipelineConfig&) const = default;
};

inline void validate(const PipelineConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(cfg.alpha >= 1.0)) throw ValidationError("alpha must be >= 1");
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    throw ValidationError("lambda must be in [0, 1]");
  }
  if (!(cfg.dt > 0.0)) throw ValidationError("dt must be > 0");
  if (cfg.n_prop < 1) throw ValidationError("n_prop must be >= 1");
  if (cfg.n_coll < 1) throw ValidationError("n_coll must be >= 1");
  if (!(cfg.delta_pca > 0.0)) throw ValidationError("delta_pca must be > 0");
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) {
    throw ValidationError("gamma must be in (0, 1]");
  }
  if (cfg.k_clusters < 1) throw ValidationError("k_clusters must be >= 1");
  if (cfg.embed_dim != 2 && cfg.embed_dim != 3) {
    throw ValidationError("embed_dim must be 2 or 3");
  }
  if (cfg.spectral_cutoff && *cfg.spectral_cutoff < 1) {
    throw ValidationError("spectral_cutoff must be >= 1");
  }
}

inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
  nlohmann::json j{{"epsilon", cfg.epsilon},
                   {"alpha", cfg.alpha},
                   {"lambda", cfg.lambda},
                   {"dt", cfg.dt},
                   {"n_prop", cfg.n_prop},
                   {"n_coll", cfg.n_coll},
                   {"use_pca", cfg.use_pca},
                   {"delta_pca", cfg.delta_pca},
                   {"gamma", cfg.gamma},
                   {"k_clusters", cfg.k_clusters},
                   {"embed_dim", cfg.embed_dim},
                   {"seed", cfg.seed},
                   {"random_momentum", cfg.random_momentum}};
  if (cfg.spectral_cutoff) j["spectral_cutoff"] = *cfg.spectral_cutoff;
  if (cfg.estimator) j["estimator"] = estimator_name(*cfg.estimator);
  return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j,
                                       WarningSink* warnings = nullptr) {
  static const std::set<std::string> known = {
      "epsilon", "alpha",      "lambda",          "dt",
      "n_prop",  "n_coll",     "use_pca",         "delta_pca",
      "gamma",   "k_clusters", "embed_dim",       "seed",
      "spectral_cutoff",       "estimator",       "random_momentum"};
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) warn(warnings, "unknown config field '" + key + "' ignored");
  }
  PipelineConfig cfg;
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) {
      throw ValidationError(std::string("config is missing required field '") +
                            key + "'");
    }
    return j.at(key);
  };
  cfg.epsilon = require("epsilon").get<double>();
  cfg.alpha = require("alpha").get<double>();
  cfg.lambda = j.value("lambda", 1.0);
  cfg.dt = require("dt").get<double>();
  cfg.n_prop = require("n_prop").get<int>();
  cfg.n_coll = require("n_coll").get<int>();
  cfg.use_pca = require("use_pca").get<bool>();
  cfg.delta_pca = require("delta_pca").get<double>();
  cfg.gamma = j.value("gamma", 0.1);
  cfg.k_clusters = require("k_clusters").get<int>();
  cfg.embed_dim = j.value("embed_dim", 3);
  cfg.seed = require("seed").get<std::uint64_t>();
  if (j.contains("spectral_cutoff")) {
    cfg.spectral_cutoff = j.at("spectral_cutoff").get<int>();
  }
  if (j.contains("estimator")) {
    cfg.estimator = parse_estimator(j.at("estimator").get<std::string>());
  }
  cfg.random_momentum = j.value("random_momentum", false);
  validate(cfg);
  return cfg;
}

inline PipelineConfig load_config(const std::string& path,
                                  WarningSink* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config parse failure in " + path + ": " + e.what());
  }
  try {
    return config_from_json(j, warnings);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config field has the wrong type in " + path + ": " +
                      e.what());
  }
}

inline void save_config(const PipelineConfig& cfg, const std::string& path) {
  validate(cfg);
  std::ofstream out(path);
  if (!out) throw Error("cannot open config file for writing: " + path);
  out << config_to_json(cfg).dump(2) << '\n';
}

}  // namespace qgeo

#endif  // QGEO_CONFIG_HPP
