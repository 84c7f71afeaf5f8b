#ifndef QGEO_MANIFOLDS_HPP
#define QGEO_MANIFOLDS_HPP

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"
#include "qgeo/lpca.hpp"

namespace qgeo {

using Eigen::RowVector3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

/// Ring torus with minor radius r and major radius R, r < R, embedded as
/// ((R + r cos theta) cos phi, (R + r cos theta) sin phi, r sin theta).
struct TorusSpec {
  double r = 0.8;
  double R = 2.0;

  double tube(double theta) const { return R + r * std::cos(theta); }
};

inline void validate(const TorusSpec& spec) {
  if (!(spec.r > 0.0) || !(spec.R > spec.r)) {
    throw ValidationError("torus radii must satisfy 0 < r < R");
  }
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// N points uniform on the unit 2-sphere (normalized 3D Gaussians).
inline Dataset sample_sphere(Index n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("need at least 2 samples");
  Dataset data;
  data.points.resize(n, 3);
  Rng rng(mix_seed(seed, 0x73706872ULL));
  for (Index i = 0; i < n; ++i) {
    Vector3d v;
    double norm = 0.0;
    do {
      v << rng.normal(), rng.normal(), rng.normal();
      norm = v.norm();
    } while (norm < 1e-12);
    data.points.row(i) = v.transpose() / norm;
  }
  return data;
}

inline Vector3d torus_point(const TorusSpec& spec, double theta, double phi) {
  const double rho = spec.tube(theta);
  return {rho * std::cos(phi), rho * std::sin(phi), spec.r * std::sin(theta)};
}

/// N points uniform with respect to surface area: phi is uniform and theta is
/// drawn by rejection with acceptance (R + r cos theta) / (R + r).
inline Dataset sample_torus(Index n, const TorusSpec& spec,
                            std::uint64_t seed) {
  if (n < 2) throw ValidationError("need at least 2 samples");
  validate(spec);
  Dataset data;
  data.points.resize(n, 3);
  Rng rng(mix_seed(seed, 0x746f7275ULL));
  for (Index i = 0; i < n; ++i) {
    double theta = 0.0;
    for (;;) {
      theta = rng.uniform(0.0, 2.0 * EIGEN_PI);
      const double accept = spec.tube(theta) / (spec.R + spec.r);
      if (rng.uniform() < accept) break;
    }
    const double phi = rng.uniform(0.0, 2.0 * EIGEN_PI);
    data.points.row(i) = torus_point(spec, theta, phi).transpose();
  }
  return data;
}

// ---------------------------------------------------------------------------
// Sphere geodesics
// ---------------------------------------------------------------------------

namespace detail {

inline void check_on_sphere(const Vector3d& u, const char* label) {
  if (std::abs(u.norm() - 1.0) > 1e-8) {
    throw ValidationError(std::string(label) + " is not on the unit sphere");
  }
}

inline void check_on_torus(const TorusSpec& spec, const Vector3d& p,
                           const char* label) {
  const double ring = std::sqrt(p.x() * p.x() + p.y() * p.y()) - spec.R;
  const double residual = ring * ring + p.z() * p.z() - spec.r * spec.r;
  if (std::abs(residual) > 1e-8) {
    throw ValidationError(std::string(label) + " is not on the torus");
  }
}

}  // namespace detail

inline double sphere_geodesic_distance(const Vector3d& u, const Vector3d& v) {
  detail::check_on_sphere(u, "first point");
  detail::check_on_sphere(v, "second point");
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

/// Orthonormal tangent basis (2 x 3, rows) at a sphere point.
inline Matrix sphere_tangent_basis(const Vector3d& u) {
  detail::check_on_sphere(u, "point");
  Index smallest = 0;
  u.cwiseAbs().minCoeff(&smallest);
  Vector3d axis = Vector3d::Zero();
  axis[smallest] = 1.0;
  Vector3d t1 = (axis - axis.dot(u) * u).normalized();
  Vector3d t2 = u.cross(t1);
  Matrix basis(2, 3);
  basis.row(0) = t1.transpose();
  basis.row(1) = t2.transpose();
  return basis;
}

/// Misalignment |1 - p0 . p0'| between a prescribed initial direction and the
/// direction of the minimizing geodesic from `base` to `endpoint`. Both
/// directions are unit tangent vectors at `base`.
inline double sphere_direction_error(const Vector3d& base, const Vector3d& p0,
                                     const Vector3d& endpoint, double t) {
  if (!(t > 0.0)) throw ValidationError("t must be > 0");
  detail::check_on_sphere(base, "base");
  detail::check_on_sphere(endpoint, "endpoint");
  Vector3d direction = p0 - p0.dot(base) * base;
  if (direction.norm() < 1e-12) {
    throw ValidationError("p0 has no tangential component at base");
  }
  direction.normalize();
  Vector3d toward = endpoint - endpoint.dot(base) * base;
  if (toward.norm() < 1e-9) {
    throw NumericError("endpoint is (anti)podal to base; direction undefined");
  }
  toward.normalize();
  return std::abs(1.0 - direction.dot(toward));
}

// ---------------------------------------------------------------------------
// Torus geodesics (shooting + RK4)
// ---------------------------------------------------------------------------

inline Vector2d torus_angles(const TorusSpec& spec, const Vector3d& p) {
  detail::check_on_torus(spec, p, "point");
  const double ring = std::sqrt(p.x() * p.x() + p.y() * p.y()) - spec.R;
  return {std::atan2(p.z() / spec.r, ring / spec.r), std::atan2(p.y(), p.x())};
}

/// Orthonormal tangent basis (2 x 3, rows) at torus angles (theta, phi).
inline Matrix torus_tangent_basis(const TorusSpec& spec, double theta,
                                  double phi) {
  const Vector3d e_theta{-spec.r * std::sin(theta) * std::cos(phi),
                         -spec.r * std::sin(theta) * std::sin(phi),
                         spec.r * std::cos(theta)};
  const Vector3d e_phi{-spec.tube(theta) * std::sin(phi),
                       spec.tube(theta) * std::cos(phi), 0.0};
  Matrix basis(2, 3);
  basis.row(0) = e_theta.normalized().transpose();
  basis.row(1) = e_phi.normalized().transpose();
  return basis;
}

struct GeodesicOptions {
  double step = 1e-3;        ///< RK4 step in arc length.
  int coarse_shots = 720;    ///< initial angular resolution of the sweep.
  double tolerance = 1e-4;   ///< accepted closest-approach distance.
  double max_time = -1.0;    ///< arc-length budget; <0 picks a safe bound.
};

namespace detail {

/// Geodesic equations for the torus in (theta, phi) with arc-length
/// parameter: theta'' = -(rho sin(theta)/r) phi'^2,
/// phi'' = (2 r sin(theta)/rho) theta' phi'.
struct TorusGeodesicState {
  double theta, phi, dtheta, dphi;
};

inline std::array<double, 4> torus_geodesic_rhs(const TorusSpec& spec,
                                                const TorusGeodesicState& y) {
  const double rho = spec.tube(y.theta);
  const double sin_theta = std::sin(y.theta);
  return {y.dtheta, y.dphi, -(rho * sin_theta / spec.r) * y.dphi * y.dphi,
          (2.0 * spec.r * sin_theta / rho) * y.dtheta * y.dphi};
}

inline TorusGeodesicState rk4_step(const TorusSpec& spec,
                                   const TorusGeodesicState& y, double dt) {
  auto add = [](const TorusGeodesicState& a, const std::array<double, 4>& k,
                double scale) {
    return TorusGeodesicState{a.theta + scale * k[0], a.phi + scale * k[1],
                              a.dtheta + scale * k[2], a.dphi + scale * k[3]};
  };
  const auto k1 = torus_geodesic_rhs(spec, y);
  const auto k2 = torus_geodesic_rhs(spec, add(y, k1, dt / 2));
  const auto k3 = torus_geodesic_rhs(spec, add(y, k2, dt / 2));
  const auto k4 = torus_geodesic_rhs(spec, add(y, k3, dt));
  return {y.theta + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          y.phi + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
          y.dtheta + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
          y.dphi + dt / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])};
}

struct ShotResult {
  double miss = std::numeric_limits<double>::infinity();
  double time = 0.0;
};

/// Integrates the unit-speed geodesic leaving (theta0, phi0) at direction
/// angle beta and returns its closest 3D approach to `target`. The squared
/// distance is exactly quadratic in arc length near a transversal pass, so
/// the approach is refined by a parabola through the squared samples.
inline ShotResult shoot(const TorusSpec& spec, double theta0, double phi0,
                        double beta, const Vector3d& target, double max_time,
                        double step) {
  TorusGeodesicState y{theta0, phi0, std::cos(beta) / spec.r,
                       std::sin(beta) / spec.tube(theta0)};
  const auto steps = static_cast<long>(std::ceil(max_time / step));
  double prev2 = std::numeric_limits<double>::infinity();
  double prev1 = (torus_point(spec, y.theta, y.phi) - target).squaredNorm();
  double best_sq = prev1;
  double best_time = 0.0;
  for (long i = 1; i <= steps; ++i) {
    y = rk4_step(spec, y, step);
    const double miss_sq =
        (torus_point(spec, y.theta, y.phi) - target).squaredNorm();
    if (std::isfinite(prev2) && prev1 <= prev2 && prev1 <= miss_sq) {
      // Parabolic refinement around the local minimum at step i-1.
      const double denom = prev2 - 2.0 * prev1 + miss_sq;
      double offset = 0.0;
      if (std::abs(denom) > 1e-300) {
        offset = std::clamp(0.5 * (prev2 - miss_sq) / denom, -1.0, 1.0);
      }
      const double refined =
          std::max(0.0, prev1 - 0.25 * (prev2 - miss_sq) * offset);
      // Keep the earliest pass among minima that tie within noise.
      if (refined < best_sq - 1e-12 * (1.0 + best_sq)) {
        best_sq = refined;
        best_time = (static_cast<double>(i - 1) + offset) * step;
      }
    }
    prev2 = prev1;
    prev1 = miss_sq;
  }
  if (prev1 < best_sq) {
    best_sq = prev1;
    best_time = static_cast<double>(steps) * step;
  }
  return {std::sqrt(best_sq), best_time};
}

struct GeodesicHit {
  double beta = 0.0;
  double miss = std::numeric_limits<double>::infinity();
  double time = 0.0;
};

/// Sweeps initial direction angles, then golden-section refines every local
/// minimum of the closest-approach distance until one passes within the
/// tolerance. Returns all accepted hits.
inline std::vector<GeodesicHit> shooting_hits(const TorusSpec& spec,
                                              double theta0, double phi0,
                                              const Vector3d& target,
                                              const GeodesicOptions& opts) {
  const double max_time = opts.max_time > 0.0
                              ? opts.max_time
                              : EIGEN_PI * (spec.R + spec.r) +
                                    2.0 * EIGEN_PI * spec.r;
  const int shots = opts.coarse_shots;
  std::vector<ShotResult> sweep(static_cast<size_t>(shots));
  for (int s = 0; s < shots; ++s) {
    const double beta = 2.0 * EIGEN_PI * s / shots;
    sweep[static_cast<size_t>(s)] =
        shoot(spec, theta0, phi0, beta, target, max_time, opts.step);
  }

  constexpr double kGolden = 0.6180339887498949;
  std::vector<GeodesicHit> hits;
  for (int s = 0; s < shots; ++s) {
    const double here = sweep[static_cast<size_t>(s)].miss;
    const double left = sweep[static_cast<size_t>((s + shots - 1) % shots)].miss;
    const double right = sweep[static_cast<size_t>((s + 1) % shots)].miss;
    if (!(here <= left && here <= right) || here > 0.5) continue;

    double lo = 2.0 * EIGEN_PI * (s - 1) / shots;
    double hi = 2.0 * EIGEN_PI * (s + 1) / shots;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    ShotResult r1 = shoot(spec, theta0, phi0, x1, target, max_time, opts.step);
    ShotResult r2 = shoot(spec, theta0, phi0, x2, target, max_time, opts.step);
    for (int it = 0; it < 80 && (hi - lo) > 1e-13; ++it) {
      if (r1.miss < r2.miss) {
        hi = x2;
        x2 = x1;
        r2 = r1;
        x1 = hi - kGolden * (hi - lo);
        r1 = shoot(spec, theta0, phi0, x1, target, max_time, opts.step);
      } else {
        lo = x1;
        x1 = x2;
        r1 = r2;
        x2 = lo + kGolden * (hi - lo);
        r2 = shoot(spec, theta0, phi0, x2, target, max_time, opts.step);
      }
      if (std::min(r1.miss, r2.miss) < 0.25 * opts.tolerance) break;
    }
    const ShotResult& best = r1.miss < r2.miss ? r1 : r2;
    if (best.miss <= opts.tolerance) {
      hits.push_back({r1.miss < r2.miss ? x1 : x2, best.miss, best.time});
    }
  }
  return hits;
}

}  // namespace detail

/// Geodesic distance between two torus points: the shortest arc length over
/// all shooting directions whose geodesic passes through the target.
inline double torus_geodesic_distance(const TorusSpec& spec, const Vector3d& a,
                                      const Vector3d& b,
                                      const GeodesicOptions& opts = {}) {
  validate(spec);
  const Vector2d start = torus_angles(spec, a);
  detail::check_on_torus(spec, b, "second point");
  if ((a - b).norm() < 1e-14) return 0.0;

  GeodesicOptions attempt = opts;
  const int rounds = opts.max_time > 0.0 ? 4 : 2;
  for (int round = 0; round < rounds; ++round) {
    const auto hits =
        detail::shooting_hits(spec, start.x(), start.y(), b, attempt);
    if (!hits.empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& hit : hits) best = std::min(best, hit.time);
      return best;
    }
    if (round == 1 && rounds == 4) {
      // The caller's arc-length budget may simply be too small; fall back
      // to the full bound before giving up.
      attempt.max_time = -1.0;
      attempt.coarse_shots = opts.coarse_shots;
    } else {
      attempt.coarse_shots *= 3;
    }
  }
  throw NumericError("torus geodesic shooting did not converge");
}

/// Misalignment |1 - p0^T g p0'| at the base point, where p0' is the initial
/// coordinate velocity of the shot geodesic that reaches `endpoint` closest
/// to arc length t. p0 is a coordinate velocity (dtheta, dphi), unit in the
/// metric diag(r^2, rho^2).
inline double torus_direction_error(const TorusSpec& spec, const Vector3d& base,
                                    const Vector2d& p0, const Vector3d& endpoint,
                                    double t, const GeodesicOptions& opts = {}) {
  validate(spec);
  if (!(t > 0.0)) throw ValidationError("t must be > 0");
  const Vector2d start = torus_angles(spec, base);
  detail::check_on_torus(spec, endpoint, "endpoint");
  const double rho = spec.tube(start.x());
  const double speed = std::sqrt(spec.r * spec.r * p0.x() * p0.x() +
                                 rho * rho * p0.y() * p0.y());
  if (!(speed > 0.0)) throw ValidationError("p0 must be nonzero");
  if (std::abs(speed - 1.0) > 1e-6) {
    throw ValidationError("p0 must be unit speed in the torus metric");
  }

  GeodesicOptions attempt = opts;
  std::vector<detail::GeodesicHit> hits;
  for (int round = 0; round < 2 && hits.empty(); ++round) {
    hits = detail::shooting_hits(spec, start.x(), start.y(), endpoint, attempt);
    attempt.coarse_shots *= 3;
  }
  if (hits.empty()) {
    throw NumericError("torus direction shooting did not converge");
  }
  const detail::GeodesicHit* best = &hits.front();
  for (const auto& hit : hits) {
    if (std::abs(hit.time - t) < std::abs(best->time - t)) best = &hit;
  }
  const Vector2d shot{std::cos(best->beta) / spec.r,
                      std::sin(best->beta) / rho};
  const Vector2d unit = p0 / speed;
  const double inner = spec.r * spec.r * unit.x() * shot.x() +
                       rho * rho * unit.y() * shot.y();
  return std::abs(1.0 - inner);
}

// ---------------------------------------------------------------------------
// Frame error metrics
// ---------------------------------------------------------------------------

/// Largest principal angle between two subspaces given by row-orthonormal
/// bases of equal dimension: arccos of the smallest singular value of
/// B1 B2^T. For one-dimensional bases this is the angle between the lines.
inline double subspace_angle_error(const Matrix& basis1, const Matrix& basis2) {
  if (basis1.rows() != basis2.rows() || basis1.cols() != basis2.cols()) {
    throw ValidationError("bases must have equal dimensions");
  }
  const Matrix overlap = basis1 * basis2.transpose();
  Eigen::JacobiSVD<Matrix> svd(overlap);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::clamp(smallest, 0.0, 1.0));
}

/// (Delta_TS, Delta_N): the subspace angle between the frame basis and the
/// true tangent basis, and the mean absolute error between frame-coordinate
/// norms and the true metric norms of the neighborhood displacements.
/// `true_norms` is aligned with frame.neighborhood; the center entry is
/// skipped.
inline std::pair<double, double> lpca_error_metrics(const LpcaFrame& frame,
                                                    const Matrix& true_basis,
                                                    const Vector& true_norms) {
  if (true_norms.size() != static_cast<Index>(frame.neighborhood.size())) {
    throw ValidationError("true_norms must align with the frame neighborhood");
  }
  const double delta_ts = subspace_angle_error(frame.basis, true_basis);
  double total = 0.0;
  Index used = 0;
  for (Index local = 0; local < static_cast<Index>(frame.neighborhood.size());
       ++local) {
    if (frame.neighborhood[static_cast<size_t>(local)] == frame.center) continue;
    total += std::abs(frame.coords.row(local).norm() - true_norms[local]);
    ++used;
  }
  if (used == 0) throw ValidationError("frame has no non-center members");
  return {delta_ts, total / used};
}

}  // namespace qgeo

#endif  // QGEO_MANIFOLDS_HPP
