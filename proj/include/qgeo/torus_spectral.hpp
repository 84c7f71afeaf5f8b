#ifndef QGEO_TORUS_SPECTRAL_HPP
#define QGEO_TORUS_SPECTRAL_HPP

#include <algorithm>
#include <complex>
#include <map>
#include <tuple>
#include <vector>

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"
#include "qgeo/manifolds.hpp"

namespace qgeo {

/// Unitary step exp(i sqrt(Lambda) dt) restricted to the lowest eigenmodes of
/// the torus Laplace-Beltrami operator, on a regular (theta, phi) grid.
/// Eigenfunctions separate as psi(theta) exp(i k phi); the theta factors come
/// from a finite-difference eigenproblem per wavenumber k, solved in the
/// sqrt(rho)-symmetrized form so modal bases stay exactly orthonormal.
struct TruncatedPropagator {
  struct KBlock {
    int k = 0;       ///< signed angular wavenumber.
    Vector lambda;   ///< eigenvalues of the kept modes.
    Matrix basis;    ///< n_theta x m_k symmetrized theta-eigenvectors.
  };

  TorusSpec spec;
  Index n_theta = 0;
  Index n_phi = 0;
  double dt = 0.0;
  Vector eigvals;       ///< all kept eigenvalues, ascending, with degeneracy.
  std::vector<KBlock> blocks;
  Vector sqrt_weight;   ///< sqrt(rho(theta_i)); maps states to symmetrized form.

  Index grid_size() const { return n_theta * n_phi; }
  Index modes() const { return eigvals.size(); }
};

inline double torus_grid_theta(const TruncatedPropagator& prop, Index cell) {
  return 2.0 * EIGEN_PI * static_cast<double>(cell / prop.n_phi) /
         static_cast<double>(prop.n_theta);
}

inline double torus_grid_phi(const TruncatedPropagator& prop, Index cell) {
  return 2.0 * EIGEN_PI * static_cast<double>(cell % prop.n_phi) /
         static_cast<double>(prop.n_phi);
}

/// The grid embedded in R^3, row cell = i * n_phi + j for theta_i, phi_j.
inline Dataset torus_grid_dataset(const TorusSpec& spec, Index n_theta,
                                  Index n_phi) {
  validate(spec);
  Dataset data;
  data.points.resize(n_theta * n_phi, 3);
  for (Index i = 0; i < n_theta; ++i) {
    const double theta = 2.0 * EIGEN_PI * i / n_theta;
    for (Index j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * EIGEN_PI * j / n_phi;
      data.points.row(i * n_phi + j) = torus_point(spec, theta, phi).transpose();
    }
  }
  return data;
}

namespace detail {

/// Symmetrized flux-form discretization of the theta-operator
/// -(1/(r^2 rho)) d/dtheta (rho d/dtheta) + k^2 / rho^2 with periodic ends.
inline Matrix torus_theta_operator(const TorusSpec& spec, Index n_theta,
                                   int k) {
  const double step = 2.0 * EIGEN_PI / static_cast<double>(n_theta);
  Vector rho(n_theta), rho_half(n_theta);
  for (Index i = 0; i < n_theta; ++i) {
    rho[i] = spec.tube(step * static_cast<double>(i));
    rho_half[i] = spec.tube(step * (static_cast<double>(i) + 0.5));
  }
  const double r2h2 = spec.r * spec.r * step * step;
  Matrix sym = Matrix::Zero(n_theta, n_theta);
  for (Index i = 0; i < n_theta; ++i) {
    const Index prev = (i + n_theta - 1) % n_theta;
    const Index next = (i + 1) % n_theta;
    sym(i, i) = (rho_half[i] + rho_half[prev]) / (r2h2 * rho[i]) +
                static_cast<double>(k) * static_cast<double>(k) /
                    (rho[i] * rho[i]);
    sym(i, next) = -rho_half[i] / (r2h2 * std::sqrt(rho[i] * rho[next]));
    sym(i, prev) = -rho_half[prev] / (r2h2 * std::sqrt(rho[i] * rho[prev]));
  }
  return sym;
}

}  // namespace detail

inline TruncatedPropagator torus_truncated_propagator(const TorusSpec& spec,
                                                      Index n_modes,
                                                      Index n_theta,
                                                      Index n_phi, double dt) {
  validate(spec);
  if (n_theta < 8 || n_phi < 8) {
    throw ValidationError("grid is too coarse for the truncated propagator");
  }
  if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
  if (!(dt >= 0.0)) throw ValidationError("dt must be >= 0");

  TruncatedPropagator prop;
  prop.spec = spec;
  prop.n_theta = n_theta;
  prop.n_phi = n_phi;
  prop.dt = dt;
  prop.sqrt_weight.resize(n_theta);
  for (Index i = 0; i < n_theta; ++i) {
    prop.sqrt_weight[i] =
        std::sqrt(spec.tube(2.0 * EIGEN_PI * i / static_cast<double>(n_theta)));
  }

  struct Candidate {
    double lambda;
    int k;  // signed
    Index column;
  };
  std::vector<Candidate> candidates;
  std::vector<Matrix> bases;  // per |k|, eigenvector matrices

  const int k_max = static_cast<int>((n_phi - 1) / 2);
  double cutoff = std::numeric_limits<double>::infinity();
  Index counted = 0;
  for (int k = 0; k <= k_max; ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        detail::torus_theta_operator(spec, n_theta, k));
    if (solver.info() != Eigen::Success) {
      throw NumericError("theta eigenproblem failed at wavenumber " +
                         std::to_string(k));
    }
    if (counted >= n_modes && solver.eigenvalues()(0) > cutoff) break;
    bases.push_back(solver.eigenvectors());
    const double noise_floor =
        1e-12 * std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    for (Index c = 0; c < n_theta; ++c) {
      double lambda = solver.eigenvalues()(c);
      if (std::abs(lambda) < noise_floor) lambda = 0.0;
      if (lambda < 0.0) {
        throw NumericError("theta operator produced a negative eigenvalue");
      }
      candidates.push_back({lambda, k, c});
      ++counted;
      if (k > 0) {
        candidates.push_back({lambda, -k, c});
        ++counted;
      }
    }
    // Track the running n_modes-th smallest eigenvalue as the stop bound.
    if (counted >= n_modes) {
      std::vector<double> lambdas(candidates.size());
      for (size_t i = 0; i < candidates.size(); ++i) lambdas[i] = candidates[i].lambda;
      std::nth_element(lambdas.begin(),
                       lambdas.begin() + static_cast<long>(n_modes) - 1,
                       lambdas.end());
      cutoff = lambdas[static_cast<size_t>(n_modes) - 1];
    }
  }
  if (counted < n_modes) {
    throw ValidationError("the grid supports fewer than n_modes eigenmodes");
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return std::tie(a.lambda, a.k, a.column) <
                            std::tie(b.lambda, b.k, b.column);
                   });
  candidates.resize(static_cast<size_t>(n_modes));

  prop.eigvals.resize(n_modes);
  for (Index i = 0; i < n_modes; ++i) {
    prop.eigvals[i] = candidates[static_cast<size_t>(i)].lambda;
  }

  // Regroup kept modes per signed wavenumber, in a deterministic order.
  std::map<int, std::vector<Candidate>> grouped;
  for (const Candidate& c : candidates) grouped[c.k].push_back(c);
  for (auto& [k, members] : grouped) {
    std::sort(members.begin(), members.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.column < b.column;
              });
    TruncatedPropagator::KBlock block;
    block.k = k;
    block.lambda.resize(static_cast<Index>(members.size()));
    block.basis.resize(n_theta, static_cast<Index>(members.size()));
    const Matrix& source = bases[static_cast<size_t>(std::abs(k))];
    for (Index m = 0; m < static_cast<Index>(members.size()); ++m) {
      block.lambda[m] = members[static_cast<size_t>(m)].lambda;
      block.basis.col(m) = source.col(members[static_cast<size_t>(m)].column);
    }
    prop.blocks.push_back(std::move(block));
  }
  return prop;
}

/// Applies the truncated unitary `steps` times: the state is symmetrized by
/// sqrt(rho), projected on the kept modes, phased by exp(i sqrt(lambda) dt),
/// and reassembled. Components outside the modal span are projected away.
inline ComplexVector truncated_propagate(const TruncatedPropagator& prop,
                                         const ComplexVector& state,
                                         int steps) {
  if (state.size() != prop.grid_size()) {
    throw ValidationError("state does not match the propagator grid");
  }
  if (steps < 0) throw ValidationError("steps must be >= 0");

  using RowMajorGrid =
      Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                    Eigen::RowMajor>;
  Eigen::Map<const RowMajorGrid> grid(state.data(), prop.n_theta, prop.n_phi);
  ComplexMatrix symmetrized =
      prop.sqrt_weight.asDiagonal() * ComplexMatrix(grid);
  ComplexMatrix out = ComplexMatrix::Zero(prop.n_theta, prop.n_phi);

  const double t = prop.dt * steps;
  const double norm = 1.0 / std::sqrt(static_cast<double>(prop.n_phi));
  for (const auto& block : prop.blocks) {
    ComplexVector fourier(prop.n_phi);
    for (Index j = 0; j < prop.n_phi; ++j) {
      const double phi = 2.0 * EIGEN_PI * j / static_cast<double>(prop.n_phi);
      fourier[j] = std::polar(norm, block.k * phi);
    }
    const ComplexVector projected = symmetrized * fourier.conjugate();
    ComplexVector modal = block.basis.transpose() * projected;
    for (Index m = 0; m < modal.size(); ++m) {
      modal[m] *= std::polar(1.0, t * std::sqrt(block.lambda[m]));
    }
    const ComplexVector column = block.basis * modal;
    out.noalias() += column * fourier.transpose();
  }

  out = prop.sqrt_weight.cwiseInverse().asDiagonal() * out;
  ComplexVector result(prop.grid_size());
  Eigen::Map<RowMajorGrid>(result.data(), prop.n_theta, prop.n_phi) = out;
  return result;
}

}  // namespace qgeo

#endif  // QGEO_TORUS_SPECTRAL_HPP
