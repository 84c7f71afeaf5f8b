#ifndef QGEO_LAPLACIAN_HPP
#define QGEO_LAPLACIAN_HPP

#include <optional>

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"

namespace qgeo {

/// Gaussian kernel matrix with its normalization vectors. dvec and lambda are
/// filled in by build_laplacian.
struct KernelGraph {
  Matrix kernel;  ///< N x N symmetric, entries in (0, 1], unit diagonal.
  Vector sigma;   ///< row sums of kernel, > 0.
  Vector dvec;    ///< row sums of the lambda-normalized kernel, > 0.
  double epsilon = 0.0;
  double lambda = -1.0;  ///< -1 until build_laplacian runs.

  Index size() const { return kernel.rows(); }
};

/// kernel(i,j) = exp(-|v_i - v_j|^2 / (2 epsilon)). Symmetry and the
/// unit diagonal hold exactly; squared distances are clamped at zero.
template <typename Derived>
KernelGraph build_kernel(const Eigen::MatrixBase<Derived>& points,
                         double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  const Index n = points.rows();
  KernelGraph kg;
  kg.epsilon = epsilon;
  kg.kernel.resize(n, n);

  const Matrix gram = points * points.transpose();
  Matrix& kernel = kg.kernel;
  parallel_for(n, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      kernel(i, i) = 1.0;
      for (Index j = 0; j < i; ++j) {
        const double d2 =
            std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
        const double k = std::exp(-d2 / (2.0 * epsilon));
        kernel(i, j) = k;
        kernel(j, i) = k;
      }
    }
  });
  kg.sigma = kg.kernel.rowwise().sum();
  return kg;
}

inline KernelGraph build_kernel(const Dataset& data, double epsilon) {
  validate(data);
  return build_kernel(data.points, epsilon);
}

/// Normalized graph Laplacian (2 / epsilon) (I - D^-1 W) with
/// W = Sigma^-lambda K Sigma^-lambda and D = diag of W row sums.
/// Rows sum to zero. Completes kg.dvec and kg.lambda.
///
/// The prefactor is calibrated so the operator approaches the (positive)
/// Laplace-Beltrami operator: for the kernel exp(-d^2 / (2 eps)) the kernel
/// second moment is eps, so (I - D^-1 W) f = (eps / 2) Lap f + O(eps^2) and
/// the unit-circle spectrum k^2 is recovered exactly in the dense limit.
inline Matrix build_laplacian(KernelGraph& kg, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must be in [0, 1]");
  }
  if ((kg.sigma.array() <= 0.0).any()) {
    throw NumericError("kernel row sum is not positive");
  }
  const Vector sigma_pow = kg.sigma.array().pow(-lambda);
  Matrix lap = sigma_pow.asDiagonal() * kg.kernel * sigma_pow.asDiagonal();
  kg.dvec = lap.rowwise().sum();
  kg.lambda = lambda;
  if ((kg.dvec.array() <= 0.0).any()) {
    throw NumericError("degenerate normalization: zero degree entry");
  }
  const double prefactor = 2.0 / kg.epsilon;
  lap = kg.dvec.cwiseInverse().asDiagonal() * lap;
  lap = -lap;
  lap.diagonal().array() += 1.0;
  lap *= prefactor;
  return lap;
}

/// Eigendecomposition of the symmetrized Laplacian
/// S = D^1/2 L D^-1/2. The original operator is recovered as
/// L = D^-1/2 E diag(eigvals) E^T D^1/2.
struct SpectralLaplacian {
  Vector eigvals;    ///< ascending, clamped to be >= 0.
  Matrix eigvecs;    ///< orthonormal columns, eigenvectors of S.
  Vector dvec_sqrt;  ///< sqrt of the degree vector.
  double epsilon = 0.0;
  double lambda = 1.0;

  Index size() const { return eigvals.size(); }
};

inline SpectralLaplacian decompose(const Matrix& laplacian, const Vector& dvec,
                                   double epsilon, double lambda) {
  const Index n = laplacian.rows();
  if (laplacian.cols() != n || dvec.size() != n) {
    throw ValidationError("laplacian/degree dimension mismatch");
  }
  if ((dvec.array() <= 0.0).any()) {
    throw NumericError("degree vector must be positive");
  }
  SpectralLaplacian spec;
  spec.epsilon = epsilon;
  spec.lambda = lambda;
  spec.dvec_sqrt = dvec.array().sqrt();

  Matrix sym = spec.dvec_sqrt.asDiagonal() * laplacian *
               spec.dvec_sqrt.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolver failed to converge");
  }
  spec.eigvals = solver.eigenvalues();
  spec.eigvecs = solver.eigenvectors();

  const double top = std::max(spec.eigvals.cwiseAbs().maxCoeff(), 0.0);
  const double floor = -1e-10 * top;
  for (Index i = 0; i < n; ++i) {
    if (spec.eigvals[i] < 0.0) {
      if (spec.eigvals[i] < floor) {
        throw NumericError(
            "eigenvalue " + std::to_string(spec.eigvals[i]) +
            " is too negative; symmetrized operator is inconsistent");
      }
      spec.eigvals[i] = 0.0;
    }
  }
  return spec;
}

inline SpectralLaplacian decompose(const Matrix& laplacian,
                                   const KernelGraph& kg) {
  return decompose(laplacian, kg.dvec, kg.epsilon, kg.lambda);
}

}  // namespace qgeo

#endif  // QGEO_LAPLACIAN_HPP
