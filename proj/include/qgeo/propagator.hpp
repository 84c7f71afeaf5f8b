#ifndef QGEO_PROPAGATOR_HPP
#define QGEO_PROPAGATOR_HPP

#include <complex>
#include <optional>

#include "qgeo/common.hpp"
#include "qgeo/laplacian.hpp"

namespace qgeo {

/// One-step unitary exp(i dt sqrt(L)) applied through the spectral
/// decomposition. With a spectral cutoff only the lowest `modes` eigenpairs
/// drive the dynamics. The referenced SpectralLaplacian must outlive this.
struct Propagator {
  const SpectralLaplacian* spectral = nullptr;
  double h = 0.0;
  double dt = 0.0;
  Index modes = 0;
  ComplexVector phase_table;  ///< exp(i dt sqrt(eigvals)), unit modulus.
};

inline Propagator make_propagator(const SpectralLaplacian& spectral,
                                  double epsilon, double alpha, double dt,
                                  std::optional<Index> spectral_cutoff = {}) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(alpha >= 1.0)) throw ValidationError("alpha must be >= 1");
  if (!(dt >= 0.0)) throw ValidationError("dt must be >= 0");
  Propagator prop;
  prop.spectral = &spectral;
  prop.h = std::pow(epsilon, 1.0 / (2.0 + alpha));
  prop.dt = dt;
  prop.modes = spectral.size();
  if (spectral_cutoff) {
    if (*spectral_cutoff < 1) throw ValidationError("spectral cutoff must be >= 1");
    prop.modes = std::min<Index>(*spectral_cutoff, spectral.size());
  }
  prop.phase_table.resize(prop.modes);
  for (Index i = 0; i < prop.modes; ++i) {
    prop.phase_table[i] =
        std::polar(1.0, dt * std::sqrt(spectral.eigvals[i]));
  }
  return prop;
}

/// Coefficients of states in the symmetrized eigenbasis: E^T D^1/2 psi.
inline ComplexMatrix to_modal(const Propagator& prop,
                              const ComplexMatrix& states) {
  const SpectralLaplacian& spec = *prop.spectral;
  if (states.rows() != spec.size()) {
    throw ValidationError("state dimension does not match the operator");
  }
  const auto basis = spec.eigvecs.leftCols(prop.modes);
  return basis.transpose() * (spec.dvec_sqrt.asDiagonal() * states);
}

/// Back to the position basis: D^-1/2 E c.
inline ComplexMatrix from_modal(const Propagator& prop,
                                const ComplexMatrix& modal) {
  const SpectralLaplacian& spec = *prop.spectral;
  const auto basis = spec.eigvecs.leftCols(prop.modes);
  return spec.dvec_sqrt.cwiseInverse().asDiagonal() *
         (basis * modal).eval();
}

/// Multiplies modal coefficients by the step phases, `steps` times at once.
inline void advance_modal(const Propagator& prop, ComplexMatrix& modal,
                          int steps = 1) {
  if (steps < 0) throw ValidationError("steps must be >= 0");
  if (steps == 0) return;
  const SpectralLaplacian& spec = *prop.spectral;
  const double t = prop.dt * steps;
  for (Index i = 0; i < prop.modes; ++i) {
    modal.row(i) *= steps == 1
                        ? prop.phase_table[i]
                        : std::polar(1.0, t * std::sqrt(spec.eigvals[i]));
  }
}

inline ComplexMatrix propagate(const Propagator& prop,
                               const ComplexMatrix& states, int steps) {
  if (steps < 1) throw ValidationError("steps must be >= 1");
  if (!states.allFinite()) throw ValidationError("state has non-finite entries");
  ComplexMatrix modal = to_modal(prop, states);
  advance_modal(prop, modal, steps);
  return from_modal(prop, modal);
}

inline ComplexVector propagate(const Propagator& prop,
                               const ComplexVector& state, int steps) {
  const ComplexMatrix out = propagate(prop, ComplexMatrix(state), steps);
  return out.col(0);
}

/// Norm preserved by the propagation, |D^1/2 psi|_2.
inline double weighted_norm(const SpectralLaplacian& spec,
                            const ComplexVector& state) {
  return (spec.dvec_sqrt.asDiagonal() * state).norm();
}

}  // namespace qgeo

#endif  // QGEO_PROPAGATOR_HPP
