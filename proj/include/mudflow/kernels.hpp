#pragma once

#include "mudflow/grid.hpp"
#include "mudflow/parallel.hpp"
#include "mudflow/rheology.hpp"

#include <span>

namespace mudflow {

// Data-parallel kernels. Each has a serial reference implementation and an
// OpenMP variant sharing the same per-element code; the dispatching
// front-end picks one from the policy. Outputs are written element-wise
// with no cross-thread reductions, so both variants agree bitwise.

/// out = d/dx in (Fourier differentiation matrix along x lines).
void field_dx(const Field2D& in, Field2D& out, const ExecPolicy& policy);
void field_dx_serial(const Field2D& in, Field2D& out);
void field_dx_openmp(const Field2D& in, Field2D& out, int threads);

/// out = d/dy in (Chebyshev differentiation matrix along y lines).
void field_dy(const Field2D& in, Field2D& out, const ExecPolicy& policy);
void field_dy_serial(const Field2D& in, Field2D& out);
void field_dy_openmp(const Field2D& in, Field2D& out, int threads);

/// mu[i], dmu[i] = effective viscosity and derivative at r[i].
void effective_viscosity_batch(const EffectiveViscosity& ev, std::span<const double> r,
                               std::span<double> mu, std::span<double> dmu,
                               const ExecPolicy& policy);
void effective_viscosity_batch_serial(const EffectiveViscosity& ev, std::span<const double> r,
                                      std::span<double> mu, std::span<double> dmu);
void effective_viscosity_batch_openmp(const EffectiveViscosity& ev, std::span<const double> r,
                                      std::span<double> mu, std::span<double> dmu, int threads);

/// Per-node geometry factors of the flattening transform, plus the
/// gradient-dependent a_ij, combined into the quasilinear coefficients
///   b11, b12, b22 (second order) and b (first order, d/dy),
/// and the ellipticity eigenvalues lam1, lam2 of (a_ij).
struct CoefficientBatch {
    std::span<const double> alpha;   ///< f'(y^2-1)/(1-2yf)
    std::span<const double> beta;    ///< 1/(1-2yf)
    std::span<const double> drift_a; ///< a11 factor of the first-order term
    std::span<const double> drift_b; ///< a12 factor
    std::span<const double> drift_c; ///< a22 factor
    std::span<const double> zx;      ///< transformed gradient, x component
    std::span<const double> zy;      ///< transformed gradient, y component
    std::span<double> b11, b12, b22, b, lam1, lam2;
};
void quasilinear_coefficient_batch(const EffectiveViscosity& ev, const CoefficientBatch& batch,
                                   const ExecPolicy& policy);
void quasilinear_coefficient_batch_serial(const EffectiveViscosity& ev, const CoefficientBatch& batch);
void quasilinear_coefficient_batch_openmp(const EffectiveViscosity& ev, const CoefficientBatch& batch,
                                          int threads);

} // namespace mudflow
