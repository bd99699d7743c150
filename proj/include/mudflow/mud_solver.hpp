#pragma once

#include "mudflow/geometry.hpp"
#include "mudflow/grid.hpp"
#include "mudflow/parallel.hpp"
#include "mudflow/profile.hpp"
#include "mudflow/rheology.hpp"

#include <memory>
#include <vector>

namespace mudflow {

/// Gradient-dependent coefficients of the quasilinear Darcy operator,
///   a_ij(z) = delta_ij / mu_m(|z|^2) - 2 z_i z_j mu_m'(|z|^2) / mu_m(|z|^2)^2,
/// and the eigenvalues lam1 = 1/mu_m, lam2 = 1/mu_m - 2|z|^2 mu_m'/mu_m^2.
/// Both eigenvalues are positive whenever the effective-viscosity
/// conditions hold (uniform ellipticity).
struct GradientCoeffs {
    double a11, a12, a22, lam1, lam2;
};
GradientCoeffs gradient_coefficients(const EffectiveViscosity& ev, double zx, double zy);

/// Quasilinear coefficient fields b_ij, b of the conjugated operator
///   A_m(f, v) = b11 v_xx + 2 b12 v_xy + b22 v_yy + b v_y,
/// evaluated at the transformed gradient of v.
struct QuasilinearCoeffs {
    Field2D b11, b12, b22, b, lam1, lam2;
};
QuasilinearCoeffs quasilinear_coefficients(const TransformFactors& tf, const Field2D& grad_x,
                                           const Field2D& grad_y, const EffectiveViscosity& ev,
                                           const ExecPolicy& policy = {});

/// A_m(f, v) with coefficients frozen at v's own gradient (the nonlinear
/// residual). For f = 0 this is a_ij(grad v) v_ij.
Field2D apply_mud_operator(const PeriodicProfile& f, const Field2D& v, const EffectiveViscosity& ev,
                           const ExecPolicy& policy = {});

/// Interface flux of the transformed mud potential,
///   B_m(f, v) = [ (1+f'^2) tr v_y - f' tr v_x ] / mu_m( tr |grad_f v|^2 ),
/// with tr grad_f v = (v_x - f' v_y, v_y) at y = 0. Nodal evaluation.
PeriodicProfile mud_boundary_flux(const PeriodicProfile& f, const Field2D& v,
                                  const EffectiveViscosity& ev, const ExecPolicy& policy = {});

struct MaxPrincipleReport {
    bool pass = true;
    double violation = 0.0; ///< how far interior extrema exceed boundary extrema
};
/// Weak maximum-principle check: interior extrema must not exceed the
/// boundary extrema beyond `tol` (discretization noise allowance).
MaxPrincipleReport max_principle_check(const Field2D& v, double tol = 1e-8);

struct MudSolve {
    Field2D v;
    double residual_inf = 0.0; ///< max |A_m(f, v)| over interior nodes
    int iterations = 0;        ///< linear solves performed
    bool converged = false;
    double lam_min = 0.0;      ///< smallest ellipticity eigenvalue encountered
    double max_principle_violation = 0.0;
    std::vector<double> residual_history;
};

struct MudOptions {
    double nonlinear_tol = 1e-9; ///< residual target, times max(1, |p|_inf)
    int max_iterations = 50;
    double linear_refine_target = 1e-12; ///< inner linear solve, times data scale
    int max_refinements = 4;
};

/// Quasilinear solver for
///   A_m(f, v) = 0,  v = p on y=0,  v_y = 0 on y=-1.
/// Picard iteration: coefficients frozen at the current gradient, linear
/// collocation solve, damping halved when the true residual grows. The
/// linear solves reuse one cached LU with refinement against the current
/// frozen operator and refactor on stall, so nearby solves (time
/// continuation, velocity iterations) cost backsolves only. Not safe to
/// share one instance across concurrent solves.
class MudSolver {
public:
    MudSolver(std::shared_ptr<const Grid> grid, EffectiveViscosity ev, ExecPolicy policy = {},
              MudOptions options = {});
    ~MudSolver();
    MudSolver(MudSolver&&) noexcept;
    MudSolver& operator=(MudSolver&&) noexcept;

    MudSolve solve(const PeriodicProfile& f, const PeriodicProfile& p,
                   const Field2D* guess = nullptr);

    const Grid& grid() const { return *grid_; }
    const EffectiveViscosity& ev() const { return ev_; }
    int factorization_count() const { return factorizations_; }
    void invalidate_cache();

private:
    struct Impl;
    std::shared_ptr<const Grid> grid_;
    EffectiveViscosity ev_;
    ExecPolicy policy_;
    MudOptions options_;
    int factorizations_ = 0;
    std::unique_ptr<Impl> impl_;
};

/// Laplace solution on the mud rectangle with Dirichlet data p at y=0 and
/// no flux at y=-1, mode by mode: p_k cosh(k(y+1))/cosh(k). Used as the
/// Picard initial guess; constant-viscosity mud makes it the exact
/// continuum solution.
Field2D mud_modal_guess(std::shared_ptr<const Grid> grid, const PeriodicProfile& p);

} // namespace mudflow
