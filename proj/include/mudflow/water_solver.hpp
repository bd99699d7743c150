#pragma once

#include "mudflow/geometry.hpp"
#include "mudflow/grid.hpp"
#include "mudflow/parallel.hpp"
#include "mudflow/profile.hpp"

#include <memory>

namespace mudflow {

/// Conjugated Laplacian on the water rectangle:
///   A_w(f) v = v_xx + 2a v_xy + (a^2 + b^2) v_yy + drift v_y
/// with a, b, drift the transform factors of f. For f = 0 this is the
/// plain Laplacian.
Field2D apply_water_operator(const PeriodicProfile& f, const Field2D& v,
                             const ExecPolicy& policy = {});

/// Interface flux of the transformed water potential,
///   B_w(f) v = [ (1+f'^2) tr v_y - f' tr v_x ] / mu_w,
/// evaluated nodally at y = 0 with the grid's spectral derivatives (the
/// same rows the solver imposes).
PeriodicProfile water_boundary_flux(const PeriodicProfile& f, const Field2D& v, double mu_w,
                                    const ExecPolicy& policy = {});

struct WaterSolve {
    Field2D v;
    double residual_inf = 0.0;    ///< max |A_w(f) v| over interior nodes
    double bc_residual_inf = 0.0; ///< max boundary-row defect
    int refinements = 0;
    bool refactored = false;
    double rcond = 0.0; ///< reciprocal condition estimate of the factorization
};

/// Mixed-boundary solver for
///   A_w(f) v = 0,  B_w(f) v = F on y=0,  v = h on y=1.
/// Dense collocation system, boundary conditions imposed by row
/// replacement, direct LU with partial pivoting. The instance keeps the
/// last factorization and reuses it, refining against the residual of the
/// current f and refactoring when refinement stalls — do not share one
/// instance across concurrent solves.
class WaterSolver {
public:
    WaterSolver(std::shared_ptr<const Grid> grid, double mu_w, ExecPolicy policy = {},
                double refine_target = 1e-12);
    ~WaterSolver();
    WaterSolver(WaterSolver&&) noexcept;
    WaterSolver& operator=(WaterSolver&&) noexcept;

    WaterSolve solve(const PeriodicProfile& f, const PeriodicProfile& F, const PeriodicProfile& h);

    const Grid& grid() const { return *grid_; }
    double mu_w() const { return mu_w_; }
    int factorization_count() const { return factorizations_; }
    void invalidate_cache();

private:
    struct Impl;
    std::shared_ptr<const Grid> grid_;
    double mu_w_;
    ExecPolicy policy_;
    double refine_target_;
    int factorizations_ = 0;
    std::unique_ptr<Impl> impl_;
};

} // namespace mudflow
