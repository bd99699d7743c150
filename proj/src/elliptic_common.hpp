#pragma once

// Internal helpers shared by the water and mud solvers: application and
// dense assembly of a variable-coefficient second-order operator
//   L v = cxx v_xx + 2 cxy v_xy + cyy v_yy + cy v_y
// on a collocation grid (interior rows; boundary rows are added by each
// solver), plus a factorization wrapper with iterative refinement against
// the current operator so a stale LU can keep serving as preconditioner.

#include "mudflow/grid.hpp"
#include "mudflow/kernels.hpp"
#include "mudflow/parallel.hpp"

#include <Eigen/Dense>

#include <functional>

namespace mudflow::detail {

struct SecondOrderCoeffs {
    // per-node coefficient arrays, x-major like Field2D; cxx may be null (== 1)
    const double* cxx = nullptr;
    const double* cxy = nullptr;
    const double* cyy = nullptr;
    const double* cy = nullptr;
};

/// out = L v at every node (only interior rows are meaningful to callers).
void apply_second_order(const SecondOrderCoeffs& c, const Field2D& v, Field2D& out,
                        const ExecPolicy& policy);

/// Fill the interior rows of the dense system matrix; boundary rows are
/// zeroed and left for the caller.
void assemble_second_order(const Grid& g, const SecondOrderCoeffs& c, Eigen::MatrixXd& m,
                           const ExecPolicy& policy);

/// Dense LU with iterative refinement. solve() refines the candidate
/// against the caller-supplied residual of the *current* system, so the
/// factorization may be stale (built for nearby coefficients); on stall the
/// caller refactors. Residuals are returned as full system vectors.
class RefinedLU {
public:
    bool valid() const { return valid_; }
    void factor(const Eigen::MatrixXd& m) {
        lu_.compute(m);
        valid_ = true;
    }
    void invalidate() { valid_ = false; }
    Eigen::VectorXd backsolve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }
    double rcond() const { return lu_.rcond(); }

    struct Result {
        Eigen::VectorXd v;
        double residual_inf = 0.0;
        int refinements = 0;
        bool converged = false;
    };
    /// residual_fn(v) must return the full residual vector of the current
    /// system (boundary rows included).
    Result solve(const Eigen::VectorXd& rhs,
                 const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual_fn,
                 double target, int max_refinements) const;

private:
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    bool valid_ = false;
};

} // namespace mudflow::detail
