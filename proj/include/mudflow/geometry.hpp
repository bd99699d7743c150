#pragma once

#include "mudflow/grid.hpp"
#include "mudflow/parallel.hpp"
#include "mudflow/profile.hpp"

#include <utility>

namespace mudflow {

/// Admissibility of an interface profile: the transform is a
/// diffeomorphism iff sup|f| < 1/2.
struct AdmissibilityReport {
    double sup_norm = 0.0;
    bool in_U = false;     ///< sup|f| < 1/2
    bool mean_zero = false;
    double margin = 0.0;   ///< 1/2 - sup|f|
};

AdmissibilityReport validate_profile(const PeriodicProfile& f, bool require_mean_zero = false,
                                     double mean_tol = 1e-12);

/// Curvature of the graph y = f(x): f'' / (1 + f'^2)^{3/2}, evaluated on a
/// 3n/2 padded grid (2/3 dealiasing rule) and truncated back.
PeriodicProfile curvature(const PeriodicProfile& f);

enum class MapDirection { Forward, Inverse };

/// The flattening map phi_f(x,y) = (x, y + (1-y^2) f(x)) and its inverse.
/// The inverse uses the conjugate form 2(y - f) / (1 + sqrt(1 - 4yf + 4f^2)),
/// algebraically identical to the closed form but stable as f -> 0.
/// Both directions fix y = +-1 exactly. Requires f in U for the inverse.
std::pair<double, double> transform_point(const PeriodicProfile& f, double x, double y,
                                          MapDirection direction);

/// Transformed gradient on a reference grid:
///   grad_f v = (v_x + f'(y^2-1)/(1-2yf) v_y,  v_y/(1-2yf)).
/// Its trace at y = 0 is (v_x - f' v_y, v_y).
std::pair<Field2D, Field2D> transformed_gradient(const PeriodicProfile& f, const Field2D& v,
                                                 const ExecPolicy& policy = {});

/// Unit normal on the interface graph (pointing into the water) and the
/// normal speed V = F / sqrt(1 + f'^2) for a nodal velocity F = df/dt.
struct InterfaceNormal {
    PeriodicProfile nu_x, nu_y; ///< nodal components of the unit normal
    PeriodicProfile speed;      ///< normal velocity V
};
InterfaceNormal normal_and_velocity(const PeriodicProfile& f, const PeriodicProfile& F);

/// Per-node factors of the conjugated operators on a grid, shared by the
/// water and mud solvers:
///   A_w(f) v = v_xx + 2 alpha v_xy + (alpha^2 + beta^2) v_yy
///              + (drift_a + drift_c) v_y                       (Laplacian case)
/// and the quasilinear combination uses (alpha, beta, drift_*) with the
/// gradient-dependent a_ij. Asserts 1 - 2yf > 0 at every node.
struct TransformFactors {
    Field2D alpha, beta, drift_a, drift_b, drift_c;
    PeriodicProfile f, df, ddf; ///< the profile and its first two derivatives
};
TransformFactors transform_factors(std::shared_ptr<const Grid> grid, const PeriodicProfile& f);

} // namespace mudflow
