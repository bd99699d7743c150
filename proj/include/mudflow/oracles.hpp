#pragma once

// Reference implementations used only for verification. They deliberately
// avoid the production code paths they check: the conjugation oracle
// composes through the actual inverse map with centered finite differences
// in physical coordinates instead of the chain-rule coefficient formulas,
// and the modal solutions come straight from the separated closed forms.

#include "mudflow/grid.hpp"
#include "mudflow/profile.hpp"
#include "mudflow/rheology.hpp"

#include <memory>

namespace mudflow::oracles {

/// Evaluate a discrete field anywhere: trigonometric interpolation in x,
/// barycentric polynomial interpolation through the Chebyshev rows in y.
class FieldInterpolator {
public:
    explicit FieldInterpolator(const Field2D& field);
    double operator()(double x, double y) const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<PeriodicProfile> rows_; ///< one profile per y node
    std::vector<double> weights_;       ///< barycentric weights
};

/// (Q(v o phi_f^{-1})) o phi_f at grid node (ix, iy), computed with
/// fourth-order centered differences in physical coordinates on a spacing
/// four times finer than the coarse grid (shrunk near the outer walls).
/// Q is the Laplacian when ev == nullptr, else the quasilinear Darcy
/// operator with the given effective viscosity.
double conjugated_operator(const PeriodicProfile& f, const Field2D& v, int ix, int iy,
                           const EffectiveViscosity* ev = nullptr);

/// Laplace solution on the mud strip, no flux at the bottom:
/// sum_k p_k cosh(k(y+1))/cosh(k) e^{ikx}.
Field2D mud_modal_reference(std::shared_ptr<const Grid> grid, const PeriodicProfile& p);

/// Interface trace of the flat water problem driven by flux F with zero
/// top data: sum_k -mu_w tanh(k)/k F_k e^{ikx}.
PeriodicProfile water_flat_trace_reference(const PeriodicProfile& F, double mu_w);

} // namespace mudflow::oracles
