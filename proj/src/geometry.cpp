#include "mudflow/geometry.hpp"

#include "mudflow/errors.hpp"
#include "mudflow/kernels.hpp"

#include <cmath>

namespace mudflow {

AdmissibilityReport validate_profile(const PeriodicProfile& f, bool require_mean_zero,
                                     double mean_tol) {
    AdmissibilityReport rep;
    rep.sup_norm = f.sup_norm();
    rep.in_U = rep.sup_norm < 0.5;
    rep.margin = 0.5 - rep.sup_norm;
    rep.mean_zero = std::abs(f.mean()) <= mean_tol;
    if (require_mean_zero) rep.in_U = rep.in_U && rep.mean_zero;
    return rep;
}

PeriodicProfile curvature(const PeriodicProfile& f) {
    const PeriodicProfile in[] = {f.derivative(1), f.derivative(2)};
    return dealiased_apply(in, [](std::span<const double> v) {
        const double fp = v[0], fpp = v[1];
        return fpp / std::pow(1.0 + fp * fp, 1.5);
    });
}

std::pair<double, double> transform_point(const PeriodicProfile& f, double x, double y,
                                          MapDirection direction) {
    if (y < -1.0 - 1e-14 || y > 1.0 + 1e-14)
        throw DomainError("transform_point: y outside [-1, 1]");
    const double fx = f.interp(x);
    if (direction == MapDirection::Forward) return {x, y + (1.0 - y * y) * fx};
    if (!(f.sup_norm() < 0.5))
        throw DomainError("transform_point: inverse requires sup|f| < 1/2");
    const double disc = 1.0 - 4.0 * y * fx + 4.0 * fx * fx;
    if (disc < 0.0) throw DomainError("transform_point: inverse square root failed");
    return {x, 2.0 * (y - fx) / (1.0 + std::sqrt(disc))};
}

std::pair<Field2D, Field2D> transformed_gradient(const PeriodicProfile& f, const Field2D& v,
                                                 const ExecPolicy& policy) {
    const Grid& g = v.grid();
    if (f.size() != g.nx()) throw DomainError("transformed_gradient: profile/grid size mismatch");
    Field2D vx(v.grid_ptr()), vy(v.grid_ptr());
    field_dx(v, vx, policy);
    field_dy(v, vy, policy);
    const PeriodicProfile df = f.derivative(1);
    Field2D gx(v.grid_ptr()), gy(v.grid_ptr());
    for (int ix = 0; ix < g.nx(); ++ix) {
        const double fx = f.value(ix), dfx = df.value(ix);
        for (int iy = 0; iy < g.ny(); ++iy) {
            const double y = g.y(iy);
            const double denom = 1.0 - 2.0 * y * fx;
            gx.at(ix, iy) = vx.at(ix, iy) + dfx * (y * y - 1.0) / denom * vy.at(ix, iy);
            gy.at(ix, iy) = vy.at(ix, iy) / denom;
        }
    }
    return {std::move(gx), std::move(gy)};
}

InterfaceNormal normal_and_velocity(const PeriodicProfile& f, const PeriodicProfile& F) {
    if (f.size() != F.size()) throw DomainError("normal_and_velocity: size mismatch");
    const PeriodicProfile df = f.derivative(1);
    const int n = f.size();
    std::vector<double> nx(static_cast<size_t>(n)), ny(static_cast<size_t>(n)), sp(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double d = df.value(j);
        const double len = std::sqrt(1.0 + d * d);
        nx[static_cast<size_t>(j)] = -d / len;
        ny[static_cast<size_t>(j)] = 1.0 / len;
        sp[static_cast<size_t>(j)] = F.value(j) / len;
    }
    return {PeriodicProfile(std::move(nx)), PeriodicProfile(std::move(ny)),
            PeriodicProfile(std::move(sp))};
}

TransformFactors transform_factors(std::shared_ptr<const Grid> grid, const PeriodicProfile& f) {
    const Grid& g = *grid;
    if (f.size() != g.nx()) throw DomainError("transform_factors: profile/grid size mismatch");
    TransformFactors tf{Field2D(grid), Field2D(grid), Field2D(grid), Field2D(grid), Field2D(grid),
                        f, f.derivative(1), f.derivative(2)};
    for (int ix = 0; ix < g.nx(); ++ix) {
        const double fx = tf.f.value(ix);
        const double fp = tf.df.value(ix);
        const double fpp = tf.ddf.value(ix);
        for (int iy = 0; iy < g.ny(); ++iy) {
            const double y = g.y(iy);
            const double d = 1.0 - 2.0 * y * fx;
            if (!(d > 0.0))
                throw DomainError("transform_factors: 1 - 2yf must stay positive (f outside U?)");
            const double d2 = d * d, d3 = d2 * d;
            const double ym = y * y - 1.0;
            tf.alpha.at(ix, iy) = fp * ym / d;
            tf.beta.at(ix, iy) = 1.0 / d;
            tf.drift_a.at(ix, iy) =
                fpp * ym / d + 4.0 * fp * fp * y * ym / d2 + 2.0 * fx * fp * fp * ym * ym / d3;
            tf.drift_b.at(ix, iy) = (4.0 * fp * y - 4.0 * fx * fp * (1.0 + y * y)) / d3;
            tf.drift_c.at(ix, iy) = 2.0 * fx / d3;
        }
    }
    return tf;
}

} // namespace mudflow
