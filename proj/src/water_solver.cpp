#include "mudflow/water_solver.hpp"

#include "elliptic_common.hpp"
#include "mudflow/errors.hpp"
#include "mudflow/kernels.hpp"

#include <cmath>
#include <optional>

namespace mudflow {

namespace {

struct WaterCoeffs {
    Field2D cxy, cyy, cy;
    explicit WaterCoeffs(const TransformFactors& tf)
        : cxy(tf.alpha.grid_ptr()), cyy(tf.alpha.grid_ptr()), cy(tf.alpha.grid_ptr()) {
        const size_t n = tf.alpha.data().size();
        for (size_t i = 0; i < n; ++i) {
            const double a = tf.alpha.data()[i];
            const double b = tf.beta.data()[i];
            cxy.data()[i] = a;
            cyy.data()[i] = a * a + b * b;
            cy.data()[i] = tf.drift_a.data()[i] + tf.drift_c.data()[i];
        }
    }
    detail::SecondOrderCoeffs view() const {
        return {nullptr, cxy.data().data(), cyy.data().data(), cy.data().data()};
    }
};

} // namespace

Field2D apply_water_operator(const PeriodicProfile& f, const Field2D& v, const ExecPolicy& policy) {
    const TransformFactors tf = transform_factors(v.grid_ptr(), f);
    const WaterCoeffs wc(tf);
    Field2D out(v.grid_ptr());
    detail::apply_second_order(wc.view(), v, out, policy);
    return out;
}

PeriodicProfile water_boundary_flux(const PeriodicProfile& f, const Field2D& v, double mu_w,
                                    const ExecPolicy& policy) {
    const Grid& g = v.grid();
    if (g.domain() != DomainTag::Water) throw DomainError("water_boundary_flux: water grid required");
    Field2D vx(v.grid_ptr()), vy(v.grid_ptr());
    field_dx(v, vx, policy);
    field_dy(v, vy, policy);
    const PeriodicProfile tx = trace(vx, Edge::Interface);
    const PeriodicProfile ty = trace(vy, Edge::Interface);
    const PeriodicProfile df = f.derivative(1);
    std::vector<double> out(static_cast<size_t>(g.nx()));
    for (int ix = 0; ix < g.nx(); ++ix) {
        const double fp = df.value(ix);
        out[static_cast<size_t>(ix)] =
            ((1.0 + fp * fp) * ty.value(ix) - fp * tx.value(ix)) / mu_w;
    }
    return PeriodicProfile(std::move(out));
}

struct WaterSolver::Impl {
    detail::RefinedLU lu;
    std::optional<PeriodicProfile> cached_f;
    std::optional<TransformFactors> factors;
    std::optional<WaterCoeffs> coeffs;
    double rcond = 0.0;
};

WaterSolver::WaterSolver(std::shared_ptr<const Grid> grid, double mu_w, ExecPolicy policy,
                         double refine_target)
    : grid_(std::move(grid)), mu_w_(mu_w), policy_(policy), refine_target_(refine_target),
      impl_(std::make_unique<Impl>()) {
    if (grid_->domain() != DomainTag::Water) throw DomainError("WaterSolver: water grid required");
    if (!(mu_w > 0.0)) throw DomainError("WaterSolver: mu_w must be positive");
}

WaterSolver::~WaterSolver() = default;
WaterSolver::WaterSolver(WaterSolver&&) noexcept = default;
WaterSolver& WaterSolver::operator=(WaterSolver&&) noexcept = default;

void WaterSolver::invalidate_cache() {
    impl_->lu.invalidate();
    impl_->cached_f.reset();
    impl_->factors.reset();
    impl_->coeffs.reset();
}

WaterSolve WaterSolver::solve(const PeriodicProfile& f, const PeriodicProfile& F,
                              const PeriodicProfile& h) {
    const Grid& g = *grid_;
    const int nx = g.nx(), ny = g.ny(), n = g.size();
    if (f.size() != nx || F.size() != nx || h.size() != nx)
        throw DomainError("WaterSolver::solve: profile size mismatch");
    if (!F.all_finite() || !h.all_finite()) throw DomainError("WaterSolver::solve: non-finite data");

    Impl& im = *impl_;
    const bool same_f =
        im.cached_f && sup_distance(*im.cached_f, f) == 0.0;
    if (!same_f) {
        im.factors.emplace(transform_factors(grid_, f));
        im.coeffs.emplace(*im.factors);
        im.cached_f = f;
    }
    const TransformFactors& tf = *im.factors;
    const PeriodicProfile& df = tf.df;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int ix = 0; ix < nx; ++ix) {
        rhs[g.index(ix, 0)] = F.value(ix);          // interface flux row
        rhs[g.index(ix, ny - 1)] = h.value(ix);     // Dirichlet top row
    }

    // full residual of the current system at a candidate solution
    const auto residual_fn = [&](const Eigen::VectorXd& cand) {
        Field2D v(grid_);
        for (int i = 0; i < n; ++i) v.data()[static_cast<size_t>(i)] = cand[i];
        Field2D lv(grid_);
        detail::apply_second_order(im.coeffs->view(), v, lv, policy_);
        const PeriodicProfile flux = water_boundary_flux(f, v, mu_w_, policy_);
        Eigen::VectorXd r(n);
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy) {
                const int row = g.index(ix, iy);
                if (iy == 0) r[row] = flux.value(ix) - F.value(ix);
                else if (iy == ny - 1) r[row] = v.at(ix, iy) - h.value(ix);
                else r[row] = lv.at(ix, iy);
            }
        return r;
    };

    const auto assemble_and_factor = [&]() {
        Eigen::MatrixXd m;
        detail::assemble_second_order(g, im.coeffs->view(), m, policy_);
        const Eigen::MatrixXd& d1x = g.dx1();
        const Eigen::MatrixXd& d1y = g.dy1();
        for (int ix = 0; ix < nx; ++ix) {
            const int flux_row = g.index(ix, 0);
            const double fp = df.value(ix);
            for (int jy = 0; jy < ny; ++jy)
                m(flux_row, g.index(ix, jy)) += (1.0 + fp * fp) / mu_w_ * d1y(0, jy);
            for (int jx = 0; jx < nx; ++jx)
                m(flux_row, g.index(jx, 0)) += -fp / mu_w_ * d1x(ix, jx);
            const int top_row = g.index(ix, ny - 1);
            m(top_row, top_row) = 1.0;
        }
        im.lu.factor(m);
        im.rcond = im.lu.rcond();
        ++factorizations_;
    };

    const double scale = F.sup_norm() + h.sup_norm();
    const double target = refine_target_ * scale;

    if (!im.lu.valid()) assemble_and_factor();
    auto result = im.lu.solve(rhs, residual_fn, target, 3);
    bool refactored = false;
    if (!result.converged) {
        assemble_and_factor();
        refactored = true;
        result = im.lu.solve(rhs, residual_fn, target, 3);
    }

    WaterSolve out{Field2D(grid_), 0.0, 0.0, result.refinements, refactored, im.rcond};
    for (int i = 0; i < n; ++i) out.v.data()[static_cast<size_t>(i)] = result.v[i];
    if (!out.v.all_finite())
        throw NumericError("WaterSolver::solve: non-finite solution (singular system?)");
    const Eigen::VectorXd r = residual_fn(result.v);
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy) {
            const double a = std::abs(r[g.index(ix, iy)]);
            if (g.is_boundary_row(iy)) out.bc_residual_inf = std::max(out.bc_residual_inf, a);
            else out.residual_inf = std::max(out.residual_inf, a);
        }
    return out;
}

} // namespace mudflow
