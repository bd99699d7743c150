#include "mudflow/mud_solver.hpp"

#include "elliptic_common.hpp"
#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"
#include "mudflow/kernels.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace mudflow {

GradientCoeffs gradient_coefficients(const EffectiveViscosity& ev, double zx, double zy) {
    const double r = zx * zx + zy * zy;
    const auto [mu, dmu] = ev.eval(r);
    const double inv = 1.0 / mu;
    const double q = 2.0 * dmu / (mu * mu);
    return {inv - q * zx * zx, -q * zx * zy, inv - q * zy * zy, inv, inv - q * r};
}

QuasilinearCoeffs quasilinear_coefficients(const TransformFactors& tf, const Field2D& grad_x,
                                           const Field2D& grad_y, const EffectiveViscosity& ev,
                                           const ExecPolicy& policy) {
    const auto gp = grad_x.grid_ptr();
    QuasilinearCoeffs qc{Field2D(gp), Field2D(gp), Field2D(gp),
                         Field2D(gp), Field2D(gp), Field2D(gp)};
    CoefficientBatch batch{
        tf.alpha.data(), tf.beta.data(),   tf.drift_a.data(), tf.drift_b.data(),
        tf.drift_c.data(), grad_x.data(),  grad_y.data(),     qc.b11.data(),
        qc.b12.data(),     qc.b22.data(),  qc.b.data(),       qc.lam1.data(),
        qc.lam2.data()};
    quasilinear_coefficient_batch(ev, batch, policy);
    return qc;
}

Field2D apply_mud_operator(const PeriodicProfile& f, const Field2D& v, const EffectiveViscosity& ev,
                           const ExecPolicy& policy) {
    const TransformFactors tf = transform_factors(v.grid_ptr(), f);
    const auto [gx, gy] = transformed_gradient(f, v, policy);
    const QuasilinearCoeffs qc = quasilinear_coefficients(tf, gx, gy, ev, policy);
    Field2D out(v.grid_ptr());
    const detail::SecondOrderCoeffs c{qc.b11.data().data(), qc.b12.data().data(),
                                      qc.b22.data().data(), qc.b.data().data()};
    detail::apply_second_order(c, v, out, policy);
    return out;
}

PeriodicProfile mud_boundary_flux(const PeriodicProfile& f, const Field2D& v,
                                  const EffectiveViscosity& ev, const ExecPolicy& policy) {
    const Grid& g = v.grid();
    if (g.domain() != DomainTag::Mud) throw DomainError("mud_boundary_flux: mud grid required");
    Field2D vx(v.grid_ptr()), vy(v.grid_ptr());
    field_dx(v, vx, policy);
    field_dy(v, vy, policy);
    const PeriodicProfile tx = trace(vx, Edge::Interface);
    const PeriodicProfile ty = trace(vy, Edge::Interface);
    const PeriodicProfile df = f.derivative(1);
    std::vector<double> out(static_cast<size_t>(g.nx()));
    for (int ix = 0; ix < g.nx(); ++ix) {
        const double fp = df.value(ix);
        const double gx = tx.value(ix) - fp * ty.value(ix); // trace of grad_f v
        const double gy = ty.value(ix);
        const double mu = ev.eval(gx * gx + gy * gy).first;
        out[static_cast<size_t>(ix)] = ((1.0 + fp * fp) * ty.value(ix) - fp * tx.value(ix)) / mu;
    }
    return PeriodicProfile(std::move(out));
}

MaxPrincipleReport max_principle_check(const Field2D& v, double tol) {
    const Grid& g = v.grid();
    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    double imin = std::numeric_limits<double>::infinity(), imax = -imin;
    for (int ix = 0; ix < g.nx(); ++ix)
        for (int iy = 0; iy < g.ny(); ++iy) {
            const double val = v.at(ix, iy);
            if (g.is_boundary_row(iy)) {
                bmin = std::min(bmin, val);
                bmax = std::max(bmax, val);
            } else {
                imin = std::min(imin, val);
                imax = std::max(imax, val);
            }
        }
    MaxPrincipleReport rep;
    rep.violation = std::max({0.0, imax - bmax, bmin - imin});
    rep.pass = rep.violation <= tol;
    return rep;
}

Field2D mud_modal_guess(std::shared_ptr<const Grid> grid, const PeriodicProfile& p) {
    const Grid& g = *grid;
    if (g.domain() != DomainTag::Mud) throw DomainError("mud_modal_guess: mud grid required");
    const int nx = g.nx(), ny = g.ny();
    Field2D out(grid);
    const auto& spec = p.spectrum();
    std::vector<std::complex<double>> row(static_cast<size_t>(nx));
    for (int iy = 0; iy < ny; ++iy) {
        const double y = g.y(iy);
        for (int k = 0; k < nx; ++k) {
            const int m = std::abs(dft::signed_frequency(k, nx));
            // cosh(m(y+1))/cosh(m) in overflow-safe form, y in [-1, 0]
            const double ratio =
                (std::exp(m * y) + std::exp(-m * (y + 2.0))) / (1.0 + std::exp(-2.0 * m));
            row[static_cast<size_t>(k)] = spec[static_cast<size_t>(k)] * ratio;
        }
        const std::vector<double> vals = dft::synthesize(row);
        for (int ix = 0; ix < nx; ++ix) out.at(ix, iy) = vals[static_cast<size_t>(ix)];
    }
    return out;
}

struct MudSolver::Impl {
    detail::RefinedLU lu;
    std::optional<PeriodicProfile> cached_f;
    std::optional<TransformFactors> factors;
};

MudSolver::MudSolver(std::shared_ptr<const Grid> grid, EffectiveViscosity ev, ExecPolicy policy,
                     MudOptions options)
    : grid_(std::move(grid)), ev_(std::move(ev)), policy_(policy), options_(options),
      impl_(std::make_unique<Impl>()) {
    if (grid_->domain() != DomainTag::Mud) throw DomainError("MudSolver: mud grid required");
}

MudSolver::~MudSolver() = default;
MudSolver::MudSolver(MudSolver&&) noexcept = default;
MudSolver& MudSolver::operator=(MudSolver&&) noexcept = default;

void MudSolver::invalidate_cache() {
    impl_->lu.invalidate();
    impl_->cached_f.reset();
    impl_->factors.reset();
}

MudSolve MudSolver::solve(const PeriodicProfile& f, const PeriodicProfile& p,
                          const Field2D* guess) {
    const Grid& g = *grid_;
    const int nx = g.nx(), ny = g.ny(), n = g.size();
    if (f.size() != nx || p.size() != nx) throw DomainError("MudSolver::solve: profile size mismatch");
    if (!p.all_finite()) throw DomainError("MudSolver::solve: non-finite boundary data");

    Impl& im = *impl_;
    if (!im.cached_f || sup_distance(*im.cached_f, f) != 0.0) {
        im.factors.emplace(transform_factors(grid_, f));
        im.cached_f = f;
    }
    const TransformFactors& tf = *im.factors;

    Field2D v = (guess && &guess->grid() == &g) ? *guess : mud_modal_guess(grid_, p);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    const int irow = ny - 1; // interface at y=0
    for (int ix = 0; ix < nx; ++ix) rhs[g.index(ix, irow)] = p.value(ix);

    const double scale = std::max(1.0, p.sup_norm());
    const double lin_target = options_.linear_refine_target * scale;
    const double tol = options_.nonlinear_tol * scale;

    MudSolve out{Field2D(grid_), 0.0, 0, false, std::numeric_limits<double>::infinity(), 0.0, {}};

    // true nonlinear interior residual at the current iterate
    const auto nonlinear_residual = [&](const Field2D& cand) {
        const auto [gx, gy] = transformed_gradient(f, cand, policy_);
        const QuasilinearCoeffs qc = quasilinear_coefficients(tf, gx, gy, ev_, policy_);
        Field2D lv(grid_);
        const detail::SecondOrderCoeffs sc{qc.b11.data().data(), qc.b12.data().data(),
                                           qc.b22.data().data(), qc.b.data().data()};
        detail::apply_second_order(sc, cand, lv, policy_);
        double r = 0.0;
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 1; iy < ny - 1; ++iy) r = std::max(r, std::abs(lv.at(ix, iy)));
        return r;
    };

    double prev_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < options_.max_iterations; ++it) {
        // freeze coefficients at the current iterate
        const auto [gx, gy] = transformed_gradient(f, v, policy_);
        const QuasilinearCoeffs qc = quasilinear_coefficients(tf, gx, gy, ev_, policy_);
        double lmin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < qc.lam1.data().size(); ++i)
            lmin = std::min({lmin, qc.lam1.data()[i], qc.lam2.data()[i]});
        out.lam_min = std::min(out.lam_min, lmin);
        if (!(lmin > 0.0))
            throw NumericError("MudSolver::solve: lost uniform ellipticity (lambda <= 0)");
        const detail::SecondOrderCoeffs sc{qc.b11.data().data(), qc.b12.data().data(),
                                           qc.b22.data().data(), qc.b.data().data()};

        // residual of the frozen linear system
        const auto linear_residual = [&](const Eigen::VectorXd& cand) {
            Field2D w(grid_);
            for (int i = 0; i < n; ++i) w.data()[static_cast<size_t>(i)] = cand[i];
            Field2D lw(grid_);
            detail::apply_second_order(sc, w, lw, policy_);
            Field2D wy(grid_);
            field_dy(w, wy, policy_);
            Eigen::VectorXd r(n);
            for (int ix = 0; ix < nx; ++ix)
                for (int iy = 0; iy < ny; ++iy) {
                    const int row = g.index(ix, iy);
                    if (iy == irow) r[row] = w.at(ix, iy) - p.value(ix);
                    else if (iy == 0) r[row] = wy.at(ix, iy); // no flux at the bottom
                    else r[row] = lw.at(ix, iy);
                }
            return r;
        };

        const auto assemble_and_factor = [&]() {
            Eigen::MatrixXd m;
            detail::assemble_second_order(g, sc, m, policy_);
            const Eigen::MatrixXd& d1y = g.dy1();
            for (int ix = 0; ix < nx; ++ix) {
                const int drow = g.index(ix, irow);
                m(drow, drow) = 1.0;
                const int brow = g.index(ix, 0);
                for (int jy = 0; jy < ny; ++jy) m(brow, g.index(ix, jy)) = d1y(0, jy);
            }
            im.lu.factor(m);
            ++factorizations_;
        };

        if (!im.lu.valid()) assemble_and_factor();
        auto lsol = im.lu.solve(rhs, linear_residual, lin_target, options_.max_refinements);
        if (!lsol.converged) {
            assemble_and_factor();
            lsol = im.lu.solve(rhs, linear_residual, lin_target, options_.max_refinements);
        }
        ++out.iterations;

        Field2D v_new(grid_);
        for (int i = 0; i < n; ++i) v_new.data()[static_cast<size_t>(i)] = lsol.v[i];
        if (!v_new.all_finite()) throw NumericError("MudSolver::solve: non-finite linear solution");

        // damped update, halving when the true residual grows
        double omega = 1.0;
        Field2D cand = v_new;
        double res = nonlinear_residual(cand);
        while (res > prev_res && omega > 1.0 / 16.0) {
            omega *= 0.5;
            for (int i = 0; i < n; ++i)
                cand.data()[static_cast<size_t>(i)] =
                    v.data()[static_cast<size_t>(i)] +
                    omega * (v_new.data()[static_cast<size_t>(i)] - v.data()[static_cast<size_t>(i)]);
            res = nonlinear_residual(cand);
        }
        v = cand;
        out.residual_history.push_back(res);
        out.residual_inf = res;
        prev_res = res;
        if (res <= tol) {
            out.converged = true;
            break;
        }
    }

    if (!out.converged) {
        std::ostringstream msg;
        msg << "MudSolver::solve: no convergence after " << out.iterations
            << " iterations; residual history:";
        for (double r : out.residual_history) msg << " " << r;
        throw NumericError(msg.str());
    }

    out.v = v;
    out.max_principle_violation = max_principle_check(v, 0.0).violation;
    return out;
}

} // namespace mudflow
