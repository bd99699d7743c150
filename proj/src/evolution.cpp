#include "mudflow/evolution.hpp"

#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mudflow {

void ModelParams::validate() const {
    if (!(mu_w > 0.0)) throw DomainError("params: mu_w must be positive");
    if (!(rho_w > 0.0) || !(rho_m > 0.0)) throw DomainError("params: densities must be positive");
    if (!(g > 0.0)) throw DomainError("params: g must be positive");
    if (gamma < 0.0) throw DomainError("params: gamma must be nonnegative");
}

SymbolPair linearized_symbols(int k, const ModelParams& params) {
    if (k == 0) throw DomainError("linearized_symbols: k = 0 excluded (mean-zero spaces)");
    const double th = std::tanh(static_cast<double>(std::abs(k)));
    const double mu_m0 = params.ev.mu_m0();
    const double m_k = 1.0 + params.mu_w / mu_m0 * th * th;
    const double lambda_k = std::abs(k) * th *
                            (params.g * (params.rho_w - params.rho_m) -
                             static_cast<double>(k) * k * params.gamma) /
                            (mu_m0 + params.mu_w * th * th);
    return {m_k, lambda_k};
}

BoundaryData BoundaryData::constant(double value) {
    BoundaryData b;
    b.form_ = Form::Constant;
    b.mean_ = value;
    return b;
}

BoundaryData BoundaryData::sinusoids(double mean, std::vector<SinusoidTerm> terms) {
    BoundaryData b;
    b.form_ = Form::Sinusoids;
    b.mean_ = mean;
    b.terms_ = std::move(terms);
    return b;
}

BoundaryData BoundaryData::table(std::vector<double> times, std::vector<std::vector<double>> nodal) {
    if (times.size() < 2 || times.size() != nodal.size())
        throw DomainError("boundary table: need matching times and profiles, at least two rows");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("boundary table: times must increase");
    BoundaryData b;
    b.form_ = Form::Table;
    b.times_ = std::move(times);
    b.nodal_ = std::move(nodal);
    return b;
}

PeriodicProfile BoundaryData::evaluate(double t, int n) const {
    switch (form_) {
    case Form::Constant:
        return PeriodicProfile::constant(n, mean_);
    case Form::Sinusoids: {
        std::vector<double> v(static_cast<size_t>(n), mean_);
        for (const SinusoidTerm& term : terms_) {
            const double a = term.amp * std::cos(term.omega * t + term.time_phase);
            for (int j = 0; j < n; ++j) {
                const double x = 2.0 * std::numbers::pi * j / n;
                v[static_cast<size_t>(j)] += a * std::cos(term.k * x + term.phase);
            }
        }
        return PeriodicProfile(std::move(v));
    }
    case Form::Table: {
        if (static_cast<int>(nodal_.front().size()) != n)
            throw DomainError("boundary table: profile length does not match the grid");
        if (t <= times_.front()) return PeriodicProfile(nodal_.front());
        if (t >= times_.back()) return PeriodicProfile(nodal_.back());
        size_t i = 1;
        while (times_[i] < t) ++i;
        const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
        std::vector<double> v(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j)
            v[static_cast<size_t>(j)] = (1.0 - w) * nodal_[i - 1][static_cast<size_t>(j)] +
                                        w * nodal_[i][static_cast<size_t>(j)];
        return PeriodicProfile(std::move(v));
    }
    }
    throw NumericError("boundary data: unreachable");
}

InterfaceOperator::InterfaceOperator(GridSpec sizes, ModelParams params, SolverTolerances tol,
                                     ExecPolicy policy)
    : sizes_(sizes), params_(std::move(params)), tol_(tol), policy_(policy),
      water_grid_(make_grid(sizes.nx, sizes.ny_water, DomainTag::Water)),
      mud_grid_(make_grid(sizes.nx, sizes.ny_mud, DomainTag::Mud)),
      water_(water_grid_, params_.mu_w, policy, tol.water_refine_target),
      mud_(mud_grid_, params_.ev, policy, tol.mud) {
    params_.validate();
}

PeriodicProfile InterfaceOperator::evaluate(const PeriodicProfile& h, const PeriodicProfile& f,
                                            const PeriodicProfile& F) {
    if (f.size() != sizes_.nx || F.size() != sizes_.nx || h.size() != sizes_.nx)
        throw DomainError("InterfaceOperator::evaluate: profile size mismatch");
    const AdmissibilityReport adm = validate_profile(f);
    if (!adm.in_U) throw DomainError("InterfaceOperator::evaluate: f leaves the admissible set");

    const WaterSolve ws = water_.solve(f, -1.0 * F, h);
    last_water_residual_ = ws.residual_inf;

    PeriodicProfile p = trace(ws.v, Edge::Interface);
    if (params_.gamma > 0.0) p -= params_.gamma * curvature(f);
    p += params_.g * (params_.rho_m - params_.rho_w) * f;

    const MudSolve ms = mud_.solve(f, p, mud_guess_ ? &*mud_guess_ : nullptr);
    mud_guess_ = ms.v;
    last_mud_residual_ = ms.residual_inf;
    last_mud_iterations_ = ms.iterations;
    worst_max_principle_ = std::max(worst_max_principle_, ms.max_principle_violation);
    last_water_ = ws.v;
    last_mud_ = ms.v;

    return F + mud_boundary_flux(f, ms.v, params_.ev, policy_);
}

PeriodicProfile InterfaceOperator::apply_flat_preconditioner(const PeriodicProfile& r) const {
    const int n = r.size();
    std::vector<std::complex<double>> c = r.spectrum();
    c[0] = 0.0; // mean mode excluded
    for (int k = 1; k < n; ++k) {
        const int m = dft::signed_frequency(k, n);
        if (m == 0) continue;
        const double th = std::tanh(static_cast<double>(std::abs(m)));
        c[static_cast<size_t>(k)] /= 1.0 + params_.mu_w / params_.ev.mu_m0() * th * th;
    }
    return PeriodicProfile(dft::synthesize(c));
}

namespace {

Eigen::VectorXd to_vec(const PeriodicProfile& p) {
    Eigen::VectorXd v(p.size());
    for (int i = 0; i < p.size(); ++i) v[i] = p.value(i);
    return v;
}

PeriodicProfile to_profile(const Eigen::VectorXd& v) {
    return PeriodicProfile(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Plain GMRES without restart; returns the iterate once the relative
/// residual passes rtol or the Krylov dimension is exhausted.
struct GmresResult {
    Eigen::VectorXd x;
    double rel_residual = 1.0;
    int iterations = 0;
};
GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                  const Eigen::VectorXd& b, double rtol, int max_dim) {
    GmresResult out;
    const double beta = b.norm();
    out.x = Eigen::VectorXd::Zero(b.size());
    if (beta == 0.0) {
        out.rel_residual = 0.0;
        return out;
    }
    std::vector<Eigen::VectorXd> basis;
    basis.push_back(b / beta);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(max_dim + 1, max_dim);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(max_dim);
    Eigen::VectorXd sn = Eigen::VectorXd::Zero(max_dim);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(max_dim + 1);
    g[0] = beta;
    int j = 0;
    for (; j < max_dim; ++j) {
        Eigen::VectorXd w = matvec(basis[static_cast<size_t>(j)]);
        for (int i = 0; i <= j; ++i) { // modified Gram-Schmidt with one refresh
            const double h = w.dot(basis[static_cast<size_t>(i)]);
            hess(i, j) += h;
            w -= h * basis[static_cast<size_t>(i)];
        }
        for (int i = 0; i <= j; ++i) {
            const double h = w.dot(basis[static_cast<size_t>(i)]);
            hess(i, j) += h;
            w -= h * basis[static_cast<size_t>(i)];
        }
        const double wnorm = w.norm();
        hess(j + 1, j) = wnorm;
        if (wnorm > 0.0) basis.push_back(w / wnorm);
        for (int i = 0; i < j; ++i) {
            const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
            hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
            hess(i, j) = t;
        }
        const double denom = std::hypot(hess(j, j), hess(j + 1, j));
        if (denom == 0.0) {
            ++j;
            break;
        }
        cs[j] = hess(j, j) / denom;
        sn[j] = hess(j + 1, j) / denom;
        hess(j, j) = denom;
        hess(j + 1, j) = 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] = cs[j] * g[j];
        out.rel_residual = std::abs(g[j + 1]) / beta;
        if (out.rel_residual <= rtol || wnorm == 0.0) {
            ++j;
            break;
        }
    }
    out.iterations = j;
    if (j > 0) {
        Eigen::VectorXd y =
            hess.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        for (int i = 0; i < j; ++i) out.x += y[i] * basis[static_cast<size_t>(i)];
    }
    return out;
}

} // namespace

VelocityResult InterfaceOperator::solve_velocity(const PeriodicProfile& h, const PeriodicProfile& f,
                                                 const PeriodicProfile& guess,
                                                 bool probe_uniqueness,
                                                 std::vector<PeriodicProfile> probe_offsets) {
    worst_max_principle_ = 0.0;
    VelocityResult out;
    PeriodicProfile F = guess.empty() ? PeriodicProfile::zeros(sizes_.nx) : guess.with_zero_mean();

    PeriodicProfile raw = evaluate(h, f, F);
    ++out.evaluations;
    PeriodicProfile r = raw.with_zero_mean();
    double rnorm = r.sup_norm();
    out.mean_flux = raw.mean();

    const double tol = tol_.velocity_residual;
    std::vector<double> history{rnorm};

    while (rnorm > tol) {
        if (out.newton_iterations >= tol_.newton_max_iterations) {
            std::ostringstream msg;
            msg << "solve_velocity: no convergence after " << out.newton_iterations
                << " Newton iterations; residual history:";
            for (double v : history) msg << " " << v;
            throw NumericError(msg.str());
        }
        const double F2 = to_vec(F).norm();

        // Jacobian-free directional derivative of the residual at F
        const auto jacvec = [&](const Eigen::VectorXd& w) {
            const double wn = w.norm();
            const double eps = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + F2) /
                               (wn > 0.0 ? wn : 1.0);
            const PeriodicProfile shifted = F + eps * to_profile(w);
            const PeriodicProfile pert = evaluate(h, f, shifted);
            ++out.evaluations;
            return (to_vec(pert) - to_vec(raw)) / eps;
        };
        // right preconditioning with the flat-state multiplier
        const auto matvec = [&](const Eigen::VectorXd& w) {
            const PeriodicProfile pw = apply_flat_preconditioner(to_profile(w)).with_zero_mean();
            Eigen::VectorXd jv = jacvec(to_vec(pw));
            return to_vec(to_profile(jv).with_zero_mean());
        };

        const GmresResult gm = gmres(matvec, -to_vec(r), tol_.gmres_rtol, tol_.gmres_max_dim);
        PeriodicProfile direction =
            apply_flat_preconditioner(to_profile(gm.x)).with_zero_mean();

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) // fallback: preconditioned residual direction
                direction = -1.0 * apply_flat_preconditioner(r).with_zero_mean();
            double lambda = 1.0;
            for (int ls = 0; ls < 6; ++ls) {
                const PeriodicProfile cand = (F + lambda * direction).with_zero_mean();
                const PeriodicProfile cand_raw = evaluate(h, f, cand);
                ++out.evaluations;
                const PeriodicProfile cand_r = cand_raw.with_zero_mean();
                const double cn = cand_r.sup_norm();
                if (cn < rnorm) {
                    F = cand;
                    raw = cand_raw;
                    r = cand_r;
                    rnorm = cn;
                    out.mean_flux = cand_raw.mean();
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
        }
        ++out.newton_iterations;
        history.push_back(rnorm);
        if (!accepted) {
            std::ostringstream msg;
            msg << "solve_velocity: line search stalled at residual " << rnorm;
            throw NumericError(msg.str());
        }
        if (!F.all_finite() || F.sup_norm() > 1e6)
            throw NumericError("solve_velocity: iterates diverging");
    }

    out.F = F;
    out.residual = rnorm;
    out.water_residual = last_water_residual_;
    out.mud_residual = last_mud_residual_;
    out.mud_iterations = last_mud_iterations_;
    out.max_principle_violation = worst_max_principle_;

    if (probe_uniqueness) {
        if (probe_offsets.empty())
            probe_offsets.push_back(PeriodicProfile::harmonic(sizes_.nx, 1, 0.1));
        std::vector<PeriodicProfile> roots{F};
        for (const PeriodicProfile& off : probe_offsets) {
            VelocityResult probe = solve_velocity(h, f, F + off, false);
            out.evaluations += probe.evaluations;
            roots.push_back(probe.F);
        }
        double gap = 0.0;
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                gap = std::max(gap, sup_distance(roots[i], roots[j]));
        out.uniqueness_gap = gap;
        out.max_principle_violation = std::max(out.max_principle_violation, worst_max_principle_);
    }
    return out;
}

namespace {

double phi1(double z) {
    if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
    return std::expm1(z) / z;
}

void check_guards(const PeriodicProfile& f, const PeriodicProfile& F, const StepOptions& opt) {
    if (f.sup_norm() >= opt.guard_sup_f) {
        std::ostringstream msg;
        msg << "interface guard breached: sup|f| = " << f.sup_norm() << " >= " << opt.guard_sup_f;
        throw GuardBreachError(msg.str());
    }
    if (!F.empty() && F.sup_norm() >= opt.guard_sup_F)
        throw GuardBreachError("velocity guard breached");
}

} // namespace

StepResult step(InterfaceOperator& op, const SimState& state, const BoundaryData& h, double dt,
                const StepOptions& options) {
    if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
    const int n = state.f.size();
    if (std::abs(state.f.mean()) > 1e-12) throw DomainError("step: f must have zero mean");
    check_guards(state.f, PeriodicProfile(), options);

    StepDiagnostics diag;
    diag.dt = dt;
    diag.t = state.t + dt;

    SimState next;
    next.t = state.t + dt;

    if (options.scheme == Scheme::SemiImplicit) {
        const PeriodicProfile ht = h.evaluate(state.t, n);
        const VelocityResult vr = op.solve_velocity(ht, state.f, state.F,
                                                    options.probe_uniqueness,
                                                    options.probe_offsets);
        diag.newton_iterations = vr.newton_iterations;
        diag.velocity_residual = vr.residual;
        diag.mean_flux = vr.mean_flux;
        diag.mud_iterations = vr.mud_iterations;
        diag.water_residual = vr.water_residual;
        diag.mud_residual = vr.mud_residual;
        diag.max_principle_violation = vr.max_principle_violation;
        diag.uniqueness_gap = vr.uniqueness_gap;

        // exact integrating factor on the linear symbol, explicit remainder
        std::vector<std::complex<double>> fc = state.f.spectrum();
        const std::vector<std::complex<double>>& pc = vr.F.spectrum();
        for (int k = 0; k < n; ++k) {
            const int m = dft::signed_frequency(k, n);
            if (m == 0) {
                fc[static_cast<size_t>(k)] = 0.0;
                continue;
            }
            const double lam = linearized_symbols(m, op.params()).lambda_k;
            const std::complex<double> remainder =
                pc[static_cast<size_t>(k)] - lam * fc[static_cast<size_t>(k)];
            fc[static_cast<size_t>(k)] = std::exp(lam * dt) * fc[static_cast<size_t>(k)] +
                                         dt * phi1(lam * dt) * remainder;
        }
        next.f = PeriodicProfile(dft::synthesize(fc)).with_zero_mean();
        next.F = vr.F;
        next.water_potential = op.last_water();
        next.mud_potential = op.last_mud();
    } else {
        // classic RK4 on Phi, mean projection at every stage
        PeriodicProfile guess = state.F;
        const auto stage = [&](double tau, const PeriodicProfile& fs) {
            check_guards(fs, PeriodicProfile(), options);
            const VelocityResult vr =
                op.solve_velocity(h.evaluate(tau, n), fs.with_zero_mean(), guess, false);
            guess = vr.F;
            diag.newton_iterations += vr.newton_iterations;
            diag.velocity_residual = std::max(diag.velocity_residual, vr.residual);
            diag.mean_flux = std::max(diag.mean_flux, std::abs(vr.mean_flux));
            diag.mud_iterations += vr.mud_iterations;
            diag.water_residual = std::max(diag.water_residual, vr.water_residual);
            diag.mud_residual = std::max(diag.mud_residual, vr.mud_residual);
            diag.max_principle_violation =
                std::max(diag.max_principle_violation, vr.max_principle_violation);
            return vr.F;
        };
        const PeriodicProfile k1 = stage(state.t, state.f);
        const PeriodicProfile k2 = stage(state.t + 0.5 * dt, state.f + (0.5 * dt) * k1);
        const PeriodicProfile k3 = stage(state.t + 0.5 * dt, state.f + (0.5 * dt) * k2);
        const PeriodicProfile k4 = stage(state.t + dt, state.f + dt * k3);
        next.f = (state.f + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).with_zero_mean();
        next.F = k1;
        diag.uniqueness_gap = -1.0;
        next.water_potential = op.last_water();
        next.mud_potential = op.last_mud();
    }

    check_guards(next.f, next.F, options);
    diag.mean_f = next.f.mean();
    diag.sup_f = next.f.sup_norm();
    diag.sup_F = next.F.sup_norm();
    return {std::move(next), diag};
}

TrajectorySample sample_state(const SimState& state) {
    const int n = state.f.size();
    TrajectorySample s;
    s.t = state.t;
    s.modes.reserve(static_cast<size_t>(n / 2 + 1));
    for (int k = 0; k <= n / 2; ++k) s.modes.push_back(state.f.mode(k));
    return s;
}

double dispersion_fit(const Trajectory& traj, int k, double noise_floor) {
    if (k < 0 || traj.samples.empty() || k >= static_cast<int>(traj.samples.front().modes.size()))
        throw DomainError("dispersion_fit: mode index out of range");
    std::vector<double> ts, ys;
    for (const TrajectorySample& s : traj.samples) {
        const double a = std::abs(s.modes[static_cast<size_t>(k)]);
        if (a > noise_floor) {
            ts.push_back(s.t);
            ys.push_back(std::log(a));
        }
    }
    if (ts.size() < 3)
        throw NumericError("dispersion_fit: amplitude below the noise floor for most samples");
    const size_t m = ts.size();
    double tbar = 0.0, ybar = 0.0;
    for (size_t i = 0; i < m; ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < m; ++i) {
        num += (ts[i] - tbar) * (ys[i] - ybar);
        den += (ts[i] - tbar) * (ts[i] - tbar);
    }
    if (den == 0.0) throw NumericError("dispersion_fit: degenerate time samples");
    return num / den;
}

DarcyFields darcy_postprocess(const SimState& state, const ModelParams& params,
                              const ExecPolicy& policy) {
    if (!state.water_potential || !state.mud_potential)
        throw DomainError("darcy_postprocess: state has no cached potential fields");
    const Field2D& vw = *state.water_potential;
    const Field2D& vm = *state.mud_potential;
    const PeriodicProfile& f = state.f;

    DarcyFields out{Field2D(vw.grid_ptr()), Field2D(vw.grid_ptr()), Field2D(vw.grid_ptr()),
                    Field2D(vw.grid_ptr()), Field2D(vm.grid_ptr()), Field2D(vm.grid_ptr()),
                    Field2D(vm.grid_ptr()), Field2D(vm.grid_ptr()), 0.0, 0.0};

    const auto physical_height = [&f](const Grid& g, int ix, int iy) {
        const double y = g.y(iy);
        return y + (1.0 - y * y) * f.value(ix);
    };

    {
        const Grid& g = vw.grid();
        const auto [gx, gy] = transformed_gradient(f, vw, policy);
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 0; iy < g.ny(); ++iy) {
                out.water_vel_x.at(ix, iy) = -gx.at(ix, iy) / params.mu_w;
                out.water_vel_y.at(ix, iy) = -gy.at(ix, iy) / params.mu_w;
                const double yp = physical_height(g, ix, iy);
                out.water_y.at(ix, iy) = yp;
                out.water_pressure.at(ix, iy) = vw.at(ix, iy) - params.g * params.rho_w * yp;
            }
        const Field2D div = apply_water_operator(f, vw, policy);
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 1; iy < g.ny() - 1; ++iy)
                out.water_divergence =
                    std::max(out.water_divergence, std::abs(div.at(ix, iy)) / params.mu_w);
    }
    {
        const Grid& g = vm.grid();
        const auto [gx, gy] = transformed_gradient(f, vm, policy);
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 0; iy < g.ny(); ++iy) {
                const double zx = gx.at(ix, iy), zy = gy.at(ix, iy);
                const double mu = params.ev.eval(zx * zx + zy * zy).first;
                out.mud_vel_x.at(ix, iy) = -zx / mu;
                out.mud_vel_y.at(ix, iy) = -zy / mu;
                const double yp = physical_height(g, ix, iy);
                out.mud_y.at(ix, iy) = yp;
                out.mud_pressure.at(ix, iy) = vm.at(ix, iy) - params.g * params.rho_m * yp;
            }
        const Field2D div = apply_mud_operator(f, vm, params.ev, policy);
        for (int ix = 0; ix < g.nx(); ++ix)
            for (int iy = 1; iy < g.ny() - 1; ++iy)
                out.mud_divergence = std::max(out.mud_divergence, std::abs(div.at(ix, iy)));
    }
    return out;
}

} // namespace mudflow
