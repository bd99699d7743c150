#include "mudflow/rheology.hpp"

#include "mudflow/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mudflow {

ViscosityModel ViscosityModel::newtonian(double mu0) {
    if (!(mu0 > 0.0)) throw DomainError("newtonian: mu0 must be positive");
    ViscosityModel m;
    m.kind_ = Kind::Newtonian;
    m.mu0_ = mu0;
    return m;
}

ViscosityModel ViscosityModel::hectorite(double mu_inf, double tau0, double beta) {
    if (!(mu_inf > 0.0) || !(tau0 > 0.0) || !(beta > 0.0))
        throw DomainError("hectorite: mu_inf, tau0, beta must be positive");
    ViscosityModel m;
    m.kind_ = Kind::Hectorite;
    m.mu_inf_ = mu_inf;
    m.tau0_ = tau0;
    m.beta_ = beta;
    return m;
}

bool ViscosityModel::admissible() const {
    if (kind_ == Kind::Newtonian) return true;
    return beta_ * tau0_ < 4.0 * mu_inf_;
}

std::pair<double, double> ViscosityModel::eval(double r) const {
    if (r < 0.0) throw DomainError("viscosity: shear-rate square must be nonnegative");
    if (kind_ == Kind::Newtonian) return {mu0_, 0.0};
    const double d = 1.0 + beta_ * r;
    return {mu_inf_ + tau0_ * beta_ / d, -tau0_ * beta_ * beta_ / (d * d)};
}

ConditionReport check_conditions(const ViscosityModel& model, double r_max, int n) {
    if (!(r_max > 0.0)) throw DomainError("check_conditions: r_max must be positive");
    if (n < 2) throw DomainError("check_conditions: need at least 2 samples");
    ConditionReport rep;
    rep.m_hat = std::numeric_limits<double>::infinity();
    rep.M_hat = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double r = r_max * i / (n - 1);
        const auto [mu, dmu] = model.eval(r);
        const double comb = mu + 2.0 * r * dmu;
        const double lo = std::min(mu, comb);
        const double hi = std::max(mu, comb);
        if (lo < rep.m_hat) {
            rep.m_hat = lo;
            rep.worst_r = r;
        }
        rep.M_hat = std::max(rep.M_hat, hi);
    }
    rep.ok = rep.m_hat > 0.0 && std::isfinite(rep.M_hat) && model.admissible();
    return rep;
}

double invert_shear(const ViscosityModel& model, double s, double tol) {
    if (s < 0.0) throw DomainError("invert_shear: s must be nonnegative");
    if (s == 0.0) return 0.0;
    if (model.is_newtonian()) return s / (model.mu0() * model.mu0());

    const auto g = [&model](double r) { return r * model.mu(r) * model.mu(r); };
    // expand a bracket; g is strictly increasing for admissible models
    double lo = 0.0;
    double hi = s / (model.mu(0.0) * model.mu(0.0));
    if (hi <= 0.0) hi = 1.0;
    int expansions = 0;
    while (g(hi) < s) {
        hi *= 2.0;
        if (++expansions > 200) throw NumericError("invert_shear: bracket expansion failed");
    }

    double r = std::min(hi, s / (model.mu(0.0) * model.mu(0.0)));
    for (int it = 0; it < 100; ++it) {
        const auto [mu, dmu] = model.eval(r);
        const double val = r * mu * mu;
        const double res = val - s;
        if (std::abs(res) <= tol * (1.0 + s)) return r;
        if (res > 0.0) hi = r;
        else lo = r;
        const double slope = mu * (mu + 2.0 * r * dmu);
        double next = r - res / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisection fallback
        r = next;
    }
    std::ostringstream msg;
    msg << "invert_shear: no convergence, s=" << s << " residual=" << (g(r) - s);
    throw NumericError(msg.str());
}

void gauss_legendre_01(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 2) throw DomainError("gauss_legendre_01: order must be >= 2");
    nodes.assign(static_cast<size_t>(order), 0.0);
    weights.assign(static_cast<size_t>(order), 0.0);
    // Newton on Legendre P_n over [-1,1], then map to [0,1].
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<size_t>(i)] = 0.5 * (1.0 - x);
        nodes[static_cast<size_t>(order - 1 - i)] = 0.5 * (1.0 + x);
        weights[static_cast<size_t>(i)] = 0.5 * w;
        weights[static_cast<size_t>(order - 1 - i)] = 0.5 * w;
    }
}

EffectiveViscosity::EffectiveViscosity(ViscosityModel base, double gap_constant,
                                       int quadrature_order, double inversion_tol)
    : base_(base), gap_(gap_constant), inv_tol_(inversion_tol) {
    if (!(gap_constant > 0.0)) throw DomainError("EffectiveViscosity: gap constant must be positive");
    if (!(inversion_tol > 0.0)) throw DomainError("EffectiveViscosity: inversion tolerance must be positive");
    gauss_legendre_01(quadrature_order, nodes_, weights_);
    mu_m0_ = eval(0.0).first;
}

std::pair<double, double> EffectiveViscosity::eval(double r) const {
    if (base_.is_newtonian()) return {1.5 * gap_ * base_.mu0(), 0.0};
    return eval_by_quadrature(r);
}

std::pair<double, double> EffectiveViscosity::eval_by_quadrature(double r) const {
    if (r < 0.0) throw DomainError("effective viscosity: r must be nonnegative");
    // mu~(s) = c * mu(rho(s)), rho = [r -> r mu^2]^{-1};
    // mu~'(s) = c * mu'(rho) / (mu(rho) * (mu(rho) + 2 rho mu'(rho))).
    double integral = 0.0;  // integral_{-1}^1 s^2 / mu~(r s^2)
    double dintegral = 0.0; // integral_{-1}^1 s^4 mu~'(r s^2) / mu~(r s^2)^2
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const double s = nodes_[i];
        const double s2 = s * s;
        const double rho = invert_shear(base_, r * s2, inv_tol_);
        const auto [mu, dmu] = base_.eval(rho);
        const double mt = gap_ * mu;
        const double mtp = gap_ * dmu / (mu * (mu + 2.0 * rho * dmu));
        integral += 2.0 * weights_[i] * s2 / mt;
        dintegral += 2.0 * weights_[i] * s2 * s2 * mtp / (mt * mt);
    }
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw NumericError("effective viscosity: quadrature produced a non-positive integral");
    const double mu_m = 1.0 / integral;
    return {mu_m, mu_m * mu_m * dintegral};
}

ConditionReport check_effective_conditions(const EffectiveViscosity& ev, double r_max, int n) {
    if (!(r_max > 0.0)) throw DomainError("check_effective_conditions: r_max must be positive");
    if (n < 2) throw DomainError("check_effective_conditions: need at least 2 samples");
    ConditionReport rep;
    rep.m_hat = std::numeric_limits<double>::infinity();
    rep.M_hat = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double r = r_max * i / (n - 1);
        const auto [mu_m, dmu_m] = ev.eval(r);
        const double comb = mu_m - 2.0 * r * dmu_m;
        const double lo = std::min(mu_m, comb);
        const double hi = std::max(mu_m, comb);
        if (lo < rep.m_hat) {
            rep.m_hat = lo;
            rep.worst_r = r;
        }
        rep.M_hat = std::max(rep.M_hat, hi);
    }
    rep.ok = rep.m_hat > 0.0 && std::isfinite(rep.M_hat) && ev.base().admissible();
    return rep;
}

} // namespace mudflow
