#pragma once

#include <utility>
#include <vector>

namespace mudflow {

/// Shear-dependent viscosity of the mud, as a function of the squared
/// gradient r = |grad u|^2.
///
/// Two variants:
///  - Newtonian: mu(r) = mu0.
///  - Hectorite (regularized Bingham): mu(r) = mu_inf + tau0*beta/(1 + beta*r),
///    admissible iff beta*tau0 < 4*mu_inf (strict).
///
/// Derivatives are analytic; extending with a new variant requires
/// supplying mu' in closed form as well.
class ViscosityModel {
public:
    enum class Kind { Newtonian, Hectorite };

    static ViscosityModel newtonian(double mu0);
    static ViscosityModel hectorite(double mu_inf, double tau0, double beta);

    Kind kind() const { return kind_; }
    bool is_newtonian() const { return kind_ == Kind::Newtonian; }

    /// Exact structural admissibility: always true for Newtonian,
    /// beta*tau0 < 4*mu_inf for Hectorite.
    bool admissible() const;

    /// (mu(r), mu'(r)); throws DomainError for r < 0.
    std::pair<double, double> eval(double r) const;
    double mu(double r) const { return eval(r).first; }

    double mu0() const { return mu0_; }         // Newtonian only
    double mu_inf() const { return mu_inf_; }   // Hectorite only
    double tau0() const { return tau0_; }
    double beta() const { return beta_; }

private:
    ViscosityModel() = default;
    Kind kind_ = Kind::Newtonian;
    double mu0_ = 1.0;
    double mu_inf_ = 0.0, tau0_ = 0.0, beta_ = 0.0;
};

/// Result of sampling the structural bounds m <= mu <= M and
/// m <= mu + 2 r mu' <= M (or the effective-viscosity analogue with
/// mu_m - 2 r mu_m').
struct ConditionReport {
    double m_hat = 0.0;   ///< smallest sampled value of min(mu, combination)
    double M_hat = 0.0;   ///< largest sampled value of max(mu, combination)
    bool ok = false;      ///< positive lower bound, finite upper bound, exact admissibility
    double worst_r = 0.0; ///< sample with the tightest margin
};

/// Sample mu and mu + 2 r mu' on n points of [0, r_max]. For Hectorite the
/// exact bound beta*tau0 < 4*mu_inf is checked in addition to the samples.
ConditionReport check_conditions(const ViscosityModel& model, double r_max, int n);

/// Inverse of the strictly increasing map r -> r*mu(r)^2. Returns r with
/// |r*mu(r)^2 - s| <= tol*(1+s). Bracketed Newton with bisection fallback.
double invert_shear(const ViscosityModel& model, double s, double tol = 1e-12);

/// Width-averaged effective viscosity
///     mu_m(r) = ( integral_{-1}^{1} s^2 / mu~(r s^2) ds )^{-1},
/// with mu~ = c * mu o [r -> r mu(r)^2]^{-1} and c the gap-width constant.
/// The derivative is obtained by differentiating under the integral:
///     mu_m'(r) = mu_m(r)^2 * integral s^4 mu~'(r s^2) / mu~(r s^2)^2 ds.
/// Quadrature: fixed-order Gauss-Legendre on [0,1], doubled by symmetry.
class EffectiveViscosity {
public:
    /// Newtonian water-like default (mu0 = 1, identity gap normalization).
    EffectiveViscosity() : EffectiveViscosity(ViscosityModel::newtonian(1.0)) {}
    explicit EffectiveViscosity(ViscosityModel base, double gap_constant = 2.0 / 3.0,
                                int quadrature_order = 64, double inversion_tol = 1e-12);

    /// (mu_m(r), mu_m'(r)); Newtonian models short-circuit to the closed
    /// form mu_m = 3*c*mu0/2, mu_m' = 0.
    std::pair<double, double> eval(double r) const;

    /// The general quadrature path, regardless of variant (used to verify
    /// the Newtonian closed form against the integral definition).
    std::pair<double, double> eval_by_quadrature(double r) const;

    double mu_m0() const { return mu_m0_; } ///< cached mu_m(0)

    const ViscosityModel& base() const { return base_; }
    double gap_constant() const { return gap_; }
    int quadrature_order() const { return static_cast<int>(nodes_.size()); }
    double inversion_tol() const { return inv_tol_; }

private:
    ViscosityModel base_;
    double gap_;
    double inv_tol_;
    std::vector<double> nodes_, weights_; // Gauss-Legendre on [0,1]
    double mu_m0_ = 0.0;
};

/// As check_conditions, applied to mu_m and mu_m - 2 r mu_m'.
ConditionReport check_effective_conditions(const EffectiveViscosity& ev, double r_max, int n);

/// Gauss-Legendre nodes and weights on [0,1] (used by the effective
/// viscosity; exposed for reuse in verification code).
void gauss_legendre_01(int order, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace mudflow
