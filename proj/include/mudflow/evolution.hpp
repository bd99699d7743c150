#pragma once

#include "mudflow/geometry.hpp"
#include "mudflow/grid.hpp"
#include "mudflow/mud_solver.hpp"
#include "mudflow/parallel.hpp"
#include "mudflow/profile.hpp"
#include "mudflow/rheology.hpp"
#include "mudflow/water_solver.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mudflow {

struct ModelParams {
    double mu_w = 1.0;
    double rho_w = 1.0;
    double rho_m = 1.0;
    double g = 1.0;
    double gamma = 0.0; ///< surface tension, >= 0
    EffectiveViscosity ev;

    /// Flat-state stability: gamma > 0 or rho_m > rho_w.
    bool stability_ok() const { return gamma > 0.0 || rho_m > rho_w; }
    void validate() const;
};

/// Linearization symbols about the flat state (k != 0):
///   m(k)      = 1 + (mu_w / mu_m(0)) tanh^2(k)
///   lambda(k) = k tanh(k) [ g (rho_w - rho_m) - k^2 gamma ]
///               / ( mu_m(0) + mu_w tanh^2(k) )
struct SymbolPair {
    double m_k;
    double lambda_k;
};
SymbolPair linearized_symbols(int k, const ModelParams& params);

/// Dirichlet data h(t, x) on the top boundary. Supported forms: constant,
/// mean plus sinusoids with time-varying amplitudes
///   sum_j amp_j cos(k_j x + phase_j) cos(omega_j t + time_phase_j),
/// and a time table of nodal profiles with linear interpolation (clamped
/// outside the table).
class BoundaryData {
public:
    struct SinusoidTerm {
        int k = 1;
        double amp = 0.0;
        double phase = 0.0;
        double omega = 0.0;
        double time_phase = 0.0;
    };

    static BoundaryData constant(double value);
    static BoundaryData sinusoids(double mean, std::vector<SinusoidTerm> terms);
    static BoundaryData table(std::vector<double> times, std::vector<std::vector<double>> nodal);

    PeriodicProfile evaluate(double t, int n) const;
    bool is_constant() const { return form_ == Form::Constant; }
    double constant_value() const { return mean_; }

private:
    enum class Form { Constant, Sinusoids, Table };
    Form form_ = Form::Constant;
    double mean_ = 0.0;
    std::vector<SinusoidTerm> terms_;
    std::vector<double> times_;
    std::vector<std::vector<double>> nodal_;
};

struct GridSpec {
    int nx = 64;
    int ny_water = 17;
    int ny_mud = 17;
};

struct SolverTolerances {
    double velocity_residual = 1e-9; ///< sup-norm target for the implicit velocity solve
    int newton_max_iterations = 25;
    int gmres_max_dim = 30;
    double gmres_rtol = 1e-4;
    double water_refine_target = 1e-12;
    MudOptions mud;
};

struct VelocityResult {
    PeriodicProfile F;         ///< mean-zero solved velocity
    int newton_iterations = 0;
    int evaluations = 0;       ///< nonlocal-operator evaluations spent
    double residual = 0.0;     ///< final sup-norm of the residual
    double mean_flux = 0.0;    ///< mean of the raw residual (volume diagnostic)
    double water_residual = 0.0;
    double mud_residual = 0.0;
    int mud_iterations = 0;
    double max_principle_violation = 0.0;
    double uniqueness_gap = -1.0; ///< max pairwise distance of probed roots; -1 = not probed
};

/// The nonlocal interface operator and its implicit velocity solve.
/// evaluate() composes: water solve with flux -F and top data h, interface
/// trace, Laplace-Young shift (-gamma*curvature + g(rho_m - rho_w) f), mud
/// solve, mud boundary flux; returns F + flux (zero at a solution).
///
/// solve_velocity() finds the mean-zero F annihilating the residual by
/// Jacobian-free Newton-GMRES, right-preconditioned with the flat-state
/// multiplier 1/m(k) in modal space; a preconditioned-residual fallback
/// step with backtracking handles GMRES stagnation. Holds factorization
/// caches: one instance per logical simulation thread.
class InterfaceOperator {
public:
    InterfaceOperator(GridSpec sizes, ModelParams params, SolverTolerances tol = {},
                      ExecPolicy policy = {});

    PeriodicProfile evaluate(const PeriodicProfile& h, const PeriodicProfile& f,
                             const PeriodicProfile& F);

    VelocityResult solve_velocity(const PeriodicProfile& h, const PeriodicProfile& f,
                                  const PeriodicProfile& guess, bool probe_uniqueness = false,
                                  std::vector<PeriodicProfile> probe_offsets = {});

    const ModelParams& params() const { return params_; }
    const GridSpec& sizes() const { return sizes_; }
    const ExecPolicy& policy() const { return policy_; }
    const SolverTolerances& tolerances() const { return tol_; }

    std::shared_ptr<const Grid> water_grid() const { return water_grid_; }
    std::shared_ptr<const Grid> mud_grid() const { return mud_grid_; }

    /// Fields of the last evaluate() call (water and mud potentials).
    const std::optional<Field2D>& last_water() const { return last_water_; }
    const std::optional<Field2D>& last_mud() const { return last_mud_; }

private:
    PeriodicProfile apply_flat_preconditioner(const PeriodicProfile& r) const;

    GridSpec sizes_;
    ModelParams params_;
    SolverTolerances tol_;
    ExecPolicy policy_;
    std::shared_ptr<const Grid> water_grid_, mud_grid_;
    WaterSolver water_;
    MudSolver mud_;
    std::optional<Field2D> last_water_, last_mud_;
    std::optional<Field2D> mud_guess_;
    double last_water_residual_ = 0.0;
    double last_mud_residual_ = 0.0;
    int last_mud_iterations_ = 0;
    double worst_max_principle_ = 0.0;
};

enum class Scheme { SemiImplicit, RK4 };

struct StepOptions {
    Scheme scheme = Scheme::SemiImplicit;
    double guard_sup_f = 0.45;
    double guard_sup_F = 10.0;
    bool probe_uniqueness = false;
    std::vector<PeriodicProfile> probe_offsets; ///< perturbed guesses for the probe
};

struct SimState {
    double t = 0.0;
    PeriodicProfile f; ///< mean-zero, admissible
    PeriodicProfile F; ///< last solved velocity (mean-zero)
    std::optional<Field2D> water_potential, mud_potential;
};

struct StepDiagnostics {
    double t = 0.0;  ///< time at the end of the step
    double dt = 0.0;
    int newton_iterations = 0;
    double velocity_residual = 0.0;
    double mean_f = 0.0;
    double mean_flux = 0.0;
    double sup_f = 0.0;
    double sup_F = 0.0;
    int mud_iterations = 0;
    double water_residual = 0.0;
    double mud_residual = 0.0;
    double max_principle_violation = 0.0;
    double uniqueness_gap = -1.0;
};

struct StepResult {
    SimState state;
    StepDiagnostics diag;
};

/// Advance one step of f' = Phi(h(t), f). Semi-implicit default: exact
/// integrating factor exp(lambda_k dt) per mode, explicit nonlinear
/// remainder (first-order exponential time differencing); RK4 retained for
/// cross-validation. Mean projection after every stage; throws
/// GuardBreachError when the state leaves the configured neighborhood.
StepResult step(InterfaceOperator& op, const SimState& state, const BoundaryData& h, double dt,
                const StepOptions& options);

struct TrajectorySample {
    double t;
    std::vector<std::complex<double>> modes; ///< a_k for k = 0..nx/2
};

struct Trajectory {
    int nx = 0;
    std::vector<TrajectorySample> samples;
    std::vector<StepDiagnostics> diagnostics;
    std::string termination = "completed"; ///< or "guard_breach"
    SimState final_state;
    double final_dt = 0.0;   ///< dt selected for the next step (restart)
    int easy_steps = 0;      ///< adaptivity state (restart)
    int step_index = 0;
};

TrajectorySample sample_state(const SimState& state);

/// Least-squares slope of ln|a_k(t)| over the trajectory samples.
/// Throws NumericError when fewer than three samples exceed the noise floor.
double dispersion_fit(const Trajectory& traj, int k, double noise_floor = 1e-13);

/// Physical-domain Darcy fields recovered from the cached potentials:
/// velocities -grad u / mu (per phase), dynamic pressures p = u - g rho y
/// at the image points phi_f(x, y), and the divergence diagnostic
/// (the conjugated operator applied to the potentials).
struct DarcyFields {
    Field2D water_vel_x, water_vel_y, water_pressure, water_y; ///< water_y = physical height
    Field2D mud_vel_x, mud_vel_y, mud_pressure, mud_y;
    double water_divergence = 0.0; ///< max interior |div v| (water)
    double mud_divergence = 0.0;
};
DarcyFields darcy_postprocess(const SimState& state, const ModelParams& params,
                              const ExecPolicy& policy = {});

} // namespace mudflow
