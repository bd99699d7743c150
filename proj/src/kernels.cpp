#include "mudflow/kernels.hpp"

#include "mudflow/errors.hpp"

#include <omp.h>

namespace mudflow {

int resolved_threads(const ExecPolicy& policy) {
    if (policy.mode == ExecMode::Serial) return 1;
    return policy.threads > 0 ? policy.threads : omp_get_max_threads();
}

namespace {

inline void dx_line(const Grid& g, const double* in, double* out, int ix) {
    const Eigen::MatrixXd& d = g.dx1();
    const int nx = g.nx(), ny = g.ny();
    for (int iy = 0; iy < ny; ++iy) out[ix * ny + iy] = 0.0;
    for (int jx = 0; jx < nx; ++jx) {
        const double w = d(ix, jx);
        const double* src = in + jx * ny;
        double* dst = out + ix * ny;
        for (int iy = 0; iy < ny; ++iy) dst[iy] += w * src[iy];
    }
}

inline void dy_line(const Grid& g, const double* in, double* out, int ix) {
    const Eigen::MatrixXd& d = g.dy1();
    const int ny = g.ny();
    const double* src = in + ix * ny;
    double* dst = out + ix * ny;
    for (int iy = 0; iy < ny; ++iy) {
        double acc = 0.0;
        for (int jy = 0; jy < ny; ++jy) acc += d(iy, jy) * src[jy];
        dst[iy] = acc;
    }
}

inline void coefficient_element(const EffectiveViscosity& ev, const CoefficientBatch& c, size_t i) {
    const double zx = c.zx[i], zy = c.zy[i];
    const double r = zx * zx + zy * zy;
    const auto [mu, dmu] = ev.eval(r);
    const double inv = 1.0 / mu;
    const double q = 2.0 * dmu / (mu * mu);
    const double a11 = inv - q * zx * zx;
    const double a12 = -q * zx * zy;
    const double a22 = inv - q * zy * zy;
    const double al = c.alpha[i], be = c.beta[i];
    c.b11[i] = a11;
    c.b12[i] = al * a11 + be * a12;
    c.b22[i] = al * al * a11 + 2.0 * al * be * a12 + be * be * a22;
    c.b[i] = c.drift_a[i] * a11 + c.drift_b[i] * a12 + c.drift_c[i] * a22;
    c.lam1[i] = inv;
    c.lam2[i] = inv - q * r;
}

} // namespace

void field_dx_serial(const Field2D& in, Field2D& out) {
    const Grid& g = in.grid();
    for (int ix = 0; ix < g.nx(); ++ix) dx_line(g, in.data().data(), out.data().data(), ix);
}

void field_dx_openmp(const Field2D& in, Field2D& out, int threads) {
    const Grid& g = in.grid();
    const double* src = in.data().data();
    double* dst = out.data().data();
#pragma omp parallel for num_threads(threads) schedule(static)
    for (int ix = 0; ix < g.nx(); ++ix) dx_line(g, src, dst, ix);
}

void field_dx(const Field2D& in, Field2D& out, const ExecPolicy& policy) {
    if (&in.grid() != &out.grid()) throw DomainError("field_dx: grid mismatch");
    if (policy.mode == ExecMode::OpenMP) field_dx_openmp(in, out, resolved_threads(policy));
    else field_dx_serial(in, out);
}

void field_dy_serial(const Field2D& in, Field2D& out) {
    const Grid& g = in.grid();
    for (int ix = 0; ix < g.nx(); ++ix) dy_line(g, in.data().data(), out.data().data(), ix);
}

void field_dy_openmp(const Field2D& in, Field2D& out, int threads) {
    const Grid& g = in.grid();
    const double* src = in.data().data();
    double* dst = out.data().data();
#pragma omp parallel for num_threads(threads) schedule(static)
    for (int ix = 0; ix < g.nx(); ++ix) dy_line(g, src, dst, ix);
}

void field_dy(const Field2D& in, Field2D& out, const ExecPolicy& policy) {
    if (&in.grid() != &out.grid()) throw DomainError("field_dy: grid mismatch");
    if (policy.mode == ExecMode::OpenMP) field_dy_openmp(in, out, resolved_threads(policy));
    else field_dy_serial(in, out);
}

void effective_viscosity_batch_serial(const EffectiveViscosity& ev, std::span<const double> r,
                                      std::span<double> mu, std::span<double> dmu) {
    for (size_t i = 0; i < r.size(); ++i) {
        const auto [m, dm] = ev.eval(r[i]);
        mu[i] = m;
        dmu[i] = dm;
    }
}

void effective_viscosity_batch_openmp(const EffectiveViscosity& ev, std::span<const double> r,
                                      std::span<double> mu, std::span<double> dmu, int threads) {
    const auto n = static_cast<long long>(r.size());
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < n; ++i) {
        const auto [m, dm] = ev.eval(r[static_cast<size_t>(i)]);
        mu[static_cast<size_t>(i)] = m;
        dmu[static_cast<size_t>(i)] = dm;
    }
}

void effective_viscosity_batch(const EffectiveViscosity& ev, std::span<const double> r,
                               std::span<double> mu, std::span<double> dmu,
                               const ExecPolicy& policy) {
    if (r.size() != mu.size() || r.size() != dmu.size())
        throw DomainError("effective_viscosity_batch: size mismatch");
    if (policy.mode == ExecMode::OpenMP)
        effective_viscosity_batch_openmp(ev, r, mu, dmu, resolved_threads(policy));
    else effective_viscosity_batch_serial(ev, r, mu, dmu);
}

void quasilinear_coefficient_batch_serial(const EffectiveViscosity& ev, const CoefficientBatch& batch) {
    for (size_t i = 0; i < batch.zx.size(); ++i) coefficient_element(ev, batch, i);
}

void quasilinear_coefficient_batch_openmp(const EffectiveViscosity& ev, const CoefficientBatch& batch,
                                          int threads) {
    const auto n = static_cast<long long>(batch.zx.size());
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < n; ++i) coefficient_element(ev, batch, static_cast<size_t>(i));
}

void quasilinear_coefficient_batch(const EffectiveViscosity& ev, const CoefficientBatch& batch,
                                   const ExecPolicy& policy) {
    if (policy.mode == ExecMode::OpenMP)
        quasilinear_coefficient_batch_openmp(ev, batch, resolved_threads(policy));
    else quasilinear_coefficient_batch_serial(ev, batch);
}

} // namespace mudflow
