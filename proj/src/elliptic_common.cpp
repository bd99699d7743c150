#include "elliptic_common.hpp"

namespace mudflow::detail {

void apply_second_order(const SecondOrderCoeffs& c, const Field2D& v, Field2D& out,
                        const ExecPolicy& policy) {
    Field2D vx(v.grid_ptr()), vy(v.grid_ptr()), vxx(v.grid_ptr()), vxy(v.grid_ptr()),
        vyy(v.grid_ptr());
    field_dx(v, vx, policy);
    field_dy(v, vy, policy);
    field_dx(vx, vxx, policy);
    field_dy(vx, vxy, policy);
    field_dy(vy, vyy, policy);
    const size_t n = v.data().size();
    const double* pxx = vxx.data().data();
    const double* pxy = vxy.data().data();
    const double* pyy = vyy.data().data();
    const double* py = vy.data().data();
    double* po = out.data().data();
    for (size_t i = 0; i < n; ++i) {
        const double a = c.cxx ? c.cxx[i] : 1.0;
        po[i] = a * pxx[i] + 2.0 * c.cxy[i] * pxy[i] + c.cyy[i] * pyy[i] + c.cy[i] * py[i];
    }
}

void assemble_second_order(const Grid& g, const SecondOrderCoeffs& c, Eigen::MatrixXd& m,
                           const ExecPolicy& policy) {
    const int nx = g.nx(), ny = g.ny();
    m.setZero(g.size(), g.size());
    const Eigen::MatrixXd& d1x = g.dx1();
    const Eigen::MatrixXd& d2x = g.dx2();
    const Eigen::MatrixXd& d1y = g.dy1();
    const Eigen::MatrixXd& d2y = g.dy2();

    const auto fill_block = [&](int ix) {
        for (int iy = 1; iy < ny - 1; ++iy) {
            const int row = g.index(ix, iy);
            const size_t node = static_cast<size_t>(row);
            const double cxx = c.cxx ? c.cxx[node] : 1.0;
            const double cxy2 = 2.0 * c.cxy[node];
            const double cyy = c.cyy[node];
            const double cy = c.cy[node];
            for (int jx = 0; jx < nx; ++jx) m(row, g.index(jx, iy)) += cxx * d2x(ix, jx);
            for (int jy = 0; jy < ny; ++jy)
                m(row, g.index(ix, jy)) += cyy * d2y(iy, jy) + cy * d1y(iy, jy);
            for (int jx = 0; jx < nx; ++jx) {
                const double w = cxy2 * d1x(ix, jx);
                if (w == 0.0) continue;
                for (int jy = 0; jy < ny; ++jy) m(row, g.index(jx, jy)) += w * d1y(iy, jy);
            }
        }
    };

    if (policy.mode == ExecMode::OpenMP) {
        const int threads = resolved_threads(policy);
#pragma omp parallel for num_threads(threads) schedule(static)
        for (int ix = 0; ix < nx; ++ix) fill_block(ix);
    } else {
        for (int ix = 0; ix < nx; ++ix) fill_block(ix);
    }
}

RefinedLU::Result RefinedLU::solve(
    const Eigen::VectorXd& rhs,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual_fn, double target,
    int max_refinements) const {
    Result res;
    res.v = lu_.solve(rhs);
    Eigen::VectorXd r = residual_fn(res.v);
    res.residual_inf = r.lpNorm<Eigen::Infinity>();
    double prev = res.residual_inf;
    while (res.residual_inf > target && res.refinements < max_refinements) {
        res.v -= lu_.solve(r);
        ++res.refinements;
        r = residual_fn(res.v);
        res.residual_inf = r.lpNorm<Eigen::Infinity>();
        if (res.residual_inf > 0.5 * prev) break; // stalled: caller refactors
        prev = res.residual_inf;
    }
    res.converged = res.residual_inf <= target;
    return res;
}

} // namespace mudflow::detail
