#include "mudflow/grid.hpp"

#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"

#include <cmath>
#include <numbers>

namespace mudflow {

namespace {

// Fourier differentiation matrix via the modal derivative of each unit
// vector; exact match with PeriodicProfile::derivative by construction.
Eigen::MatrixXd fourier_diff_matrix(int n) {
    Eigen::MatrixXd d(n, n);
    std::vector<std::complex<double>> c(static_cast<size_t>(n));
    std::vector<double> e(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[static_cast<size_t>(j)] = 1.0;
        c = dft::analyze(e);
        for (int k = 0; k < n; ++k) {
            const int m = dft::signed_frequency(k, n);
            c[static_cast<size_t>(k)] *= (m == n / 2) ? std::complex<double>(0.0, 0.0)
                                                      : std::complex<double>(0.0, m);
        }
        const std::vector<double> col = dft::synthesize(c);
        for (int i = 0; i < n; ++i) d(i, j) = col[static_cast<size_t>(i)];
        e[static_cast<size_t>(j)] = 0.0;
    }
    return d;
}

// Barycentric differentiation matrix on arbitrary distinct nodes with the
// Chebyshev-Gauss-Lobatto weight pattern (-1)^j, halved at the ends.
Eigen::MatrixXd barycentric_diff_matrix(const std::vector<double>& nodes) {
    const int n = static_cast<int>(nodes.size());
    std::vector<double> w(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        w[static_cast<size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) w[static_cast<size_t>(j)] *= 0.5;
    }
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d(i, j) = (w[static_cast<size_t>(j)] / w[static_cast<size_t>(i)]) /
                      (nodes[static_cast<size_t>(i)] - nodes[static_cast<size_t>(j)]);
            row_sum += d(i, j);
        }
        d(i, i) = -row_sum; // negative sum trick: rows annihilate constants
    }
    return d;
}

} // namespace

Grid::Grid(int nx, int ny, DomainTag tag) : nx_(nx), ny_(ny), tag_(tag) {
    if (nx < 8 || nx % 2 != 0) throw DomainError("Grid: nx must be even and >= 8");
    if (ny < 5) throw DomainError("Grid: ny must be >= 5");
    ys_.resize(static_cast<size_t>(ny));
    const double shift = (tag == DomainTag::Water) ? 0.0 : -1.0;
    for (int i = 0; i < ny; ++i) {
        // ascending mapped Chebyshev-Gauss-Lobatto nodes on [shift, shift+1]
        ys_[static_cast<size_t>(i)] =
            shift + 0.5 * (1.0 - std::cos(std::numbers::pi * i / (ny - 1)));
    }
    // pin the endpoints and the interface row exactly
    ys_.front() = shift;
    ys_.back() = shift + 1.0;
    dx1_ = fourier_diff_matrix(nx);
    dx2_ = dx1_ * dx1_;
    dy1_ = barycentric_diff_matrix(ys_);
    dy2_ = dy1_ * dy1_;
}

double Grid::x(int ix) const { return 2.0 * std::numbers::pi * ix / nx_; }

std::shared_ptr<const Grid> make_grid(int nx, int ny, DomainTag tag) {
    return std::make_shared<const Grid>(nx, ny, tag);
}

Field2D::Field2D(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)), data_(static_cast<size_t>(grid_->size()), 0.0) {}

Field2D Field2D::sample(std::shared_ptr<const Grid> grid,
                        const std::function<double(double, double)>& fn) {
    Field2D f(std::move(grid));
    const Grid& g = f.grid();
    for (int ix = 0; ix < g.nx(); ++ix)
        for (int iy = 0; iy < g.ny(); ++iy) f.at(ix, iy) = fn(g.x(ix), g.y(iy));
    return f;
}

double Field2D::sup_norm() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Field2D::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

PeriodicProfile trace(const Field2D& field, Edge edge) {
    const Grid& g = field.grid();
    int iy = -1;
    switch (edge) {
    case Edge::Interface:
        iy = g.interface_index();
        break;
    case Edge::Top:
        if (g.domain() != DomainTag::Water) throw DomainError("trace: top edge only exists on the water grid");
        iy = g.ny() - 1;
        break;
    case Edge::Bottom:
        if (g.domain() != DomainTag::Mud) throw DomainError("trace: bottom edge only exists on the mud grid");
        iy = 0;
        break;
    }
    std::vector<double> row(static_cast<size_t>(g.nx()));
    for (int ix = 0; ix < g.nx(); ++ix) row[static_cast<size_t>(ix)] = field.at(ix, iy);
    return PeriodicProfile(std::move(row));
}

} // namespace mudflow
