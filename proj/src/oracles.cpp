#include "mudflow/oracles.hpp"

#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"
#include "mudflow/geometry.hpp"

#include <cmath>
#include <numbers>

namespace mudflow::oracles {

FieldInterpolator::FieldInterpolator(const Field2D& field) : grid_(field.grid_ptr()) {
    const Grid& g = *grid_;
    rows_.reserve(static_cast<size_t>(g.ny()));
    for (int iy = 0; iy < g.ny(); ++iy) {
        std::vector<double> row(static_cast<size_t>(g.nx()));
        for (int ix = 0; ix < g.nx(); ++ix) row[static_cast<size_t>(ix)] = field.at(ix, iy);
        rows_.emplace_back(std::move(row));
    }
    weights_.resize(static_cast<size_t>(g.ny()));
    for (int j = 0; j < g.ny(); ++j) {
        weights_[static_cast<size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == g.ny() - 1) weights_[static_cast<size_t>(j)] *= 0.5;
    }
}

double FieldInterpolator::operator()(double x, double y) const {
    const Grid& g = *grid_;
    // barycentric second form over the y nodes of the x-interpolated rows
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        const double dyj = y - g.y(j);
        if (std::abs(dyj) < 1e-13) return rows_[static_cast<size_t>(j)].interp(x);
        const double w = weights_[static_cast<size_t>(j)] / dyj;
        num += w * rows_[static_cast<size_t>(j)].interp(x);
        den += w;
    }
    return num / den;
}

namespace {

// fourth-order centered stencils
constexpr double kD1[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr double kD2[5] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};

} // namespace

double conjugated_operator(const PeriodicProfile& f, const Field2D& v, int ix, int iy,
                           const EffectiveViscosity* ev) {
    const Grid& g = v.grid();
    const FieldInterpolator interp(v);

    const double x0 = g.x(ix);
    const double y0 = g.y(iy);
    const double yt = y0 + (1.0 - y0 * y0) * f.interp(x0); // physical height

    // u = v o phi_f^{-1} evaluated at a physical point
    const auto u = [&](double x, double y) {
        const auto [xr, yr] = transform_point(f, x, y, MapDirection::Inverse);
        return interp(xr, yr);
    };

    // stencil spacing: small enough that the O(delta^4) truncation sits far
    // below the comparison tolerances, large enough to stay clear of the
    // subtraction roundoff floor; shrunk near the outer walls
    const double dx = 5e-3;
    const double clearance = std::min(1.0 - yt, yt + 1.0);
    const double dy = std::min(5e-3, 0.2 * clearance);
    if (!(dy > 0.0)) throw DomainError("conjugated_operator: node too close to the outer wall");

    double samples[5][5];
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) samples[i + 2][j + 2] = u(x0 + i * dx, yt + j * dy);

    double ux = 0.0, uy = 0.0, uxx = 0.0, uyy = 0.0, uxy = 0.0;
    for (int i = 0; i < 5; ++i) {
        ux += kD1[i] * samples[i][2];
        uxx += kD2[i] * samples[i][2];
        uy += kD1[i] * samples[2][i];
        uyy += kD2[i] * samples[2][i];
        for (int j = 0; j < 5; ++j) uxy += kD1[i] * kD1[j] * samples[i][j];
    }
    ux /= dx;
    uxx /= dx * dx;
    uy /= dy;
    uyy /= dy * dy;
    uxy /= dx * dy;

    if (!ev) return uxx + uyy;

    const double r = ux * ux + uy * uy;
    const auto [mu, dmu] = ev->eval(r);
    const double a11 = 1.0 / mu - 2.0 * ux * ux * dmu / (mu * mu);
    const double a12 = -2.0 * ux * uy * dmu / (mu * mu);
    const double a22 = 1.0 / mu - 2.0 * uy * uy * dmu / (mu * mu);
    return a11 * uxx + 2.0 * a12 * uxy + a22 * uyy;
}

Field2D mud_modal_reference(std::shared_ptr<const Grid> grid, const PeriodicProfile& p) {
    const Grid& g = *grid;
    if (g.domain() != DomainTag::Mud) throw DomainError("mud_modal_reference: mud grid required");
    Field2D out(grid);
    const auto& spec = p.spectrum();
    std::vector<std::complex<double>> row(static_cast<size_t>(g.nx()));
    for (int iy = 0; iy < g.ny(); ++iy) {
        const double y = g.y(iy);
        for (int k = 0; k < g.nx(); ++k) {
            const int m = std::abs(dft::signed_frequency(k, g.nx()));
            const double ratio = std::cosh(m * (y + 1.0)) / std::cosh(static_cast<double>(m));
            row[static_cast<size_t>(k)] = spec[static_cast<size_t>(k)] * ratio;
        }
        const std::vector<double> vals = dft::synthesize(row);
        for (int ix = 0; ix < g.nx(); ++ix) out.at(ix, iy) = vals[static_cast<size_t>(ix)];
    }
    return out;
}

PeriodicProfile water_flat_trace_reference(const PeriodicProfile& F, double mu_w) {
    const int n = F.size();
    std::vector<std::complex<double>> c = F.spectrum();
    for (int k = 0; k < n; ++k) {
        const int m = dft::signed_frequency(k, n);
        if (m == 0) {
            c[static_cast<size_t>(k)] = 0.0;
            continue;
        }
        c[static_cast<size_t>(k)] *= -mu_w * std::tanh(static_cast<double>(m)) / m;
    }
    return PeriodicProfile(dft::synthesize(c));
}

} // namespace mudflow::oracles
