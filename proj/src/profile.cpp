#include "mudflow/profile.hpp"

#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mudflow {

namespace {

// Enforce exact Hermitian symmetry: real input analyzed in floating point
// carries O(eps) asymmetries that would otherwise leak into parity and
// translation tests.
void symmetrize(std::vector<std::complex<double>>& c) {
    const int n = static_cast<int>(c.size());
    c[0] = {c[0].real(), 0.0};
    if (n % 2 == 0) c[n / 2] = {c[n / 2].real(), 0.0};
    for (int k = 1; 2 * k < n; ++k) {
        const std::complex<double> avg = 0.5 * (c[k] + std::conj(c[n - k]));
        c[k] = avg;
        c[n - k] = std::conj(avg);
    }
}

} // namespace

PeriodicProfile::PeriodicProfile(std::vector<double> nodal) : nodal_(std::move(nodal)) {
    if (nodal_.size() < 4 || nodal_.size() % 2 != 0)
        throw DomainError("PeriodicProfile: node count must be even and >= 4");
    spectrum_ = dft::analyze(nodal_);
    symmetrize(spectrum_);
}

PeriodicProfile PeriodicProfile::zeros(int n) {
    return PeriodicProfile(std::vector<double>(static_cast<size_t>(n), 0.0));
}

PeriodicProfile PeriodicProfile::constant(int n, double value) {
    return PeriodicProfile(std::vector<double>(static_cast<size_t>(n), value));
}

PeriodicProfile PeriodicProfile::harmonic(int n, int k, double cos_amp, double sin_amp) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double x = 2.0 * std::numbers::pi * j / n;
        v[static_cast<size_t>(j)] = cos_amp * std::cos(k * x) + sin_amp * std::sin(k * x);
    }
    return PeriodicProfile(std::move(v));
}

PeriodicProfile PeriodicProfile::sample(int n, const std::function<double(double)>& fn) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<size_t>(j)] = fn(2.0 * std::numbers::pi * j / n);
    return PeriodicProfile(std::move(v));
}

PeriodicProfile PeriodicProfile::from_modes(int n, std::span<const Mode> modes) {
    if (n < 4 || n % 2 != 0) throw DomainError("from_modes: node count must be even and >= 4");
    std::vector<std::complex<double>> c(static_cast<size_t>(n), {0.0, 0.0});
    for (const Mode& m : modes) {
        if (m.k < 0 || m.k > n / 2)
            throw DomainError("from_modes: mode index out of range 0..n/2");
        if (m.k == 0 || m.k == n / 2) {
            c[static_cast<size_t>(m.k)] += std::complex<double>(m.re, 0.0);
        } else {
            c[static_cast<size_t>(m.k)] += std::complex<double>(m.re, m.im);
            c[static_cast<size_t>(n - m.k)] += std::complex<double>(m.re, -m.im);
        }
    }
    return PeriodicProfile(dft::synthesize(c));
}

double PeriodicProfile::node(int j) const { return 2.0 * std::numbers::pi * j / size(); }

double PeriodicProfile::mean() const { return spectrum_[0].real(); }

double PeriodicProfile::sup_norm() const {
    double m = 0.0;
    for (double v : nodal_) m = std::max(m, std::abs(v));
    return m;
}

bool PeriodicProfile::all_finite() const {
    return std::all_of(nodal_.begin(), nodal_.end(), [](double v) { return std::isfinite(v); });
}

std::complex<double> PeriodicProfile::mode(int k) const {
    const int n = size();
    if (std::abs(k) > n / 2) throw DomainError("mode: |k| exceeds n/2");
    if (k >= 0) return spectrum_[static_cast<size_t>(k)];
    return spectrum_[static_cast<size_t>(n + k)];
}

PeriodicProfile PeriodicProfile::derivative(int order) const {
    if (order < 1 || order > 4) throw DomainError("derivative: order must be 1..4");
    const int n = size();
    std::vector<std::complex<double>> c = spectrum_;
    for (int k = 0; k < n; ++k) {
        const int m = dft::signed_frequency(k, n);
        if (m == n / 2 && order % 2 == 1) {
            c[static_cast<size_t>(k)] = 0.0;
            continue;
        }
        std::complex<double> factor{1.0, 0.0};
        const std::complex<double> im_m{0.0, static_cast<double>(m)};
        for (int p = 0; p < order; ++p) factor *= im_m;
        c[static_cast<size_t>(k)] *= factor;
    }
    return PeriodicProfile(dft::synthesize(c));
}

PeriodicProfile PeriodicProfile::resampled(int m) const {
    const int n = size();
    if (m == n) return *this;
    if (m < 4 || m % 2 != 0) throw DomainError("resampled: target node count must be even and >= 4");
    std::vector<std::complex<double>> out(static_cast<size_t>(m), {0.0, 0.0});
    const int half = std::min(n, m) / 2;
    for (int k = 0; k < half; ++k) {
        out[static_cast<size_t>(k)] = spectrum_[static_cast<size_t>(k)];
        if (k > 0) out[static_cast<size_t>(m - k)] = spectrum_[static_cast<size_t>(n - k)];
    }
    if (m > n) {
        // split the source Nyquist coefficient between +-n/2
        const std::complex<double> nyq = spectrum_[static_cast<size_t>(n / 2)];
        out[static_cast<size_t>(n / 2)] = 0.5 * nyq;
        out[static_cast<size_t>(m - n / 2)] = 0.5 * nyq;
    } else {
        // fold +-m/2 of the source onto the target Nyquist bin
        const std::complex<double> sum =
            spectrum_[static_cast<size_t>(m / 2)] + spectrum_[static_cast<size_t>(n - m / 2)];
        out[static_cast<size_t>(m / 2)] = {sum.real(), 0.0};
    }
    return PeriodicProfile(dft::synthesize(out));
}

double PeriodicProfile::interp(double x) const {
    const int n = size();
    double v = spectrum_[0].real();
    for (int k = 1; k < n / 2; ++k) {
        const std::complex<double> c = spectrum_[static_cast<size_t>(k)];
        v += 2.0 * (c.real() * std::cos(k * x) - c.imag() * std::sin(k * x));
    }
    v += spectrum_[static_cast<size_t>(n / 2)].real() * std::cos((n / 2) * x);
    return v;
}

PeriodicProfile PeriodicProfile::with_zero_mean() const {
    std::vector<double> v = nodal_;
    const double m = mean();
    for (double& e : v) e -= m;
    return PeriodicProfile(std::move(v));
}

PeriodicProfile& PeriodicProfile::operator+=(const PeriodicProfile& other) {
    if (other.size() != size()) throw DomainError("profile size mismatch");
    std::vector<double> v = nodal_;
    for (int j = 0; j < size(); ++j) v[static_cast<size_t>(j)] += other.nodal_[static_cast<size_t>(j)];
    *this = PeriodicProfile(std::move(v));
    return *this;
}

PeriodicProfile& PeriodicProfile::operator-=(const PeriodicProfile& other) {
    if (other.size() != size()) throw DomainError("profile size mismatch");
    std::vector<double> v = nodal_;
    for (int j = 0; j < size(); ++j) v[static_cast<size_t>(j)] -= other.nodal_[static_cast<size_t>(j)];
    *this = PeriodicProfile(std::move(v));
    return *this;
}

PeriodicProfile& PeriodicProfile::operator*=(double s) {
    std::vector<double> v = nodal_;
    for (double& e : v) e *= s;
    *this = PeriodicProfile(std::move(v));
    return *this;
}

double sup_distance(const PeriodicProfile& a, const PeriodicProfile& b) {
    if (a.size() != b.size()) throw DomainError("profile size mismatch");
    double m = 0.0;
    for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a.value(j) - b.value(j)));
    return m;
}

PeriodicProfile dealiased_apply(std::span<const PeriodicProfile> inputs,
                                const std::function<double(std::span<const double>)>& fn) {
    if (inputs.empty()) throw DomainError("dealiased_apply: no inputs");
    const int n = inputs[0].size();
    int m = (3 * n) / 2;
    if (m % 2 != 0) ++m;
    std::vector<PeriodicProfile> fine;
    fine.reserve(inputs.size());
    for (const PeriodicProfile& p : inputs) {
        if (p.size() != n) throw DomainError("dealiased_apply: input size mismatch");
        fine.push_back(p.resampled(m));
    }
    std::vector<double> out(static_cast<size_t>(m));
    std::vector<double> args(inputs.size());
    for (int j = 0; j < m; ++j) {
        for (size_t i = 0; i < fine.size(); ++i) args[i] = fine[i].value(j);
        out[static_cast<size_t>(j)] = fn(args);
    }
    return PeriodicProfile(std::move(out)).resampled(n);
}

PeriodicProfile dealiased_product(const PeriodicProfile& a, const PeriodicProfile& b) {
    const PeriodicProfile in[] = {a, b};
    return dealiased_apply(in, [](std::span<const double> v) { return v[0] * v[1]; });
}

} // namespace mudflow
