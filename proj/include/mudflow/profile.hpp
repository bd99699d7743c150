#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace mudflow {

/// A real 2*pi-periodic scalar function sampled at n equispaced nodes
/// x_j = 2*pi*j/n (n even), carrying both nodal values and the discrete
/// Fourier coefficients. Immutable after construction; every operation
/// returns a new profile, so concurrent use is safe.
///
/// Modal convention: mode(k) is a_k with v(x) = sum_k a_k exp(i k x),
/// a_{-k} = conj(a_k); mode(0) is the mean.
class PeriodicProfile {
public:
    PeriodicProfile() = default;
    explicit PeriodicProfile(std::vector<double> nodal);

    static PeriodicProfile zeros(int n);
    static PeriodicProfile constant(int n, double value);
    /// cos_amp*cos(k x) + sin_amp*sin(k x)
    static PeriodicProfile harmonic(int n, int k, double cos_amp, double sin_amp = 0.0);
    static PeriodicProfile sample(int n, const std::function<double(double)>& fn);
    /// Build from complex coefficients a_k given for k >= 0 (real signal).
    struct Mode {
        int k;
        double re;
        double im;
    };
    static PeriodicProfile from_modes(int n, std::span<const Mode> modes);

    bool empty() const { return nodal_.empty(); }
    int size() const { return static_cast<int>(nodal_.size()); }
    double node(int j) const;
    double value(int j) const { return nodal_[static_cast<size_t>(j)]; }
    const std::vector<double>& values() const { return nodal_; }

    double mean() const;
    double sup_norm() const;
    bool all_finite() const;

    /// a_k for signed |k| <= n/2.
    std::complex<double> mode(int k) const;
    /// Full DFT spectrum, bins 0..n-1 (Hermitian symmetric).
    const std::vector<std::complex<double>>& spectrum() const { return spectrum_; }

    /// Spectral derivative: modal multiplication by (i k)^order.
    /// Odd orders annihilate the Nyquist mode (real-signal convention).
    PeriodicProfile derivative(int order) const;

    /// Spectral interpolation onto m equispaced nodes (pad or truncate).
    PeriodicProfile resampled(int m) const;

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    double interp(double x) const;

    PeriodicProfile with_zero_mean() const;

    PeriodicProfile& operator+=(const PeriodicProfile& other);
    PeriodicProfile& operator-=(const PeriodicProfile& other);
    PeriodicProfile& operator*=(double s);
    friend PeriodicProfile operator+(PeriodicProfile a, const PeriodicProfile& b) { return a += b; }
    friend PeriodicProfile operator-(PeriodicProfile a, const PeriodicProfile& b) { return a -= b; }
    friend PeriodicProfile operator*(double s, PeriodicProfile a) { return a *= s; }

private:
    std::vector<double> nodal_;
    std::vector<std::complex<double>> spectrum_; // kept in sync with nodal_
};

/// sup-norm of the difference (profiles must share n).
double sup_distance(const PeriodicProfile& a, const PeriodicProfile& b);

/// Pointwise map evaluated on a 3n/2 padded grid and truncated back
/// (2/3 dealiasing rule). `fn` receives the input values at one node.
PeriodicProfile dealiased_apply(std::span<const PeriodicProfile> inputs,
                                const std::function<double(std::span<const double>)>& fn);

PeriodicProfile dealiased_product(const PeriodicProfile& a, const PeriodicProfile& b);

} // namespace mudflow
