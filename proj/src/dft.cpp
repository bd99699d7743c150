#include "mudflow/dft.hpp"

#include <cmath>
#include <numbers>

namespace mudflow::dft {

std::vector<std::complex<double>> analyze(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    std::vector<std::complex<double>> coeffs(n);
    const double w = 2.0 * std::numbers::pi / n;
    for (int k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        for (int j = 0; j < n; ++j) {
            // reduce k*j mod n before taking trig: keeps arguments small
            const double a = w * static_cast<double>((static_cast<long long>(k) * j) % n);
            re += values[j] * std::cos(a);
            im -= values[j] * std::sin(a);
        }
        coeffs[k] = {re / n, im / n};
    }
    return coeffs;
}

std::vector<double> synthesize(std::span<const std::complex<double>> coeffs) {
    const int n = static_cast<int>(coeffs.size());
    std::vector<double> values(n);
    const double w = 2.0 * std::numbers::pi / n;
    for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) {
            const double a = w * static_cast<double>((static_cast<long long>(k) * j) % n);
            v += coeffs[k].real() * std::cos(a) - coeffs[k].imag() * std::sin(a);
        }
        values[j] = v;
    }
    return values;
}

} // namespace mudflow::dft
