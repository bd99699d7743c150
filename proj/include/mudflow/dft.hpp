#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mudflow::dft {

/// Discrete Fourier pair on equispaced nodes x_j = 2*pi*j/n.
/// analyze: c_k = (1/n) sum_j v_j exp(-i k x_j), k = 0..n-1, so c_0 is the
/// mean. synthesize is the exact inverse: v_j = Re sum_k c_k exp(+i k x_j).
/// Direct summation; n is small (<= a few hundred) everywhere in this
/// project and the result is deterministic.
std::vector<std::complex<double>> analyze(std::span<const double> values);
std::vector<double> synthesize(std::span<const std::complex<double>> coeffs);

/// Signed frequency of DFT bin k for length n: 0..n/2 then negative.
inline int signed_frequency(int k, int n) { return (2 * k <= n) ? k : k - n; }

} // namespace mudflow::dft
