#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace silevy::detail {

using cvec = std::vector<std::complex<double>>;

/// In-place unnormalized DFT. sign = -1: sum x_j e^{-2 pi i jk/n};
/// sign = +1: sum x_j e^{+2 pi i jk/n}. Plans are cached per (n, sign).
void dft(cvec& data, int sign);

/// Linear convolution of nonnegative mass vectors; output size a + b - 1.
std::vector<double> convolve_masses(const std::vector<double>& a, const std::vector<double>& b);

std::size_t next_pow2(std::size_t n);

}  // namespace silevy::detail
