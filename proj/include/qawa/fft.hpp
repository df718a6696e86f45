#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qawa {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

bool is_power_of_two(size_t n);

}  // namespace qawa
