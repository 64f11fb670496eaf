#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace msid {

std::size_t next_pow2(std::size_t n);

// In-place radix-2 Cooley-Tukey; size must be a power of two.
// inverse=true applies the conjugate transform and scales by 1/n.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

// Forward DFT of a real series zero-padded to n_fft (power of two).
std::vector<std::complex<double>> rfft(const std::vector<double>& x,
                                       std::size_t n_fft);

}  // namespace msid
