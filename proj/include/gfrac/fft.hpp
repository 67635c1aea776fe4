#ifndef GFRAC_FFT_HPP
#define GFRAC_FFT_HPP

#include <complex>
#include <vector>

namespace gfrac {

/// In-place radix-2 FFT; size must be a power of two. inverse=true applies the
/// conjugate transform and divides by the size.
void fft(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

/// Linear convolution c[n] = sum_j a[j] b[n-j], truncated to `keep` entries,
/// via zero-padded FFT. O((len) log(len)).
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b,
                                 std::size_t keep);

} // namespace gfrac

#endif
