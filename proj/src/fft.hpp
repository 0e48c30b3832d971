#pragma once

// Minimal thread-safe FFTW wrapper. Plans are cached per transform size and
// created under a mutex; execution uses the new-array interface on caller
// buffers, which FFTW allows concurrently.

#include <complex>
#include <vector>

namespace sww::detail {

// f_j = sum_{k=0}^{n/2} (hb_k e^{ikx_j} + conj(hb_k) e^{-ikx_j}), k=0 and
// Nyquist taken once. Input half-spectrum size n/2+1, output size n.
void complex_to_real(const std::vector<std::complex<double>>& half_spectrum,
                     std::vector<double>& values, int n);

// hb_k = (1/n) sum_j f_j e^{-ikx_j}, k = 0..n/2.
void real_to_complex(const std::vector<double>& values,
                     std::vector<std::complex<double>>& half_spectrum, int n);

}  // namespace sww::detail
