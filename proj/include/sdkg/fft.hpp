#pragma once

#include <complex>

namespace sdkg::fft {

// Unnormalized DFTs backed by FFTW. Plans are cached per length and shared
// between threads; execution is reentrant.
//   forward:  out[k] = sum_j in[j] exp(-2 pi i j k / n)
//   backward: out[j] = sum_k in[k] exp(+2 pi i j k / n)
// in and out may alias.
void forward(const std::complex<double>* in, std::complex<double>* out, int n);
void backward(const std::complex<double>* in, std::complex<double>* out, int n);

}  // namespace sdkg::fft
