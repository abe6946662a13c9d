#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace lmsamp::fft {

/// Smallest 5-smooth integer >= n (sizes FFTW handles at O(n log n)).
std::size_t next_fast_size(std::size_t n);

/// DFT of the real input zero-padded to length n; returns the n/2+1
/// nonnegative-frequency bins.
std::vector<std::complex<double>> rfft(std::span<const double> x,
                                       std::size_t n);

/// Inverse of rfft, already scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spec,
                          std::size_t n);

/// Linear convolution (result length a.size()+b.size()-1). Uses direct
/// summation for small inputs and FFT otherwise.
std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b);

/// Repeated linear convolution against one fixed kernel. The kernel spectrum
/// and plans are prepared once; apply() then costs two transforms.
class FixedKernelConvolver {
 public:
  /// max_input: largest x.size() that will ever be passed to apply().
  FixedKernelConvolver(std::span<const double> kernel, std::size_t max_input);
  ~FixedKernelConvolver();
  FixedKernelConvolver(const FixedKernelConvolver&) = delete;
  FixedKernelConvolver& operator=(const FixedKernelConvolver&) = delete;

  /// out receives the first out.size() coefficients of kernel * x.
  void apply(std::span<const double> x, std::span<double> out);

  std::size_t fft_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lmsamp::fft
