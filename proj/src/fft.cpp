#include "lmsamp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace lmsamp::fft {

namespace {
// fftw plan creation/destruction is not thread-safe
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::size_t next_fast_size(std::size_t n) {
  if (n <= 2) return std::max<std::size_t>(n, 1);
  for (;; ++n) {
    std::size_t m = n;
    while (m % 2 == 0) m /= 2;
    while (m % 3 == 0) m /= 3;
    while (m % 5 == 0) m /= 5;
    if (m == 1) return n;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x,
                                       std::size_t n) {
  std::vector<double> in(n, 0.0);
  std::copy(x.begin(), x.begin() + std::min(x.size(), n), in.begin());
  std::vector<std::complex<double>> out(n / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_plan p = fftw_plan_dft_r2c_1d(
        static_cast<int>(n), in.data(),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> spec,
                          std::size_t n) {
  std::vector<std::complex<double>> in(spec.begin(), spec.end());
  in.resize(n / 2 + 1);
  std::vector<double> out(n);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_plan p = fftw_plan_dft_c2r_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        out.data(), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b) {
  const std::size_t la = a.size(), lb = b.size();
  if (la == 0 || lb == 0) return {};
  const std::size_t lout = la + lb - 1;
  if (std::min(la, lb) <= 64 || lout <= 2048) {
    std::vector<double> out(lout, 0.0);
    for (std::size_t i = 0; i < la; ++i)
      for (std::size_t j = 0; j < lb; ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  const std::size_t n = next_fast_size(lout);
  auto fa = rfft(a, n);
  auto fb = rfft(b, n);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  auto full = irfft(fa, n);
  full.resize(lout);
  return full;
}

struct FixedKernelConvolver::Impl {
  std::size_t n = 0;  // fft size
  std::size_t kernel_len = 0;
  std::size_t max_input = 0;
  std::vector<std::complex<double>> kernel_spec;
  double* in = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

FixedKernelConvolver::FixedKernelConvolver(std::span<const double> kernel,
                                           std::size_t max_input)
    : impl_(std::make_unique<Impl>()) {
  impl_->kernel_len = kernel.size();
  impl_->max_input = max_input;
  impl_->n = next_fast_size(kernel.size() + max_input - 1);
  const std::size_t n = impl_->n;
  impl_->in = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    impl_->fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), impl_->in,
                                      impl_->spec, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), impl_->spec,
                                      impl_->in, FFTW_ESTIMATE);
  }
  std::fill(impl_->in, impl_->in + n, 0.0);
  std::copy(kernel.begin(), kernel.end(), impl_->in);
  fftw_execute(impl_->fwd);
  impl_->kernel_spec.assign(
      reinterpret_cast<std::complex<double>*>(impl_->spec),
      reinterpret_cast<std::complex<double>*>(impl_->spec) + n / 2 + 1);
}

FixedKernelConvolver::~FixedKernelConvolver() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
  if (impl_->in) fftw_free(impl_->in);
  if (impl_->spec) fftw_free(impl_->spec);
}

std::size_t FixedKernelConvolver::fft_size() const { return impl_->n; }

void FixedKernelConvolver::apply(std::span<const double> x,
                                 std::span<double> out) {
  const std::size_t n = impl_->n;
  std::fill(impl_->in, impl_->in + n, 0.0);
  std::copy(x.begin(), x.end(), impl_->in);
  fftw_execute(impl_->fwd);
  auto* spec = reinterpret_cast<std::complex<double>*>(impl_->spec);
  for (std::size_t i = 0; i < n / 2 + 1; ++i) spec[i] *= impl_->kernel_spec[i];
  fftw_execute(impl_->bwd);
  const double scale = 1.0 / static_cast<double>(n);
  const std::size_t keep = std::min(out.size(), n);
  for (std::size_t i = 0; i < keep; ++i) out[i] = impl_->in[i] * scale;
  for (std::size_t i = keep; i < out.size(); ++i) out[i] = 0.0;
}

}  // namespace lmsamp::fft
