#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace rdbss::dsp {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// First `out_len` samples of the linear convolution a * b.
inline std::vector<double> convolve(std::span<const double> a, std::span<const double> b,
                                    std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  if (a.empty() || b.empty() || out_len == 0) return out;

  if (a.size() * b.size() <= 1u << 16) {
    for (std::size_t i = 0; i < a.size() && i < out_len; ++i) {
      for (std::size_t j = 0; j < b.size() && i + j < out_len; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  const std::size_t n = next_pow2(a.size() + b.size() - 1);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> full;
  fft.inv(full, fa);
  for (std::size_t i = 0; i < out_len && i < full.size(); ++i) out[i] = full[i];
  return out;
}

/// c[l] = sum_u x[u] * y[u + l] for l in [0, max_lag]; signals are zero outside their support.
inline std::vector<double> correlate(std::span<const double> x, std::span<const double> y,
                                     std::size_t max_lag) {
  const std::size_t n = next_pow2(x.size() + y.size() + max_lag);
  std::vector<double> px(n, 0.0), py(n, 0.0);
  std::copy(x.begin(), x.end(), px.begin());
  std::copy(y.begin(), y.end(), py.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fx, fy;
  fft.fwd(fx, px);
  fft.fwd(fy, py);
  for (std::size_t k = 0; k < fx.size(); ++k) fx[k] = std::conj(fx[k]) * fy[k];
  std::vector<double> full;
  fft.inv(full, fx);
  return {full.begin(), full.begin() + static_cast<std::ptrdiff_t>(max_lag + 1)};
}

} // namespace rdbss::dsp
