#pragma once

// Multi-dimensional FFT helpers over Eigen's FFT module (internal).

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Core>

namespace gasp::detail {

using Complex = std::complex<double>;

// Smallest 2^a 3^b 5^c >= m.
inline int good_fft_size(int m) {
  for (int s = std::max(m, 1);; ++s) {
    int r = s;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return s;
  }
}

// In-place n-dimensional FFT of a row-major array.
inline void fftn(std::vector<Complex>& a, const Eigen::VectorXi& dims, bool inverse) {
  Eigen::FFT<double> fft;
  const int n = static_cast<int>(dims.size());
  const std::size_t total = a.size();
  std::size_t stride = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    const int len = dims(axis);
    std::vector<Complex> line(len), res(len);
    const std::size_t block = stride * len;
    for (std::size_t outer = 0; outer < total; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (int k = 0; k < len; ++k) line[k] = a[base + k * stride];
        if (inverse)
          fft.inv(res, line);
        else
          fft.fwd(res, line);
        for (int k = 0; k < len; ++k) a[base + k * stride] = res[k];
      }
    }
    stride *= len;
  }
}

}  // namespace gasp::detail
