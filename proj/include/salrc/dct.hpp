#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace salrc {

namespace detail {

// Orthonormal type-II DCT matrix, row k = basis k.
inline const std::vector<double>& dct_matrix(int n) {
  static std::map<int, std::vector<double>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    const double s0 = std::sqrt(1.0 / n);
    const double sk = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        m[static_cast<std::size_t>(k) * n + i] =
            (k == 0 ? s0 : sk) * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
      }
    }
    it = cache.emplace(n, std::move(m)).first;
  }
  return it->second;
}

// out = A * in * A^T when transpose_a == false, A^T * in * A otherwise.
inline void dct_apply(const std::vector<double>& in, std::vector<double>& out, int n,
                      bool inverse) {
  const std::vector<double>& a = dct_matrix(n);
  std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
  // tmp = A * in (forward) or A^T * in (inverse)
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const double av = inverse ? a[static_cast<std::size_t>(k) * n + r]
                                  : a[static_cast<std::size_t>(r) * n + k];
        acc += av * in[static_cast<std::size_t>(k) * n + c];
      }
      tmp[static_cast<std::size_t>(r) * n + c] = acc;
    }
  }
  out.assign(static_cast<std::size_t>(n) * n, 0.0);
  // out = tmp * A^T (forward) or tmp * A (inverse)
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const double av = inverse ? a[static_cast<std::size_t>(k) * n + c]
                                  : a[static_cast<std::size_t>(c) * n + k];
        acc += tmp[static_cast<std::size_t>(r) * n + k] * av;
      }
      out[static_cast<std::size_t>(r) * n + c] = acc;
    }
  }
}

}  // namespace detail

/// Orthonormal 2D type-II DCT of an n x n block (row-major).
inline std::vector<double> dct2(const std::vector<double>& block, int n) {
  if (n < 1 || static_cast<int>(block.size()) != n * n) {
    throw std::invalid_argument("dct2: block size mismatch");
  }
  std::vector<double> out;
  detail::dct_apply(block, out, n, false);
  return out;
}

/// Inverse of dct2.
inline std::vector<double> idct2(const std::vector<double>& coeffs, int n) {
  if (n < 1 || static_cast<int>(coeffs.size()) != n * n) {
    throw std::invalid_argument("idct2: block size mismatch");
  }
  std::vector<double> out;
  detail::dct_apply(coeffs, out, n, true);
  return out;
}

}  // namespace salrc
