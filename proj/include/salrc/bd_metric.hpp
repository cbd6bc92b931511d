#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace salrc {

struct RdPoint {
  double rate = 0.0;     // bits or bpp, > 0
  double quality = 0.0;  // dB or metric units
};

/// Rate-distortion curve: >= 4 points, strictly increasing rate, quality
/// non-decreasing with rate.
using RdCurve = std::vector<RdPoint>;

inline void validate_rd_curve(const RdCurve& curve) {
  if (curve.size() < 4) throw std::invalid_argument("RD curve needs at least 4 points");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve[i].rate > 0.0)) throw std::invalid_argument("RD curve rate must be positive");
    if (i > 0) {
      if (!(curve[i].rate > curve[i - 1].rate)) {
        throw std::invalid_argument("RD curve rates must be strictly increasing");
      }
      if (curve[i].quality < curve[i - 1].quality) {
        throw std::invalid_argument("RD curve quality must be non-decreasing with rate");
      }
    }
  }
}

enum class BdFit {
  CubicPoly,       // classical single cubic in (quality, log rate)
  PiecewiseCubic,  // monotone piecewise-cubic Hermite interpolation
};

namespace detail {

// Least-squares cubic of y over centered x; coefficients for powers 0..3.
struct CubicFit {
  double center = 0.0;
  std::array<double, 4> c{};

  double integral(double lo, double hi) const {
    auto anti = [this](double x) {
      const double t = x - center;
      return c[0] * t + c[1] * t * t / 2 + c[2] * t * t * t / 3 + c[3] * t * t * t * t / 4;
    };
    return anti(hi) - anti(lo);
  }
};

inline CubicFit fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  CubicFit fit;
  for (double v : x) fit.center += v;
  fit.center /= static_cast<double>(n);

  // normal equations over centered powers
  double sx[7] = {};
  double sy[4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] - fit.center;
    double p = 1.0;
    for (int k = 0; k < 7; ++k) {
      sx[k] += p;
      if (k < 4) sy[k] += p * y[i];
      p *= t;
    }
  }
  double m[4][5];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m[r][c] = sx[r + c];
    m[r][4] = sy[r];
  }
  // Gaussian elimination, partial pivoting
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    if (std::fabs(m[piv][col]) < 1e-12 * std::max(1.0, std::fabs(sx[0]))) {
      throw std::invalid_argument("degenerate RD fit (duplicate or collinear qualities)");
    }
    if (piv != col) {
      for (int c = col; c < 5; ++c) std::swap(m[piv][c], m[col][c]);
    }
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double acc = m[r][4];
    for (int c = r + 1; c < 4; ++c) acc -= m[r][c] * fit.c[c];
    fit.c[r] = acc / m[r][r];
  }
  return fit;
}

inline double integrate_cubic_poly(const std::vector<double>& q, const std::vector<double>& lr,
                                   double lo, double hi) {
  return fit_cubic(q, lr).integral(lo, hi);
}

// Fritsch-Carlson monotone cubic Hermite slopes.
inline std::vector<double> pchip_slopes(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("degenerate RD fit (duplicate qualities)");
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d_end = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d_end * d0 <= 0.0) {
      d_end = 0.0;
    } else if (d0 * d1 <= 0.0 && std::fabs(d_end) > 3 * std::fabs(d0)) {
      d_end = 3 * d0;
    }
    return d_end;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

inline double integrate_pchip(const std::vector<double>& x, const std::vector<double>& y,
                              double lo, double hi) {
  const std::vector<double> d = pchip_slopes(x, y);
  // Hermite basis antiderivatives over segment-local t.
  auto anti = [](double t, double yi, double yj, double di, double dj, double h) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double a00 = t4 / 2 - t3 + t;
    const double a10 = t4 / 4 - 2 * t3 / 3 + t2 / 2;
    const double a01 = -t4 / 2 + t3;
    const double a11 = t4 / 4 - t3 / 3;
    return h * (yi * a00 + h * di * a10 + yj * a01 + h * dj * a11);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = std::max(lo, x[i]);
    const double b = std::min(hi, x[i + 1]);
    if (b <= a) continue;
    const double h = x[i + 1] - x[i];
    const double ta = (a - x[i]) / h;
    const double tb = (b - x[i]) / h;
    total += anti(tb, y[i], y[i + 1], d[i], d[i + 1], h) -
             anti(ta, y[i], y[i + 1], d[i], d[i + 1], h);
  }
  return total;
}

}  // namespace detail

/// Bjontegaard delta bitrate of `test` against `anchor`, in percent. Fits log
/// rate as a function of quality per curve, integrates the difference over
/// the shared quality interval and maps the mean log offset back to a rate
/// ratio. Positive means the test curve spends more bits at equal quality.
inline double bd_rate(const RdCurve& anchor, const RdCurve& test, BdFit fit = BdFit::CubicPoly) {
  validate_rd_curve(anchor);
  validate_rd_curve(test);

  auto split = [](const RdCurve& c, std::vector<double>& q, std::vector<double>& lr) {
    for (const RdPoint& p : c) {
      q.push_back(p.quality);
      lr.push_back(std::log(p.rate));
    }
  };
  std::vector<double> qa, la, qt, lt;
  split(anchor, qa, la);
  split(test, qt, lt);

  const double lo = std::max(qa.front(), qt.front());
  const double hi = std::min(qa.back(), qt.back());
  if (!(hi > lo)) throw std::invalid_argument("RD curves have no quality overlap");

  double int_a, int_t;
  if (fit == BdFit::CubicPoly) {
    int_a = detail::integrate_cubic_poly(qa, la, lo, hi);
    int_t = detail::integrate_cubic_poly(qt, lt, lo, hi);
  } else {
    int_a = detail::integrate_pchip(qa, la, lo, hi);
    int_t = detail::integrate_pchip(qt, lt, lo, hi);
  }
  const double avg_diff = (int_t - int_a) / (hi - lo);
  return 100.0 * (std::exp(avg_diff) - 1.0);
}

/// Rate-control accuracy: mean and standard deviation of the absolute bpp
/// deviation between reference and achieved bits, per image.
struct AccuracyStats {
  double mean_abs_dev = 0.0;  // delta_bpp
  double stddev = 0.0;        // sigma_bpp (population convention)
};

inline AccuracyStats delta_bpp(const std::vector<std::int64_t>& reference_bits,
                               const std::vector<std::int64_t>& achieved_bits,
                               const std::vector<std::int64_t>& pixels) {
  if (reference_bits.size() != achieved_bits.size() || reference_bits.size() != pixels.size()) {
    throw std::invalid_argument("delta_bpp: list length mismatch");
  }
  if (reference_bits.empty()) throw std::invalid_argument("delta_bpp: empty lists");
  std::vector<double> dev(reference_bits.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    if (pixels[i] <= 0) throw std::invalid_argument("delta_bpp: pixel count must be positive");
    dev[i] = std::fabs(static_cast<double>(reference_bits[i]) - achieved_bits[i]) / pixels[i];
  }
  AccuracyStats stats;
  for (double v : dev) stats.mean_abs_dev += v;
  stats.mean_abs_dev /= dev.size();
  double var = 0.0;
  for (double v : dev) var += (v - stats.mean_abs_dev) * (v - stats.mean_abs_dev);
  stats.stddev = std::sqrt(var / dev.size());
  return stats;
}

}  // namespace salrc
