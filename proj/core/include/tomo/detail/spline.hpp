#pragma once

// Natural cubic spline on a strictly increasing grid; used for sampled
// profiles and datasets.

#include <stdexcept>
#include <vector>

namespace tomo::detail {

class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 matching points");
    for (size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: grid must strictly increase");
    m_.assign(n, 0.0);
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = 1.0; b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    // Thomas solve
    for (size_t i = 1; i < n; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  bool covers(double x) const { return x >= x_.front() && x <= x_.back(); }
  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

  double operator()(double x) const {
    size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (x_[mid] > x ? hi : lo) = mid;
    }
    double h = x_[hi] - x_[lo];
    double A = (x_[hi] - x) / h, B = (x - x_[lo]) / h;
    return A * y_[lo] + B * y_[hi] +
           ((A * A * A - A) * m_[lo] + (B * B * B - B) * m_[hi]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace tomo::detail
