#include "tomo/specfun.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "tomo/detail/functions_impl.hpp"

namespace tomo::specfun {

using detail::cplx;
using detail::f128;

double dawson(double x) { return detail::dawson_t<double>(x); }

double y_function(double x) { return 2.0 * (1.0 - 2.0 * x * dawson(x)); }

double y_derivative(int p, double x) {
  if (p < 0) throw std::domain_error("y_derivative: p must be >= 0");
  std::vector<double> seq(p + 1);
  detail::y_derivative_seq_t(p, x, seq.data());
  return seq[p];
}

void y_derivative_seq(int pmax, double x, std::vector<double>& out) {
  out.resize(pmax + 1);
  detail::y_derivative_seq_t(pmax, x, out.data());
}

double hermite_function(int n, double x) {
  if (n < 0) throw std::domain_error("hermite_function: n must be >= 0");
  std::vector<double> seq(n + 1);
  detail::hermite_function_seq_t(n, x, seq.data());
  return seq[n];
}

void hermite_function_seq(int nmax, double x, std::vector<double>& out) {
  out.resize(nmax + 1);
  detail::hermite_function_seq_t(nmax, x, out.data());
}

double hermite_poly(int n, double x) {
  if (n < 0) throw std::domain_error("hermite_poly: n must be >= 0");
  double hm = 1.0, h = 2.0 * x;
  if (n == 0) return hm;
  for (int m = 1; m < n; ++m) {
    double next = 2.0 * x * h - 2.0 * m * hm;
    hm = h;
    h = next;
  }
  if (!std::isfinite(h))
    throw std::overflow_error("hermite_poly: value exceeds the floating range");
  return h;
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: n must be >= 0");
  static std::array<double, 2049> table = [] {
    std::array<double, 2049> t{};
    t[0] = 0.0;
    for (int i = 1; i < (int)t.size(); ++i) t[i] = t[i - 1] + std::log((double)i);
    return t;
  }();
  if (n < (int)table.size()) return table[n];
  return std::lgamma((double)n + 1.0);
}

double binomial(long n, long k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  if (k > n - k) k = n - k;
  if (n <= 62) {
    unsigned long long r = 1;
    for (long i = 1; i <= k; ++i) {
      unsigned __int128 t = (unsigned __int128)r * (unsigned long long)(n - k + i);
      r = (unsigned long long)(t / (unsigned long long)i);
    }
    return (double)r;
  }
  return std::exp(log_factorial((int)n) - log_factorial((int)k) - log_factorial((int)(n - k)));
}

double binomial_signed(long a, long k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  if (a >= 0) return binomial(a, k);
  // C(a,k) = (-1)^k C(k-a-1, k)
  double v = binomial(k - a - 1, k);
  return (k % 2 == 0) ? v : -v;
}

double hermite_triple_product(int m, int n, int l) {
  if (m < 0 || n < 0 || l < 0) throw std::domain_error("hermite_triple_product: negative index");
  long tot = (long)m + n + l;
  if (tot % 2 != 0) return 0.0;
  long s = tot / 2;
  if (s - m < 0 || s - n < 0 || s - l < 0) return 0.0;
  double lg = 0.5 * (std::log(M_PI) + tot * M_LN2) + log_factorial(m) + log_factorial(n) +
              log_factorial(l) - log_factorial((int)(s - l)) - log_factorial((int)(s - m)) -
              log_factorial((int)(s - n));
  return std::exp(lg);
}

std::complex<double> laguerre(int n, int alpha, std::complex<double> x) {
  if (n < 0) throw std::domain_error("laguerre: n must be >= 0");
  // sum_{u=0}^n (-1)^u/u! C(n+alpha, n-u) x^u, binomials in log space for
  // large indices; alpha may be negative as long as n+alpha >= 0 in use.
  std::complex<double> sum = 0.0, xp = 1.0;
  for (int u = 0; u <= n; ++u) {
    double c = binomial_signed((long)n + alpha, (long)(n - u)) / std::exp(log_factorial(u));
    double sign = (u % 2 == 0) ? 1.0 : -1.0;
    sum += sign * c * xp;
    xp *= x;
  }
  return sum;
}

double laguerre_real(int n, int alpha, double x) {
  if (n < 0) throw std::domain_error("laguerre: n must be >= 0");
  std::vector<double> seq(n + 1);
  detail::laguerre_seq_t(n, alpha, x, seq.data());
  return seq[n];
}

double y_matrix_element(int m, int u, int j) {
  if (m < 0 || u < 0 || j < 0) throw std::domain_error("y_matrix_element: negative index");
  const int p = j / 2;
  const bool odd = (j % 2 != 0);
  // C(p-u, m) vanishes exactly when 0 <= p-u < m
  double bs = binomial_signed((long)p - u, m);
  if (bs == 0.0) return 0.0;
  const int gap = odd ? 2 * u + 1 : 2 * u;
  double lg = (odd ? (p + 0.5) : (double)p) * M_LN2 +
              log_factorial(p + u + (odd ? 1 : 0)) +
              0.5 * (log_factorial(m) - log_factorial(m + gap)) + std::log(std::fabs(bs));
  int sgn_exp = p + u + m + (odd ? 1 : 0);
  double sign = (sgn_exp % 2 == 0) ? 1.0 : -1.0;
  if (bs < 0) sign = -sign;
  return sign * std::exp(lg);
}

double y_matrix_element_nm(int m, int n, int j) {
  if (n < m) std::swap(m, n);  // Y^{(j)}(Q) has a symmetric matrix
  const int gap = n - m;
  if ((gap % 2) != (j % 2)) return 0.0;  // parity mismatch
  const int u = (j % 2 == 0) ? gap / 2 : (gap - 1) / 2;
  return y_matrix_element(m, u, j);
}

}  // namespace tomo::specfun
