#pragma once

// Templated rule builders; double seeds are declared in quadrature.hpp.
// Recurrence coefficients are precomputed once per build so the Newton
// loops touch only multiplies.

#include <vector>

#include "tomo/detail/xmath.hpp"
#include "tomo/quadrature.hpp"

namespace tomo::quadrature {

template <class R>
HermiteRule<R> build_hermite_rule(int n) {
  using tomo::detail::xabs;
  using tomo::detail::xeps;
  using tomo::detail::xexp;
  using tomo::detail::xlog;
  using tomo::detail::xpi;
  using tomo::detail::xsqrt;
  HermiteRule<R> rule;
  rule.x.resize(n);
  rule.tw.resize(n);
  // h_{m+1} = c1[m] x h_m - c2[m] h_{m-1}
  std::vector<R> c1(n), c2(n);
  for (int m = 0; m < n; ++m) {
    c1[m] = xsqrt(R(2) / R(m + 1));
    c2[m] = xsqrt(R(m) / R(m + 1));
  }
  const R pi_m4 = xexp(R(-0.25L) * xlog(xpi<R>()));
  // returns h_n and h_n'; optionally sum_{m<n} h_m^2
  auto pair_eval = [&](R x, R& hN, R& dN, R* sumsq) {
    R hm = pi_m4 * xexp(-x * x / R(2));
    R dm = -x * hm;
    R ss = hm * hm;
    R h = c1[0] * x * hm;  // h_1
    R d = c1[0] * (hm + x * dm);
    for (int m = 1; m < n; ++m) {
      if (sumsq) ss += h * h;
      R hn = c1[m] * x * h - c2[m] * hm;
      R dn = c1[m] * (h + x * d) - c2[m] * dm;
      hm = h; dm = d; h = hn; d = dn;
    }
    hN = h; dN = d;
    if (sumsq) *sumsq = ss;  // sum over m = 0..n-1
  };
  std::vector<double> seeds = hermite_seeds(n);
  const R tol = xeps<R>() * R(4);
  for (int i = 0; i < n; ++i) {
    R x = R(seeds[i]);
    for (int it = 0; it < 6; ++it) {
      R h, d;
      pair_eval(x, h, d, nullptr);
      R step = h / d;
      x -= step;
      if (xabs(step) <= tol * (R(1) + xabs(x))) break;
    }
    R h, d, ss;
    pair_eval(x, h, d, &ss);
    rule.x[i] = x;
    rule.tw[i] = R(1) / ss;  // w e^{x^2} = 1 / sum_{m<n} h_m(x)^2
  }
  return rule;
}

template <class R>
LaguerreRule<R> build_laguerre_rule(int n, int alpha) {
  using tomo::detail::xabs;
  using tomo::detail::xeps;
  using tomo::detail::xexp;
  using tomo::detail::xlog;
  using tomo::detail::xsqrt;
  LaguerreRule<R> rule;
  rule.alpha = alpha;
  rule.x.resize(n);
  rule.w.resize(n);
  // phi_{m+1} = ((x - a[m]) phi_m - b[m] phi_{m-1}) / b[m+1]
  std::vector<R> a(n), b(n + 1);
  for (int m = 0; m < n; ++m) a[m] = R(2 * m + alpha + 1);
  for (int m = 1; m <= n; ++m) b[m] = xsqrt(R(m) * R(m + alpha));
  R lgam = R(0);  // log Gamma(alpha+1)
  for (int i = 2; i <= alpha; ++i) lgam += xlog(R(i));
  auto pair_eval = [&](R x, R& pN, R& dN, R* sumsq) {
    R pm = xexp(R(alpha) / R(2) * xlog(x) - x / R(2) - lgam / R(2));  // phi_0
    R dm = pm * (R(alpha) / (R(2) * x) - R(1) / R(2));
    R ss = pm * pm;
    R p = (x - a[0]) * pm / b[1];
    R d = (pm + (x - a[0]) * dm) / b[1];
    for (int m = 1; m < n; ++m) {
      if (sumsq) ss += p * p;
      R pn = ((x - a[m]) * p - b[m] * pm) / b[m + 1];
      R dn = (p + (x - a[m]) * d - b[m] * dm) / b[m + 1];
      pm = p; dm = d; p = pn; d = dn;
    }
    pN = p; dN = d;
    if (sumsq) *sumsq = ss;
  };
  std::vector<double> seeds = laguerre_seeds(n, alpha);
  const R tol = xeps<R>() * R(4);
  for (int i = 0; i < n; ++i) {
    R x = R(seeds[i]);
    for (int it = 0; it < 8; ++it) {
      R p, d;
      pair_eval(x, p, d, nullptr);
      R step = p / d;
      x -= step;
      if (xabs(step) <= tol * (R(1) + xabs(x))) break;
    }
    R p, d, ss;
    pair_eval(x, p, d, &ss);
    rule.x[i] = x;
    // w = x^alpha e^{-x} / sum_{m<n} phi_m(x)^2
    rule.w[i] = xexp(R(alpha) * xlog(x) - x) / ss;
  }
  return rule;
}

}  // namespace tomo::quadrature
