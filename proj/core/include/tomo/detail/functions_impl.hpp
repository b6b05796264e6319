#pragma once

// Templated bodies of the stable special-function evaluators. Instantiated
// with double and f128 in specfun.cpp; the radial-integration engine
// instantiates them once more with a wider type.

#include <stdexcept>
#include <vector>

#include "tomo/detail/xmath.hpp"

namespace tomo::detail {

// daw(x) = e^{-x^2} Integral_0^x e^{t^2} dt.
// |x| < 4: everything-positive Maclaurin form, no cancellation;
// |x| >= 4: McCabe's continued fraction, evaluated by modified Lentz.
template <class R>
R dawson_t(R x) {
  const R eps = xeps<R>();
  R ax = xabs(x);
  if (ax == R(0)) return R(0);
  if (ax < R(4)) {
    // sum_{n>=0} x^{2n+1} / (n! (2n+1)), then damp by e^{-x^2}
    R x2 = x * x;
    R t = x, s = x;
    for (int n = 1; n < 400; ++n) {
      t *= x2 / R(n);
      R contrib = t / R(2 * n + 1);
      s += contrib;
      if (xabs(contrib) < eps * xabs(s)) break;
    }
    return xexp(-x2) * s;
  }
  // daw(x) = x / (1+2x^2 - 4x^2/(3+2x^2 - 8x^2/(5+2x^2 - ...)))
  R x2 = x * x;
  const R tiny = eps * eps * eps;
  R b = R(1) + R(2) * x2;
  R f = b, C = b, D = R(0);
  for (int j = 1; j < 5000; ++j) {
    R a = R(-4 * j) * x2;
    b = R(2 * j + 1) + R(2) * x2;
    D = b + a * D;
    if (D == R(0)) D = tiny;
    C = b + a / C;
    if (C == R(0)) C = tiny;
    D = R(1) / D;
    R delta = C * D;
    f *= delta;
    if (xabs(delta - R(1)) < eps) break;
  }
  return x / f;
}

// Y := 2 daw'; fills out[p] = Y^{(p)}(x) for p = 0..pmax using
// D^{(m+1)} = -2 (x D^{(m)} + m D^{(m-1)}).
template <class R>
void y_derivative_seq_t(int pmax, R x, R* out) {
  R dprev = dawson_t(x);       // D^{(0)}
  R dcur = R(1) - R(2) * x * dprev;  // D^{(1)}
  out[0] = R(2) * dcur;
  for (int m = 1; m <= pmax; ++m) {
    R dnext = R(-2) * (x * dcur + R(m) * dprev);
    out[m] = R(2) * dnext;
    dprev = dcur;
    dcur = dnext;
  }
}

// Hermite functions h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2},
// by the normalized three-term recurrence. Underflows to 0 for |x| large.
template <class R>
void hermite_function_seq_t(int nmax, R x, R* out) {
  const R pi_m4 = xexp(R(-0.25L) * xlog(xpi<R>()));
  R h0 = pi_m4 * xexp(-x * x / R(2));
  out[0] = h0;
  if (nmax == 0) return;
  out[1] = xsqrt(R(2)) * x * h0;
  for (int n = 1; n < nmax; ++n) {
    out[n + 1] = x * xsqrt(R(2) / R(n + 1)) * out[n] - xsqrt(R(n) / R(n + 1)) * out[n - 1];
  }
}

// Raw associated Laguerre values L^alpha_0..L^alpha_nmax at real x >= 0.
template <class R>
void laguerre_seq_t(int nmax, int alpha, R x, R* out) {
  out[0] = R(1);
  if (nmax == 0) return;
  out[1] = R(1 + alpha) - x;
  for (int n = 1; n < nmax; ++n) {
    out[n + 1] = ((R(2 * n + alpha + 1) - x) * out[n] - R(n + alpha) * out[n - 1]) / R(n + 1);
  }
}

// B_n := lambda^n L^k_n(c r^2) with c = 2 - lambda - 1/lambda, the
// lambda-damped Laguerre string that stays bounded for |lambda| < 1.
// Since lambda * (c r^2) = -(1-lambda)^2 r^2, the recurrence never forms
// 1/lambda and extends smoothly to lambda = 0 where B_n = r^{2n}/n!.
template <class R>
void damped_laguerre_seq_t(int nmax, int k, cplx<R> lambda, R r, cplx<R>* out) {
  const R r2 = r * r;
  cplx<R> one{R(1)};
  cplx<R> lam_x = -(one - lambda) * (one - lambda) * r2;  // lambda * c r^2
  out[0] = one;
  if (nmax == 0) return;
  out[1] = lambda * R(1 + k) - lam_x;
  for (int n = 1; n < nmax; ++n) {
    out[n + 1] = ((lambda * R(2 * n + k + 1) - lam_x) * out[n] -
                  (lambda * lambda) * R(n + k) * out[n - 1]) / R(n + 1);
  }
}

}  // namespace tomo::detail
