#pragma once

// Extended-precision scalar support shared by the numerical kernels.
// The public API is double-based; internally several pipelines run on
// __float128 (or a boost multiprecision type in a single TU) because the
// inversion formulas contract astronomically large intermediates down to
// O(1) results.

#include <cmath>
#include <complex>
#include <cstdint>
#include <quadmath.h>

namespace tomo::detail {

using f128 = __float128;

// --- overloaded elementary functions -------------------------------------
// Non-template overloads win for f128; the generic template covers double
// and (via ADL) boost::multiprecision types.

inline f128 xexp(f128 a) { return expq(a); }
inline f128 xlog(f128 a) { return logq(a); }
inline f128 xsqrt(f128 a) { return sqrtq(a); }
inline f128 xabs(f128 a) { return fabsq(a); }
inline f128 xsin(f128 a) { return sinq(a); }
inline f128 xcos(f128 a) { return cosq(a); }
inline f128 xatan(f128 a) { return atanq(a); }
inline f128 xpow(f128 a, f128 b) { return powq(a, b); }
inline double xto_double(f128 a) { return static_cast<double>(a); }

template <class R> R xexp(const R& a) { using std::exp; return exp(a); }
template <class R> R xlog(const R& a) { using std::log; return log(a); }
template <class R> R xsqrt(const R& a) { using std::sqrt; return sqrt(a); }
template <class R> R xabs(const R& a) { using std::abs; return abs(a); }
template <class R> R xsin(const R& a) { using std::sin; return sin(a); }
template <class R> R xcos(const R& a) { using std::cos; return cos(a); }
template <class R> R xatan(const R& a) { using std::atan; return atan(a); }
template <class R> R xpow(const R& a, const R& b) { using std::pow; return pow(a, b); }
template <class R> double xto_double(const R& a) { return static_cast<double>(a); }

template <class R> R xeps();
template <> inline double xeps<double>() { return 2.2e-16; }
// 2^-112, spelled without the Q literal suffix
template <> inline f128 xeps<f128>() {
  return f128(1) / (f128(1ULL << 56) * f128(1ULL << 56));
}
// other Reals specialize in their TU

template <class R> R xpi() { return R(4) * xatan(R(1)); }

// --- minimal complex type usable with any Real ---------------------------
// std::complex over non-standard scalars is UB; this covers what we need.

template <class R>
struct cplx {
  R re{}, im{};
  cplx() = default;
  cplx(R r) : re(r) {}
  cplx(R r, R i) : re(r), im(i) {}
  explicit cplx(const std::complex<double>& z) : re(R(z.real())), im(R(z.imag())) {}

  cplx& operator+=(const cplx& o) { re += o.re; im += o.im; return *this; }
  cplx& operator-=(const cplx& o) { re -= o.re; im -= o.im; return *this; }
  friend cplx operator+(cplx a, const cplx& b) { return a += b; }
  friend cplx operator-(cplx a, const cplx& b) { return a -= b; }
  friend cplx operator-(const cplx& a) { return {-a.re, -a.im}; }
  friend cplx operator*(const cplx& a, const cplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend cplx operator*(const R& s, const cplx& a) { return {s * a.re, s * a.im}; }
  friend cplx operator*(const cplx& a, const R& s) { return {a.re * s, a.im * s}; }
  friend cplx operator/(const cplx& a, const R& s) { return {a.re / s, a.im / s}; }
  friend cplx operator/(const cplx& a, const cplx& b) {
    R d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  cplx conj() const { return {re, -im}; }
  R abs2() const { return re * re + im * im; }
  R abs() const { return xsqrt(re * re + im * im); }
  std::complex<double> to_std() const { return {xto_double(re), xto_double(im)}; }
};

template <class R>
cplx<R> pow_int(cplx<R> base, long n) {
  cplx<R> r{R(1)};
  bool inv = n < 0;
  unsigned long e = inv ? -(unsigned long)n : (unsigned long)n;
  while (e) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  if (inv) r = cplx<R>{R(1)} / r;
  return r;
}

template <class R>
R pow_int(R base, long n) {
  R r = R(1);
  bool inv = n < 0;
  unsigned long e = inv ? -(unsigned long)n : (unsigned long)n;
  while (e) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return inv ? R(1) / r : r;
}

template <class R>
cplx<R> cexp(const cplx<R>& z) {
  R m = xexp(z.re);
  return {m * xcos(z.im), m * xsin(z.im)};
}

}  // namespace tomo::detail
