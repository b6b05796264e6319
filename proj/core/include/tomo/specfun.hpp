#pragma once

// Special functions feeding the distribution formulas and inversion sums:
// Hermite functions/polynomials, Dawson's integral and the derivative chain
// Y^{(p)} of Y = 2 daw', associated Laguerre polynomials with complex
// argument, and log-scaled combinatorics.
//
// All functions are pure and thread-safe.

#include <complex>
#include <vector>

namespace tomo::specfun {

// h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2}
// Stable normalized recurrence; no overflow up to n = 512 and beyond,
// underflow to 0 permitted for |x| large.
double hermite_function(int n, double x);

// fills out[0..nmax] with h_0(x)..h_nmax(x)
void hermite_function_seq(int nmax, double x, std::vector<double>& out);

// physicists' H_n(x); throws std::overflow_error when the value leaves the
// double range
double hermite_poly(int n, double x);

// Integral_R H_m H_n H_l e^{-x^2} dx, closed form; 0 for odd m+n+l and for
// l < |n-m| (and the symmetric conditions)
double hermite_triple_product(int m, int n, int l);

// daw(x) = e^{-x^2} Integral_0^x e^{t^2} dt, relative error <~ 1e-13 on |x| <= 10
double dawson(double x);

// Y(x) = 2 daw'(x)
double y_function(double x);

// Y^{(p)}(x) by the derivative recurrence on daw
double y_derivative(int p, double x);
void y_derivative_seq(int pmax, double x, std::vector<double>& out);

// L^alpha_n(x) = sum_{u=0}^n (-1)^u/u! C(n+alpha, n-u) x^u; exact finite sum
// with log-scaled binomials. Throws std::domain_error for n < 0.
std::complex<double> laguerre(int n, int alpha, std::complex<double> x);
double laguerre_real(int n, int alpha, double x);

// <m|Y^{(j)}(Q)|n'> closed forms with n' = m+2u (j even) or m+2u+1 (j odd).
// Vanishes exactly iff p >= u and m > p-u, where j = 2p or 2p+1.
double y_matrix_element(int m, int u, int j);

// matrix element for explicit row/column indices; exactly 0 when the parity
// of j does not match the parity of |n-m|
double y_matrix_element_nm(int m, int n, int j);

double log_factorial(int n);

// C(n,k); 0 for k < 0 or k > n; exact integer for n <= 62, log-scaled beyond
double binomial(long n, long k);

// C(a,k) for integer a of either sign (product form); exact 0 when
// 0 <= a < k
double binomial_signed(long a, long k);

}  // namespace tomo::specfun
