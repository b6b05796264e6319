#pragma once

// Gauss-Hermite and generalized Gauss-Laguerre rules. Nodes come from the
// Jacobi-matrix eigenproblem in double precision and are Newton-polished in
// the target scalar type; weights come from the Christoffel identity
// 1/sum p_m(x_i)^2 evaluated through the weighted orthonormal functions so
// that nothing under- or overflows at high order.
//
// Hermite rules store "total" weights tw_i = w_i e^{x_i^2}; a Gaussian-decay
// integrand F is integrated as sum tw_i F(x_i). Laguerre rules store the raw
// weights for the weight x^alpha e^{-x}.

#include <vector>

#include "tomo/detail/xmath.hpp"

namespace tomo::quadrature {

template <class R>
struct HermiteRule {
  std::vector<R> x;
  std::vector<R> tw;  // w * e^{x^2}
};

template <class R>
struct LaguerreRule {
  int alpha = 0;
  std::vector<R> x;
  std::vector<R> w;  // raw weights for weight x^alpha e^{-x}
};

// double-precision eigenvalue seeds (ascending)
std::vector<double> hermite_seeds(int n);
std::vector<double> laguerre_seeds(int n, int alpha);

// process-wide caches
const HermiteRule<double>& hermite_rule(int n);
const HermiteRule<detail::f128>& hermite_rule_q(int n);
const LaguerreRule<double>& laguerre_rule(int n, int alpha);
const LaguerreRule<detail::f128>& laguerre_rule_q(int n, int alpha);

}  // namespace tomo::quadrature
