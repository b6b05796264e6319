#pragma once

// Reconstruction from lambda-distributions: the radial-integration method
// (valid for lambda in (-1,0) only), the derivative method at r=0 (valid
// unconditionally for |lambda| < 1/2, wider under a decay condition), the
// Q-function single-term case, and the truncation/validity machinery.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "tomo/forward.hpp"
#include "tomo/recon_report.hpp"
#include "tomo/states.hpp"

namespace tomo::recon {

// ------------------------------------------------------------- integration

// rho_{n+k,n} = 2 Integral_0^infty W^lambda_{rho,k}(r) K^{1/lambda}_{n,n+k}(r) r dr,
// computed as a generalized Gauss-Laguerre sum after x = (2-lambda-1/lambda) r^2.
// Hard precondition -1 < lambda < 0: for lambda in (0,1) the vacuum integral
// already diverges since (1-lambda)(1-1/lambda) < 0.
std::complex<double> reconstruct_integration(const forward::RadialProfile& profile, double lambda,
                                             int n, int k);

using RadialProvider = std::function<forward::RadialProfile(int)>;
RadialProvider radial_provider_from_state(const DensityMatrix& rho, double lambda);

ReconstructionReport reconstruct_integration_all(const RadialProvider& provider, double lambda,
                                                 int dim);

struct DivergenceReport {
  std::vector<double> cutoffs;
  std::vector<double> values;  // truncated vacuum rho_00 integrals
  bool increasing = false;     // strictly increasing in magnitude across cutoffs
  std::string trend;           // "divergent" or "convergent"
  double last_ratio = 0.0;     // |value(last)| / |value(prev)|
};

// truncated vacuum integrals 2(1-l)(1-1/l) Integral_0^R e^{-(1-l)(1-1/l)r^2} r dr
DivergenceReport divergence_probe(double lambda, const std::vector<double>& cutoffs);

// ---------------------------------------------------------------- Taylor

// coefficients a_j of r^j in e^{(1-lambda)r^2} W^lambda_{rho,k}(r);
// a_j = 0 for j < k and for j-k odd; W_{rho,k,l} = l! a_l
struct TaylorCoefficients {
  int k = 0;
  double lambda = 0.0;
  enum class Source { analytic_from_state, fitted_from_samples } source =
      Source::analytic_from_state;
  std::vector<double> a_re, a_im;  // index j = 0..order
  bool exact_termination = false;  // finite matrix: coefficients beyond order vanish exactly
  double condition_number = 0.0;   // fitted source only

  int order() const { return (int)a_re.size() - 1; }
  std::complex<double> a(int j) const {
    if (j < 0 || j > order()) return 0.0;
    return {a_re[j], a_im[j]};
  }
};

TaylorCoefficients taylor_from_state(const DensityMatrix& rho, double lambda, int k, int order);

// least-squares fit of e^{(1-lambda)r^2} profile(r) against the parity basis
// r^{k+2j}; requires r_fit <= 0.5 and >= 4*order samples; throws when the
// design matrix condition number exceeds 1e12 (suggesting a smaller order)
TaylorCoefficients taylor_from_samples(const std::vector<double>& r,
                                       const std::vector<std::complex<double>>& w, double lambda,
                                       int k, int order);

// ---------------------------------------------------------- differentiation

// x_n = rho_{n+k,n} lambda^n sqrt((n+k)! n!), the sequence whose decay gates
// inversion beyond |lambda| < 1/2
std::vector<double> lemma2_sequence(const DensityMatrix& rho, double lambda, int k);

// true when |x_n| is eventually non-increasing and ends below tol (finite
// matrices qualify trivially)
bool lemma2_condition_check(const std::vector<double>& absx, double tol = 1e-12);

// ((K+l)!/(K-n)!) (1-|lambda|)^{-(l+1)} (|lambda|/(1-|lambda|))^K, the
// majorant of the inversion remainder at truncation index K >= n; l is the
// angular index
double tail_bound(double lambda, int l, int n, int K);

struct TaylorProvider {
  std::function<TaylorCoefficients(int)> coeffs;
  std::optional<DensityMatrix> source_state;  // enables the decay gate for overrides
  double lambda = 0.0;
};

TaylorProvider taylor_provider_from_state(const DensityMatrix& rho, double lambda);

struct DiffOptions {
  double tol = 1e-10;       // drives the truncation order via tail_bound
  bool allow_override = false;  // permit |lambda| >= 1/2 (incl. -1) with a passing decay check
  int order_cap = 200;
};

// rho_{n+k,n} = sqrt(n!/(n+k)!) sum_{p>=n} C(p,n) (p+k)! (-lambda)^{p-n}
//               (1-lambda)^{-(2p+k+1)} a_{2p+k}
// lambda = 0 collapses to the single p = n term (the Q-function formula).
std::complex<double> reconstruct_differentiation(const TaylorProvider& provider, double lambda,
                                                 int n, int k, const DiffOptions& opts = {});

ReconstructionReport reconstruct_differentiation_all(const TaylorProvider& provider, double lambda,
                                                     int dim, const DiffOptions& opts = {});

}  // namespace tomo::recon
