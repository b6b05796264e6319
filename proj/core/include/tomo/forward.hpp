#pragma once

// Forward models: quadrature densities, lambda-distributions (Cahill-Glauber
// parametrization lambda = (s+1)/(s-1)), their angular Fourier components,
// grid tabulation, and the closed coherent/vacuum forms used as oracles.

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomo/detail/functions_impl.hpp"
#include "tomo/detail/spline.hpp"
#include "tomo/states.hpp"

namespace tomo::forward {

// ---------------------------------------------------------------- kernels

// K^lambda_{nm}(r) = <n| D(r) K^lambda D(r)* |m>, |lambda| <= 1, lambda != 1,
// r >= 0. Evaluated through the polynomial form that carries only
// non-negative powers of lambda; m < n via conjugate symmetry
// K^lambda_nm = conj(K^{conj lambda}_mn).
std::complex<double> klambda_kernel(int n, int m, std::complex<double> lambda, double r);

// W^qd_rho(x, theta); throws std::runtime_error if the imaginary part of the
// assembled sum exceeds 1e-10 (internal-consistency check)
double quad_density(const DensityMatrix& rho, double x, double theta);

// W^qd_{rho,k}(x) = sum_n rho_{n+k,n} h_n(x) h_{n+k}(x); zero for k >= dim
std::complex<double> quad_fourier_component(const DensityMatrix& rho, int k, double x);

// W^lambda_rho(r, theta); for real lambda the imaginary part is asserted
// below 1e-10
std::complex<double> lambda_distribution(const DensityMatrix& rho, std::complex<double> lambda,
                                         double r, double theta);

// W^lambda_{rho,k}(r) = sum_n rho_{n+k,n} K^lambda_{n,n+k}(r)
std::complex<double> lambda_fourier_component(const DensityMatrix& rho,
                                              std::complex<double> lambda, int k, double r);

// closed forms
double coherent_quad_density(std::complex<double> alpha, double x, double theta);
std::complex<double> coherent_lambda_value(std::complex<double> alpha,
                                           std::complex<double> lambda, std::complex<double> z);
std::complex<double> vacuum_lambda_value(std::complex<double> lambda, double r);

// ------------------------------------------------------------- profiles

// One angular component r -> W^lambda_{rho,k}(r), closed-form (state-bound)
// or sampled. Sampled profiles need Gaussian-decay metadata to be usable
// beyond their grid (they evaluate to 0 there).
struct RadialProfile {
  enum class Kind { analytic, sampled };
  Kind kind = Kind::analytic;
  int k = 0;

  // analytic
  DensityMatrix state;
  std::complex<double> lambda{0.0, 0.0};

  // sampled
  std::vector<double> r_grid;
  std::vector<double> val_re, val_im;
  bool gaussian_decay = false;

  std::complex<double> eval(double r) const;

  template <class R>
  detail::cplx<R> eval_x(R r) const;  // extended-precision path (analytic only)

  std::shared_ptr<detail::CubicSpline> spline_re, spline_im;  // lazy, sampled
  void build_splines();
};

RadialProfile make_radial_profile(const DensityMatrix& rho, std::complex<double> lambda, int k);
RadialProfile make_sampled_radial_profile(std::vector<double> r, std::vector<double> re,
                                          std::vector<double> im, int k, bool gaussian_decay);

// Quadrature dataset: densities at a finite list of angles, closed-form
// (state-bound) or sampled on a common x grid.
struct QuadratureDataset {
  enum class Kind { analytic, sampled };
  Kind kind = Kind::analytic;
  std::vector<double> angles;

  DensityMatrix state;

  std::vector<double> x_grid;
  std::vector<std::vector<double>> values;  // [angle][x]
  bool gaussian_decay = false;

  double density(int t, double x) const;

  template <class R>
  R density_x(int t, R x) const;  // analytic only

  std::vector<std::shared_ptr<detail::CubicSpline>> splines;
  void build_splines();
};

// angles must be distinct; analytic datasets integrate to 1 by construction,
// sampled ones are checked to 1e-6 by trapezoid
QuadratureDataset make_quadrature_dataset(const DensityMatrix& rho, std::vector<double> angles);
QuadratureDataset make_sampled_quadrature_dataset(std::vector<double> angles,
                                                  std::vector<double> x_grid,
                                                  std::vector<std::vector<double>> values,
                                                  bool gaussian_decay = true);

// --------------------------------------------------------------- grids

struct DistributionGrid {
  enum class Coords { cartesian, polar };
  Coords coords = Coords::cartesian;
  std::vector<double> ax1, ax2;  // (q,p) or (r,theta), strictly increasing
  Eigen::MatrixXcd values;       // values(i,j) at (ax1[i], ax2[j])
  nlohmann::json metadata;
};

struct AxisSpec {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  std::vector<double> points() const;
};

DistributionGrid sample_lambda_grid(const DensityMatrix& rho, std::complex<double> lambda,
                                    const AxisSpec& ax1, const AxisSpec& ax2,
                                    DistributionGrid::Coords coords);

// tabulates W^qd on the x grid for each angle (sampled dataset ready for
// CSV interchange)
QuadratureDataset sample_quadrature_dataset(const DensityMatrix& rho,
                                            const std::vector<double>& angles,
                                            const AxisSpec& xaxis);

// tabulates the radial component for k on [0, rmax]
RadialProfile sample_radial_profile(const DensityMatrix& rho, std::complex<double> lambda, int k,
                                    const AxisSpec& raxis);

// ------------------------------------------------------- template bodies

template <class R>
detail::cplx<R> RadialProfile::eval_x(R r) const {
  using detail::cplx;
  if (kind == Kind::sampled) {
    // double path promoted; extended precision has nothing to gain here
    std::complex<double> v = eval(detail::xto_double(r));
    return cplx<R>{R(v.real()), R(v.imag())};
  }
  const int D = state.dim();
  if (k >= D) return cplx<R>{R(0)};
  cplx<R> lam(lambda);
  std::vector<cplx<R>> B(D - k);
  detail::damped_laguerre_seq_t<R>((int)B.size() - 1, k, lam, r, B.data());
  // sqrt(n!/(n+k)!) built iteratively
  R s = R(1);
  for (int i = 1; i <= k; ++i) s /= detail::xsqrt(R(i));
  cplx<R> acc{R(0)};
  for (int n = 0; n + k < D; ++n) {
    if (n > 0) s *= detail::xsqrt(R(n) / R(n + k));
    acc += cplx<R>(state.mat(n + k, n)) * (s * B[n]);
  }
  cplx<R> one{R(1)};
  cplx<R> pref = detail::pow_int(one - lam, (long)k + 1) *
                 detail::cexp(-(one - lam) * (r * r)) * detail::pow_int(r, (long)k);
  return pref * acc;
}

template <class R>
R QuadratureDataset::density_x(int t, R x) const {
  if (kind == Kind::sampled) return R(density(t, detail::xto_double(x)));
  const int D = state.dim();
  std::vector<R> h(D);
  detail::hermite_function_seq_t(D - 1, x, h.data());
  const double theta = angles[t];
  // real part of sum rho_mn e^{i(n-m)theta} h_n h_m
  R acc = R(0);
  for (int m = 0; m < D; ++m) {
    acc += R(state.mat(m, m).real()) * h[m] * h[m];
    for (int n = m + 1; n < D; ++n) {
      // rho_mn e^{i(n-m)theta} + rho_nm e^{-i(n-m)theta} = 2 Re(...)
      std::complex<double> w = state.mat(m, n) * std::polar(1.0, (n - m) * theta);
      acc += R(2.0 * w.real()) * h[n] * h[m];
    }
  }
  return acc;
}

}  // namespace tomo::forward
