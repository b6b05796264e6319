#include "tomo/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "tomo/specfun.hpp"

namespace tomo::forward {

using detail::cplx;

std::complex<double> klambda_kernel(int n, int m, std::complex<double> lambda, double r) {
  if (n < 0 || m < 0) throw std::domain_error("klambda_kernel: negative index");
  if (lambda == std::complex<double>(1.0, 0.0))
    throw std::invalid_argument("klambda_kernel: lambda = 1 is excluded");
  if (std::abs(lambda) > 1.0 + 1e-14)
    throw std::invalid_argument("klambda_kernel: requires |lambda| <= 1");
  if (r < 0.0) throw std::invalid_argument("klambda_kernel: r must be >= 0");
  if (m < n) {
    // matrix of a displaced diagonal operator: K^l_nm = conj(K^{conj l}_mn)
    return std::conj(klambda_kernel(m, n, std::conj(lambda), r));
  }
  const int k = m - n;
  cplx<double> lam(lambda);
  std::vector<cplx<double>> B(n + 1);
  detail::damped_laguerre_seq_t<double>(n, k, lam, r, B.data());
  double s = std::exp(0.5 * (specfun::log_factorial(n) - specfun::log_factorial(m)));
  cplx<double> one{1.0};
  cplx<double> pref = detail::pow_int(one - lam, (long)k + 1) *
                      detail::cexp(-(one - lam) * (r * r)) * detail::pow_int(r, (long)k);
  cplx<double> v = pref * (s * B[n]);
  return v.to_std();
}

std::complex<double> quad_fourier_component(const DensityMatrix& rho, int k, double x) {
  if (k < 0) throw std::domain_error("quad_fourier_component: k must be >= 0");
  const int D = rho.dim();
  if (k >= D) return 0.0;
  std::vector<double> h;
  specfun::hermite_function_seq(D - 1, x, h);
  std::complex<double> acc = 0.0;
  for (int n = 0; n + k < D; ++n) acc += rho.mat(n + k, n) * (h[n] * h[n + k]);
  return acc;
}

double quad_density(const DensityMatrix& rho, double x, double theta) {
  const int D = rho.dim();
  std::vector<double> h;
  specfun::hermite_function_seq(D - 1, x, h);
  std::complex<double> acc = 0.0;
  for (int m = 0; m < D; ++m)
    for (int n = 0; n < D; ++n)
      acc += rho.mat(m, n) * std::polar(1.0, (n - m) * theta) * (h[n] * h[m]);
  if (std::abs(acc.imag()) > 1e-10)
    throw std::runtime_error("quad_density: imaginary residue " + std::to_string(acc.imag()) +
                             " exceeds 1e-10; state is not Hermitian enough");
  return acc.real();
}

std::complex<double> lambda_fourier_component(const DensityMatrix& rho,
                                              std::complex<double> lambda, int k, double r) {
  if (k < 0) throw std::domain_error("lambda_fourier_component: k must be >= 0");
  if (k >= rho.dim()) return 0.0;
  RadialProfile prof = make_radial_profile(rho, lambda, k);
  return prof.eval(r);
}

std::complex<double> lambda_distribution(const DensityMatrix& rho, std::complex<double> lambda,
                                         double r, double theta) {
  if (lambda == std::complex<double>(1.0, 0.0))
    throw std::invalid_argument("lambda_distribution: lambda = 1 is excluded");
  const int D = rho.dim();
  // sum over Fourier components: k=0 plus e^{ik theta} K_{n,n+k} pairs; the
  // m > n half enters through the adjoint relation.
  std::complex<double> acc = lambda_fourier_component(rho, lambda, 0, r);
  for (int k = 1; k < D; ++k) {
    std::complex<double> wk = 0.0, wk_lower = 0.0;
    std::vector<cplx<double>> B(D - k);
    cplx<double> lam(lambda), lamc(std::conj(lambda));
    detail::damped_laguerre_seq_t<double>(D - k - 1, k, lam, r, B.data());
    std::vector<cplx<double>> Bc(D - k);
    detail::damped_laguerre_seq_t<double>(D - k - 1, k, lamc, r, Bc.data());
    double s = std::exp(-0.5 * specfun::log_factorial(k));
    cplx<double> one{1.0};
    cplx<double> pref = detail::pow_int(one - lam, (long)k + 1) *
                        detail::cexp(-(one - lam) * (r * r)) * detail::pow_int(r, (long)k);
    cplx<double> prefc = detail::pow_int(one - lamc, (long)k + 1) *
                         detail::cexp(-(one - lamc) * (r * r)) * detail::pow_int(r, (long)k);
    for (int n = 0; n + k < D; ++n) {
      if (n > 0) s *= std::sqrt((double)n / (n + k));
      // upper component rho_{n+k,n} K_{n,n+k}
      wk += rho.mat(n + k, n) * (pref * (s * B[n])).to_std();
      // lower component rho_{n,n+k} K_{n+k,n} = rho_{n,n+k} conj(K^{conj}_{n,n+k})
      wk_lower += rho.mat(n, n + k) * std::conj((prefc * (s * Bc[n])).to_std());
    }
    // W_{rho,k} = (1/2pi) int e^{ik theta} W dtheta multiplies e^{-ik theta}
    acc += std::polar(1.0, -k * theta) * wk + std::polar(1.0, k * theta) * wk_lower;
  }
  if (std::abs(lambda.imag()) < 1e-14 && std::abs(acc.imag()) > 1e-10)
    throw std::runtime_error("lambda_distribution: imaginary residue " +
                             std::to_string(acc.imag()) + " exceeds 1e-10 for real lambda");
  return acc;
}

double coherent_quad_density(std::complex<double> alpha, double x, double theta) {
  const double u = std::sqrt(2.0) * (alpha * std::polar(1.0, -theta)).real();
  return std::exp(-(x - u) * (x - u)) / std::sqrt(M_PI);
}

std::complex<double> coherent_lambda_value(std::complex<double> alpha,
                                           std::complex<double> lambda, std::complex<double> z) {
  return (1.0 - lambda) * std::exp(-(1.0 - lambda) * std::norm(alpha - z));
}

std::complex<double> vacuum_lambda_value(std::complex<double> lambda, double r) {
  return (1.0 - lambda) * std::exp(-(1.0 - lambda) * r * r);
}

// ------------------------------------------------------------- profiles

std::complex<double> RadialProfile::eval(double r) const {
  if (kind == Kind::analytic) return eval_x<double>(r).to_std();
  if (!spline_re) const_cast<RadialProfile*>(this)->build_splines();
  if (r < r_grid.front() || r > r_grid.back()) {
    if (gaussian_decay) return 0.0;
    throw std::runtime_error("RadialProfile: sample grid does not cover r=" + std::to_string(r) +
                             " and no decay metadata is present");
  }
  return {(*spline_re)(r), (*spline_im)(r)};
}

void RadialProfile::build_splines() {
  spline_re = std::make_shared<detail::CubicSpline>(r_grid, val_re);
  spline_im = std::make_shared<detail::CubicSpline>(r_grid, val_im);
}

RadialProfile make_radial_profile(const DensityMatrix& rho, std::complex<double> lambda, int k) {
  if (k < 0) throw std::domain_error("make_radial_profile: k must be >= 0");
  if (std::abs(lambda) > 1.0 + 1e-14 || lambda == std::complex<double>(1.0, 0.0))
    throw std::invalid_argument("make_radial_profile: requires |lambda| <= 1, lambda != 1");
  RadialProfile p;
  p.kind = RadialProfile::Kind::analytic;
  p.k = k;
  p.state = rho;
  p.lambda = lambda;
  return p;
}

RadialProfile make_sampled_radial_profile(std::vector<double> r, std::vector<double> re,
                                          std::vector<double> im, int k, bool gaussian_decay) {
  if (r.size() < 64)
    throw std::invalid_argument("make_sampled_radial_profile: need >= 64 sample points");
  RadialProfile p;
  p.kind = RadialProfile::Kind::sampled;
  p.k = k;
  p.r_grid = std::move(r);
  p.val_re = std::move(re);
  p.val_im = std::move(im);
  p.gaussian_decay = gaussian_decay;
  for (double v : p.val_re)
    if (!std::isfinite(v)) throw std::invalid_argument("sampled profile has non-finite values");
  p.build_splines();
  return p;
}

// ------------------------------------------------------------- datasets

double QuadratureDataset::density(int t, double x) const {
  if (kind == Kind::analytic) return density_x<double>(t, x);
  if (x < x_grid.front() || x > x_grid.back()) {
    if (gaussian_decay) return 0.0;
    throw std::runtime_error("QuadratureDataset: sample grid does not cover x=" +
                             std::to_string(x));
  }
  return (*splines[t])(x);
}

void QuadratureDataset::build_splines() {
  splines.clear();
  for (const auto& v : values)
    splines.push_back(std::make_shared<detail::CubicSpline>(x_grid, v));
}

static void check_angles(const std::vector<double>& angles) {
  if (angles.empty()) throw std::invalid_argument("quadrature dataset: no angles");
  for (size_t i = 0; i < angles.size(); ++i)
    for (size_t j = i + 1; j < angles.size(); ++j)
      if (std::abs(angles[i] - angles[j]) < 1e-12)
        throw std::invalid_argument("quadrature dataset: angles must be distinct");
}

QuadratureDataset make_quadrature_dataset(const DensityMatrix& rho, std::vector<double> angles) {
  check_angles(angles);
  QuadratureDataset d;
  d.kind = QuadratureDataset::Kind::analytic;
  d.angles = std::move(angles);
  d.state = rho;
  return d;
}

QuadratureDataset make_sampled_quadrature_dataset(std::vector<double> angles,
                                                  std::vector<double> x_grid,
                                                  std::vector<std::vector<double>> values,
                                                  bool gaussian_decay) {
  check_angles(angles);
  if (x_grid.size() < 64) throw std::invalid_argument("quadrature dataset: need >= 64 x points");
  if (values.size() != angles.size())
    throw std::invalid_argument("quadrature dataset: one density per angle required");
  QuadratureDataset d;
  d.kind = QuadratureDataset::Kind::sampled;
  d.angles = std::move(angles);
  d.x_grid = std::move(x_grid);
  d.values = std::move(values);
  d.gaussian_decay = gaussian_decay;
  // normalization check by trapezoid
  for (size_t t = 0; t < d.values.size(); ++t) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < d.x_grid.size(); ++i)
      s += 0.5 * (d.values[t][i] + d.values[t][i + 1]) * (d.x_grid[i + 1] - d.x_grid[i]);
    if (std::abs(s - 1.0) > 1e-6)
      throw std::invalid_argument("quadrature dataset: density at angle index " +
                                  std::to_string(t) + " integrates to " + std::to_string(s) +
                                  ", not 1 +- 1e-6");
  }
  d.build_splines();
  return d;
}

// --------------------------------------------------------------- grids

std::vector<double> AxisSpec::points() const {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("AxisSpec: need n >= 2 and hi > lo");
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = lo + (hi - lo) * i / (n - 1);
  return p;
}

DistributionGrid sample_lambda_grid(const DensityMatrix& rho, std::complex<double> lambda,
                                    const AxisSpec& ax1, const AxisSpec& ax2,
                                    DistributionGrid::Coords coords) {
  DistributionGrid g;
  g.coords = coords;
  g.ax1 = ax1.points();
  g.ax2 = ax2.points();
  g.values.resize(g.ax1.size(), g.ax2.size());
  for (size_t i = 0; i < g.ax1.size(); ++i)
    for (size_t j = 0; j < g.ax2.size(); ++j) {
      double r, th;
      if (coords == DistributionGrid::Coords::polar) {
        r = g.ax1[i];
        th = g.ax2[j];
      } else {
        // z = (q + ip)/sqrt(2)
        std::complex<double> z(g.ax1[i] / std::sqrt(2.0), g.ax2[j] / std::sqrt(2.0));
        r = std::abs(z);
        th = std::arg(z);
      }
      g.values(i, j) = lambda_distribution(rho, lambda, r, th);
    }
  g.metadata["kind"] = "lambda";
  g.metadata["lambda_re"] = lambda.real();
  g.metadata["lambda_im"] = lambda.imag();
  return g;
}

QuadratureDataset sample_quadrature_dataset(const DensityMatrix& rho,
                                            const std::vector<double>& angles,
                                            const AxisSpec& xaxis) {
  std::vector<double> xs = xaxis.points();
  std::vector<std::vector<double>> vals(angles.size(), std::vector<double>(xs.size()));
  for (size_t t = 0; t < angles.size(); ++t)
    for (size_t i = 0; i < xs.size(); ++i) vals[t][i] = quad_density(rho, xs[i], angles[t]);
  return make_sampled_quadrature_dataset(angles, xs, vals, true);
}

RadialProfile sample_radial_profile(const DensityMatrix& rho, std::complex<double> lambda, int k,
                                    const AxisSpec& raxis) {
  std::vector<double> rs = raxis.points();
  std::vector<double> re(rs.size()), im(rs.size());
  RadialProfile analytic = make_radial_profile(rho, lambda, k);
  for (size_t i = 0; i < rs.size(); ++i) {
    std::complex<double> v = analytic.eval(rs[i]);
    re[i] = v.real();
    im[i] = v.imag();
  }
  return make_sampled_radial_profile(rs, re, im, k, true);
}

}  // namespace tomo::forward
