#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tomo/forward.hpp"
#include "tomo/grid_io.hpp"
#include "tomo/quadrature.hpp"
#include "tomo/specfun.hpp"

using namespace tomo;
namespace fw = tomo::forward;

TEST_CASE("quadrature density closed forms") {
  auto vac = fock_state(4, 0);
  for (double x : {-1.5, 0.3, 2.0})
    for (double th : {0.0, 1.1, 4.0})
      CHECK(fw::quad_density(vac, x, th) ==
            doctest::Approx(std::exp(-x * x) / std::sqrt(M_PI)).epsilon(1e-13));
  std::complex<double> alpha(0.9, -0.4);
  auto coh = coherent_state(28, alpha);
  for (double x : {-2.0, 0.0, 1.3})
    for (double th : {0.0, 0.7, 2.9})
      CHECK(std::abs(fw::quad_density(coh, x, th) - fw::coherent_quad_density(alpha, x, th)) <
            1e-12);
  CHECK(std::abs(fw::quad_density(fock_state(4, 1), 0.0, 0.0)) < 1e-300);  // h_1(0) = 0
}

TEST_CASE("quadrature Fourier components") {
  auto vac = fock_state(4, 0);
  double h0 = specfun::hermite_function(0, 0.7);
  CHECK(std::abs(fw::quad_fourier_component(vac, 0, 0.7) - h0 * h0) < 1e-15);
  CHECK(fw::quad_fourier_component(vac, 4, 0.7) == std::complex<double>(0.0));
  CHECK(fw::quad_fourier_component(vac, 17, 0.7) == std::complex<double>(0.0));
  // k = 1 component of a coherent state against 512-point trapezoid in theta
  auto coh = coherent_state(20, 1.0);
  const int T = 512;
  std::complex<double> acc = 0.0;
  for (int t = 0; t < T; ++t) {
    double th = 2.0 * M_PI * t / T;
    acc += std::polar(1.0, th) * fw::quad_density(coh, 0.5, th);
  }
  acc /= (double)T;
  CHECK(std::abs(fw::quad_fourier_component(coh, 1, 0.5) - acc) < 1e-10);
}

TEST_CASE("K kernel values") {
  std::complex<double> lam(-0.5, 0.0);
  for (double r : {0.0, 0.4, 1.3})
    CHECK(std::abs(fw::klambda_kernel(0, 0, lam, r) - fw::vacuum_lambda_value(lam, r)) < 1e-14);
  // lambda = 0 keeps only the u = n term: K^0_nm = e^{-r^2} r^{m+n}/sqrt(n! m!)
  for (int n : {0, 1, 2})
    for (int m : {2, 3}) {
      double r = 0.9;
      double expect = std::exp(-r * r) * std::pow(r, m + n) /
                      std::exp(0.5 * (specfun::log_factorial(n) + specfun::log_factorial(m)));
      CHECK(std::abs(fw::klambda_kernel(n, m, {0.0, 0.0}, r) - expect) < 1e-14);
    }
  // high-precision direct evaluation of the m >= n product form
  {
    using oracles::mp50;
    int n = 1, m = 3;
    mp50 lamq("-0.5"), r("0.8");
    mp50 c = 2 - lamq - 1 / lamq;
    std::complex<double> L = oracles::laguerre(n, m - n, {(c * r * r).convert_to<double>(), 0.0});
    mp50 val = sqrt(oracles::factorial(n) / oracles::factorial(m)) *
               boost::multiprecision::pow(1 - lamq, m - n + 1) * exp(-(1 - lamq) * r * r) *
               boost::multiprecision::pow(r, m - n) * boost::multiprecision::pow(lamq, n) *
               mp50(L.real());
    CHECK(std::abs(fw::klambda_kernel(1, 3, {-0.5, 0.0}, 0.8) - val.convert_to<double>()) <
          1e-12);
  }
  CHECK_THROWS_AS((void)fw::klambda_kernel(0, 0, {1.0, 0.0}, 0.5), std::invalid_argument);
  // m < n via the adjoint relation; symmetric for real lambda
  CHECK(std::abs(fw::klambda_kernel(3, 1, lam, 0.8) - fw::klambda_kernel(1, 3, lam, 0.8)) <
        1e-15);
  // complex lambda: <n|.|m> = conj(<m|.|n>) with conjugated parameter
  std::complex<double> cl(0.3, 0.4);
  CHECK(std::abs(fw::klambda_kernel(2, 1, cl, 0.6) -
                 std::conj(fw::klambda_kernel(1, 2, std::conj(cl), 0.6))) < 1e-15);
}

TEST_CASE("lambda distribution closed forms") {
  std::complex<double> lam(-0.5, 0.0);
  auto vac = fock_state(6, 0);
  for (double r : {0.0, 0.8, 2.2})
    CHECK(std::abs(fw::lambda_distribution(vac, lam, r, 1.0) - fw::vacuum_lambda_value(lam, r)) <
          1e-13);
  std::complex<double> alpha(0.7, 0.3);
  auto coh = coherent_state(26, alpha);
  for (double r : {0.3, 1.1})
    for (double th : {0.0, 2.2}) {
      std::complex<double> z = std::polar(r, th);
      CHECK(std::abs(fw::lambda_distribution(coh, lam, r, th) -
                     fw::coherent_lambda_value(alpha, lam, z)) < 1e-12);
      // lambda = 0 is the Q-function
      CHECK(std::abs(fw::lambda_distribution(coh, {0.0, 0.0}, r, th) -
                     std::exp(-std::norm(alpha - z))) < 1e-12);
    }
  // negativity at the origin for the first excited state at lambda = -1
  auto f1 = fock_state(4, 1);
  CHECK(fw::lambda_distribution(f1, {-1.0, 0.0}, 0.0, 0.0).real() ==
        doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("lambda Fourier components") {
  std::complex<double> lam(-0.4, 0.0);
  auto vac = fock_state(5, 0);
  CHECK(std::abs(fw::lambda_fourier_component(vac, lam, 0, 0.9) -
                 fw::vacuum_lambda_value(lam, 0.9)) < 1e-14);
  CHECK(fw::lambda_fourier_component(vac, lam, 5, 0.9) == std::complex<double>(0.0));
  // k = 2 component of a thermal state against 512-point theta quadrature
  auto th = thermal_klambda_state(40, 0.3);
  const int T = 512;
  std::complex<double> acc = 0.0;
  for (int t = 0; t < T; ++t) {
    double theta = 2.0 * M_PI * t / T;
    acc += std::polar(1.0, 2.0 * theta) * fw::lambda_distribution(th, lam, 1.1, theta);
  }
  acc /= (double)T;
  CHECK(std::abs(fw::lambda_fourier_component(th, lam, 2, 1.1) - acc) < 1e-10);
}

TEST_CASE("radial profiles: analytic and sampled") {
  auto coh = coherent_state(14, {0.5, 0.5});
  auto prof = fw::make_radial_profile(coh, {-0.3, 0.0}, 1);
  auto sampled = fw::sample_radial_profile(coh, {-0.3, 0.0}, 1, {0.0, 10.0, 1024});
  for (double r : {0.1, 0.9, 3.3}) CHECK(std::abs(prof.eval(r) - sampled.eval(r)) < 1e-9);
  CHECK(sampled.eval(11.5) == std::complex<double>(0.0));  // decay metadata extends by zero
  auto nodecay =
      fw::make_sampled_radial_profile(sampled.r_grid, sampled.val_re, sampled.val_im, 1, false);
  CHECK_THROWS_AS((void)nodecay.eval(11.5), std::runtime_error);
  CHECK_THROWS_AS(
      (void)fw::make_sampled_radial_profile({0.0, 0.5, 1.0}, {1, 2, 3}, {0, 0, 0}, 0, true),
      std::invalid_argument);  // too few points
}

TEST_CASE("quadrature datasets") {
  auto rho = coherent_state(12, 0.6);
  std::vector<double> angles{0.0, M_PI / 3, 2 * M_PI / 3};
  auto ds = fw::make_quadrature_dataset(rho, angles);
  auto sampled = fw::sample_quadrature_dataset(rho, angles, {-9.0, 9.0, 2048});
  for (double x : {-1.0, 0.2, 2.5})
    for (int t = 0; t < 3; ++t) CHECK(std::abs(ds.density(t, x) - sampled.density(t, x)) < 1e-9);
  CHECK_THROWS_AS((void)fw::make_quadrature_dataset(rho, {0.1, 0.1}), std::invalid_argument);
  // a non-normalized density is rejected
  std::vector<double> xg;
  for (int i = 0; i < 200; ++i) xg.push_back(-5.0 + i * 10.0 / 199);
  std::vector<std::vector<double>> vals(1, std::vector<double>(200, 0.3));
  CHECK_THROWS_AS((void)fw::make_sampled_quadrature_dataset({0.0}, xg, vals),
                  std::invalid_argument);
}

TEST_CASE("grid sampling and the vacuum Q function") {
  auto vac = fock_state(3, 0);
  auto g = fw::sample_lambda_grid(vac, {0.0, 0.0}, {-4, 4, 101}, {-4, 4, 101},
                                  fw::DistributionGrid::Coords::cartesian);
  double maxv = 0.0;
  for (size_t i = 0; i < g.ax1.size(); ++i)
    for (size_t j = 0; j < g.ax2.size(); ++j) maxv = std::max(maxv, g.values(i, j).real());
  CHECK(std::abs(maxv - 1.0) < 1e-12);  // Q peaks at 1 at the origin
  CHECK(std::abs(g.values(50, 50).real() - 1.0) < 1e-12);
  // two more grids against closed forms
  std::complex<double> alpha(0.4, -0.6), lam(-0.7, 0.0);
  auto coh = coherent_state(24, alpha);
  auto g2 = fw::sample_lambda_grid(coh, lam, {-3, 3, 21}, {-3, 3, 21},
                                   fw::DistributionGrid::Coords::cartesian);
  for (size_t i = 0; i < g2.ax1.size(); i += 5)
    for (size_t j = 0; j < g2.ax2.size(); j += 5) {
      std::complex<double> z(g2.ax1[i] / std::sqrt(2.0), g2.ax2[j] / std::sqrt(2.0));
      CHECK(std::abs(g2.values(i, j) - fw::coherent_lambda_value(alpha, lam, z)) < 1e-10);
    }
  auto g3 = fw::sample_lambda_grid(vac, lam, {0.0, 3.0, 31}, {0.0, 2 * M_PI, 17},
                                   fw::DistributionGrid::Coords::polar);
  for (size_t i = 0; i < g3.ax1.size(); i += 7)
    CHECK(std::abs(g3.values(i, 3) - fw::vacuum_lambda_value(lam, g3.ax1[i])) < 1e-12);
}

TEST_CASE("lambda distributions stay normalized") {
  // (1/pi) Int W r dr dtheta = 2 Int W_{rho,0}(r) r dr = 1, by generalized
  // Gauss-Laguerre after u = (1-lambda) r^2
  auto states = {coherent_state(16, {0.8, 0.3}), thermal_klambda_state(44, 0.4), fock_state(6, 3),
                 random_state(8, 99)};
  for (double lam : {-0.9, -0.5, 0.0, 0.4}) {
    for (const auto& rho : states) {
      const auto& rule = quadrature::laguerre_rule(96, 0);
      double om = 1.0 - lam;
      double s = 0.0;
      for (size_t i = 0; i < rule.x.size(); ++i) {
        double r = std::sqrt(rule.x[i] / om);
        // strip the e^{-u} weight carried by the profile itself
        s += rule.w[i] * std::exp(rule.x[i]) *
             fw::lambda_fourier_component(rho, {lam, 0.0}, 0, r).real() / om;
      }
      CHECK(std::abs(s - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("quadrature densities are nonnegative") {
  auto states = {coherent_state(12, {0.5, -0.5}), thermal_klambda_state(30, 0.35),
                 random_state(7, 5)};
  for (const auto& rho : states)
    for (double x = -6.0; x <= 6.0; x += 0.37)
      for (double th = 0.0; th < 2 * M_PI; th += 0.9)
        CHECK(fw::quad_density(rho, x, th) >= -1e-12);
}

TEST_CASE("adjoint conjugates the Fourier components") {
  // on a deliberately non-Hermitian matrix, replacing rho by its adjoint
  // sends the component built from rho_{n+k,n} to the conjugate of the one
  // built from rho_{n,n+k}; for Hermitian rho the component is unchanged
  // under conjugation combined with the adjoint
  DensityMatrix raw;
  raw.mat = Eigen::MatrixXcd::Random(6, 6);
  DensityMatrix adj;
  adj.mat = raw.mat.adjoint();
  std::vector<double> h;
  specfun::hermite_function_seq(5, 0.8, h);
  for (int k : {0, 1, 3}) {
    std::complex<double> lower = 0.0;  // sum_n rho_{n,n+k} h_n h_{n+k}
    for (int n = 0; n + k < 6; ++n) lower += raw.mat(n, n + k) * h[n] * h[n + k];
    auto a = fw::quad_fourier_component(adj, k, 0.8);
    CHECK(std::abs(a - std::conj(lower)) < 1e-12);
  }
  auto rho = coherent_state(14, {0.4, 0.7});
  for (int k : {0, 2}) {
    auto c = fw::quad_fourier_component(rho, k, 0.8);
    DensityMatrix adj2;
    adj2.mat = rho.mat.adjoint();
    // Hermitian: adjoint is a no-op, so the identity reduces to the lower
    // component being the conjugate of the upper one
    CHECK(std::abs(fw::quad_fourier_component(adj2, k, 0.8) - c) < 1e-15);
  }
}
