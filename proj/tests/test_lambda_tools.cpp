#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tomo/forward.hpp"
#include "tomo/lambda_tools.hpp"
#include "tomo/specfun.hpp"

using namespace tomo;
namespace lt = tomo::lambda_tools;
using fw_grid = forward::DistributionGrid;

namespace {

double interior_err(const fw_grid& g, const std::function<std::complex<double>(double, double)>& ref,
                    double box) {
  double maxd = 0.0;
  for (size_t i = 0; i < g.ax1.size(); ++i)
    for (size_t j = 0; j < g.ax2.size(); ++j) {
      if (std::abs(g.ax1[i]) > box || std::abs(g.ax2[j]) > box) continue;
      maxd = std::max(maxd, std::abs(g.values(i, j) - ref(g.ax1[i], g.ax2[j])));
    }
  return maxd;
}

}  // namespace

TEST_CASE("kernel closed form, series, and the shift property") {
  lt::KernelSpec origin{{0.0, 0.0}, 0.0, 0.0};
  for (double x : {-1.0, 0.0, 0.8})
    CHECK(std::abs(lt::markov_kernel(origin, x, 0.3).real() - specfun::y_function(x)) < 1e-13);
  // dual evaluation paths agree for real lambda
  for (double lam : {0.4, -0.6}) {
    lt::KernelSpec s{{lam, 0.0}, 0.0, 0.0};
    for (double x = -4.0; x <= 4.0; x += 0.25)
      CHECK(std::abs(lt::markov_kernel(s, x, 0.0) - lt::markov_kernel_series(s, x, 0.0)) < 1e-9);
  }
  // shifted kernel is the centered kernel at x - a
  lt::KernelSpec shifted{{0.3, 0.0}, 0.7, -0.4};
  lt::KernelSpec centered{{0.3, 0.0}, 0.0, 0.0};
  for (double th : {0.0, 1.2, 4.4}) {
    double a = 0.7 * std::cos(th) - 0.4 * std::sin(th);
    for (double x : {-1.0, 0.5, 2.0})
      CHECK(std::abs(lt::markov_kernel(shifted, x, th) - lt::markov_kernel(centered, x - a, th)) <
            1e-13);
  }
  // complex lambda goes through the series
  lt::KernelSpec cspec{{0.2, 0.3}, 0.0, 0.0};
  CHECK(std::abs(lt::markov_kernel(cspec, 0.7, 0.0) - lt::markov_kernel_series(cspec, 0.7, 0.0)) ==
        0.0);
  CHECK_THROWS_AS((void)lt::markov_kernel({{1.2, 0.0}, 0, 0}, 0.0, 0.0), std::invalid_argument);
  // a tiny cap forces the truncation-failure error
  lt::KernelSpec tiny{{-0.9, 0.0}, 0.0, 0.0};
  tiny.series_cap = 5;
  CHECK_THROWS_AS((void)lt::markov_kernel_series(tiny, 0.3, 0.0), std::runtime_error);
}

TEST_CASE("kernel-built grids against closed forms") {
  // coherent alpha = 1 at lambda = 0: the Q function
  std::complex<double> alpha(1.0, 0.0);
  auto q = lt::lambda_from_quadratures(lt::density_from_coherent(alpha), {0.0, 0.0}, {-3, 3, 21},
                                       {-3, 3, 21});
  CHECK(interior_err(q,
                     [&](double qq, double pp) {
                       std::complex<double> z(qq / std::sqrt(2.0), pp / std::sqrt(2.0));
                       return forward::coherent_lambda_value(alpha, {0.0, 0.0}, z);
                     },
                     3.0) < 1e-6);
  // vacuum at lambda = -0.5
  auto v = lt::lambda_from_quadratures(lt::density_from_coherent(0.0), {-0.5, 0.0}, {-3, 3, 21},
                                       {-3, 3, 21});
  CHECK(interior_err(v,
                     [&](double qq, double pp) {
                       double r2 = (qq * qq + pp * pp) / 2.0;
                       return std::complex<double>(1.5 * std::exp(-1.5 * r2), 0.0);
                     },
                     3.0) < 1e-6);
  // first excited state near the Wigner end: negative at the origin
  auto f1 = fock_state(6, 1);
  auto w = lt::lambda_from_quadratures(lt::density_from_state(f1), {-0.99, 0.0}, {-1, 1, 11},
                                       {-1, 1, 11});
  CHECK(w.values(5, 5).real() < 0.0);
}

TEST_CASE("kernel construction agrees with the direct forward model") {
  auto states = {fock_state(4, 1), coherent_state(12, {0.5, 0.5}), thermal_klambda_state(24, 0.3)};
  for (double lam : {-0.9, -0.5, 0.0, 0.4}) {
    for (const auto& rho : states) {
      auto g = lt::lambda_from_quadratures(lt::density_from_state(rho), {lam, 0.0}, {-3, 3, 13},
                                           {-3, 3, 13});
      double maxd = interior_err(
          g,
          [&](double qq, double pp) {
            std::complex<double> z(qq / std::sqrt(2.0), pp / std::sqrt(2.0));
            return forward::lambda_distribution(rho, {lam, 0.0}, std::abs(z), std::arg(z));
          },
          3.0);
      CAPTURE(lam);
      CHECK(maxd < 1e-5);
    }
  }
}

TEST_CASE("shift kernel is a unit-mass symmetric Gaussian") {
  double s = 0.0, d = 0.02;
  for (double q = -6.0; q <= 6.0; q += d)
    for (double p = -6.0; p <= 6.0; p += d) s += lt::gaussian_shift_kernel(-0.5, 0.0, q, p) * d * d;
  CHECK(std::abs(s - 1.0) < 1e-10);
  // width parameter for (-0.5, 0): (1-0)(1.5)/0.5 = 3
  double g0 = lt::gaussian_shift_kernel(-0.5, 0.0, 0.0, 0.0);
  CHECK(g0 == doctest::Approx(3.0 / (2.0 * M_PI)).epsilon(1e-14));
  double gq = lt::gaussian_shift_kernel(-0.5, 0.0, 1.0, 0.0);
  CHECK(gq == doctest::Approx(3.0 / (2.0 * M_PI) * std::exp(-1.5)).epsilon(1e-14));
  CHECK(lt::gaussian_shift_kernel(-0.5, 0.0, 0.7, -0.2) ==
        lt::gaussian_shift_kernel(-0.5, 0.0, -0.7, 0.2));
  CHECK_THROWS_AS((void)lt::gaussian_shift_kernel(0.0, -0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)lt::gaussian_shift_kernel(-0.5, 1.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("forward shift matches the closed form") {
  std::complex<double> alpha(0.5, 0.0);
  auto rho = coherent_state(16, alpha);
  auto W = forward::sample_lambda_grid(rho, {-0.5, 0.0}, {-9, 9, 181}, {-9, 9, 181},
                                       fw_grid::Coords::cartesian);
  auto W0 = lambda_tools::shift_lambda_forward(W, -0.5, 0.0);
  CHECK(interior_err(W0,
                     [&](double qq, double pp) {
                       std::complex<double> z(qq / std::sqrt(2.0), pp / std::sqrt(2.0));
                       return forward::coherent_lambda_value(alpha, {0.0, 0.0}, z);
                     },
                     3.0) < 1e-6);
  CHECK(W0.metadata["shift"]["direction"] == "forward");
  CHECK(W0.metadata.contains("interior"));
  // a nearly-degenerate shift barely moves the grid
  auto Weps = lambda_tools::shift_lambda_forward(W, -0.5, -0.5 + 1e-6);
  double maxd = 0.0;
  for (size_t i = 0; i < W.ax1.size(); ++i)
    for (size_t j = 0; j < W.ax2.size(); ++j)
      if (std::abs(W.ax1[i]) < 3 && std::abs(W.ax2[j]) < 3)
        maxd = std::max(maxd, std::abs(Weps.values(i, j) - W.values(i, j)));
  CHECK(maxd < 1e-4);
  // margins below five sigmas are rejected
  auto tiny = forward::sample_lambda_grid(rho, {-0.5, 0.0}, {-2, 2, 21}, {-2, 2, 21},
                                          fw_grid::Coords::cartesian);
  CHECK_THROWS_AS((void)lambda_tools::shift_lambda_forward(tiny, -0.5, 0.45),
                  std::invalid_argument);
}

TEST_CASE("inverse shift, identity, and the noise gate") {
  std::complex<double> alpha(0.5, 0.0);
  auto rho = coherent_state(16, alpha);
  auto W = forward::sample_lambda_grid(rho, {-0.5, 0.0}, {-9, 9, 181}, {-9, 9, 181},
                                       fw_grid::Coords::cartesian);
  auto W0 = forward::sample_lambda_grid(rho, {0.0, 0.0}, {-9, 9, 181}, {-9, 9, 181},
                                        fw_grid::Coords::cartesian);
  // deconvolve the measured-side grid down to lambda = -0.5
  auto back = lambda_tools::shift_lambda_inverse(W0, 0.0, -0.5);
  CHECK(interior_err(back,
                     [&](double qq, double pp) {
                       std::complex<double> z(qq / std::sqrt(2.0), pp / std::sqrt(2.0));
                       return forward::coherent_lambda_value(alpha, {-0.5, 0.0}, z);
                     },
                     3.0) < 1e-4);
  CHECK(back.metadata["shift"].contains("regularization_cutoff_u"));
  // inverse of forward is the identity on the interior
  auto round = lambda_tools::shift_lambda_inverse(lambda_tools::shift_lambda_forward(W, -0.5, 0.0),
                                                  0.0, -0.5);
  double maxd = 0.0;
  for (size_t i = 0; i < W.ax1.size(); ++i)
    for (size_t j = 0; j < W.ax2.size(); ++j)
      if (std::abs(W.ax1[i]) < 3 && std::abs(W.ax2[j]) < 3)
        maxd = std::max(maxd, std::abs(round.values(i, j) - W.values(i, j)));
  CHECK(maxd < 1e-4);
  // white noise fails the integrability gate
  fw_grid noise;
  noise.coords = fw_grid::Coords::cartesian;
  noise.ax1 = forward::AxisSpec{-6, 6, 121}.points();
  noise.ax2 = noise.ax1;
  noise.values.resize(121, 121);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-5e-4, 5e-4);
  for (int i = 0; i < 121; ++i)
    for (int j = 0; j < 121; ++j) noise.values(i, j) = u(gen);
  CHECK_THROWS_AS((void)lambda_tools::shift_lambda_inverse(noise, 0.0, -0.5), std::runtime_error);
}

TEST_CASE("semigroup property of shifts") {
  auto rho = coherent_state(14, {0.4, 0.3});
  auto W = forward::sample_lambda_grid(rho, {-0.7, 0.0}, {-9, 9, 181}, {-9, 9, 181},
                                       fw_grid::Coords::cartesian);
  auto two_hop = lambda_tools::shift_lambda_forward(
      lambda_tools::shift_lambda_forward(W, -0.7, -0.3), -0.3, 0.0);
  auto one_hop = lambda_tools::shift_lambda_forward(W, -0.7, 0.0);
  double maxd = 0.0;
  for (size_t i = 0; i < W.ax1.size(); ++i)
    for (size_t j = 0; j < W.ax2.size(); ++j)
      if (std::abs(W.ax1[i]) < 3 && std::abs(W.ax2[j]) < 3)
        maxd = std::max(maxd, std::abs(two_hop.values(i, j) - one_hop.values(i, j)));
  CHECK(maxd < 1e-5);
}

TEST_CASE("transfer function is positive on the discrete frequency grid") {
  // the spectral divisor e^{-(u^2+v^2)/(2c)} never vanishes; probe the
  // discrete frequencies of a typical padded grid
  double lam = -0.5, lamp = 0.0;
  double c = (1.0 - lamp) * (1.0 - lam) / (lamp - lam);
  int n = 256;
  double d = 0.1;
  for (int i = 0; i < n; ++i) {
    int f = i <= n / 2 ? i : i - n;
    double u = 2.0 * M_PI * f / (n * d);
    CHECK(std::exp(-0.5 * u * u / c) > 0.0);
  }
}
