#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tomo/forward.hpp"
#include "tomo/recon_lambda.hpp"
#include "tomo/specfun.hpp"

using namespace tomo;

namespace {
double max_err(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("radial integration: vacuum and round trips") {
  auto vac_prof = forward::make_radial_profile(fock_state(4, 0), {-0.5, 0.0}, 0);
  CHECK(std::abs(recon::reconstruct_integration(vac_prof, -0.5, 0, 0) - 1.0) < 1e-10);
  auto coh = coherent_state(12, 0.8, true);
  auto rep =
      recon::reconstruct_integration_all(recon::radial_provider_from_state(coh, -0.3), -0.3, 12);
  CHECK(max_err(rep.matrix.mat, coh.mat) < 1e-8);
  CHECK(rep.validation.ok);
}

TEST_CASE("radial integration rejects the divergent window") {
  auto prof = forward::make_radial_profile(fock_state(4, 0), {0.3, 0.0}, 0);
  try {
    (void)recon::reconstruct_integration(prof, 0.3, 0, 0);
    FAIL("expected a validity error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("lambda in (-1,0)") != std::string::npos);
    CHECK(msg.find("diverges") != std::string::npos);
    CHECK(msg.find("(1-lambda)(1-1/lambda)") != std::string::npos);
  }
  CHECK_THROWS_AS(
      (void)recon::reconstruct_integration(prof, -1.2, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)recon::reconstruct_integration(prof, 0.0, 0, 0), std::invalid_argument);
}

TEST_CASE("radial integration from sampled profiles") {
  auto rho = coherent_state(10, 0.5);
  auto sampled = forward::sample_radial_profile(rho, {-0.4, 0.0}, 0, {0.0, 10.0, 2048});
  auto v = recon::reconstruct_integration(sampled, -0.4, 0, 0);
  CHECK(std::abs(v - rho.mat(0, 0)) < 1e-4);
  forward::RadialProfile nodecay = sampled;
  nodecay.gaussian_decay = false;
  CHECK_THROWS_AS((void)recon::reconstruct_integration(nodecay, -0.4, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("divergence probe") {
  auto conv = recon::divergence_probe(-0.5, {3.0, 6.0, 9.0});
  CHECK(std::abs(conv.values[1] - 1.0) < 1e-10);
  CHECK(std::abs(conv.values[2] - 1.0) < 1e-10);
  CHECK(conv.trend == "convergent");
  auto div = recon::divergence_probe(0.3, {3.0, 6.0, 9.0});
  CHECK(std::abs(div.values[0]) < std::abs(div.values[1]));
  CHECK(std::abs(div.values[1]) < std::abs(div.values[2]));
  CHECK(div.last_ratio > 10.0);
  CHECK(div.trend == "divergent");
  auto div2 = recon::divergence_probe(0.1, {3.0, 6.0, 9.0});
  CHECK(div2.trend == "divergent");
}

TEST_CASE("Taylor coefficients from the state") {
  // vacuum: e^{(1-l)r^2} W_0(r) = (1-l), so a_0 = 1-l and nothing else
  auto tc = recon::taylor_from_state(fock_state(4, 0), 0.3, 0, 6);
  CHECK(tc.a(0).real() == doctest::Approx(0.7).epsilon(1e-14));
  for (int j = 1; j <= 6; ++j) CHECK(std::abs(tc.a(j)) < 1e-15);
  // parity zeros below k and on the odd gaps
  auto tc2 = recon::taylor_from_state(coherent_state(10, {0.4, 0.2}), 0.2, 3, 9);
  CHECK(tc2.a(0) == std::complex<double>(0.0));
  CHECK(tc2.a(2) == std::complex<double>(0.0));
  CHECK(tc2.a(4) == std::complex<double>(0.0));
  CHECK(std::abs(tc2.a(3)) > 0.0);
  // fock(4,1): coefficients against Richardson derivatives of the damped
  // profile e^{(1-l)r^2} W_{rho,0}(r)
  auto rho = fock_state(4, 1);
  double lam = 0.3;
  auto prof = forward::make_radial_profile(rho, {lam, 0.0}, 0);
  auto tc3 = recon::taylor_from_state(rho, lam, 0, 6);
  auto damped = [&](const oracles::mp50& r) {
    double rd = r.convert_to<double>();
    return oracles::mp50(std::exp((1.0 - lam) * rd * rd) * prof.eval(rd).real());
  };
  for (int l : {2, 4}) {
    double fd = oracles::richardson_derivative(damped, l, 0.0, 1e-2);
    double fact = std::exp(specfun::log_factorial(l));
    CHECK(std::abs(tc3.a(l).real() - fd / fact) < 1e-6);
  }
}

TEST_CASE("Taylor coefficients fitted from samples") {
  double lam = 0.25;
  auto vac = fock_state(3, 0);
  auto prof = forward::make_radial_profile(vac, {lam, 0.0}, 0);
  std::vector<double> r;
  std::vector<std::complex<double>> w;
  for (int i = 0; i < 64; ++i) {
    r.push_back(0.5 * i / 63.0);
    w.push_back(prof.eval(r.back()));
  }
  auto tc = recon::taylor_from_samples(r, w, lam, 0, 4);
  CHECK(std::abs(tc.a(0).real() - (1.0 - lam)) < 1e-8);
  CHECK(tc.condition_number > 1.0);
  // an order far beyond the information in the samples is rejected
  CHECK_THROWS_AS((void)recon::taylor_from_samples(r, w, lam, 0, 40), std::invalid_argument);
  // noise stability: sigma = 1e-8 perturbations move low orders < 1e-5
  std::mt19937 gen(3);
  std::normal_distribution<double> noise(0.0, 1e-8);
  auto wn = w;
  for (auto& v : wn) v += noise(gen);
  auto tcn = recon::taylor_from_samples(r, wn, lam, 0, 6);
  auto tc6 = recon::taylor_from_samples(r, w, lam, 0, 6);
  for (int j = 0; j <= 6; ++j) CHECK(std::abs(tcn.a(j) - tc6.a(j)) < 1e-5);
}

TEST_CASE("derivative reconstruction round trips") {
  // lambda = 0: vacuum through the Q-function single-term path
  auto vac = fock_state(4, 0);
  auto prov0 = recon::taylor_provider_from_state(vac, 0.0);
  CHECK(std::abs(recon::reconstruct_differentiation(prov0, 0.0, 0, 0) - 1.0) < 1e-12);
  // lambda = 0.3 coherent
  auto coh = coherent_state(10, 0.7, true);
  auto prov = recon::taylor_provider_from_state(coh, 0.3);
  auto rep = recon::reconstruct_differentiation_all(prov, 0.3, 10);
  CHECK(max_err(rep.matrix.mat, coh.mat) < 1e-8);
  // near the validity edge
  auto th = thermal_klambda_state(40, 0.4);
  auto rep2 =
      recon::reconstruct_differentiation_all(recon::taylor_provider_from_state(th, 0.45), 0.45, 40);
  CHECK(max_err(rep2.matrix.mat, th.mat) < 1e-6);
  // negative lambda
  auto rep3 =
      recon::reconstruct_differentiation_all(recon::taylor_provider_from_state(coh, -0.3), -0.3, 10);
  CHECK(max_err(rep3.matrix.mat, coh.mat) < 1e-8);
}

TEST_CASE("Q-function single-term path equals the general path exactly") {
  auto rho = random_state(6, 17);
  auto prov = recon::taylor_provider_from_state(rho, 0.0);
  for (int k : {0, 1, 2})
    for (int n = 0; n + k < 6; ++n) {
      auto general = recon::reconstruct_differentiation(prov, 0.0, n, k);
      // the Q-function formula: sqrt(n!(n+k)!)/(2n+k)! * W_{rho,k,2n+k}
      auto tc = prov.coeffs(k);
      double fact = std::exp(0.5 * (specfun::log_factorial(n) + specfun::log_factorial(n + k)));
      std::complex<double> qf = fact * tc.a(2 * n + k);
      // both reduce to the single p = n term; the arithmetic orderings differ
      CHECK(std::abs(general - qf) <= 1e-15 * std::max(1.0, std::abs(qf)));
    }
}

TEST_CASE("validity window and the override") {
  auto rho = random_state(5, 7);
  auto prov = recon::taylor_provider_from_state(rho, -1.0);
  try {
    (void)recon::reconstruct_differentiation(prov, -1.0, 0, 0);
    FAIL("expected a window error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("|lambda| < 1/2") != std::string::npos);
  }
  recon::DiffOptions opts;
  opts.allow_override = true;
  auto rep = recon::reconstruct_differentiation_all(prov, -1.0, 5, opts);
  CHECK(max_err(rep.matrix.mat, rho.mat) < 1e-8);
  CHECK(rep.has_flag_containing("override"));
  // an override without a state-backed provider cannot run the decay check
  recon::TaylorProvider blind;
  blind.lambda = -1.0;
  blind.coeffs = prov.coeffs;
  CHECK_THROWS_AS((void)recon::reconstruct_differentiation(blind, -1.0, 0, 0, opts),
                  std::invalid_argument);
}

TEST_CASE("tail bound behavior") {
  // eventually geometric decay at lambda = 0.3
  double prev = recon::tail_bound(0.3, 2, 1, 40);
  for (int K = 41; K <= 60; ++K) {
    double b = recon::tail_bound(0.3, 2, 1, K);
    CHECK(b / prev < 0.9);
    prev = b;
  }
  CHECK(recon::tail_bound(0.0, 3, 2, 5) == 0.0);
  // slower decay closer to the edge: larger K needed for the same bound
  auto first_K = [](double lam) {
    for (int K = 0; K <= 2000; ++K)
      if (recon::tail_bound(lam, 1, 0, K) < 1e-8) return K;
    return -1;
  };
  CHECK(first_K(0.49) > first_K(0.1));
  CHECK(first_K(0.49) > 0);
}

TEST_CASE("decay condition check") {
  // finite matrices pass trivially
  CHECK(recon::lemma2_condition_check(recon::lemma2_sequence(random_state(6, 2), -1.0, 0)));
  CHECK(recon::lemma2_condition_check(recon::lemma2_sequence(random_state(6, 2), 0.7, 1)));
  // coherent state at lambda = 0.6: |x_n| = (l a^2)^n a^k e^{-a^2} decays
  auto coh = coherent_state(60, 0.9, true);
  auto seq = recon::lemma2_sequence(coh, 0.6, 0);
  CHECK(seq.size() >= 60);
  CHECK(recon::lemma2_condition_check(seq));
  // a flat sequence does not
  std::vector<double> ones(50, 1.0);
  CHECK_FALSE(recon::lemma2_condition_check(ones));
}

TEST_CASE("integration and differentiation agree inside both windows") {
  double lam = -0.3;
  auto states = {coherent_state(10, {0.6, -0.3}, true), fock_state(6, 2), random_state(6, 12)};
  for (const auto& rho : states) {
    auto ri = recon::reconstruct_integration_all(recon::radial_provider_from_state(rho, lam), lam,
                                                 rho.dim());
    auto rd = recon::reconstruct_differentiation_all(recon::taylor_provider_from_state(rho, lam),
                                                     lam, rho.dim());
    CHECK(max_err(ri.matrix.mat, rd.matrix.mat) < 1e-7);
  }
}

TEST_CASE("the collapsed moment identity holds for matching parity") {
  // sum_n tilde-rho_{n+k,n}/(n-u)! = W_{rho,k,l} C(l,u)^{-1} (1-l)^{-(l+1)} lambda^u,
  // u = (l-k)/2, where W_{rho,k,l} = l! a_l
  for (double lam : {0.3, -0.25}) {
    auto states = {coherent_state(10, {0.5, 0.2}, true), thermal_klambda_state(24, 0.3, true)};
    for (const auto& rho : states) {
      const int D = rho.dim();
      for (int k : {0, 1, 2})
        for (int l = k; l <= k + 6; l += 2) {
          const int u = (l - k) / 2;
          std::complex<double> lhs = 0.0;
          for (int n = u; n + k < D; ++n) {
            double w = std::exp(0.5 * (specfun::log_factorial(n + k) + specfun::log_factorial(n)) -
                                specfun::log_factorial(n - u)) *
                       std::pow(lam, n);
            lhs += rho.mat(n + k, n) * w;
          }
          auto tc = recon::taylor_from_state(rho, lam, k, l);
          std::complex<double> W = tc.a(l) * std::exp(specfun::log_factorial(l));
          std::complex<double> rhs = W / specfun::binomial(l, u) *
                                     std::pow(1.0 - lam, -(l + 1.0)) * std::pow(lam, u);
          CAPTURE(lam); CAPTURE(k); CAPTURE(l);
          CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
        }
    }
  }
}

TEST_CASE("parity vanishing of the damped derivatives") {
  auto rho = coherent_state(12, {0.3, 0.6});
  for (double lam : {0.2, -0.4})
    for (int k : {0, 1, 3}) {
      auto tc = recon::taylor_from_state(rho, lam, k, 2 * (12 - 1 - k) + k);
      for (int l = 0; l <= tc.order(); ++l)
        if (l < k || (l - k) % 2 != 0) CHECK(std::abs(tc.a(l)) <= 1e-12);
    }
}
