#include <benchmark/benchmark.h>

#include "tomo/forward.hpp"
#include "tomo/lambda_tools.hpp"
#include "tomo/detail/quadrature_impl.hpp"
#include "tomo/quadrature.hpp"
#include "tomo/recon_lambda.hpp"
#include "tomo/recon_quad.hpp"
#include "tomo/specfun.hpp"

using namespace tomo;

static void BM_Dawson(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::dawson(x));
    x += 0.37;
    if (x > 12.0) x = 0.1;
  }
}
BENCHMARK(BM_Dawson);

static void BM_YDerivativeSeq(benchmark::State& state) {
  const int pmax = (int)state.range(0);
  std::vector<double> out;
  for (auto _ : state) {
    specfun::y_derivative_seq(pmax, 1.7, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_YDerivativeSeq)->Arg(8)->Arg(32)->Arg(96);

static void BM_KLambdaKernel(benchmark::State& state) {
  std::complex<double> lam(-0.5, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(forward::klambda_kernel(6, 9, lam, 1.3));
}
BENCHMARK(BM_KLambdaKernel);

static void BM_QuadDensity(benchmark::State& state) {
  auto rho = coherent_state((int)state.range(0), {0.7, 0.2}, true);
  for (auto _ : state)
    benchmark::DoNotOptimize(forward::quad_density(rho, 0.9, 1.1));
}
BENCHMARK(BM_QuadDensity)->Arg(8)->Arg(24)->Arg(48);

static void BM_HermiteRuleBuild(benchmark::State& state) {
  const int n = (int)state.range(0);
  for (auto _ : state) {
    auto rule = quadrature::build_hermite_rule<double>(n);
    benchmark::DoNotOptimize(rule.x.data());
  }
}
BENCHMARK(BM_HermiteRuleBuild)->Arg(128)->Arg(512);

static void BM_ReconstructFull(benchmark::State& state) {
  auto rho = coherent_state((int)state.range(0), {0.6, 0.3}, true);
  recon::QuadReconOptions opts;
  opts.element_residuals = false;
  for (auto _ : state) {
    auto rep = recon::reconstruct_full(recon::provider_from_state(rho), rho.dim(), opts);
    benchmark::DoNotOptimize(rep.matrix.mat.data());
  }
}
BENCHMARK(BM_ReconstructFull)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ReconstructIntegration(benchmark::State& state) {
  auto rho = coherent_state((int)state.range(0), {0.6, 0.3}, true);
  auto provider = recon::radial_provider_from_state(rho, -0.4);
  for (auto _ : state) {
    auto rep = recon::reconstruct_integration_all(provider, -0.4, rho.dim());
    benchmark::DoNotOptimize(rep.matrix.mat.data());
  }
}
BENCHMARK(BM_ReconstructIntegration)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_MarkovKernelGrid(benchmark::State& state) {
  const int n = (int)state.range(0);
  for (auto _ : state) {
    auto g = lambda_tools::lambda_from_quadratures(lambda_tools::density_from_coherent({1.0, 0.0}),
                                                   {-0.5, 0.0}, {-3, 3, n}, {-3, 3, n});
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_MarkovKernelGrid)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

static void BM_ShiftForward(benchmark::State& state) {
  auto rho = coherent_state(12, 0.5);
  auto W = forward::sample_lambda_grid(rho, {-0.5, 0.0}, {-8, 8, 161}, {-8, 8, 161},
                                       forward::DistributionGrid::Coords::cartesian);
  for (auto _ : state) {
    auto out = lambda_tools::shift_lambda_forward(W, -0.5, 0.0);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_ShiftForward)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
