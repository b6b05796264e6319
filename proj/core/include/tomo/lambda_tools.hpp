#pragma once

// Bridges between representations: build lambda-distributions from
// quadrature data through the generalized Markov kernel, and move between
// lambda parameters by Gaussian convolution / its Fourier inverse.

#include <complex>
#include <functional>

#include "tomo/forward.hpp"

namespace tomo::lambda_tools {

struct KernelSpec {
  std::complex<double> lambda;  // |lambda| < 1
  double q = 0.0, p = 0.0;      // shift center
  int series_cap = 2000;
  double series_tol = 1e-15;
  int series_run = 30;  // consecutive small terms required to stop
};

// M^{q,p}_lambda(x, theta); real lambda evaluates the closed Y-form,
// complex lambda the Hermite series. Throws when the series does not settle
// within the cap.
std::complex<double> markov_kernel(const KernelSpec& spec, double x, double theta);

// series path exposed for the dual-evaluation consistency check
std::complex<double> markov_kernel_series(const KernelSpec& spec, double x, double theta);

using QuadratureDensity = std::function<double(double x, double theta)>;

QuadratureDensity density_from_state(const DensityMatrix& rho);
QuadratureDensity density_from_coherent(std::complex<double> alpha);

// W^lambda(q,p) = Int M^{q,p}_lambda(x,theta) W^qd(x,theta) dx dtheta / (2pi)
// Gauss-Hermite in x (total weights), trapezoid in theta with >= 256 points.
// Parallel over grid rows; TOMO_THREADS caps the worker count.
forward::DistributionGrid lambda_from_quadratures(const QuadratureDensity& density,
                                                  std::complex<double> lambda,
                                                  const forward::AxisSpec& qax,
                                                  const forward::AxisSpec& pax,
                                                  int theta_points = 256, int x_nodes = 200);

// dataset-driven variant: the measured angles provide the theta grid (must
// be the uniform grid 2 pi t / T)
forward::DistributionGrid lambda_from_quadratures(const forward::QuadratureDataset& ds,
                                                  std::complex<double> lambda,
                                                  const forward::AxisSpec& qax,
                                                  const forward::AxisSpec& pax, int x_nodes = 200);

// g_{lambda,lambda'}(q,p), the unit-mass Gaussian linking W^lambda to
// W^lambda' by convolution; requires lambda' > lambda, both in (-1,1)
double gaussian_shift_kernel(double lambda, double lambda_prime, double q, double p);

// W^lambda' = W^lambda * g by zero-padded spectral multiplication; the
// returned grid keeps the axes, marks the 5-sigma interior in metadata
forward::DistributionGrid shift_lambda_forward(const forward::DistributionGrid& grid,
                                               double lambda, double lambda_prime);

// Fourier division with truncated-spectrum regularization: frequencies
// where the amplification e^{(u^2+v^2)/(2c)} exceeds 1e8 are zeroed and
// reported. Throws when the divided spectrum grows toward the cutoff (the
// discrete surrogate of the integrability condition).
forward::DistributionGrid shift_lambda_inverse(const forward::DistributionGrid& grid,
                                               double lambda_prime, double lambda);

}  // namespace tomo::lambda_tools
