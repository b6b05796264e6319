#pragma once

// Reconstruction from rotated quadrature data: Dawson-derivative moments,
// the full-state inversion formula, its finite-angle variant, and the
// binomial inversion pair with the shift-matrix pathology demonstrator.

#include <complex>
#include <functional>
#include <vector>

#include "tomo/forward.hpp"
#include "tomo/recon_report.hpp"
#include "tomo/states.hpp"

namespace tomo::recon {

// c_{ln}(k) = (-1)^{l+n+k} 2^{k/2+l} (k+l)! sqrt(n!/(n+k)!) C(l,n);
// zero when n > l
double c_coefficient(int l, int n, int k);

// one angular Fourier component x -> W^qd_{rho,k}(x)
struct QuadComponent {
  enum class Kind { analytic, finite_angle, sampled, zero };
  Kind kind = Kind::zero;
  int k = 0;

  DensityMatrix state;                // analytic
  forward::QuadratureDataset dataset; // finite_angle

  std::vector<double> x_grid, val_re, val_im;  // sampled
  bool gaussian_decay = false;
  std::shared_ptr<detail::CubicSpline> spline_re, spline_im;

  std::complex<double> eval(double x) const;
  template <class R>
  detail::cplx<R> eval_x(R x) const;
};

QuadComponent component_from_state(const DensityMatrix& rho, int k);
QuadComponent sampled_component(int k, std::vector<double> x, std::vector<double> re,
                                std::vector<double> im, bool gaussian_decay);
QuadComponent zero_component(int k);

// tilde component from p measured angles theta_t = 2 pi t / p (checked to
// 1e-12); throws on a wrong angle grid or k outside [0, p)
QuadComponent component_from_dataset(const forward::QuadratureDataset& ds, int k);
std::complex<double> finite_angle_component(const forward::QuadratureDataset& ds, int k, double x);

struct MomentInfo {
  int nodes = 0;
  double residual = 0.0;       // |value(2N) - value(N)|
  bool sampled_input = false;  // interpolation-limited accuracy
};

// W_{rho,k,l} = Integral Y^{(k+2l)}(x) W_{rho,k}(x) dx by Gauss-Hermite with
// total weights; node count >= max(200, 4(k+2l))
std::complex<double> quad_moment(const QuadComponent& comp, int l, MomentInfo* info = nullptr);

using ComponentProvider = std::function<QuadComponent(int)>;

ComponentProvider provider_from_state(const DensityMatrix& rho);
ComponentProvider provider_from_dataset(const forward::QuadratureDataset& ds);

struct QuadReconOptions {
  bool element_residuals = true;  // re-evaluate with doubled nodes
};

// rho_{n+k,n} = (-1)^k sqrt((n+k)!/(2^k n!)) sum_{l<=n} C(n,l) W_{rho,k,l}/(2^l (k+l)!)
ReconstructionReport reconstruct_full(const ComponentProvider& provider, int dim,
                                      const QuadReconOptions& opts = {});

// finite-angle variant; result is p x p where p is the number of angles.
// Records the untestable assumption rho_mn = 0 for m,n >= p as a flag.
ReconstructionReport reconstruct_finite(const forward::QuadratureDataset& ds,
                                        const QuadReconOptions& opts = {});

// Riordan pair on finitely supported sequences:
//   y_l = sum_{n<=l} (-1)^n C(l,n) x_n   <->   x_n = sum_{l<=n} (-1)^l C(n,l) y_l
std::vector<std::complex<double>> binomial_forward(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> binomial_invert(const std::vector<std::complex<double>>& y);

// The bidiagonal/alternating formal-inverse pair: y_l = x_l + x_{l+1} with
// inverse candidate x_n = sum_{l>=n} (-1)^{l-n} y_l, which is valid exactly
// when x_n -> 0. Reproduces the three canonical cases.
struct FormalInverseCase {
  std::string name;
  bool inverse_converges = false;
  double oscillation_amplitude = 0.0;  // of the inverse partial sums
  double recovery_error = 0.0;         // max |x_hat - x| over the window (when convergent)
  bool mismatch_detected = false;      // converges but not to x
  std::vector<double> partial_sums;    // for n = 0
};

struct FormalInverseReport {
  FormalInverseCase constant_one;   // diverges
  FormalInverseCase alternating;    // converges to 0 != x
  FormalInverseCase decaying;       // recovers x (x_n = 2^{-n})
};

FormalInverseReport formal_inverse_demo();

}  // namespace tomo::recon
