#include "tomo/lambda_tools.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tomo/quadrature.hpp"
#include "tomo/specfun.hpp"

namespace tomo::lambda_tools {

// ------------------------------------------------------------- kernel

std::complex<double> markov_kernel_series(const KernelSpec& spec, double x, double theta) {
  if (std::abs(spec.lambda) >= 1.0)
    throw std::invalid_argument("markov_kernel: requires |lambda| < 1");
  const double a = spec.q * std::cos(theta) + spec.p * std::sin(theta);
  const double u = x - a;
  // (1-l) sum_k (l-1)^k k!/(2^k (2k)!) H_2k(u); folded through Hermite
  // functions so neither factor overflows:
  //   term_k = (l-1)^k k!/sqrt((2k)!) pi^{1/4} e^{u^2/2} h_2k(u)
  const std::complex<double> lm1 = spec.lambda - 1.0;
  const double boost = std::pow(M_PI, 0.25) * std::exp(u * u / 2.0);
  double h_prev = std::pow(M_PI, -0.25) * std::exp(-u * u / 2.0);  // h_0
  double h_cur = std::sqrt(2.0) * u * h_prev;                      // h_1
  std::complex<double> coef = 1.0;                                 // (l-1)^k k!/sqrt((2k)!)
  std::complex<double> sum = 0.0;
  int small_run = 0;
  for (int k = 0; k < spec.series_cap; ++k) {
    std::complex<double> term = coef * (boost * h_prev);  // carries h_{2k}
    sum += term;
    if (std::abs(term) < spec.series_tol * std::abs(sum))
      ++small_run;
    else
      small_run = 0;
    if (small_run >= spec.series_run) break;
    if (k + 1 == spec.series_cap)
      throw std::runtime_error("markov_kernel: Hermite series terms not decaying within cap " +
                               std::to_string(spec.series_cap));
    // advance h by two orders: h_{2k+2} needs h_{2k+1}
    for (int step = 0; step < 2; ++step) {
      int m = 2 * k + 1 + step;
      double h_next =
          u * std::sqrt(2.0 / (m + 1)) * h_cur - std::sqrt((double)m / (m + 1)) * h_prev;
      h_prev = h_cur;
      h_cur = h_next;
    }
    coef *= lm1 * (double)(k + 1) / std::sqrt((double)(2 * k + 1) * (2 * k + 2));
  }
  return (1.0 - spec.lambda) * sum;
}

std::complex<double> markov_kernel(const KernelSpec& spec, double x, double theta) {
  if (std::abs(spec.lambda) >= 1.0)
    throw std::invalid_argument("markov_kernel: requires |lambda| < 1");
  if (spec.lambda.imag() != 0.0) return markov_kernel_series(spec, x, theta);
  const double l = spec.lambda.real();
  const double a = spec.q * std::cos(theta) + spec.p * std::sin(theta);
  // closed Y-form; the ratio is (1-l)/(1+l) (checked against the Hermite
  // series and the coherent-state reproduction)
  const double scale = (1.0 - l) / (1.0 + l);
  return scale * specfun::y_function(std::sqrt(scale) * (x - a));
}

// --------------------------------------------------- kernel integration

QuadratureDensity density_from_state(const DensityMatrix& rho) {
  return [rho](double x, double theta) { return forward::quad_density(rho, x, theta); };
}

QuadratureDensity density_from_coherent(std::complex<double> alpha) {
  return [alpha](double x, double theta) {
    return forward::coherent_quad_density(alpha, x, theta);
  };
}

namespace {

// Y on a uniform cubic-interpolation table: the kernel integral evaluates Y
// at ~1e8 arguments per grid, far too many for the series/fraction path.
// Table error < 3e-12; past |t| = 16 the asymptotic tail takes over.
class YTable {
 public:
  YTable() : lo_(-16.0), h_(0.005) {
    const int n = (int)std::llround((16.0 - lo_) / h_) + 1;
    y_.resize(n);
    m_.assign(n, 0.0);
    for (int i = 0; i < n; ++i) y_[i] = specfun::y_function(lo_ + i * h_);
    // natural cubic spline second derivatives, uniform grid
    std::vector<double> b(n, 0.0), d(n, 0.0), c(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (int i = 1; i + 1 < n; ++i) {
      b[i] = 4.0 * h_;
      c[i] = h_;
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h_ - (y_[i] - y_[i - 1]) / h_);
    }
    // Thomas solve with sub-diagonal a[i] = h (boundary rows excepted)
    std::vector<double> bb = b, dd = d;
    for (int i = 1; i < n; ++i) {
      double a = (i == n - 1) ? 0.0 : h_;
      double w = a / bb[i - 1];
      bb[i] -= w * c[i - 1];
      dd[i] -= w * dd[i - 1];
    }
    m_[n - 1] = dd[n - 1] / bb[n - 1];
    for (int i = n - 1; i-- > 0;) m_[i] = (dd[i] - c[i] * m_[i + 1]) / bb[i];
  }

  double operator()(double t) const {
    double at = std::fabs(t);  // Y is even
    if (at >= 16.0) {
      // -1/t^2 (1 + 3/(2t^2) + 15/(4 t^4) + 105/(8 t^6))
      double it2 = 1.0 / (at * at);
      return -it2 * (1.0 + it2 * (1.5 + it2 * (3.75 + it2 * 13.125)));
    }
    double s = (at - lo_) / h_;
    int i = (int)s;
    double A = (i + 1) - s, B = s - i;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h_ * h_ / 6.0;
  }

 private:
  double lo_, h_;
  std::vector<double> y_, m_;
};

const YTable& y_table() {
  static YTable t;
  return t;
}

int thread_budget() {
  if (const char* env = std::getenv("TOMO_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? (int)hw : 1;
}

void parallel_rows(int rows, const std::function<void(int)>& work) {
  const int workers = std::min(thread_budget(), rows);
  if (workers <= 1) {
    for (int i = 0; i < rows; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < rows; i = next.fetch_add(1)) work(i);
    });
  for (auto& t : pool) t.join();
}

forward::DistributionGrid kernel_grid(const QuadratureDensity& density,
                                      std::complex<double> lambda, const forward::AxisSpec& qax,
                                      const forward::AxisSpec& pax,
                                      const std::vector<double>& thetas, int x_nodes) {
  if (std::abs(lambda) >= 1.0)
    throw std::invalid_argument("lambda_from_quadratures: requires |lambda| < 1");
  forward::DistributionGrid g;
  g.coords = forward::DistributionGrid::Coords::cartesian;
  g.ax1 = qax.points();
  g.ax2 = pax.points();
  g.values.resize(g.ax1.size(), g.ax2.size());
  const auto& rule = quadrature::hermite_rule(x_nodes);
  const int T = (int)thetas.size();
  const double dtheta_over_2pi = 1.0 / T;  // uniform angle grid on [0, 2pi)
  // density table reused across all grid points
  std::vector<std::vector<double>> W(T, std::vector<double>(x_nodes));
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < x_nodes; ++i) W[t][i] = density(rule.x[i], thetas[t]);
  const bool real_lambda = lambda.imag() == 0.0;
  const double l = lambda.real();
  const double scale = (1.0 - l) / (1.0 + l);
  const double sq_scale = std::sqrt(std::max(scale, 0.0));
  parallel_rows((int)g.ax1.size(), [&](int iq) {
    const double q = g.ax1[iq];
    for (size_t ip = 0; ip < g.ax2.size(); ++ip) {
      const double p = g.ax2[ip];
      std::complex<double> acc = 0.0;
      for (int t = 0; t < T; ++t) {
        const double a = q * std::cos(thetas[t]) + p * std::sin(thetas[t]);
        std::complex<double> inner = 0.0;
        if (real_lambda) {
          const YTable& yt = y_table();
          double s = 0.0;
          for (int i = 0; i < x_nodes; ++i)
            s += rule.tw[i] * yt(sq_scale * (rule.x[i] - a)) * W[t][i];
          inner = scale * s;
        } else {
          KernelSpec spec{lambda, q, p};
          for (int i = 0; i < x_nodes; ++i)
            inner += rule.tw[i] * markov_kernel_series(spec, rule.x[i], thetas[t]) * W[t][i];
        }
        acc += inner;
      }
      g.values(iq, ip) = acc * dtheta_over_2pi;
    }
  });
  g.metadata["kind"] = "lambda";
  g.metadata["lambda_re"] = lambda.real();
  g.metadata["lambda_im"] = lambda.imag();
  g.metadata["built_from"] = "quadrature-markov-kernel";
  g.metadata["theta_points"] = T;
  g.metadata["x_nodes"] = x_nodes;
  return g;
}

}  // namespace

forward::DistributionGrid lambda_from_quadratures(const QuadratureDensity& density,
                                                  std::complex<double> lambda,
                                                  const forward::AxisSpec& qax,
                                                  const forward::AxisSpec& pax, int theta_points,
                                                  int x_nodes) {
  if (theta_points < 256)
    throw std::invalid_argument("lambda_from_quadratures: need >= 256 theta points");
  std::vector<double> thetas(theta_points);
  for (int t = 0; t < theta_points; ++t) thetas[t] = 2.0 * M_PI * t / theta_points;
  return kernel_grid(density, lambda, qax, pax, thetas, x_nodes);
}

forward::DistributionGrid lambda_from_quadratures(const forward::QuadratureDataset& ds,
                                                  std::complex<double> lambda,
                                                  const forward::AxisSpec& qax,
                                                  const forward::AxisSpec& pax, int x_nodes) {
  const int T = (int)ds.angles.size();
  for (int t = 0; t < T; ++t)
    if (std::abs(ds.angles[t] - 2.0 * M_PI * t / T) > 1e-9)
      throw std::invalid_argument(
          "lambda_from_quadratures: dataset angles must form the uniform grid 2 pi t / T");
  auto density = [&ds](double x, double theta) {
    const int T2 = (int)ds.angles.size();
    int t = (int)std::llround(theta * T2 / (2.0 * M_PI)) % T2;
    return ds.density(t, x);
  };
  return kernel_grid(density, lambda, qax, pax, ds.angles, x_nodes);
}

// ------------------------------------------------------------- shifting

double gaussian_shift_kernel(double lambda, double lambda_prime, double q, double p) {
  if (!(lambda > -1.0 && lambda < 1.0 && lambda_prime > -1.0 && lambda_prime < 1.0))
    throw std::invalid_argument("gaussian_shift_kernel: lambda, lambda' must lie in (-1,1)");
  if (!(lambda_prime > lambda))
    throw std::invalid_argument("gaussian_shift_kernel: requires lambda' > lambda");
  const double c = (1.0 - lambda_prime) * (1.0 - lambda) / (lambda_prime - lambda);
  return c / (2.0 * M_PI) * std::exp(-0.5 * c * (q * q + p * p));
}

namespace {

std::mutex fftw_mutex;  // plan creation is not thread-safe

struct Spectrum {
  int n1 = 0, n2 = 0;  // padded sizes
  double dq = 0, dp = 0;
  std::vector<std::complex<double>> data;  // row-major n1 x n2
};

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_uniform(const std::vector<double>& ax, const char* name) {
  const double d0 = ax[1] - ax[0];
  for (size_t i = 1; i + 1 < ax.size(); ++i)
    if (std::abs((ax[i + 1] - ax[i]) - d0) > 1e-9 * std::abs(d0))
      throw std::invalid_argument(std::string("shift_lambda: axis ") + name +
                                  " must be uniform for the spectral path");
}

Spectrum forward_fft(const forward::DistributionGrid& grid) {
  if (grid.coords != forward::DistributionGrid::Coords::cartesian)
    throw std::invalid_argument("shift_lambda: needs a cartesian (q,p) grid");
  const int m1 = (int)grid.ax1.size(), m2 = (int)grid.ax2.size();
  if (m1 < 2 || m2 < 2) throw std::invalid_argument("shift_lambda: grid too small");
  check_uniform(grid.ax1, "q");
  check_uniform(grid.ax2, "p");
  Spectrum s;
  s.n1 = next_pow2(2 * m1);  // zero padding to at least double size
  s.n2 = next_pow2(2 * m2);
  s.dq = grid.ax1[1] - grid.ax1[0];
  s.dp = grid.ax2[1] - grid.ax2[0];
  std::vector<std::complex<double>> in((size_t)s.n1 * s.n2, 0.0);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) in[(size_t)i * s.n2 + j] = grid.values(i, j);
  s.data.resize(in.size());
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_2d(s.n1, s.n2, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(s.data.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  return s;
}

void inverse_fft_into(Spectrum& s, forward::DistributionGrid& grid) {
  std::vector<std::complex<double>> out(s.data.size());
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_2d(s.n1, s.n2, reinterpret_cast<fftw_complex*>(s.data.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double norm = 1.0 / ((double)s.n1 * s.n2);
  const int m1 = (int)grid.ax1.size(), m2 = (int)grid.ax2.size();
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) grid.values(i, j) = out[(size_t)i * s.n2 + j] * norm;
}

double dft_freq(int idx, int n, double d) {
  int f = idx <= n / 2 ? idx : idx - n;
  return 2.0 * M_PI * f / (n * d);
}

void mark_interior(forward::DistributionGrid& g, double sigma) {
  g.metadata["interior"] = {{"q_lo", g.ax1.front() + 5.0 * sigma},
                            {"q_hi", g.ax1.back() - 5.0 * sigma},
                            {"p_lo", g.ax2.front() + 5.0 * sigma},
                            {"p_hi", g.ax2.back() - 5.0 * sigma}};
}

}  // namespace

forward::DistributionGrid shift_lambda_forward(const forward::DistributionGrid& grid,
                                               double lambda, double lambda_prime) {
  if (!(lambda > -1.0 && lambda < 1.0 && lambda_prime > -1.0 && lambda_prime < 1.0))
    throw std::invalid_argument("shift_lambda_forward: lambda, lambda' must lie in (-1,1)");
  if (!(lambda_prime > lambda))
    throw std::invalid_argument("shift_lambda_forward: requires lambda' > lambda");
  const double c = (1.0 - lambda_prime) * (1.0 - lambda) / (lambda_prime - lambda);
  const double sigma = 1.0 / std::sqrt(c);
  if (grid.ax1.back() - grid.ax1.front() <= 10.0 * sigma ||
      grid.ax2.back() - grid.ax2.front() <= 10.0 * sigma)
    throw std::invalid_argument(
        "shift_lambda_forward: grid margins below 5 standard deviations of the shift kernel "
        "(sigma = " +
        std::to_string(sigma) + ")");
  Spectrum s = forward_fft(grid);
  for (int i = 0; i < s.n1; ++i) {
    const double u = dft_freq(i, s.n1, s.dq);
    for (int j = 0; j < s.n2; ++j) {
      const double v = dft_freq(j, s.n2, s.dp);
      s.data[(size_t)i * s.n2 + j] *= std::exp(-0.5 * (u * u + v * v) / c);
    }
  }
  forward::DistributionGrid out;
  out.coords = grid.coords;
  out.ax1 = grid.ax1;
  out.ax2 = grid.ax2;
  out.values.resize(grid.values.rows(), grid.values.cols());
  inverse_fft_into(s, out);
  out.metadata = grid.metadata;
  out.metadata["kind"] = "lambda";
  out.metadata["lambda_re"] = lambda_prime;
  out.metadata["shift"] = {{"from", lambda}, {"to", lambda_prime}, {"direction", "forward"}};
  mark_interior(out, sigma);
  return out;
}

forward::DistributionGrid shift_lambda_inverse(const forward::DistributionGrid& grid,
                                               double lambda_prime, double lambda) {
  if (!(lambda > -1.0 && lambda < 1.0 && lambda_prime > -1.0 && lambda_prime < 1.0))
    throw std::invalid_argument("shift_lambda_inverse: lambda, lambda' must lie in (-1,1)");
  if (!(lambda < lambda_prime))
    throw std::invalid_argument("shift_lambda_inverse: requires lambda < lambda'");
  const double c = (1.0 - lambda_prime) * (1.0 - lambda) / (lambda_prime - lambda);
  const double sigma = 1.0 / std::sqrt(c);
  Spectrum s = forward_fft(grid);
  const double amp_cap = 1e8;
  const double u2_cut = 2.0 * c * std::log(amp_cap);  // where e^{u^2/(2c)} = cap
  // integrability surrogate: the divided spectrum must decay toward the
  // cutoff; compare mean magnitudes in two annuli of the retained band
  double inner_sum = 0.0, outer_sum = 0.0;
  long inner_cnt = 0, outer_cnt = 0;
  size_t zeroed = 0, retained = 0;
  for (int i = 0; i < s.n1; ++i) {
    const double u = dft_freq(i, s.n1, s.dq);
    for (int j = 0; j < s.n2; ++j) {
      const double v = dft_freq(j, s.n2, s.dp);
      const double r2 = u * u + v * v;
      auto& z = s.data[(size_t)i * s.n2 + j];
      if (r2 >= u2_cut) {
        z = 0.0;
        ++zeroed;
        continue;
      }
      z *= std::exp(0.5 * r2 / c);
      ++retained;
      const double mag = std::abs(z);
      if (r2 > 0.09 * u2_cut && r2 < 0.25 * u2_cut) {
        inner_sum += mag;
        ++inner_cnt;
      } else if (r2 > 0.64 * u2_cut) {
        outer_sum += mag;
        ++outer_cnt;
      }
    }
  }
  const double inner_mean = inner_cnt ? inner_sum / inner_cnt : 0.0;
  const double outer_mean = outer_cnt ? outer_sum / outer_cnt : 0.0;
  if (outer_cnt && inner_cnt && outer_mean > inner_mean)
    throw std::runtime_error(
        "shift_lambda_inverse: divided spectrum grows toward the regularization cutoff (mean " +
        std::to_string(outer_mean) + " past |u| = " + std::to_string(std::sqrt(0.64 * u2_cut)) +
        " vs " + std::to_string(inner_mean) +
        " inside); the deconvolution integrability condition fails on this grid");
  forward::DistributionGrid out;
  out.coords = grid.coords;
  out.ax1 = grid.ax1;
  out.ax2 = grid.ax2;
  out.values.resize(grid.values.rows(), grid.values.cols());
  inverse_fft_into(s, out);
  out.metadata = grid.metadata;
  out.metadata["kind"] = "lambda";
  out.metadata["lambda_re"] = lambda;
  out.metadata["shift"] = {{"from", lambda_prime},
                           {"to", lambda},
                           {"direction", "inverse"},
                           {"regularization_cutoff_u", std::sqrt(u2_cut)},
                           {"zeroed_fraction", (double)zeroed / (double)(zeroed + retained)}};
  mark_interior(out, sigma);
  return out;
}

}  // namespace tomo::lambda_tools
