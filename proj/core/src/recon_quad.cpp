#include "tomo/recon_quad.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tomo/quadrature.hpp"
#include "tomo/specfun.hpp"

namespace tomo::recon {

using detail::cplx;
using detail::f128;

double c_coefficient(int l, int n, int k) {
  if (l < 0 || n < 0 || k < 0) throw std::domain_error("c_coefficient: negative index");
  if (n > l) return 0.0;
  double lg = (0.5 * k + l) * M_LN2 + specfun::log_factorial(k + l) +
              0.5 * (specfun::log_factorial(n) - specfun::log_factorial(n + k)) +
              std::log(specfun::binomial(l, n));
  double sign = ((l + n + k) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(lg);
}

// ------------------------------------------------------------ components

template <class R>
cplx<R> QuadComponent::eval_x(R x) const {
  switch (kind) {
    case Kind::zero:
      return cplx<R>{R(0)};
    case Kind::analytic: {
      const int D = state.dim();
      if (k >= D) return cplx<R>{R(0)};
      std::vector<R> h(D);
      detail::hermite_function_seq_t(D - 1, x, h.data());
      cplx<R> acc{R(0)};
      for (int n = 0; n + k < D; ++n) acc += cplx<R>(state.mat(n + k, n)) * (h[n] * h[n + k]);
      return acc;
    }
    case Kind::finite_angle: {
      const int p = (int)dataset.angles.size();
      cplx<R> acc{R(0)};
      for (int t = 0; t < p; ++t) {
        double th = k * dataset.angles[t];
        cplx<R> w{R(std::cos(th)), R(std::sin(th))};
        acc += w * dataset.density_x<R>(t, x);
      }
      return acc / R(p);
    }
    case Kind::sampled: {
      double xd = detail::xto_double(x);
      if (xd < x_grid.front() || xd > x_grid.back()) {
        if (gaussian_decay) return cplx<R>{R(0)};
        throw std::runtime_error(
            "quad_moment: sampled component grid does not cover quadrature node x=" +
            std::to_string(xd));
      }
      return cplx<R>{R((*spline_re)(xd)), R((*spline_im)(xd))};
    }
  }
  return cplx<R>{R(0)};
}

std::complex<double> QuadComponent::eval(double x) const { return eval_x<double>(x).to_std(); }

QuadComponent component_from_state(const DensityMatrix& rho, int k) {
  if (k < 0) throw std::domain_error("component_from_state: k must be >= 0");
  QuadComponent c;
  c.kind = QuadComponent::Kind::analytic;
  c.k = k;
  c.state = rho;
  return c;
}

QuadComponent sampled_component(int k, std::vector<double> x, std::vector<double> re,
                                std::vector<double> im, bool gaussian_decay) {
  QuadComponent c;
  c.kind = QuadComponent::Kind::sampled;
  c.k = k;
  c.x_grid = std::move(x);
  c.val_re = std::move(re);
  c.val_im = std::move(im);
  c.gaussian_decay = gaussian_decay;
  c.spline_re = std::make_shared<detail::CubicSpline>(c.x_grid, c.val_re);
  c.spline_im = std::make_shared<detail::CubicSpline>(c.x_grid, c.val_im);
  return c;
}

QuadComponent zero_component(int k) {
  QuadComponent c;
  c.kind = QuadComponent::Kind::zero;
  c.k = k;
  return c;
}

static void check_roots_grid(const std::vector<double>& angles) {
  const int p = (int)angles.size();
  if (p == 0) throw std::invalid_argument("finite-angle reconstruction: empty dataset");
  for (int t = 0; t < p; ++t)
    if (std::abs(angles[t] - 2.0 * M_PI * t / p) > 1e-12)
      throw std::invalid_argument(
          "finite-angle reconstruction requires the angle grid theta_t = 2 pi t / p; angle " +
          std::to_string(t) + " is " + std::to_string(angles[t]));
}

QuadComponent component_from_dataset(const forward::QuadratureDataset& ds, int k) {
  check_roots_grid(ds.angles);
  const int p = (int)ds.angles.size();
  if (k < 0 || k >= p)
    throw std::invalid_argument("component_from_dataset: need 0 <= k < p angles");
  QuadComponent c;
  c.kind = QuadComponent::Kind::finite_angle;
  c.k = k;
  c.dataset = ds;
  return c;
}

std::complex<double> finite_angle_component(const forward::QuadratureDataset& ds, int k,
                                            double x) {
  return component_from_dataset(ds, k).eval(x);
}

// ------------------------------------------------------------ moments

namespace {

int round_up_nodes(int n) {
  // shared rule cache granularity
  return ((n + 127) / 128) * 128;
}

int required_nodes(int k, int l) { return std::max(200, 4 * (k + 2 * l)); }

// all moments l = 0..lmax for one component, in extended precision
std::vector<cplx<f128>> moments_batch(const QuadComponent& comp, int lmax, int nodes) {
  const auto& rule = quadrature::hermite_rule_q(nodes);
  const int jmax = comp.k + 2 * lmax;
  std::vector<cplx<f128>> M(lmax + 1, cplx<f128>{f128(0)});
  std::vector<f128> y(jmax + 1);
  for (int i = 0; i < nodes; ++i) {
    const f128 x = rule.x[i];
    cplx<f128> W = comp.eval_x<f128>(x);
    if (W.re == f128(0) && W.im == f128(0)) continue;
    detail::y_derivative_seq_t(jmax, x, y.data());
    cplx<f128> wW = rule.tw[i] * W;
    for (int l = 0; l <= lmax; ++l) M[l] += y[comp.k + 2 * l] * wW;
  }
  return M;
}

}  // namespace

std::complex<double> quad_moment(const QuadComponent& comp, int l, MomentInfo* info) {
  if (l < 0) throw std::domain_error("quad_moment: l must be >= 0");
  const int n1 = round_up_nodes(required_nodes(comp.k, l));
  auto m1 = moments_batch(comp, l, n1);
  if (info) {
    auto m2 = moments_batch(comp, l, 2 * n1);
    info->nodes = n1;
    info->residual = detail::xto_double((m2[l] - m1[l]).abs());
    info->sampled_input = comp.kind == QuadComponent::Kind::sampled;
    return m2[l].to_std();
  }
  return m1[l].to_std();
}

// ------------------------------------------------------------ inversion

namespace {

// rho_{n+k,n} for all n <= nmax from the moment table of one k
std::vector<cplx<f128>> invert_column(const std::vector<cplx<f128>>& M, int k, int nmax) {
  std::vector<cplx<f128>> out(nmax + 1);
  // prefix_n = sqrt((n+k)!/(2^k n!)), built iteratively
  f128 prefix = f128(1);
  for (int i = 1; i <= k; ++i) prefix *= detail::xsqrt(f128(i));
  prefix /= detail::pow_int(detail::xsqrt(f128(2)), (long)k);
  const f128 sgn = (k % 2 == 0) ? f128(1) : f128(-1);
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) prefix *= detail::xsqrt(f128(n + k) / f128(n));
    // c_l = C(n,l) / (2^l (k+l)!)
    f128 c = f128(1);
    for (int i = 1; i <= k; ++i) c /= f128(i);  // 1/k!
    cplx<f128> sum{f128(0)};
    for (int l = 0; l <= n; ++l) {
      sum += c * M[l];
      c *= f128(n - l) / (f128(l + 1) * f128(2) * f128(k + l + 1));
    }
    out[n] = (sgn * prefix) * sum;
  }
  return out;
}

ReconstructionReport assemble_report(int dim, const char* method,
                                     const std::vector<std::vector<cplx<f128>>>& elems,
                                     const std::vector<std::vector<cplx<f128>>>* elems_check) {
  ReconstructionReport rep;
  rep.matrix.mat = Eigen::MatrixXcd::Zero(dim, dim);
  rep.residuals = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k)
    for (int n = 0; n + k < dim; ++n) {
      std::complex<double> v = elems[k][n].to_std();
      rep.matrix.mat(n + k, n) = v;
      if (k > 0) rep.matrix.mat(n, n + k) = std::conj(v);
      if (elems_check) {
        double res = detail::xto_double((elems[k][n] - (*elems_check)[k][n]).abs());
        rep.residuals(n + k, n) = res;
        rep.residuals(n, n + k) = res;
      }
    }
  rep.validation = validate(rep.matrix);
  if (!rep.validation.ok)
    rep.flags.push_back("reconstructed matrix fails validation: " + rep.validation.failure);
  rep.diagnostics["method"] = method;
  rep.diagnostics["dim"] = dim;
  return rep;
}

}  // namespace

ReconstructionReport reconstruct_full(const ComponentProvider& provider, int dim,
                                      const QuadReconOptions& opts) {
  if (dim <= 0) throw std::invalid_argument("reconstruct_full: dim must be positive");
  std::vector<std::vector<cplx<f128>>> elems(dim), elems_lo(dim);
  bool any_sampled = false;
  int max_nodes = 0;
  for (int k = 0; k < dim; ++k) {
    QuadComponent comp = provider(k);
    const int lmax = dim - 1 - k;
    const int n1 = round_up_nodes(required_nodes(k, lmax));
    max_nodes = std::max(max_nodes, opts.element_residuals ? 2 * n1 : n1);
    any_sampled = any_sampled || comp.kind == QuadComponent::Kind::sampled ||
                  (comp.kind == QuadComponent::Kind::finite_angle &&
                   comp.dataset.kind == forward::QuadratureDataset::Kind::sampled);
    auto M1 = moments_batch(comp, lmax, n1);
    if (opts.element_residuals) {
      auto M2 = moments_batch(comp, lmax, 2 * n1);
      elems[k] = invert_column(M2, k, lmax);
      elems_lo[k] = invert_column(M1, k, lmax);
    } else {
      elems[k] = invert_column(M1, k, lmax);
    }
  }
  ReconstructionReport rep =
      assemble_report(dim, "quad-full", elems, opts.element_residuals ? &elems_lo : nullptr);
  rep.diagnostics["quadrature"] = {{"rule", "gauss-hermite"}, {"max_nodes", max_nodes}};
  rep.diagnostics["advertised_tolerance"] = any_sampled ? 1e-4 : 1e-8;
  if (any_sampled)
    rep.flags.push_back(
        "sampled quadrature data: cubic-spline interpolation dominates, tolerance downgraded to 1e-4");
  return rep;
}

ReconstructionReport reconstruct_finite(const forward::QuadratureDataset& ds,
                                        const QuadReconOptions& opts) {
  check_roots_grid(ds.angles);
  const int p = (int)ds.angles.size();
  std::vector<std::vector<cplx<f128>>> elems(p), elems_lo(p);
  bool any_sampled = ds.kind == forward::QuadratureDataset::Kind::sampled;
  for (int k = 0; k < p; ++k) {
    QuadComponent comp = component_from_dataset(ds, k);
    const int lmax = p - 1 - k;
    const int n1 = round_up_nodes(required_nodes(k, lmax));
    auto M1 = moments_batch(comp, lmax, n1);
    if (opts.element_residuals) {
      auto M2 = moments_batch(comp, lmax, 2 * n1);
      elems[k] = invert_column(M2, k, lmax);
      elems_lo[k] = invert_column(M1, k, lmax);
    } else {
      elems[k] = invert_column(M1, k, lmax);
    }
  }
  ReconstructionReport rep =
      assemble_report(p, "quad-finite", elems, opts.element_residuals ? &elems_lo : nullptr);
  rep.flags.push_back("assumes rho_mn = 0 for m,n >= " + std::to_string(p) +
                      " (not checkable from the measured angles alone)");
  rep.diagnostics["angles"] = ds.angles;
  rep.diagnostics["advertised_tolerance"] = any_sampled ? 1e-4 : 1e-8;
  if (any_sampled)
    rep.flags.push_back(
        "sampled quadrature data: cubic-spline interpolation dominates, tolerance downgraded to 1e-4");
  return rep;
}

// ------------------------------------------------- binomial pair & demo

std::vector<std::complex<double>> binomial_forward(const std::vector<std::complex<double>>& x) {
  const int N = (int)x.size();
  std::vector<std::complex<double>> y(N);
  for (int l = 0; l < N; ++l) {
    std::complex<double> s = 0.0;
    for (int n = 0; n <= l; ++n) {
      double c = specfun::binomial(l, n);
      s += ((n % 2 == 0) ? c : -c) * x[n];
    }
    y[l] = s;
  }
  return y;
}

std::vector<std::complex<double>> binomial_invert(const std::vector<std::complex<double>>& y) {
  const int N = (int)y.size();
  std::vector<std::complex<double>> x(N);
  for (int n = 0; n < N; ++n) {
    std::complex<double> s = 0.0;
    for (int l = 0; l <= n; ++l) {
      double c = specfun::binomial(n, l);
      s += ((l % 2 == 0) ? c : -c) * y[l];
    }
    x[n] = s;
  }
  return x;
}

namespace {

FormalInverseCase run_inverse_case(const std::string& name, const std::vector<double>& x,
                                   const std::vector<double>& y) {
  // inverse candidate x_n = sum_{l>=n} (-1)^{l-n} y_l; partial sums for n=0
  FormalInverseCase c;
  c.name = name;
  const int N = (int)y.size();
  double s = 0.0;
  c.partial_sums.reserve(N);
  for (int l = 0; l < N; ++l) {
    s += ((l % 2 == 0) ? 1.0 : -1.0) * y[l];
    c.partial_sums.push_back(s);
  }
  double lo = 1e300, hi = -1e300;
  for (int l = (3 * N) / 4; l < N; ++l) {
    lo = std::min(lo, c.partial_sums[l]);
    hi = std::max(hi, c.partial_sums[l]);
  }
  c.oscillation_amplitude = hi - lo;
  c.inverse_converges = c.oscillation_amplitude < 1e-10;
  if (c.inverse_converges) {
    double maxerr = 0.0;
    for (int n = 0; n < N / 2; ++n) {
      double sn = 0.0;
      for (int l = n; l < N; ++l) sn += (((l - n) % 2 == 0) ? 1.0 : -1.0) * y[l];
      maxerr = std::max(maxerr, std::abs(sn - x[n]));
    }
    c.recovery_error = maxerr;
    c.mismatch_detected = maxerr > 1e-6;
  }
  return c;
}

}  // namespace

FormalInverseReport formal_inverse_demo() {
  const int N = 64;
  FormalInverseReport rep;
  {
    std::vector<double> x(N + 1, 1.0), y(N);
    for (int l = 0; l < N; ++l) y[l] = x[l] + x[l + 1];
    rep.constant_one = run_inverse_case("x_n = 1", x, y);
  }
  {
    std::vector<double> x(N + 1), y(N);
    for (int n = 0; n <= N; ++n) x[n] = (n % 2 == 0) ? 1.0 : -1.0;
    for (int l = 0; l < N; ++l) y[l] = x[l] + x[l + 1];
    rep.alternating = run_inverse_case("x_n = (-1)^n", x, y);
  }
  {
    std::vector<double> x(N + 1), y(N);
    for (int n = 0; n <= N; ++n) x[n] = std::pow(2.0, -n);
    for (int l = 0; l < N; ++l) y[l] = x[l] + x[l + 1];
    rep.decaying = run_inverse_case("x_n = 2^-n", x, y);
  }
  return rep;
}

// ------------------------------------------------------------ providers

ComponentProvider provider_from_state(const DensityMatrix& rho) {
  return [rho](int k) { return component_from_state(rho, k); };
}

ComponentProvider provider_from_dataset(const forward::QuadratureDataset& ds) {
  return [ds](int k) { return component_from_dataset(ds, k); };
}

// ------------------------------------------------------------ report io

void write_report_json(const ReconstructionReport& rep, const std::string& path) {
  nlohmann::json j;
  const int dim = rep.matrix.dim();
  j["dim"] = dim;
  auto re = nlohmann::json::array(), im = nlohmann::json::array(), res = nlohmann::json::array();
  for (int m = 0; m < dim; ++m) {
    auto rr = nlohmann::json::array(), ir = nlohmann::json::array(), sr = nlohmann::json::array();
    for (int n = 0; n < dim; ++n) {
      rr.push_back(rep.matrix.mat(m, n).real());
      ir.push_back(rep.matrix.mat(m, n).imag());
      sr.push_back(rep.residuals.size() ? rep.residuals(m, n) : 0.0);
    }
    re.push_back(rr);
    im.push_back(ir);
    res.push_back(sr);
  }
  j["re"] = re;
  j["im"] = im;
  j["residuals"] = res;
  j["flags"] = rep.flags;
  j["diagnostics"] = rep.diagnostics;
  j["validation"] = {{"ok", rep.validation.ok},
                     {"hermiticity_defect", rep.validation.hermiticity_defect},
                     {"trace_defect", rep.validation.trace_defect},
                     {"min_eigenvalue", rep.validation.min_eigenvalue},
                     {"positivity_violation", rep.validation.positivity_violation},
                     {"failure", rep.validation.failure}};
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_report_json: cannot open " + path);
  f << j.dump(1) << "\n";
}

ReconstructionReport read_report_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_report_json: cannot open " + path);
  nlohmann::json j;
  f >> j;
  ReconstructionReport rep;
  const int dim = j["dim"].get<int>();
  rep.matrix.mat.resize(dim, dim);
  rep.residuals.resize(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      rep.matrix.mat(m, n) =
          std::complex<double>(j["re"][m][n].get<double>(), j["im"][m][n].get<double>());
      rep.residuals(m, n) = j["residuals"][m][n].get<double>();
    }
  rep.flags = j["flags"].get<std::vector<std::string>>();
  rep.diagnostics = j["diagnostics"];
  rep.validation.ok = j["validation"]["ok"].get<bool>();
  rep.validation.hermiticity_defect = j["validation"]["hermiticity_defect"].get<double>();
  rep.validation.trace_defect = j["validation"]["trace_defect"].get<double>();
  rep.validation.min_eigenvalue = j["validation"]["min_eigenvalue"].get<double>();
  rep.validation.positivity_violation = j["validation"]["positivity_violation"].get<double>();
  rep.validation.failure = j["validation"]["failure"].get<std::string>();
  return rep;
}

}  // namespace tomo::recon
