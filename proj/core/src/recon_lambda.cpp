#include "tomo/recon_lambda.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "tomo/detail/quadrature_impl.hpp"
#include "tomo/quadrature.hpp"
#include "tomo/specfun.hpp"

// The radial-integration inversion carries (1/lambda)^n against Laguerre
// orthogonality; resolving deep elements of low-occupancy states needs ~48
// significant digits, so this TU runs on a 60-digit float.
using mp60 =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<60>,
                                  boost::multiprecision::et_off>;

namespace tomo::detail {
template <>
mp60 xeps<mp60>() {
  return mp60("1e-60");
}
}  // namespace tomo::detail

namespace tomo::recon {

using detail::cplx;
using detail::f128;

// ------------------------------------------------------------- integration

namespace {

std::string window_message(double lambda) {
  std::ostringstream os;
  os << "reconstruct_integration: valid only for lambda in (-1,0); the vacuum element rho_00 = "
        "2(1-lambda)(1-1/lambda) Int_0^inf exp(-(1-lambda)(1-1/lambda) r^2) r dr diverges for "
        "lambda in (0,1)";
  if (lambda > 0.0 && lambda < 1.0)
    os << " since (1-lambda)(1-1/lambda) = " << (1.0 - lambda) * (1.0 - 1.0 / lambda) << " < 0";
  os << "; got lambda = " << lambda;
  return os.str();
}

const quadrature::LaguerreRule<mp60>& laguerre_rule_mp(int n, int alpha) {
  static std::map<std::pair<int, int>, std::unique_ptr<quadrature::LaguerreRule<mp60>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, alpha);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key, std::make_unique<quadrature::LaguerreRule<mp60>>(
                               quadrature::build_laguerre_rule<mp60>(n, alpha)))
             .first;
  return *it->second;
}

// one column of elements rho_{n+k,n}, n = 0..nmax, from the radial profile
std::vector<cplx<mp60>> integrate_column(const forward::RadialProfile& profile, double lambda,
                                         int k, int nmax, int nodes) {
  const auto& rule = laguerre_rule_mp(nodes, k);
  const mp60 lam(lambda);
  const mp60 mu = mp60(1) / lam;
  const mp60 c = mp60(2) - lam - mu;  // (1-lambda)(1-1/lambda) > 0 on (-1,0)
  // against weight x^k e^{-x}: g(x) = W(sqrt(x/c)) e^{(1-lambda)x/c} x^{-k/2}
  std::vector<cplx<mp60>> g(nodes);
  std::vector<std::vector<mp60>> L(nodes);  // L^k_n(x_i)
  for (int i = 0; i < nodes; ++i) {
    const mp60 x = rule.x[i];
    const mp60 r = tomo::detail::xsqrt(x / c);
    cplx<mp60> W = profile.eval_x<mp60>(r);
    mp60 damp = tomo::detail::xexp((mp60(1) - lam) * x / c -
                                   mp60(k) / mp60(2) * tomo::detail::xlog(x));
    g[i] = W * damp;
    L[i].resize(nmax + 1);
    tomo::detail::laguerre_seq_t(nmax, k, x, L[i].data());
  }
  std::vector<cplx<mp60>> out(nmax + 1);
  // prefactor chain: (1/c) sqrt(n!/(n+k)!) (1-mu)^{k+1} mu^n c^{-k/2}
  mp60 base = detail::pow_int(mp60(1) - mu, (long)k + 1) /
              (c * detail::pow_int(tomo::detail::xsqrt(c), (long)k));
  mp60 s = mp60(1);
  for (int i = 1; i <= k; ++i) s /= tomo::detail::xsqrt(mp60(i));
  mp60 mupow = mp60(1);
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) {
      s *= tomo::detail::xsqrt(mp60(n) / mp60(n + k));
      mupow *= mu;
    }
    cplx<mp60> acc{mp60(0)};
    for (int i = 0; i < nodes; ++i) acc += (rule.w[i] * L[i][n]) * g[i];
    out[n] = (base * s * mupow) * acc;
  }
  return out;
}

}  // namespace

std::complex<double> reconstruct_integration(const forward::RadialProfile& profile, double lambda,
                                             int n, int k) {
  if (!(lambda > -1.0 && lambda < 0.0)) throw std::invalid_argument(window_message(lambda));
  if (n < 0 || k < 0) throw std::domain_error("reconstruct_integration: negative index");
  if (profile.kind == forward::RadialProfile::Kind::sampled && !profile.gaussian_decay)
    throw std::invalid_argument(
        "reconstruct_integration: sampled profile carries no decay metadata; the radial integral "
        "needs a decaying tail");
  auto col = integrate_column(profile, lambda, k, n, 128);
  return col[n].to_std();
}

RadialProvider radial_provider_from_state(const DensityMatrix& rho, double lambda) {
  return [rho, lambda](int k) { return forward::make_radial_profile(rho, lambda, k); };
}

ReconstructionReport reconstruct_integration_all(const RadialProvider& provider, double lambda,
                                                 int dim) {
  if (!(lambda > -1.0 && lambda < 0.0)) throw std::invalid_argument(window_message(lambda));
  if (dim <= 0) throw std::invalid_argument("reconstruct_integration_all: dim must be positive");
  ReconstructionReport rep;
  rep.matrix.mat = Eigen::MatrixXcd::Zero(dim, dim);
  rep.residuals = Eigen::MatrixXd::Zero(dim, dim);
  bool any_sampled = false;
  for (int k = 0; k < dim; ++k) {
    forward::RadialProfile prof = provider(k);
    if (prof.kind == forward::RadialProfile::Kind::sampled) {
      any_sampled = true;
      if (!prof.gaussian_decay)
        throw std::invalid_argument(
            "reconstruct_integration: sampled profile carries no decay metadata");
    }
    const int nmax = dim - 1 - k;
    auto col = integrate_column(prof, lambda, k, nmax, 128);
    auto col2 = integrate_column(prof, lambda, k, nmax, 256);
    for (int n = 0; n <= nmax; ++n) {
      std::complex<double> v = col2[n].to_std();
      rep.matrix.mat(n + k, n) = v;
      if (k > 0) rep.matrix.mat(n, n + k) = std::conj(v);
      double res = detail::xto_double((col2[n] - col[n]).abs());
      rep.residuals(n + k, n) = res;
      rep.residuals(n, n + k) = res;
    }
  }
  rep.validation = validate(rep.matrix);
  if (!rep.validation.ok)
    rep.flags.push_back("reconstructed matrix fails validation: " + rep.validation.failure);
  rep.diagnostics["method"] = "lambda-int";
  rep.diagnostics["lambda"] = lambda;
  rep.diagnostics["dim"] = dim;
  rep.diagnostics["quadrature"] = {{"rule", "gauss-laguerre"}, {"nodes", 256}};
  rep.diagnostics["advertised_tolerance"] = any_sampled ? 1e-4 : 1e-8;
  rep.diagnostics["wigner_note"] =
      "lambda = -1 is outside this method's gate; the decay condition licensing it is not "
      "checkable from distribution data alone";
  if (any_sampled)
    rep.flags.push_back(
        "sampled radial data: interpolation dominates, tolerance downgraded to 1e-4");
  return rep;
}

DivergenceReport divergence_probe(double lambda, const std::vector<double>& cutoffs) {
  if (lambda == 0.0 || std::abs(lambda) >= 1.0)
    throw std::invalid_argument(
        "divergence_probe: the truncated vacuum integral needs lambda in (-1,0) or (0,1)");
  DivergenceReport rep;
  rep.cutoffs = cutoffs;
  const double c = (1.0 - lambda) * (1.0 - 1.0 / lambda);
  for (double R : cutoffs) {
    // composite Simpson of 2 c e^{-c r^2} r on [0, R]
    const int N = 4000;
    const double h = R / N;
    auto f = [&](double r) { return 2.0 * c * std::exp(-c * r * r) * r; };
    double s = f(0.0) + f(R);
    for (int i = 1; i < N; ++i) s += f(i * h) * ((i % 2) ? 4.0 : 2.0);
    rep.values.push_back(s * h / 3.0);
  }
  rep.increasing = true;
  for (size_t i = 1; i < rep.values.size(); ++i)
    if (std::abs(rep.values[i]) <= std::abs(rep.values[i - 1])) rep.increasing = false;
  if (rep.values.size() >= 2) {
    double a = std::abs(rep.values[rep.values.size() - 2]);
    rep.last_ratio = a > 0 ? std::abs(rep.values.back()) / a : 0.0;
  }
  rep.trend = (rep.increasing && rep.last_ratio > 2.0) ? "divergent" : "convergent";
  return rep;
}

// ---------------------------------------------------------------- Taylor

TaylorCoefficients taylor_from_state(const DensityMatrix& rho, double lambda, int k, int order) {
  if (std::abs(lambda) > 1.0 || lambda == 1.0)
    throw std::invalid_argument("taylor_from_state: requires |lambda| <= 1, lambda != 1");
  if (k < 0 || order < 0) throw std::domain_error("taylor_from_state: negative index");
  const int D = rho.dim();
  TaylorCoefficients tc;
  tc.k = k;
  tc.lambda = lambda;
  tc.source = TaylorCoefficients::Source::analytic_from_state;
  tc.a_re.assign(order + 1, 0.0);
  tc.a_im.assign(order + 1, 0.0);
  const f128 lam(lambda);
  const f128 one_m = f128(1) - lam;
  for (int u = 0; 2 * u + k <= order && u + k < D; ++u) {
    // sum_{n>=u} rho_{n+k,n} sqrt(n!/(n+k)!) lambda^{n-u} C(n+k, n-u)
    f128 cur = f128(1);  // sqrt(u!/(u+k)!), C(u+k,0) = 1
    for (int i = u + 1; i <= u + k; ++i) cur /= detail::xsqrt(f128(i));
    cplx<f128> acc{f128(0)};
    for (int n = u; n + k < D; ++n) {
      if (n > u) cur *= detail::xsqrt(f128(n) / f128(n + k)) * (f128(n + k) / f128(n - u)) * lam;
      acc += cplx<f128>(rho.mat(n + k, n)) * cur;
    }
    f128 pre = detail::pow_int(one_m, (long)(k + 1 + 2 * u));
    for (int i = 2; i <= u; ++i) pre /= f128(i);
    cplx<f128> a = pre * acc;
    tc.a_re[2 * u + k] = detail::xto_double(a.re);
    tc.a_im[2 * u + k] = detail::xto_double(a.im);
  }
  tc.exact_termination = order >= 2 * (D - 1 - k) + k;
  return tc;
}

TaylorCoefficients taylor_from_samples(const std::vector<double>& r,
                                       const std::vector<std::complex<double>>& w, double lambda,
                                       int k, int order) {
  if (r.size() != w.size()) throw std::invalid_argument("taylor_from_samples: size mismatch");
  if (order < k) throw std::invalid_argument("taylor_from_samples: order must be >= k");
  const int J = (order - k) / 2;  // coefficients a_{k+2j}, j = 0..J
  if ((int)r.size() < 4 * std::max(order, 1))
    throw std::invalid_argument("taylor_from_samples: need >= 4*order samples");
  for (double ri : r)
    if (!(ri >= 0.0 && ri <= 0.5))
      throw std::invalid_argument("taylor_from_samples: samples must lie in [0, 0.5]");
  const int M = (int)r.size();
  Eigen::MatrixXd X(M, J + 1);
  Eigen::VectorXd yre(M), yim(M);
  for (int i = 0; i < M; ++i) {
    double damp = std::exp((1.0 - lambda) * r[i] * r[i]);
    yre(i) = damp * w[i].real();
    yim(i) = damp * w[i].imag();
    double p = std::pow(r[i], k);
    for (int j = 0; j <= J; ++j) {
      X(i, j) = p;
      p *= r[i] * r[i];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond < 1e12))
    throw std::invalid_argument(
        "taylor_from_samples: design matrix condition number " + std::to_string(cond) +
        " exceeds 1e12; use a smaller order (try " +
        std::to_string(std::max(k, order - 2)) + ")");
  Eigen::VectorXd are = svd.solve(yre), aim = svd.solve(yim);
  TaylorCoefficients tc;
  tc.k = k;
  tc.lambda = lambda;
  tc.source = TaylorCoefficients::Source::fitted_from_samples;
  tc.condition_number = cond;
  tc.a_re.assign(order + 1, 0.0);
  tc.a_im.assign(order + 1, 0.0);
  for (int j = 0; j <= J; ++j) {
    tc.a_re[k + 2 * j] = are(j);
    tc.a_im[k + 2 * j] = aim(j);
  }
  return tc;
}

// ---------------------------------------------------------- differentiation

std::vector<double> lemma2_sequence(const DensityMatrix& rho, double lambda, int k) {
  const int D = rho.dim();
  const double al = std::abs(lambda);
  std::vector<double> x;
  for (int n = 0; n + k < D; ++n) {
    double mag = std::abs(rho.mat(n + k, n));
    if (mag == 0.0 || (al == 0.0 && n > 0)) {
      x.push_back(0.0);
      continue;
    }
    double lg = 0.5 * (specfun::log_factorial(n + k) + specfun::log_factorial(n)) +
                (al > 0.0 ? n * std::log(al) : 0.0) + std::log(mag);
    x.push_back(std::exp(lg));
  }
  x.push_back(0.0);  // the matrix is finite: the sequence vanishes beyond the window
  return x;
}

bool lemma2_condition_check(const std::vector<double>& absx, double tol) {
  if (absx.empty()) return true;
  double mx = 0.0;
  size_t peak = 0;
  for (size_t i = 0; i < absx.size(); ++i)
    if (absx[i] > mx) {
      mx = absx[i];
      peak = i;
    }
  for (size_t i = peak + 1; i < absx.size(); ++i)
    if (absx[i] > absx[i - 1] * (1.0 + 1e-12)) return false;
  return absx.back() <= tol * std::max(1.0, mx);
}

double tail_bound(double lambda, int l, int n, int K) {
  if (K < n) throw std::invalid_argument("tail_bound: need K >= n");
  const double al = std::abs(lambda);
  if (al == 0.0) return K >= 1 ? 0.0 : 1.0;
  if (al >= 1.0) return std::numeric_limits<double>::infinity();
  double lg = specfun::log_factorial(K + l) - specfun::log_factorial(K - n) -
              (l + 1) * std::log(1.0 - al) + K * std::log(al / (1.0 - al));
  return std::exp(lg);
}

TaylorProvider taylor_provider_from_state(const DensityMatrix& rho, double lambda) {
  TaylorProvider p;
  const int D = rho.dim();
  p.lambda = lambda;
  p.source_state = rho;
  p.coeffs = [rho, lambda, D](int k) {
    return taylor_from_state(rho, lambda, k, std::max(k, 2 * (D - 1 - k) + k));
  };
  return p;
}

namespace {

struct DiffPlan {
  int P = 0;              // truncation index in p
  bool exact = false;     // finite support, remainder identically zero
  double residual = 0.0;  // scaled bound at P when not exact
};

DiffPlan plan_truncation(const TaylorCoefficients& tc, double lambda, int n, int k,
                         const DiffOptions& opts) {
  DiffPlan plan;
  const int p_avail = (tc.order() - k) / 2;
  if (lambda == 0.0) {
    // only p = n survives
    plan.P = n;
    plan.exact = true;
    if (n > p_avail)
      throw std::runtime_error(
          "reconstruct_differentiation: Q-function term needs coefficient order " +
          std::to_string(2 * n + k) + " but only " + std::to_string(tc.order()) +
          " is available");
    return plan;
  }
  const double al = std::abs(lambda);
  // converts the remainder on x_n = rho lambda^n sqrt((n+k)! n!) into rho units
  const double lscale = -n * std::log(al) -
                        0.5 * (specfun::log_factorial(n + k) + specfun::log_factorial(n));
  if (al < 1.0) {
    for (int K = n; K <= opts.order_cap; ++K) {
      double lb = specfun::log_factorial(K + k) - specfun::log_factorial(K - n) -
                  (k + 1) * std::log(1.0 - al) + K * std::log(al / (1.0 - al));
      if (lb + lscale < std::log(opts.tol)) {
        plan.P = K;
        plan.residual = std::exp(lb + lscale);
        if (plan.P >= p_avail && tc.exact_termination) {
          plan.P = p_avail;
          plan.exact = true;
          plan.residual = 0.0;
        } else if (plan.P > p_avail) {
          throw std::runtime_error(
              "reconstruct_differentiation: tail bound needs truncation order " +
              std::to_string(plan.P) + " but only " + std::to_string(p_avail) +
              " coefficient orders are available");
        }
        return plan;
      }
    }
  }
  if (tc.exact_termination) {
    // finite matrix: the series terminates exactly regardless of the bound
    plan.P = p_avail;
    plan.exact = true;
    return plan;
  }
  throw std::runtime_error("reconstruct_differentiation: tail bound cannot reach tolerance " +
                           std::to_string(opts.tol) + " within the order cap " +
                           std::to_string(opts.order_cap));
}

void check_window(const TaylorProvider& provider, double lambda, const DiffOptions& opts, int k) {
  if (lambda == 1.0 || std::abs(lambda) > 1.0)
    throw std::invalid_argument(
        "reconstruct_differentiation: requires |lambda| <= 1, lambda != 1");
  if (std::abs(lambda) < 0.5) return;
  if (!opts.allow_override)
    throw std::invalid_argument(
        "reconstruct_differentiation: holds for all states only if |lambda| < 1/2; got |lambda| "
        "= " +
        std::to_string(std::abs(lambda)) +
        " (pass the override flag when the state matrix is known to decay, e.g. finite)");
  if (!provider.source_state)
    throw std::invalid_argument(
        "reconstruct_differentiation: the override needs a state-backed provider so the decay "
        "condition can be checked");
  auto seq = lemma2_sequence(*provider.source_state, lambda, k);
  if (!lemma2_condition_check(seq))
    throw std::invalid_argument(
        "reconstruct_differentiation: decay condition fails for |lambda| >= 1/2; the inversion "
        "remainder does not vanish");
}

cplx<f128> diff_element(const TaylorCoefficients& tc, double lambda, int n, int k,
                        const DiffPlan& plan) {
  // sqrt(n!/(n+k)!) sum_p C(p,n) (p+k)! (-lambda)^{p-n} (1-lambda)^{-(2p+k+1)} a_{2p+k}
  const f128 lam(lambda);
  const f128 om = f128(1) - lam;
  f128 s = f128(1);
  for (int i = n + 1; i <= n + k; ++i) s /= detail::xsqrt(f128(i));
  f128 t = f128(1);  // C(n,n) (n+k)! (1-lambda)^{-(2n+k+1)}
  for (int i = 2; i <= n + k; ++i) t *= f128(i);
  t /= detail::pow_int(om, (long)(2 * n + k + 1));
  cplx<f128> acc{f128(0)};
  const int p_avail = (tc.order() - k) / 2;
  const int P = std::min(plan.P, p_avail);
  for (int p = n; p <= P; ++p) {
    if (p > n) t *= f128(p) / f128(p - n) * f128(p + k) * (-lam) / (om * om);
    acc += cplx<f128>(tc.a(2 * p + k)) * t;
  }
  return s * acc;
}

}  // namespace

std::complex<double> reconstruct_differentiation(const TaylorProvider& provider, double lambda,
                                                 int n, int k, const DiffOptions& opts) {
  if (n < 0 || k < 0) throw std::domain_error("reconstruct_differentiation: negative index");
  check_window(provider, lambda, opts, k);
  TaylorCoefficients tc = provider.coeffs(k);
  DiffPlan plan = plan_truncation(tc, lambda, n, k, opts);
  return diff_element(tc, lambda, n, k, plan).to_std();
}

ReconstructionReport reconstruct_differentiation_all(const TaylorProvider& provider, double lambda,
                                                     int dim, const DiffOptions& opts) {
  if (dim <= 0)
    throw std::invalid_argument("reconstruct_differentiation_all: dim must be positive");
  ReconstructionReport rep;
  rep.matrix.mat = Eigen::MatrixXcd::Zero(dim, dim);
  rep.residuals = Eigen::MatrixXd::Zero(dim, dim);
  int max_order = 0;
  for (int k = 0; k < dim; ++k) {
    check_window(provider, lambda, opts, k);
    TaylorCoefficients tc = provider.coeffs(k);
    for (int n = 0; n + k < dim; ++n) {
      DiffPlan plan = plan_truncation(tc, lambda, n, k, opts);
      max_order = std::max(max_order, 2 * plan.P + k);
      std::complex<double> v = diff_element(tc, lambda, n, k, plan).to_std();
      rep.matrix.mat(n + k, n) = v;
      if (k > 0) rep.matrix.mat(n, n + k) = std::conj(v);
      rep.residuals(n + k, n) = plan.exact ? 0.0 : plan.residual;
      rep.residuals(n, n + k) = rep.residuals(n + k, n);
    }
  }
  rep.validation = validate(rep.matrix);
  if (!rep.validation.ok)
    rep.flags.push_back("reconstructed matrix fails validation: " + rep.validation.failure);
  rep.diagnostics["method"] = lambda == 0.0 ? "q-function" : "lambda-diff";
  rep.diagnostics["lambda"] = lambda;
  rep.diagnostics["dim"] = dim;
  rep.diagnostics["max_derivative_order"] = max_order;
  if (opts.allow_override && std::abs(lambda) >= 0.5)
    rep.flags.push_back(
        "validity override in effect: |lambda| >= 1/2 accepted on a passing decay check");
  return rep;
}

}  // namespace tomo::recon
