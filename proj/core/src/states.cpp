#include "tomo/states.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tomo/specfun.hpp"

namespace tomo {

DensityMatrix fock_state(int dim, int n) {
  if (dim <= 0) throw std::invalid_argument("fock_state: dim must be positive");
  if (n < 0 || n >= dim)
    throw std::invalid_argument("fock_state: need 0 <= n < dim, got n=" + std::to_string(n) +
                                ", dim=" + std::to_string(dim));
  DensityMatrix rho;
  rho.mat = Eigen::MatrixXcd::Zero(dim, dim);
  rho.mat(n, n) = 1.0;
  return rho;
}

int coherent_min_dim(std::complex<double> alpha, double tail_tol) {
  const double a2 = std::norm(alpha);
  // Poisson tail: sum_{n>=D} e^{-a2} a2^n / n!
  double term = std::exp(-a2);
  double cum = term;
  int n = 0;
  while (1.0 - cum >= tail_tol && n < 4096) {
    ++n;
    term *= a2 / n;
    cum += term;
  }
  return n + 1;
}

DensityMatrix coherent_state(int dim, std::complex<double> alpha, bool allow_truncation) {
  if (dim <= 0) throw std::invalid_argument("coherent_state: dim must be positive");
  const double a2 = std::norm(alpha);
  // tail mass of the Poisson law beyond the cutoff
  double cum = 0.0, term = std::exp(-a2);
  for (int n = 0; n < dim; ++n) {
    cum += term;
    term *= a2 / (n + 1);
  }
  const double tail = 1.0 - cum;
  if (!(tail < 1e-12) && !allow_truncation) {
    throw std::invalid_argument(
        "coherent_state: truncation tail " + std::to_string(tail) + " exceeds 1e-12; minimal adequate dim is " +
        std::to_string(coherent_min_dim(alpha)));
  }
  DensityMatrix rho;
  rho.mat.resize(dim, dim);
  // amplitude c_n = e^{-|a|^2/2} alpha^n / sqrt(n!)
  std::vector<std::complex<double>> c(dim);
  c[0] = std::exp(-a2 / 2.0);
  for (int n = 1; n < dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt((double)n);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) rho.mat(m, n) = c[m] * std::conj(c[n]);
  const double tr = rho.mat.trace().real();
  rho.mat /= tr;
  rho.truncation_tail = tail;
  return rho;
}

DensityMatrix thermal_klambda_state(int dim, double lambda, bool allow_truncation) {
  if (dim <= 0) throw std::invalid_argument("thermal_klambda_state: dim must be positive");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("thermal_klambda_state: lambda must lie in [0,1)");
  const double tail = std::pow(lambda, dim);
  if (!(tail < 1e-12) && !allow_truncation)
    throw std::invalid_argument("thermal_klambda_state: tail mass lambda^dim = " +
                                std::to_string(tail) + " exceeds 1e-12 (pass allow_truncation)");
  DensityMatrix rho;
  rho.mat = Eigen::MatrixXcd::Zero(dim, dim);
  double tr = 0.0, p = 1.0 - lambda;
  for (int n = 0; n < dim; ++n) {
    rho.mat(n, n) = p;
    tr += p;
    p *= lambda;
  }
  rho.mat /= tr;
  rho.truncation_tail = 1.0 - tr;
  return rho;
}

DensityMatrix random_state(int dim, std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("random_state: dim must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = std::complex<double>(gauss(gen), gauss(gen));
  DensityMatrix rho;
  rho.mat = a * a.adjoint();
  rho.mat /= rho.mat.trace().real();
  // exact Hermitian symmetrization against rounding
  rho.mat = 0.5 * (rho.mat + rho.mat.adjoint()).eval();
  return rho;
}

DensityMatrix truncate_normalize(const DensityMatrix& rho, int p) {
  if (p <= 0 || p > rho.dim())
    throw std::invalid_argument("truncate_normalize: need 0 < p <= dim");
  double lead = 0.0;
  for (int n = 0; n < p; ++n) lead += rho.mat(n, n).real();
  if (lead == 0.0)
    throw std::invalid_argument("truncate_normalize: leading trace is zero at p=" +
                                std::to_string(p) + "; no smaller truncation exists");
  DensityMatrix out;
  out.mat = rho.mat.topLeftCorner(p, p) / lead;
  out.truncation_tail = 1.0 - lead;
  return out;
}

double tail_mass(const DensityMatrix& rho, int p) {
  if (p < 0 || p > rho.dim()) throw std::invalid_argument("tail_mass: need 0 <= p <= dim");
  double s = 0.0;
  for (int n = p; n < rho.dim(); ++n) s += rho.mat(n, n).real();
  return s;
}

StateDiagnostics validate(const DensityMatrix& rho) {
  StateDiagnostics d;
  const int dim = rho.dim();
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      d.hermiticity_defect =
          std::max(d.hermiticity_defect, std::abs(rho.mat(m, n) - std::conj(rho.mat(n, m))));
      double viol = std::norm(rho.mat(m, n)) - rho.mat(m, m).real() * rho.mat(n, n).real();
      d.positivity_violation = std::max(d.positivity_violation, viol);
    }
  d.trace_defect = std::abs(rho.mat.trace() - std::complex<double>(1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho.mat + rho.mat.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  d.ok = true;
  std::ostringstream why;
  if (d.hermiticity_defect > kHermTol) { d.ok = false; why << "hermiticity defect " << d.hermiticity_defect << "; "; }
  if (d.trace_defect > kTraceTol) { d.ok = false; why << "trace defect " << d.trace_defect << "; "; }
  if (d.min_eigenvalue < kPsdTol) { d.ok = false; why << "min eigenvalue " << d.min_eigenvalue << "; "; }
  if (d.positivity_violation > kPosvTol) { d.ok = false; why << "|rho_mn|^2 > rho_mm rho_nn by " << d.positivity_violation << "; "; }
  d.failure = why.str();
  return d;
}

void write_state_json(const DensityMatrix& rho, const std::string& path) {
  nlohmann::json j;
  const int dim = rho.dim();
  j["dim"] = dim;
  auto re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int m = 0; m < dim; ++m) {
    auto rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (int n = 0; n < dim; ++n) {
      rrow.push_back(rho.mat(m, n).real());
      irow.push_back(rho.mat(m, n).imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  j["re"] = re;
  j["im"] = im;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_state_json: cannot open " + path);
  f << j.dump(1) << "\n";
}

DensityMatrix read_state_json(const std::string& path, Enforce mode) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_state_json: cannot open " + path);
  nlohmann::json j;
  f >> j;
  if (!j.contains("dim") || !j.contains("re") || !j.contains("im"))
    throw std::runtime_error("read_state_json: missing dim/re/im in " + path);
  const int dim = j["dim"].get<int>();
  if (dim <= 0 || (int)j["re"].size() != dim || (int)j["im"].size() != dim)
    throw std::runtime_error("read_state_json: inconsistent dimensions in " + path);
  DensityMatrix rho;
  rho.mat.resize(dim, dim);
  for (int m = 0; m < dim; ++m) {
    if ((int)j["re"][m].size() != dim || (int)j["im"][m].size() != dim)
      throw std::runtime_error("read_state_json: ragged rows in " + path);
    for (int n = 0; n < dim; ++n)
      rho.mat(m, n) = std::complex<double>(j["re"][m][n].get<double>(), j["im"][m][n].get<double>());
  }
  StateDiagnostics d = validate(rho);
  if (!d.ok) {
    if (mode == Enforce::reject)
      throw std::runtime_error("read_state_json: state violates invariants: " + d.failure);
    // warn mode: caller keeps the diagnostics responsibility
  }
  return rho;
}

}  // namespace tomo
