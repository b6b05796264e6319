#pragma once

// Finite Fock-basis density matrices: canonical constructors, truncation,
// tail mass, validation and the JSON interchange format.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>

namespace tomo {

struct DensityMatrix {
  Eigen::MatrixXcd mat;  // (m,n) entry = <m|rho|n>
  // trace removed by the last truncate/renormalize step, 0 for constructors
  // that already satisfied their tail precondition
  double truncation_tail = 0.0;

  int dim() const { return (int)mat.rows(); }
  std::complex<double> operator()(int m, int n) const { return mat(m, n); }
};

struct StateDiagnostics {
  double hermiticity_defect = 0.0;  // max |rho_mn - conj(rho_nm)|
  double trace_defect = 0.0;        // |tr rho - 1|
  double min_eigenvalue = 0.0;
  double positivity_violation = 0.0;  // max(|rho_mn|^2 - rho_mm rho_nn, 0)
  bool ok = false;
  std::string failure;  // empty when ok
};

// tolerances used by validate(); reconstruction outputs round-trip through
// these, so the PSD floor is slightly negative
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = -1e-10;
inline constexpr double kPosvTol = 1e-12;

DensityMatrix fock_state(int dim, int n);

// tail precondition: sum_{n>=dim} e^{-|a|^2}|a|^{2n}/n! < 1e-12, else throws
// std::invalid_argument naming the minimal adequate dim (unless
// allow_truncation; the result is renormalized either way and carries the
// pre-normalization tail in truncation_tail)
DensityMatrix coherent_state(int dim, std::complex<double> alpha, bool allow_truncation = false);
int coherent_min_dim(std::complex<double> alpha, double tail_tol = 1e-12);

// diagonal state (1-lambda) lambda^n; 0 <= lambda < 1; tail lambda^dim must
// be < 1e-12 unless allow_truncation
DensityMatrix thermal_klambda_state(int dim, double lambda, bool allow_truncation = false);

// rho = A A^* / tr, deterministic in the seed; always a valid state
DensityMatrix random_state(int dim, std::uint64_t seed);

// renormalized top-left p x p block; throws std::invalid_argument when the
// leading trace vanishes
DensityMatrix truncate_normalize(const DensityMatrix& rho, int p);

// sum_{n>=p} rho_nn
double tail_mass(const DensityMatrix& rho, int p);

StateDiagnostics validate(const DensityMatrix& rho);

enum class Enforce { reject, warn };

// file schema: { "dim": D, "re": [[...]], "im": [[...]] }, row-major
void write_state_json(const DensityMatrix& rho, const std::string& path);
DensityMatrix read_state_json(const std::string& path, Enforce mode = Enforce::reject);

}  // namespace tomo
