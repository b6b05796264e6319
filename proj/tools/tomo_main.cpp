// Batch front-end: generate states and synthetic distributions, run the
// reconstruction pipelines, shift the lambda parameter, verify reports.
// Every failure exits nonzero with a machine-readable error JSON on stdout.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "tomo/forward.hpp"
#include "tomo/grid_io.hpp"
#include "tomo/lambda_tools.hpp"
#include "tomo/recon_lambda.hpp"
#include "tomo/recon_quad.hpp"
#include "tomo/states.hpp"

using nlohmann::json;
using namespace tomo;

namespace {

struct CliError : std::runtime_error {
  std::string code;
  CliError(std::string c, const std::string& msg) : std::runtime_error(msg), code(std::move(c)) {}
};

forward::AxisSpec parse_axis(const std::string& s) {
  forward::AxisSpec ax;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &ax.lo, &ax.hi, &ax.n) != 3)
    throw CliError("schema", "bad axis spec '" + s + "', expected lo:hi:n");
  if (ax.n < 2 || !(ax.hi > ax.lo))
    throw CliError("schema", "axis spec '" + s + "' needs n >= 2 and hi > lo");
  return ax;
}

std::pair<forward::AxisSpec, forward::AxisSpec> parse_grid2(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos)
    throw CliError("schema", "grid spec '" + s + "' must be x0:x1:n,y0:y1:n");
  return {parse_axis(s.substr(0, comma)), parse_axis(s.substr(comma + 1))};
}

std::complex<double> parse_complex(const std::string& s) {
  double re = 0, im = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) == 2) return {re, im};
  if (std::sscanf(s.c_str(), "%lf", &re) == 1) return {re, 0.0};
  throw CliError("schema", "bad complex value '" + s + "', expected re or re,im");
}

json manifest_kind(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CliError("missing-file", "cannot open manifest " + path);
  json j;
  f >> j;
  return j;
}

// ----------------------------------------------------------- subcommands

int cmd_gen_state(const std::string& kind, int dim, int n, const std::string& alpha_s,
                  double lambda, std::uint64_t seed, bool allow_truncation,
                  const std::string& out) {
  DensityMatrix rho;
  if (kind == "fock")
    rho = fock_state(dim, n);
  else if (kind == "coherent")
    rho = coherent_state(dim, parse_complex(alpha_s), allow_truncation);
  else if (kind == "thermal")
    rho = thermal_klambda_state(dim, lambda, allow_truncation);
  else if (kind == "random")
    rho = random_state(dim, seed);
  else
    throw CliError("schema", "unknown state kind '" + kind + "'");
  write_state_json(rho, out);
  return 0;
}

int cmd_forward(const std::string& state_path, const std::string& target, int angles,
                double lambda, int kmax, const std::string& grid_s, const std::string& out) {
  DensityMatrix rho = read_state_json(state_path);
  if (target == "quadrature") {
    if (angles < 1) throw CliError("schema", "--angles must be >= 1 for target quadrature");
    std::vector<double> th(angles);
    for (int t = 0; t < angles; ++t) th[t] = 2.0 * M_PI * t / angles;
    forward::AxisSpec ax = grid_s.empty() ? forward::AxisSpec{-9.0, 9.0, 4096} : parse_axis(grid_s);
    auto ds = forward::sample_quadrature_dataset(rho, th, ax);
    io::write_quadrature_dataset(ds, out);
  } else if (target == "lambda") {
    auto [ax1, ax2] = grid_s.empty()
                          ? std::pair{forward::AxisSpec{-6, 6, 121}, forward::AxisSpec{-6, 6, 121}}
                          : parse_grid2(grid_s);
    auto g = forward::sample_lambda_grid(rho, {lambda, 0.0}, ax1, ax2,
                                         forward::DistributionGrid::Coords::cartesian);
    io::write_distribution_grid(g, out);
  } else if (target == "lambda-radial") {
    const int km = kmax >= 0 ? kmax : rho.dim() - 1;
    forward::AxisSpec rax =
        grid_s.empty() ? forward::AxisSpec{0.0, 12.0, 2048} : parse_axis(grid_s);
    std::vector<forward::RadialProfile> profs;
    for (int k = 0; k <= km; ++k)
      profs.push_back(forward::sample_radial_profile(rho, {lambda, 0.0}, k, rax));
    io::write_radial_set(profs, {lambda, 0.0}, out);
  } else {
    throw CliError("schema", "unknown forward target '" + target + "'");
  }
  return 0;
}

int cmd_reconstruct(const std::string& manifest_path, const std::string& method, int dim,
                    double lambda, double tol, bool allow_override, int order,
                    const std::string& out) {
  json mf = manifest_kind(manifest_path);
  const std::string kind = mf.value("kind", "");
  recon::ReconstructionReport rep;
  if (method == "quad-full") {
    if (kind != "quadrature-dataset")
      throw CliError("schema", "method quad-full needs a quadrature-dataset manifest");
    auto ds = io::read_quadrature_dataset(manifest_path);
    const int p = (int)ds.angles.size();
    if (dim <= 0) throw CliError("schema", "--dim required for quad-full");
    // the p-angle average reproduces the continuum Fourier component of a
    // dim-finite matrix only when no alias wraps into the band
    if (p < 2 * dim - 1)
      throw CliError("validity-window",
                     "quad-full from " + std::to_string(p) + " angles aliases for dim " +
                         std::to_string(dim) + "; need >= 2*dim-1 angles or method quad-finite");
    rep = recon::reconstruct_full([&ds](int k) { return recon::component_from_dataset(ds, k); },
                                  dim);
  } else if (method == "quad-finite") {
    if (kind != "quadrature-dataset")
      throw CliError("schema", "method quad-finite needs a quadrature-dataset manifest");
    auto ds = io::read_quadrature_dataset(manifest_path);
    rep = recon::reconstruct_finite(ds);
  } else if (method == "lambda-int") {
    if (kind != "lambda-radial-set")
      throw CliError("schema", "method lambda-int needs a lambda-radial-set manifest");
    auto profs = io::read_radial_set(manifest_path);
    const double mf_lambda = mf.value("lambda_re", lambda);
    const int D = dim > 0 ? dim : (int)profs.size();
    if (D > (int)profs.size())
      throw CliError("schema", "radial set only covers k <= " + std::to_string(profs.size() - 1));
    rep = recon::reconstruct_integration_all([&profs](int k) { return profs[k]; }, mf_lambda, D);
  } else if (method == "lambda-diff" || method == "q-function") {
    if (kind != "lambda-radial-set")
      throw CliError("schema", "method " + method + " needs a lambda-radial-set manifest");
    auto profs = io::read_radial_set(manifest_path);
    const double mf_lambda = mf.value("lambda_re", lambda);
    if (method == "q-function" && mf_lambda != 0.0)
      throw CliError("validity-window", "q-function method needs lambda = 0 data, manifest has "
                                        "lambda = " + std::to_string(mf_lambda));
    const int D = dim > 0 ? dim : (int)profs.size();
    if (D > (int)profs.size())
      throw CliError("schema", "radial set only covers k <= " + std::to_string(profs.size() - 1));
    const int fit_order = order > 0 ? order : 2 * (D - 1);
    recon::TaylorProvider prov;
    prov.lambda = mf_lambda;
    prov.coeffs = [&profs, mf_lambda, fit_order](int k) {
      const auto& p = profs[k];
      std::vector<double> r;
      std::vector<std::complex<double>> w;
      for (size_t i = 0; i < p.r_grid.size(); ++i)
        if (p.r_grid[i] <= 0.5) {
          r.push_back(p.r_grid[i]);
          w.push_back({p.val_re[i], p.val_im[i]});
        }
      return recon::taylor_from_samples(r, w, mf_lambda, k, std::max(k, fit_order));
    };
    recon::DiffOptions dopts;
    dopts.tol = tol;
    dopts.allow_override = allow_override;
    rep = recon::reconstruct_differentiation_all(prov, mf_lambda, D, dopts);
  } else {
    throw CliError("schema", "unknown reconstruction method '" + method + "'");
  }
  recon::write_report_json(rep, out);
  return 0;
}

int cmd_shift_lambda(const std::string& manifest_path, double lambda, double lambda_prime,
                     const std::string& direction, const std::string& out) {
  auto grid = io::read_distribution_grid(manifest_path);
  forward::DistributionGrid shifted;
  if (direction == "forward")
    shifted = lambda_tools::shift_lambda_forward(grid, lambda, lambda_prime);
  else if (direction == "inverse")
    shifted = lambda_tools::shift_lambda_inverse(grid, lambda_prime, lambda);
  else
    throw CliError("schema", "direction must be forward or inverse");
  io::write_distribution_grid(shifted, out);
  return 0;
}

int cmd_kernel_build(const std::string& manifest_path, double lambda, const std::string& grid_s,
                     const std::string& out) {
  auto ds = io::read_quadrature_dataset(manifest_path);
  auto [ax1, ax2] = grid_s.empty()
                        ? std::pair{forward::AxisSpec{-3, 3, 41}, forward::AxisSpec{-3, 3, 41}}
                        : parse_grid2(grid_s);
  auto g = lambda_tools::lambda_from_quadratures(ds, {lambda, 0.0}, ax1, ax2);
  io::write_distribution_grid(g, out);
  return 0;
}

int cmd_verify(const std::string& report_path, const std::string& reference_path, double tol,
               const std::string& out) {
  auto rep = recon::read_report_json(report_path);
  auto ref = read_state_json(reference_path, Enforce::warn);
  if (rep.matrix.dim() != ref.dim())
    throw CliError("schema", "dimension mismatch: report " + std::to_string(rep.matrix.dim()) +
                                 " vs reference " + std::to_string(ref.dim()));
  json j;
  double maxabs = 0.0;
  auto table = json::array();
  for (int m = 0; m < ref.dim(); ++m)
    for (int n = 0; n < ref.dim(); ++n) {
      double e = std::abs(rep.matrix.mat(m, n) - ref.mat(m, n));
      maxabs = std::max(maxabs, e);
      if (e > tol) table.push_back({{"m", m}, {"n", n}, {"error", e}});
    }
  j["max_abs_error"] = maxabs;
  j["tolerance"] = tol;
  j["ok"] = maxabs <= tol;
  j["elements_over_tolerance"] = table;
  j["report_flags"] = rep.flags;
  if (!out.empty()) {
    std::ofstream f(out);
    f << j.dump(1) << "\n";
  }
  std::cout << j.dump(1) << "\n";
  return maxabs <= tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "phase-space distribution toolkit: forward models and density-matrix reconstruction"};
  app.require_subcommand(1);

  std::string gs_kind, gs_alpha = "0", gs_out;
  int gs_dim = 8, gs_n = 0;
  double gs_lambda = 0.0;
  std::uint64_t gs_seed = 1;
  bool gs_allow_trunc = false;
  auto* gen = app.add_subcommand("gen-state", "write a density matrix JSON file");
  gen->add_option("kind", gs_kind, "fock | coherent | thermal | random")->required();
  gen->add_option("--dim", gs_dim, "Fock-space dimension")->required();
  gen->add_option("--n", gs_n, "photon number (fock)");
  gen->add_option("--alpha", gs_alpha, "amplitude re[,im] (coherent)");
  gen->add_option("--lambda", gs_lambda, "diagonal-law parameter in [0,1) (thermal)");
  gen->add_option("--seed", gs_seed, "rng seed (random)");
  gen->add_flag("--allow-truncation", gs_allow_trunc, "accept tail mass above 1e-12");
  gen->add_option("--out", gs_out, "output state file")->required();

  std::string fw_state, fw_target, fw_grid, fw_out;
  int fw_angles = 0, fw_kmax = -1;
  double fw_lambda = 0.0;
  auto* fw = app.add_subcommand("forward", "tabulate distributions of a state");
  fw->add_option("--state", fw_state, "state JSON file")->required();
  fw->add_option("--target", fw_target, "quadrature | lambda | lambda-radial")->required();
  fw->add_option("--angles", fw_angles, "number of uniform angles 2 pi t / p (quadrature)");
  fw->add_option("--lambda", fw_lambda, "distribution parameter");
  fw->add_option("--kmax", fw_kmax, "highest angular index (lambda-radial)");
  fw->add_option("--grid", fw_grid, "axis spec lo:hi:n (1D) or lo:hi:n,lo:hi:n (2D)");
  fw->add_option("--out", fw_out, "output manifest path")->required();

  std::string rc_manifest, rc_method, rc_out;
  int rc_dim = 0, rc_order = 0;
  double rc_lambda = 0.0, rc_tol = 1e-10;
  bool rc_override = false;
  auto* rc = app.add_subcommand("reconstruct", "recover a density matrix from distribution data");
  rc->add_option("--manifest", rc_manifest, "input manifest")->required();
  rc->add_option("--method", rc_method,
                 "quad-full | quad-finite | lambda-int | lambda-diff | q-function")
      ->required();
  rc->add_option("--dim", rc_dim, "output dimension");
  rc->add_option("--lambda", rc_lambda, "distribution parameter (informational; manifest wins)");
  rc->add_option("--tol", rc_tol, "truncation tolerance for the derivative method");
  rc->add_option("--order", rc_order, "fit order for sampled derivative data");
  rc->add_flag("--allow-lambda-override", rc_override,
               "permit |lambda| >= 1/2 on a passing decay check");
  rc->add_option("--out", rc_out, "output report JSON")->required();

  std::string sh_manifest, sh_dir = "forward", sh_out;
  double sh_lambda = 0.0, sh_lambda_p = 0.0;
  auto* sh = app.add_subcommand("shift-lambda", "convolve or deconvolve between lambda parameters");
  sh->add_option("--manifest", sh_manifest, "lambda-grid manifest")->required();
  sh->add_option("--lambda", sh_lambda, "lower parameter")->required();
  sh->add_option("--lambda-prime", sh_lambda_p, "upper parameter")->required();
  sh->add_option("--direction", sh_dir,
                 "forward (lambda -> lambda') | inverse (lambda' -> lambda)");
  sh->add_option("--out", sh_out, "output manifest")->required();

  std::string kb_manifest, kb_grid, kb_out;
  double kb_lambda = 0.0;
  auto* kb =
      app.add_subcommand("kernel-build", "build a lambda-distribution grid from quadrature data");
  kb->add_option("--manifest", kb_manifest, "quadrature-dataset manifest")->required();
  kb->add_option("--lambda", kb_lambda, "target distribution parameter, |lambda| < 1")->required();
  kb->add_option("--grid", kb_grid, "q0:q1:n,p0:p1:n");
  kb->add_option("--out", kb_out, "output manifest")->required();

  std::string vf_report, vf_reference, vf_out;
  double vf_tol = 1e-8;
  auto* vf =
      app.add_subcommand("verify", "compare a reconstruction report against a reference state");
  vf->add_option("--report", vf_report, "report JSON")->required();
  vf->add_option("--reference", vf_reference, "reference state JSON")->required();
  vf->add_option("--tol", vf_tol, "max-abs tolerance");
  vf->add_option("--out", vf_out, "write the comparison summary here too");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_state(gs_kind, gs_dim, gs_n, gs_alpha, gs_lambda, gs_seed, gs_allow_trunc,
                           gs_out);
    if (fw->parsed())
      return cmd_forward(fw_state, fw_target, fw_angles, fw_lambda, fw_kmax, fw_grid, fw_out);
    if (rc->parsed())
      return cmd_reconstruct(rc_manifest, rc_method, rc_dim, rc_lambda, rc_tol, rc_override,
                             rc_order, rc_out);
    if (sh->parsed()) return cmd_shift_lambda(sh_manifest, sh_lambda, sh_lambda_p, sh_dir, sh_out);
    if (kb->parsed()) return cmd_kernel_build(kb_manifest, kb_lambda, kb_grid, kb_out);
    if (vf->parsed()) return cmd_verify(vf_report, vf_reference, vf_tol, vf_out);
  } catch (const CliError& e) {
    json err = {{"error", {{"code", e.code}, {"message", e.what()}}}};
    std::cout << err.dump(1) << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err = {{"error", {{"code", "module-error"}, {"message", e.what()}}}};
    std::cout << err.dump(1) << "\n";
    return 1;
  }
  return 0;
}
