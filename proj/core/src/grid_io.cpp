#include "tomo/grid_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace tomo::io {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_row(const std::string& line, size_t expect, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.size() != expect)
    throw std::runtime_error("malformed CSV row in " + where + ": '" + line + "'");
  return out;
}

std::string sibling(const std::string& manifest_path, const std::string& name) {
  return (fs::path(manifest_path).parent_path() / name).string();
}

nlohmann::json load_manifest(const std::string& path, const std::string& kind) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest " + path);
  nlohmann::json j;
  f >> j;
  if (j.value("kind", "") != kind)
    throw std::runtime_error("manifest " + path + " has kind '" + j.value("kind", "") +
                             "', expected '" + kind + "'");
  return j;
}

}  // namespace

void write_grid_csv(const forward::DistributionGrid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_grid_csv: cannot open " + path);
  const bool cart = grid.coords == forward::DistributionGrid::Coords::cartesian;
  f << (cart ? "q,p,re,im\n" : "r,theta,re,im\n");
  for (size_t i = 0; i < grid.ax1.size(); ++i)
    for (size_t j = 0; j < grid.ax2.size(); ++j)
      f << fmt17(grid.ax1[i]) << ',' << fmt17(grid.ax2[j]) << ','
        << fmt17(grid.values(i, j).real()) << ',' << fmt17(grid.values(i, j).imag()) << '\n';
}

forward::DistributionGrid read_grid_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_grid_csv: cannot open " + path);
  std::string header;
  std::getline(f, header);
  forward::DistributionGrid g;
  if (header == "q,p,re,im")
    g.coords = forward::DistributionGrid::Coords::cartesian;
  else if (header == "r,theta,re,im")
    g.coords = forward::DistributionGrid::Coords::polar;
  else
    throw std::runtime_error("read_grid_csv: unknown header '" + header + "' in " + path);
  std::vector<double> a1, a2;
  std::vector<std::complex<double>> vals;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = parse_row(line, 4, path);
    if (a1.empty() || row[0] != a1.back()) a1.push_back(row[0]);
    if (a1.size() == 1) a2.push_back(row[1]);
    vals.emplace_back(row[2], row[3]);
  }
  if (a1.empty() || a2.empty() || vals.size() != a1.size() * a2.size())
    throw std::runtime_error("read_grid_csv: inconsistent grid shape in " + path);
  g.ax1 = a1;
  g.ax2 = a2;
  g.values.resize(a1.size(), a2.size());
  size_t idx = 0;
  for (size_t i = 0; i < a1.size(); ++i)
    for (size_t j = 0; j < a2.size(); ++j) g.values(i, j) = vals[idx++];
  return g;
}

void write_distribution_grid(const forward::DistributionGrid& grid,
                             const std::string& manifest_path) {
  const std::string csv_name = fs::path(manifest_path).stem().string() + ".csv";
  write_grid_csv(grid, sibling(manifest_path, csv_name));
  nlohmann::json j;
  j["kind"] = "lambda-grid";
  j["file"] = csv_name;
  j["metadata"] = grid.metadata;
  std::ofstream f(manifest_path);
  if (!f) throw std::runtime_error("write_distribution_grid: cannot open " + manifest_path);
  f << j.dump(1) << "\n";
}

forward::DistributionGrid read_distribution_grid(const std::string& manifest_path) {
  nlohmann::json j = load_manifest(manifest_path, "lambda-grid");
  forward::DistributionGrid g = read_grid_csv(sibling(manifest_path, j["file"].get<std::string>()));
  g.metadata = j["metadata"];
  return g;
}

void write_quadrature_dataset(const forward::QuadratureDataset& ds,
                              const std::string& manifest_path) {
  if (ds.kind != forward::QuadratureDataset::Kind::sampled)
    throw std::invalid_argument("write_quadrature_dataset: only sampled datasets are serialized");
  const std::string stem = fs::path(manifest_path).stem().string();
  nlohmann::json j;
  j["kind"] = "quadrature-dataset";
  j["angles"] = ds.angles;
  j["grid"] = {{"lo", ds.x_grid.front()}, {"hi", ds.x_grid.back()}, {"n", ds.x_grid.size()}};
  j["decay"] = ds.gaussian_decay ? "gaussian" : "none";
  auto files = nlohmann::json::array();
  for (size_t t = 0; t < ds.angles.size(); ++t) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_angle_%03zu.csv", stem.c_str(), t);
    files.push_back(name);
    std::ofstream f(sibling(manifest_path, name));
    if (!f) throw std::runtime_error("write_quadrature_dataset: cannot open " + std::string(name));
    f << "x,density\n";
    for (size_t i = 0; i < ds.x_grid.size(); ++i)
      f << fmt17(ds.x_grid[i]) << ',' << fmt17(ds.values[t][i]) << '\n';
  }
  j["files"] = files;
  std::ofstream f(manifest_path);
  if (!f) throw std::runtime_error("write_quadrature_dataset: cannot open " + manifest_path);
  f << j.dump(1) << "\n";
}

forward::QuadratureDataset read_quadrature_dataset(const std::string& manifest_path) {
  nlohmann::json j = load_manifest(manifest_path, "quadrature-dataset");
  std::vector<double> angles = j["angles"].get<std::vector<double>>();
  std::vector<double> xg;
  std::vector<std::vector<double>> vals;
  for (const auto& name : j["files"]) {
    std::ifstream f(sibling(manifest_path, name.get<std::string>()));
    if (!f)
      throw std::runtime_error("read_quadrature_dataset: cannot open " + name.get<std::string>());
    std::string header;
    std::getline(f, header);
    if (header != "x,density")
      throw std::runtime_error("read_quadrature_dataset: unexpected header '" + header + "'");
    std::vector<double> x, v;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      auto row = parse_row(line, 2, name.get<std::string>());
      x.push_back(row[0]);
      v.push_back(row[1]);
    }
    if (xg.empty())
      xg = x;
    else if (x != xg)
      throw std::runtime_error("read_quadrature_dataset: angle files use different x grids");
    vals.push_back(std::move(v));
  }
  return forward::make_sampled_quadrature_dataset(angles, xg, vals,
                                                  j.value("decay", "gaussian") == "gaussian");
}

void write_radial_set(const std::vector<forward::RadialProfile>& profiles,
                      std::complex<double> lambda, const std::string& manifest_path) {
  const std::string stem = fs::path(manifest_path).stem().string();
  nlohmann::json j;
  j["kind"] = "lambda-radial-set";
  j["lambda_re"] = lambda.real();
  j["lambda_im"] = lambda.imag();
  j["kmax"] = profiles.empty() ? -1 : (int)profiles.size() - 1;
  j["decay"] = "gaussian";
  auto files = nlohmann::json::array();
  for (size_t k = 0; k < profiles.size(); ++k) {
    const auto& p = profiles[k];
    if (p.kind != forward::RadialProfile::Kind::sampled)
      throw std::invalid_argument("write_radial_set: only sampled profiles are serialized");
    char name[64];
    std::snprintf(name, sizeof name, "%s_k%03zu.csv", stem.c_str(), k);
    files.push_back(name);
    std::ofstream f(sibling(manifest_path, name));
    if (!f) throw std::runtime_error("write_radial_set: cannot open " + std::string(name));
    f << "r,re,im\n";
    for (size_t i = 0; i < p.r_grid.size(); ++i)
      f << fmt17(p.r_grid[i]) << ',' << fmt17(p.val_re[i]) << ',' << fmt17(p.val_im[i]) << '\n';
  }
  j["files"] = files;
  std::ofstream f(manifest_path);
  if (!f) throw std::runtime_error("write_radial_set: cannot open " + manifest_path);
  f << j.dump(1) << "\n";
}

std::vector<forward::RadialProfile> read_radial_set(const std::string& manifest_path) {
  nlohmann::json j = load_manifest(manifest_path, "lambda-radial-set");
  std::vector<forward::RadialProfile> out;
  int k = 0;
  const bool decay = j.value("decay", "gaussian") == "gaussian";
  for (const auto& name : j["files"]) {
    std::ifstream f(sibling(manifest_path, name.get<std::string>()));
    if (!f) throw std::runtime_error("read_radial_set: cannot open " + name.get<std::string>());
    std::string header;
    std::getline(f, header);
    if (header != "r,re,im")
      throw std::runtime_error("read_radial_set: unexpected header '" + header + "'");
    std::vector<double> r, re, im;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      auto row = parse_row(line, 3, name.get<std::string>());
      r.push_back(row[0]);
      re.push_back(row[1]);
      im.push_back(row[2]);
    }
    out.push_back(forward::make_sampled_radial_profile(r, re, im, k++, decay));
  }
  return out;
}

}  // namespace tomo::io
