#pragma once

// CSV/manifest interchange for grids, quadrature datasets and radial
// profile sets. All numbers are written with 17 significant digits so a
// write/read cycle is bit-exact.
//
// Grid CSV: one header row naming the axes (which encodes the coordinate
// kind: "q,p,re,im" cartesian, "r,theta,re,im" polar), then one row per
// grid point. Multi-file outputs are tied together by a JSON manifest;
// consumers take manifests, never loose files.

#include <string>
#include <vector>

#include "tomo/forward.hpp"

namespace tomo::io {

void write_grid_csv(const forward::DistributionGrid& grid, const std::string& path);
forward::DistributionGrid read_grid_csv(const std::string& path);

// manifest kind "lambda-grid"; the CSV sits next to the manifest
void write_distribution_grid(const forward::DistributionGrid& grid, const std::string& manifest_path);
forward::DistributionGrid read_distribution_grid(const std::string& manifest_path);

// manifest kind "quadrature-dataset": one x,density CSV per angle
void write_quadrature_dataset(const forward::QuadratureDataset& ds, const std::string& manifest_path);
forward::QuadratureDataset read_quadrature_dataset(const std::string& manifest_path);

// manifest kind "lambda-radial-set": one r,re,im CSV per angular index k
void write_radial_set(const std::vector<forward::RadialProfile>& profiles,
                      std::complex<double> lambda, const std::string& manifest_path);
std::vector<forward::RadialProfile> read_radial_set(const std::string& manifest_path);

}  // namespace tomo::io
