#pragma once

// Report envelope shared by every reconstruction method.

#include <string>
#include <vector>

#include <json.hpp>

#include "tomo/states.hpp"

namespace tomo::recon {

struct ReconstructionReport {
  DensityMatrix matrix;      // as reconstructed, before any validation fixup
  Eigen::MatrixXd residuals; // per-element error estimates (same shape)
  StateDiagnostics validation;
  std::vector<std::string> flags;  // assumption / downgrade / failure notes
  nlohmann::json diagnostics;      // method, quadrature meta, truncation orders

  bool has_flag_containing(const std::string& needle) const {
    for (const auto& f : flags)
      if (f.find(needle) != std::string::npos) return true;
    return false;
  }
};

void write_report_json(const ReconstructionReport& rep, const std::string& path);
ReconstructionReport read_report_json(const std::string& path);

}  // namespace tomo::recon
