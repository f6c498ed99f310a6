#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "locop/json_io.hpp"

namespace locop {

struct AnalysisOutput {
  io::json report;
  std::optional<std::string> csv;
};

// Runs one named analysis (norms | stab | equiv | conv | invdecay | density |
// synth | kernel) described by `config`; file paths inside the config are
// resolved against base_dir. Throws PreconditionError / NumericalError.
AnalysisOutput run_analysis(const io::json& config, const std::filesystem::path& base_dir);

}  // namespace locop
