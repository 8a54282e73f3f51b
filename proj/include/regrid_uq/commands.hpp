#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace regrid_uq {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

// Subcommand bodies. All validate inputs before writing anything and throw
// Validation/Numeric/IoError; main maps those to exit codes.
void cmd_synth(const std::string& config_path, const std::string& out_dir,
               const CliOverrides& overrides = {});
void cmd_fit(const std::string& manifest_path, const std::string& config_path,
             const std::string& model_out, const CliOverrides& overrides = {});
void cmd_analyze(const std::string& manifest_path, const std::string& config_path,
                 const std::string& model_path, const std::string& mode,
                 const std::string& out_dir, bool emit_draws, const CliOverrides& overrides = {});
void cmd_eval(const std::string& manifest_path, const std::string& config_path,
              const std::string& model_path, const std::string& out_dir,
              const CliOverrides& overrides = {});
void cmd_report(const std::vector<std::string>& inputs, const std::string& out_path);

}  // namespace regrid_uq
