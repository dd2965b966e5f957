#pragma once
// Configuration-driven experiment runner behind the `lsx` executable.
//
// A config is one JSON object:
//
//   {"command": "compare", "seed": 7,
//    "process": {"family": "powexp", ...},
//    "compare": {"u": [3, 3.5, 4], "n": 100000}}
//
// parse_config() checks it against the schema, rejects unknown keys with the
// offending path, and fills in every default. The normalized document is what
// the report echoes, so parsing the echo gives the same config back.

#include "lsx/model.hpp"
#include "lsx/parallel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lsx::cli {

inline constexpr const char* kCommands[] = {"asympt", "pickands", "tail",
                                            "compare", "validate", "sandwich"};

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::string out = "lsx-out";  // output directory unless --out is given
    nlohmann::json doc;           // normalized
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the process from a normalized "process" block.
ProcessSpec build_process(const nlohmann::json& process);

struct RunResult {
    nlohmann::json report;  // deterministic part, written as report.json
    double wall_seconds = 0.0;
    std::vector<std::filesystem::path> files;
};

/// Runs the configured operation and writes report.json, timing.json and the
/// command's CSV tables into out_dir (created if missing).
RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
              Exec exec = Exec::parallel);

/// Command-line entry point. Returns 0 on success, 1 on a config error,
/// 2 on a numerical or model error.
int main(int argc, char** argv);

}  // namespace lsx::cli
