// Pipeline orchestration: executes the requested stages in canonical order,
// passes results between them in memory, writes the report bundle, and
// records a manifest (config digest, per-stage timings, output digests).
// Stage failures remove the files written so far and re-throw with the stage
// name attached. With a fixed config and seed, every emitted file except
// manifest.json (which carries wall-clock timings) is byte-identical across
// runs.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "deforsc/pipeline/config.hpp"

namespace deforsc {

struct StageRecord {
    std::string name;
    bool ran = false;
    std::string note;  // skip reason or orchestration remarks
    double wall_ms = 0.0;
    // Relative file name -> FNV-1a digest, in emission order.
    std::vector<std::pair<std::string, std::string>> outputs;
};

struct RunManifest {
    std::string config_path;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<StageRecord> stages;
};

// Pre-flight validation only (stage dependencies, input files); throws on
// problems without touching the output directory.
void preflight(const RunConfig& cfg);

// Full run. Writes outputs + manifest.json under cfg.out_dir.
RunManifest run_pipeline(const RunConfig& cfg);

}  // namespace deforsc
