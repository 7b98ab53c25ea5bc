// Run configuration: one TOML file drives the whole pipeline. Every module
// default is overridable in its own section; the global seed feeds every
// stage unless a section sets its own.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deforsc/gsc/types.hpp"
#include "deforsc/landscape.hpp"
#include "deforsc/match/types.hpp"
#include "deforsc/panel_io.hpp"
#include "deforsc/sc/types.hpp"
#include "deforsc/util/toml.hpp"

namespace deforsc {

// The canonical stage order; stage lists must be subsets of this sequence.
const std::vector<std::string>& pipeline_stage_order();

struct SimulateConfig {
    LandscapeConfig landscape;
    int n_donors = 40;
    int site_radius = 10;
    int treatment_year = 2011;
    std::vector<int> buffer_radii;  // empty = one ring out to 2 * radius
};

struct RunConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::vector<std::string> stages;  // canonical order; default = all

    // Inputs. A configured panel path replaces the simulate stage's output.
    std::string panel_path;
    std::string credits_path;

    SimulateConfig simulate;
    PanelSchema schema;
    ScConfig sc;
    GscConfig gsc;
    PanelMatchConfig match;
    GeneticConfig genetic;
    bool genetic_enabled = true;

    // Bookkeeping for the manifest.
    std::string config_path;
    std::string config_digest;
};

// Parse + validate (unknown stages, bad enums, non-positive sizes -> throws
// SchemaError/DomainError).
RunConfig run_config_from_toml(const TomlDoc& doc);
RunConfig load_run_config(const std::string& path);

// The canonical example config, matching the built-in defaults.
std::string example_config_text();

}  // namespace deforsc
