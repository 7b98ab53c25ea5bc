// Synthetic landscape simulator: a seeded raster world with spatially
// autocorrelated deforestation risk, static terrain/covariate layers, and
// circular sites that can be carved out as panel units (outcome = hectares
// cleared inside the site per year, plus buffer-ring pressure covariates).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deforsc/panel.hpp"

namespace deforsc {

struct LandscapeConfig {
    int rows = 200;
    int cols = 200;
    double cell_size_ha = 9.0;     // 300 m cells
    int first_year = 2001;
    int n_years = 20;
    double intensity = 0.01;       // mean annual clearing probability per cell
    double heterogeneity = 1.0;    // lognormal amplitude of the spatial risk field
    int smooth_radius = 3;         // box-blur half-width for noise fields
    int smooth_passes = 2;
    double forest_base = 0.85;     // tree-cover fraction field: base + scale * z
    double forest_scale = 0.2;
    double forest_threshold = 0.5; // cells above this start forested
    std::uint64_t seed = 1;
};

struct Landscape {
    LandscapeConfig config;
    // Static per-cell layers (row-major, rows*cols): tree_cover, elevation,
    // slope, travel_time, protected_cover, soil_fertility, precip_base, risk.
    std::map<std::string, std::vector<double>> layers;
    // Panel-year index (0-based) when the cell was cleared, -1 = never. Only
    // initially forested cells can clear.
    std::vector<int> defor_year_idx;
    // Global per-year precipitation multiplier (length n_years).
    std::vector<double> precip_factor;

    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(config.cols) +
               static_cast<std::size_t>(c);
    }
    bool in_grid(int r, int c) const {
        return r >= 0 && r < config.rows && c >= 0 && c < config.cols;
    }
};

Landscape generate_landscape(const LandscapeConfig& cfg);

// Circular site: all cells whose centre lies within `radius` cells of (row, col).
struct CircularSite {
    int row = 0;
    int col = 0;
    int radius = 0;
};

// Cells of the site that fall inside the grid (whole disc for interior sites).
std::vector<std::pair<int, int>> site_cells(const Landscape& l, const CircularSite& s);
double site_area_ha(const Landscape& l, const CircularSite& s);
double initially_forested_area_ha(const Landscape& l, const CircularSite& s);

// Exact shared-cell test (not a centre-distance approximation).
bool sites_overlap(const CircularSite& a, const CircularSite& b);

// n sites of the given radius, centres uniform over all placements that keep
// the disc fully inside the grid; rejects placements overlapping any `avoid`
// site. Sampled sites may overlap each other. Throws DomainError when the grid
// cannot host the radius or rejection sampling exhausts its attempt budget.
std::vector<CircularSite> sample_sites(const Landscape& l, int radius, int n, std::uint64_t seed,
                                       const std::vector<CircularSite>& avoid = {});

// Donor-pool helper: sites shaped like `tmpl` that never overlap it.
std::vector<CircularSite> sample_donor_pool(const Landscape& l, const CircularSite& tmpl, int n,
                                            std::uint64_t seed);

// Carve a panel unit out of the landscape. Static covariates are site means of
// the static layers (protected_cover/soil_fertility become shares/means);
// dynamic covariates are precipitation and one buffer_defor_<k> series per
// buffer ring. buffer_radii are outer radii in cells, ascending, all > site
// radius; empty means a single ring out to 2 * site radius. Rings are clipped
// at the grid edge.
Unit extract_unit(const Landscape& l, const CircularSite& site, const UnitId& id,
                  std::optional<int> treatment_year = std::nullopt,
                  const std::vector<int>& buffer_radii = {});

}  // namespace deforsc
