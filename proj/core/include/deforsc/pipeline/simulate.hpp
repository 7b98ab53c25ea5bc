// Synthetic-study construction: generate a landscape, drop one project site
// and a donor pool of equally sized circles onto it, and extract the panel.
#pragma once

#include <string>
#include <vector>

#include "deforsc/landscape.hpp"
#include "deforsc/panel.hpp"
#include "deforsc/pipeline/config.hpp"

namespace deforsc {

struct SiteInfo {
    UnitId id;
    CircularSite site;
    double area_ha = 0.0;
};

struct SimulatedStudy {
    StudyPanel panel;
    std::vector<SiteInfo> sites;  // project first, then donors in sampling order
};

// The project unit is named "project" (treated at cfg.treatment_year), donors
// "donor-01".. (zero-padded, never treated). Donor sites never overlap the
// project site.
SimulatedStudy simulate_study(const SimulateConfig& cfg);

// The sites manifest document (pretty-printed JSON array).
std::string sites_manifest_json(const std::vector<SiteInfo>& sites);

}  // namespace deforsc
