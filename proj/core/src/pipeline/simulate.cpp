#include "deforsc/pipeline/simulate.hpp"

#include <json.hpp>

#include "deforsc/util/numfmt.hpp"

namespace deforsc {

SimulatedStudy simulate_study(const SimulateConfig& cfg) {
    const Landscape land = generate_landscape(cfg.landscape);
    const CircularSite project_site =
        sample_sites(land, cfg.site_radius, 1, cfg.landscape.seed).front();
    const auto donor_sites =
        sample_donor_pool(land, project_site, cfg.n_donors, cfg.landscape.seed + 1);

    int width = 1;
    for (int n = cfg.n_donors; n >= 10; n /= 10) ++width;
    auto donor_id = [&](std::size_t i) {
        std::string num = std::to_string(i + 1);
        while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
        return "donor-" + num;
    };

    std::vector<Unit> units;
    units.push_back(
        extract_unit(land, project_site, "project", cfg.treatment_year, cfg.buffer_radii));
    for (std::size_t i = 0; i < donor_sites.size(); ++i)
        units.push_back(
            extract_unit(land, donor_sites[i], donor_id(i), std::nullopt, cfg.buffer_radii));

    std::vector<SiteInfo> sites;
    sites.push_back({"project", project_site, site_area_ha(land, project_site)});
    for (std::size_t i = 0; i < donor_sites.size(); ++i)
        sites.push_back({donor_id(i), donor_sites[i], site_area_ha(land, donor_sites[i])});

    const int first = cfg.landscape.first_year;
    return SimulatedStudy{StudyPanel(std::move(units), first, first + cfg.landscape.n_years - 1),
                          std::move(sites)};
}

std::string sites_manifest_json(const std::vector<SiteInfo>& sites) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : sites)
        doc.push_back({{"id", s.id},
                       {"row", s.site.row},
                       {"col", s.site.col},
                       {"radius", s.site.radius},
                       {"area_ha", round6(s.area_ha)}});
    return doc.dump(2) + "\n";
}

}  // namespace deforsc
