#include "deforsc/landscape.hpp"

#include <algorithm>
#include <cmath>

#include "deforsc/errors.hpp"
#include "deforsc/util/rng.hpp"

namespace deforsc {

namespace {

// Smoothed standard-normal field: white noise, `passes` separable box blurs of
// half-width `radius` (clamped edges), then re-standardised to mean 0 / sd 1.
std::vector<double> smooth_field(int rows, int cols, std::mt19937_64& rng, int radius,
                                 int passes) {
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    std::vector<double> f(n);
    for (auto& v : f) v = normal(rng);

    std::vector<double> tmp(n);
    auto blur_rows = [&](const std::vector<double>& src, std::vector<double>& dst) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                double s = 0.0;
                int cnt = 0;
                for (int d = -radius; d <= radius; ++d) {
                    int cc = c + d;
                    if (cc < 0 || cc >= cols) continue;
                    s += src[static_cast<std::size_t>(r) * cols + cc];
                    ++cnt;
                }
                dst[static_cast<std::size_t>(r) * cols + c] = s / cnt;
            }
        }
    };
    auto blur_cols = [&](const std::vector<double>& src, std::vector<double>& dst) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                double s = 0.0;
                int cnt = 0;
                for (int d = -radius; d <= radius; ++d) {
                    int rr = r + d;
                    if (rr < 0 || rr >= rows) continue;
                    s += src[static_cast<std::size_t>(rr) * cols + c];
                    ++cnt;
                }
                dst[static_cast<std::size_t>(r) * cols + c] = s / cnt;
            }
        }
    };
    for (int p = 0; p < passes && radius > 0; ++p) {
        blur_rows(f, tmp);
        blur_cols(tmp, f);
    }

    double m = 0.0;
    for (double v : f) m += v;
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : f) ss += (v - m) * (v - m);
    double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd <= 0.0) sd = 1.0;
    for (auto& v : f) v = (v - m) / sd;
    return f;
}

// Per-cell uniform in [0,1) derived from (seed, cell) without constructing a
// full generator per cell.
double cell_uniform(std::uint64_t seed, std::uint64_t cell) {
    std::uint64_t h = splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dULL) ^ cell);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

Landscape generate_landscape(const LandscapeConfig& cfg) {
    if (cfg.rows <= 0 || cfg.cols <= 0) throw DomainError("landscape grid must be non-empty");
    if (cfg.n_years <= 0) throw DomainError("landscape needs at least one simulated year");
    if (cfg.intensity < 0.0 || cfg.intensity > 1.0)
        throw DomainError("clearing intensity must lie in [0, 1]");
    if (cfg.cell_size_ha <= 0.0) throw DomainError("cell size must be positive");

    Landscape l;
    l.config = cfg;
    const std::size_t n = static_cast<std::size_t>(cfg.rows) * static_cast<std::size_t>(cfg.cols);

    // Each layer gets its own substream so adding a layer never shifts others.
    auto field = [&](std::uint64_t stream) {
        auto rng = make_rng(cfg.seed, stream);
        return smooth_field(cfg.rows, cfg.cols, rng, cfg.smooth_radius, cfg.smooth_passes);
    };

    std::vector<double> z_forest = field(1);
    std::vector<double> z_elev = field(2);
    std::vector<double> z_travel = field(3);
    std::vector<double> z_prot = field(4);
    std::vector<double> z_soil = field(5);
    std::vector<double> z_precip = field(6);
    std::vector<double> z_risk = field(7);

    auto& tree = l.layers["tree_cover"];
    auto& elev = l.layers["elevation"];
    auto& slope = l.layers["slope"];
    auto& travel = l.layers["travel_time"];
    auto& prot = l.layers["protected_cover"];
    auto& soil = l.layers["soil_fertility"];
    auto& precip = l.layers["precip_base"];
    auto& risk = l.layers["risk"];
    for (auto* v : {&tree, &elev, &slope, &travel, &prot, &soil, &precip, &risk}) v->resize(n);

    const double a = cfg.heterogeneity;
    for (std::size_t i = 0; i < n; ++i) {
        tree[i] = std::clamp(cfg.forest_base + cfg.forest_scale * z_forest[i], 0.0, 1.0);
        elev[i] = std::max(0.0, 500.0 + 400.0 * z_elev[i]);
        slope[i] = std::fabs(8.0 * z_elev[i]) + 1.0;
        travel[i] = std::max(0.1, 2.0 + 1.5 * z_travel[i]);
        prot[i] = z_prot[i] > 1.0 ? 1.0 : 0.0;
        soil[i] = z_soil[i] < -0.43 ? 1.0 : (z_soil[i] > 0.43 ? 3.0 : 2.0);
        precip[i] = std::max(200.0, 1500.0 + 600.0 * z_precip[i]);
        // Unit-mean lognormal modulation keeps the landscape-average risk at
        // the configured intensity; amplitude 0 makes it exactly uniform.
        risk[i] = std::clamp(cfg.intensity * std::exp(a * z_risk[i] - 0.5 * a * a), 0.0, 1.0);
    }

    // Clearing year per cell: one uniform draw -> geometric waiting time.
    l.defor_year_idx.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (tree[i] <= cfg.forest_threshold) continue;
        const double r = risk[i];
        if (r <= 0.0) continue;
        int year;
        if (r >= 1.0) {
            year = 0;
        } else {
            const double u = cell_uniform(cfg.seed, i);
            year = static_cast<int>(std::floor(std::log1p(-u) / std::log1p(-r)));
        }
        if (year < cfg.n_years) l.defor_year_idx[i] = year;
    }

    // Year-to-year precipitation multipliers (shared across the landscape).
    auto yr_rng = make_rng(cfg.seed, 8);
    l.precip_factor.resize(static_cast<std::size_t>(cfg.n_years));
    for (auto& f : l.precip_factor) f = std::max(0.1, 1.0 + 0.05 * normal(yr_rng));

    return l;
}

std::vector<std::pair<int, int>> site_cells(const Landscape& l, const CircularSite& s) {
    std::vector<std::pair<int, int>> cells;
    const long long r2 = static_cast<long long>(s.radius) * s.radius;
    for (int dr = -s.radius; dr <= s.radius; ++dr) {
        for (int dc = -s.radius; dc <= s.radius; ++dc) {
            if (static_cast<long long>(dr) * dr + static_cast<long long>(dc) * dc > r2) continue;
            int r = s.row + dr, c = s.col + dc;
            if (l.in_grid(r, c)) cells.emplace_back(r, c);
        }
    }
    return cells;
}

double site_area_ha(const Landscape& l, const CircularSite& s) {
    return static_cast<double>(site_cells(l, s).size()) * l.config.cell_size_ha;
}

double initially_forested_area_ha(const Landscape& l, const CircularSite& s) {
    const auto& tree = l.layers.at("tree_cover");
    double cnt = 0.0;
    for (auto [r, c] : site_cells(l, s))
        if (tree[l.idx(r, c)] > l.config.forest_threshold) cnt += 1.0;
    return cnt * l.config.cell_size_ha;
}

bool sites_overlap(const CircularSite& a, const CircularSite& b) {
    // Walk the smaller disc and test membership in the other.
    const CircularSite& s = a.radius <= b.radius ? a : b;
    const CircularSite& t = a.radius <= b.radius ? b : a;
    const long long rs2 = static_cast<long long>(s.radius) * s.radius;
    const long long rt2 = static_cast<long long>(t.radius) * t.radius;
    for (int dr = -s.radius; dr <= s.radius; ++dr) {
        for (int dc = -s.radius; dc <= s.radius; ++dc) {
            if (static_cast<long long>(dr) * dr + static_cast<long long>(dc) * dc > rs2) continue;
            const long long tr = s.row + dr - t.row;
            const long long tc = s.col + dc - t.col;
            if (tr * tr + tc * tc <= rt2) return true;
        }
    }
    return false;
}

std::vector<CircularSite> sample_sites(const Landscape& l, int radius, int n, std::uint64_t seed,
                                       const std::vector<CircularSite>& avoid) {
    if (radius < 0) throw DomainError("site radius must be non-negative");
    const int row_lo = radius, row_hi = l.config.rows - 1 - radius;
    const int col_lo = radius, col_hi = l.config.cols - 1 - radius;
    if (row_hi < row_lo || col_hi < col_lo)
        throw DomainError("grid too small for site radius " + std::to_string(radius));

    auto rng = make_rng(seed, 101);
    std::vector<CircularSite> out;
    out.reserve(static_cast<std::size_t>(n));
    const long long budget = 1000LL + 200LL * n;
    long long attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > budget)
            throw DomainError("site sampling exhausted its attempt budget (" +
                              std::to_string(budget) + " draws); grid too crowded");
        CircularSite s;
        s.row = row_lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(row_hi - row_lo + 1)));
        s.col = col_lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(col_hi - col_lo + 1)));
        s.radius = radius;
        bool clash = false;
        for (const auto& av : avoid) {
            if (sites_overlap(s, av)) {
                clash = true;
                break;
            }
        }
        if (!clash) out.push_back(s);
    }
    return out;
}

std::vector<CircularSite> sample_donor_pool(const Landscape& l, const CircularSite& tmpl, int n,
                                            std::uint64_t seed) {
    return sample_sites(l, tmpl.radius, n, seed, {tmpl});
}

Unit extract_unit(const Landscape& l, const CircularSite& site, const UnitId& id,
                  std::optional<int> treatment_year, const std::vector<int>& buffer_radii) {
    Unit u;
    u.id = id;
    u.treatment_year = treatment_year;

    const auto cells = site_cells(l, site);
    if (cells.empty()) throw DomainError("site '" + id + "' has no cells inside the grid");
    u.area_ha = static_cast<double>(cells.size()) * l.config.cell_size_ha;

    const int ny = l.config.n_years;
    u.outcome.first_year = l.config.first_year;
    u.outcome.values.assign(static_cast<std::size_t>(ny), 0.0);
    for (auto [r, c] : cells) {
        int y = l.defor_year_idx[l.idx(r, c)];
        if (y >= 0) u.outcome.values[static_cast<std::size_t>(y)] += l.config.cell_size_ha;
    }

    // Static covariates: site means of every static layer except the internal
    // risk field (that would leak the data-generating process).
    for (const auto& [name, layer] : l.layers) {
        if (name == "risk" || name == "precip_base") continue;
        double s = 0.0;
        for (auto [r, c] : cells) s += layer[l.idx(r, c)];
        u.covariates.statics[name] = s / static_cast<double>(cells.size());
    }

    // Precipitation: site-mean base scaled by the landscape's year factors.
    {
        const auto& base = l.layers.at("precip_base");
        double s = 0.0;
        for (auto [r, c] : cells) s += base[l.idx(r, c)];
        s /= static_cast<double>(cells.size());
        OutcomeSeries p;
        p.first_year = l.config.first_year;
        p.values.reserve(static_cast<std::size_t>(ny));
        for (int t = 0; t < ny; ++t) p.values.push_back(s * l.precip_factor[static_cast<std::size_t>(t)]);
        u.covariates.dynamics["precipitation"] = std::move(p);
    }

    // Buffer rings: annual cleared hectares in (prev_radius, outer_radius].
    std::vector<int> radii = buffer_radii;
    if (radii.empty()) radii.push_back(site.radius * 2);
    int prev = site.radius;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const int outer = radii[k];
        if (outer <= prev)
            throw DomainError("buffer radii must be ascending and larger than the site radius");
        OutcomeSeries ring;
        ring.first_year = l.config.first_year;
        ring.values.assign(static_cast<std::size_t>(ny), 0.0);
        const long long o2 = static_cast<long long>(outer) * outer;
        const long long i2 = static_cast<long long>(prev) * prev;
        for (int dr = -outer; dr <= outer; ++dr) {
            for (int dc = -outer; dc <= outer; ++dc) {
                const long long d2 =
                    static_cast<long long>(dr) * dr + static_cast<long long>(dc) * dc;
                if (d2 > o2 || d2 <= i2) continue;
                const int r = site.row + dr, c = site.col + dc;
                if (!l.in_grid(r, c)) continue;
                int y = l.defor_year_idx[l.idx(r, c)];
                if (y >= 0) ring.values[static_cast<std::size_t>(y)] += l.config.cell_size_ha;
            }
        }
        u.covariates.dynamics["buffer_defor_" + std::to_string(k + 1)] = std::move(ring);
        prev = outer;
    }

    return u;
}

}  // namespace deforsc
