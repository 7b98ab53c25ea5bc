#include "deforsc/match/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deforsc/errors.hpp"
#include "deforsc/sc/predictors.hpp"
#include "deforsc/util/rng.hpp"
#include "deforsc/util/stats.hpp"

namespace deforsc {

namespace {

struct Individual {
    std::vector<double> log_w;
    double fitness = 0.0;
};

}  // namespace

GeneticMatchResult genetic_match(const Unit& treated, const std::vector<const Unit*>& pool,
                                 const GeneticConfig& cfg) {
    if (static_cast<int>(pool.size()) < cfg.n_controls)
        throw DomainError("genetic match: pool of " + std::to_string(pool.size()) +
                          " cannot supply " + std::to_string(cfg.n_controls) + " controls");
    const int pre_end = treated.pre_period_end(treated.outcome.last_year());

    // Candidate order is pinned to ids so every tie-break is reproducible.
    std::vector<const Unit*> cand = pool;
    std::sort(cand.begin(), cand.end(),
              [](const Unit* a, const Unit* b) { return a->id < b->id; });
    const int n = static_cast<int>(cand.size());
    const int k = cfg.n_controls;

    const auto all_names = resolve_covariates(cfg.covariates, treated);

    // Covariate matrix: pool values (rows = covariates), treated vector.
    // Standardise by the pool sd; constant covariates can't be scaled and are
    // left out of metric and balance.
    GeneticMatchResult res;
    std::vector<std::vector<double>> z_pool;  // per kept covariate, length n
    std::vector<double> z_treated, pool_sd, pool_mean_raw, treated_raw;
    for (const auto& name : all_names) {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(n));
        for (const Unit* c : cand) vals.push_back(predictor_value(*c, name, pre_end));
        const double sd = sample_sd(vals);
        if (sd <= 0.0) continue;
        const double tv = predictor_value(treated, name, pre_end);
        res.covariates.push_back(name);
        pool_sd.push_back(sd);
        pool_mean_raw.push_back(mean(vals));
        treated_raw.push_back(tv);
        z_treated.push_back(tv / sd);
        for (auto& v : vals) v /= sd;
        z_pool.push_back(std::move(vals));
    }
    const int m = static_cast<int>(res.covariates.size());
    if (m == 0) throw DomainError("genetic match: every covariate is constant across the pool");

    // Matched set under a metric: k nearest candidates, ties by id order.
    std::vector<int> order(static_cast<std::size_t>(n));
    auto select = [&](const std::vector<double>& log_w) {
        std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < m; ++j) {
            const double w = std::exp(log_w[static_cast<std::size_t>(j)]);
            const auto& row = z_pool[static_cast<std::size_t>(j)];
            const double zt = z_treated[static_cast<std::size_t>(j)];
            for (int i = 0; i < n; ++i) {
                const double d = row[static_cast<std::size_t>(i)] - zt;
                dist[static_cast<std::size_t>(i)] += w * d * d;
            }
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
        });
        return std::vector<int>(order.begin(), order.begin() + k);
    };

    // Fitness = worst |SMD| across covariates after matching (lower = better).
    auto fitness_of = [&](const std::vector<int>& matched) {
        double worst = 0.0;
        for (int j = 0; j < m; ++j) {
            double msum = 0.0;
            for (int i : matched) msum += z_pool[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const double smd = z_treated[static_cast<std::size_t>(j)] - msum / k;
            worst = std::max(worst, std::fabs(smd));
        }
        return worst;
    };

    auto rng = make_rng(cfg.seed, 3001);
    std::vector<Individual> popn(static_cast<std::size_t>(std::max(cfg.population, cfg.elites + 1)));
    for (std::size_t i = 0; i < popn.size(); ++i) {
        popn[i].log_w.assign(static_cast<std::size_t>(m), 0.0);
        if (i > 0)
            for (auto& g : popn[i].log_w) g = normal(rng);
        popn[i].fitness = fitness_of(select(popn[i].log_w));
    }
    auto by_fitness = [](const Individual& a, const Individual& b) {
        return a.fitness < b.fitness;
    };
    std::stable_sort(popn.begin(), popn.end(), by_fitness);
    res.best_by_generation.push_back(popn.front().fitness);

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Individual> next(popn.begin(), popn.begin() + cfg.elites);
        auto tournament = [&]() -> const Individual& {
            std::size_t best = uniform_index(rng, popn.size());
            for (int t = 1; t < cfg.tournament; ++t) {
                std::size_t c = uniform_index(rng, popn.size());
                if (popn[c].fitness < popn[best].fitness) best = c;
            }
            return popn[best];
        };
        while (next.size() < popn.size()) {
            const Individual& a = tournament();
            const Individual& b = tournament();
            Individual child;
            child.log_w.resize(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j) {
                const double gene = uniform01(rng) < 0.5 ? a.log_w[static_cast<std::size_t>(j)]
                                                         : b.log_w[static_cast<std::size_t>(j)];
                child.log_w[static_cast<std::size_t>(j)] = gene + cfg.mutation_sd * normal(rng);
            }
            child.fitness = fitness_of(select(child.log_w));
            next.push_back(std::move(child));
        }
        popn = std::move(next);
        std::stable_sort(popn.begin(), popn.end(), by_fitness);
        res.best_by_generation.push_back(popn.front().fitness);
    }

    const Individual& best = popn.front();
    const auto matched = select(best.log_w);
    res.fitness = best.fitness;
    for (double g : best.log_w) res.metric_weights.push_back(std::exp(g));

    res.matches.treated = treated.id;
    res.matches.method = "genetic";
    res.matches.treatment_year = pre_end;
    std::vector<int> sorted_matched = matched;
    std::sort(sorted_matched.begin(), sorted_matched.end(),
              [&](int a, int b) { return cand[static_cast<std::size_t>(a)]->id < cand[static_cast<std::size_t>(b)]->id; });
    for (int i : sorted_matched)
        res.matches.controls.push_back({cand[static_cast<std::size_t>(i)]->id, 1.0 / k});

    for (int j = 0; j < m; ++j) {
        BalanceEntry e;
        e.covariate = res.covariates[static_cast<std::size_t>(j)];
        const double sd = pool_sd[static_cast<std::size_t>(j)];
        e.smd_before = (treated_raw[static_cast<std::size_t>(j)] -
                        pool_mean_raw[static_cast<std::size_t>(j)]) / sd;
        double msum = 0.0;
        for (int i : matched)
            msum += z_pool[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * sd;
        e.smd_after = (treated_raw[static_cast<std::size_t>(j)] - msum / k) / sd;
        res.balance.push_back(e);
    }
    return res;
}

}  // namespace deforsc
