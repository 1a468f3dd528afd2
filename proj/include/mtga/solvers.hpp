#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mtga/core.hpp"
#include "mtga/operators.hpp"
#include "mtga/transfer.hpp"

namespace mtga::solvers {

using core::Chromosome;
using core::ConfigError;
using core::Population;
using core::RngStream;
using core::TaskDefinition;

struct SolverConfig {
    std::size_t population_size = 100;     // N, per task
    std::size_t max_generations = 500;     // K
    std::size_t n_transfer = 40;           // n_t (MTGA)
    double rmp = 0.3;                      // random mating probability (MFEA)
    long eval_budget = 100000;             // max objective evaluations per run
    operators::SbxParams sbx{};
    operators::MutationParams mutation{};
    // Bias means are computed once per generation before the two task
    // updates; set to recompute them from the current populations right
    // before each transfer instead.
    bool recompute_means_per_transfer = false;
    // Per-target fixed matchings; matching_into[m] applies when task m
    // receives chromosomes. Random matching when unset.
    std::array<transfer::MatchingSpec, 2> matching_into{};

    void validate() const {
        if (population_size < 2 || population_size % 2 != 0)
            throw ConfigError("population size must be even and >= 2");
        if (rmp < 0.0 || rmp > 1.0) throw ConfigError("rmp must be in [0, 1]");
        if (max_generations < 1) throw ConfigError("max generations must be >= 1");
        if (eval_budget < 1) throw ConfigError("evaluation budget must be >= 1");
        sbx.validate();
        mutation.validate();
    }
};

struct GenerationRecord {
    std::size_t generation = 0;
    long evaluations = 0;
    std::array<double, 2> best{};  // objective in task units
    std::array<double, 2> mean{};
};

/// Per-generation convergence data plus the final best solutions. For
/// single-task runs only index 0 is meaningful.
struct RunTrace {
    std::size_t n_tasks = 0;
    std::vector<GenerationRecord> rows;
    std::array<Chromosome, 2> best_chromosome{};
    std::array<double, 2> final_best{};  // objective in task units
    long total_evaluations = 0;

    const GenerationRecord& last() const {
        if (rows.empty()) throw core::InternalError("empty run trace");
        return rows.back();
    }
};

namespace detail {

inline double mean_cost(const Population& pop) {
    double s = 0.0;
    for (const auto& c : pop.members) s += c.cost();
    return s / static_cast<double>(pop.size());
}

inline void evaluate_all(Population& pop, const TaskDefinition& task, long& evals) {
    for (auto& c : pop.members) {
        core::evaluate(c, task);
        ++evals;
    }
}

/// One generational GA step on `pool`: permutation pairing, SBX, mutation.
/// Returns the unevaluated offspring, |offspring| == |pool|.
inline std::vector<Chromosome> make_offspring(const Population& pool, const SolverConfig& cfg,
                                              RngStream& rng) {
    const std::size_t n = pool.size();
    const auto s = rng.permutation(n);
    std::vector<Chromosome> offspring;
    offspring.reserve(n);
    for (std::size_t i = 0; i < n / 2; ++i) {
        const auto& a = pool.members[s[i]];
        const auto& b = pool.members[s[n / 2 + i]];
        auto [xe, xf] = operators::sbx_crossover(a, b, cfg.sbx, rng);
        offspring.push_back(operators::polynomial_mutation(xe, cfg.mutation, rng));
        offspring.push_back(operators::polynomial_mutation(xf, cfg.mutation, rng));
    }
    return offspring;
}

}  // namespace detail

/// Single-task generational GA: SBX + polynomial mutation + elitist
/// survivor selection. `stream` selects the random substream so that a
/// multi-task comparison can give each task its own stream.
inline RunTrace run_soea(const TaskDefinition& task, const SolverConfig& cfg, std::uint64_t seed,
                         std::uint64_t stream = 0) {
    task.validate();
    cfg.validate();
    RngStream rng(seed, stream);
    long evals = 0;

    Population pop = core::random_population(task, cfg.population_size, rng);
    detail::evaluate_all(pop, task, evals);
    core::sort_population(pop);

    RunTrace trace;
    trace.n_tasks = 1;
    for (std::size_t k = 1; k <= cfg.max_generations && evals < cfg.eval_budget; ++k) {
        auto offspring = detail::make_offspring(pop, cfg, rng);
        for (auto& c : offspring) {
            core::evaluate(c, task);
            ++evals;
        }
        pop = operators::elitist_select(pop, offspring);
        trace.rows.push_back({k, evals,
                              {task.objective_of(pop.best().cost()), 0.0},
                              {task.objective_of(detail::mean_cost(pop)), 0.0}});
    }
    trace.best_chromosome[0] = pop.best();
    trace.final_best[0] = task.objective_of(pop.best().cost());
    trace.total_evaluations = evals;
    return trace;
}

/// Two-task genetic algorithm with bias-corrected chromosome transfer.
///
/// Each generation: estimate the per-task means of the best n_t
/// chromosomes, then update the two tasks sequentially. Task m receives the
/// donor task's best n_t chromosomes shifted by the estimated bias, uses
/// them (with its own best N - n_t) as crossover material, and selects the
/// next population from its pre-transfer members plus the offspring, so
/// transferred chromosomes only propagate through recombination. Because
/// the updates are sequential, the second task's transfer already sees the
/// first task's generation-k population.
///
/// Task m draws all randomness from stream m of `seed`; with n_transfer = 0
/// each task's trace is identical to run_soea(task, cfg, seed, m).
inline RunTrace run_mtga(const std::array<TaskDefinition, 2>& tasks, const SolverConfig& cfg,
                         std::uint64_t seed) {
    for (const auto& t : tasks) t.validate();
    cfg.validate();
    if (cfg.n_transfer > cfg.population_size)
        throw ConfigError("n_t must not exceed the population size");
    std::array<RngStream, 2> rng{RngStream(seed, 0), RngStream(seed, 1)};
    long evals = 0;

    std::array<Population, 2> pops;
    for (int m = 0; m < 2; ++m) {
        pops[m] = core::random_population(tasks[m], cfg.population_size, rng[m]);
        detail::evaluate_all(pops[m], tasks[m], evals);
        core::sort_population(pops[m]);
    }

    const auto kinds = [&](int m) {
        return std::span<const core::GeneKind>(tasks[m].gene_kind);
    };

    RunTrace trace;
    trace.n_tasks = 2;
    for (std::size_t k = 1; k <= cfg.max_generations && evals < cfg.eval_budget; ++k) {
        std::array<std::vector<double>, 2> means;
        if (cfg.n_transfer > 0 && !cfg.recompute_means_per_transfer)
            for (int m = 0; m < 2; ++m)
                means[m] = transfer::top_mean(pops[m], cfg.n_transfer, kinds(m));

        for (int m = 0; m < 2; ++m) {
            const int donor = 1 - m;
            Population pool;
            if (cfg.n_transfer > 0) {
                if (cfg.recompute_means_per_transfer)
                    for (int j = 0; j < 2; ++j)
                        means[j] = transfer::top_mean(pops[j], cfg.n_transfer, kinds(j));
                transfer::BiasEstimate bias{means[donor], means[m], cfg.n_transfer};
                pool = transfer::build_transfer_population(pops[m], pops[donor], bias,
                                                           cfg.n_transfer, cfg.matching_into[m],
                                                           rng[m]);
            } else {
                pool = pops[m];
            }
            auto offspring = detail::make_offspring(pool, cfg, rng[m]);
            for (auto& c : offspring) {
                core::evaluate(c, tasks[m]);
                ++evals;
            }
            pops[m] = operators::elitist_select(pops[m], offspring);
        }
        trace.rows.push_back({k, evals,
                              {tasks[0].objective_of(pops[0].best().cost()),
                               tasks[1].objective_of(pops[1].best().cost())},
                              {tasks[0].objective_of(detail::mean_cost(pops[0])),
                               tasks[1].objective_of(detail::mean_cost(pops[1]))}});
    }
    for (int m = 0; m < 2; ++m) {
        trace.best_chromosome[m] = pops[m].best();
        trace.final_best[m] = tasks[m].objective_of(pops[m].best().cost());
    }
    trace.total_evaluations = evals;
    return trace;
}

namespace detail {

/// Individual of the MFEA's unified population. Costs are internal
/// (minimized); a task the individual was never evaluated on holds +inf.
struct MfeaIndividual {
    std::vector<double> genes;  // unified [0,1]^max(d1,d2)
    std::array<double, 2> cost{std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity()};
    int skill = -1;
    double scalar_fitness = 0.0;
};

/// rank[i][m] = position of individual i in the ascending cost order of
/// task m (0 = best; unevaluated individuals sort last).
inline std::vector<std::array<std::size_t, 2>> factorial_ranks(
    const std::vector<MfeaIndividual>& all) {
    std::vector<std::array<std::size_t, 2>> rank(all.size());
    std::vector<std::size_t> order(all.size());
    for (int m = 0; m < 2; ++m) {
        for (std::size_t i = 0; i < all.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return all[a].cost[m] < all[b].cost[m];
        });
        for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]][m] = r;
    }
    return rank;
}

}  // namespace detail

/// Classic multifactorial EA baseline on a unified population of 2N:
/// unified search space of dimension max(d1, d2) (each task decodes its
/// first d_m genes), assortative mating gated by rmp, offspring inherit the
/// skill factor of a parent and are evaluated on that task only, and
/// survivor selection uses scalar fitness = 1 / best factorial rank.
/// Reconstructed from the standard multifactorial design; initial
/// individuals are evaluated on both tasks to assign skill factors, and
/// those evaluations are counted against the budget.
inline RunTrace run_mfea(const std::array<TaskDefinition, 2>& tasks, const SolverConfig& cfg,
                         std::uint64_t seed) {
    for (const auto& t : tasks) t.validate();
    cfg.validate();
    using detail::MfeaIndividual;
    RngStream rng(seed, 0);
    long evals = 0;
    const std::size_t unified_dim = std::max(tasks[0].dim, tasks[1].dim);
    const std::size_t pop_size = 2 * cfg.population_size;

    auto eval_on = [&](MfeaIndividual& ind, int m) {
        Chromosome c;
        c.genes.assign(ind.genes.begin(), ind.genes.begin() + static_cast<long>(tasks[m].dim));
        core::evaluate(c, tasks[m]);
        ind.cost[m] = c.cost();
        ++evals;
    };

    std::vector<MfeaIndividual> pop(pop_size);
    for (auto& ind : pop) {
        ind.genes.resize(unified_dim);
        for (double& g : ind.genes) g = rng.uniform();
        eval_on(ind, 0);
        eval_on(ind, 1);
    }

    // initial skill factor: task of the better factorial rank, ties broken
    // at random (identical tasks would otherwise starve task 2 entirely)
    {
        const auto rank = detail::factorial_ranks(pop);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (rank[i][0] == rank[i][1])
                pop[i].skill = rng.uniform() < 0.5 ? 0 : 1;
            else
                pop[i].skill = rank[i][0] < rank[i][1] ? 0 : 1;
            pop[i].scalar_fitness = 1.0 / static_cast<double>(std::min(rank[i][0], rank[i][1]) + 1);
        }
    }

    std::array<double, 2> best_cost{std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity()};
    std::array<std::vector<double>, 2> best_genes;
    auto track_best = [&](const MfeaIndividual& ind) {
        const int m = ind.skill;
        if (ind.cost[m] < best_cost[m]) {
            best_cost[m] = ind.cost[m];
            best_genes[m] = ind.genes;
        }
    };
    for (const auto& ind : pop) {
        if (std::isfinite(ind.cost[0]) && ind.cost[0] < best_cost[0]) {
            best_cost[0] = ind.cost[0];
            best_genes[0] = ind.genes;
        }
        if (std::isfinite(ind.cost[1]) && ind.cost[1] < best_cost[1]) {
            best_cost[1] = ind.cost[1];
            best_genes[1] = ind.genes;
        }
    }

    auto record_row = [&](RunTrace& trace, std::size_t k) {
        std::array<double, 2> mean_by_skill{0.0, 0.0};
        std::array<std::size_t, 2> count{0, 0};
        for (const auto& ind : pop) {
            if (ind.skill < 0) continue;
            mean_by_skill[ind.skill] += ind.cost[ind.skill];
            ++count[ind.skill];
        }
        for (int m = 0; m < 2; ++m)
            mean_by_skill[m] = count[m] > 0 ? mean_by_skill[m] / static_cast<double>(count[m])
                                            : best_cost[m];
        trace.rows.push_back({k, evals,
                              {tasks[0].objective_of(best_cost[0]),
                               tasks[1].objective_of(best_cost[1])},
                              {tasks[0].objective_of(mean_by_skill[0]),
                               tasks[1].objective_of(mean_by_skill[1])}});
    };

    RunTrace trace;
    trace.n_tasks = 2;
    Chromosome tmp_a, tmp_b;
    for (std::size_t k = 1; k <= cfg.max_generations && evals < cfg.eval_budget; ++k) {
        const auto s = rng.permutation(pop_size);
        std::vector<MfeaIndividual> offspring;
        offspring.reserve(pop_size);
        for (std::size_t i = 0; i < pop_size / 2; ++i) {
            const auto& pa = pop[s[i]];
            const auto& pb = pop[s[pop_size / 2 + i]];
            MfeaIndividual ca, cb;
            if (pa.skill == pb.skill || rng.uniform() < cfg.rmp) {
                tmp_a.genes = pa.genes;
                tmp_b.genes = pb.genes;
                auto [xe, xf] = operators::sbx_crossover(tmp_a, tmp_b, cfg.sbx, rng);
                ca.genes = operators::polynomial_mutation(xe, cfg.mutation, rng).genes;
                cb.genes = operators::polynomial_mutation(xf, cfg.mutation, rng).genes;
                ca.skill = rng.uniform() < 0.5 ? pa.skill : pb.skill;
                cb.skill = rng.uniform() < 0.5 ? pa.skill : pb.skill;
            } else {
                tmp_a.genes = pa.genes;
                tmp_b.genes = pb.genes;
                ca.genes = operators::polynomial_mutation(tmp_a, cfg.mutation, rng).genes;
                cb.genes = operators::polynomial_mutation(tmp_b, cfg.mutation, rng).genes;
                ca.skill = pa.skill;
                cb.skill = pb.skill;
            }
            eval_on(ca, ca.skill);
            eval_on(cb, cb.skill);
            track_best(ca);
            track_best(cb);
            offspring.push_back(std::move(ca));
            offspring.push_back(std::move(cb));
        }

        std::vector<MfeaIndividual> all;
        all.reserve(pop.size() + offspring.size());
        for (auto& ind : pop) all.push_back(std::move(ind));
        for (auto& ind : offspring) all.push_back(std::move(ind));
        const auto rank = detail::factorial_ranks(all);
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i].scalar_fitness =
                1.0 / static_cast<double>(std::min(rank[i][0], rank[i][1]) + 1);
        std::stable_sort(all.begin(), all.end(),
                         [](const MfeaIndividual& a, const MfeaIndividual& b) {
                             return a.scalar_fitness > b.scalar_fitness;
                         });
        all.resize(pop_size);
        pop = std::move(all);
        record_row(trace, k);
    }

    for (int m = 0; m < 2; ++m) {
        Chromosome best;
        best.genes.assign(best_genes[m].begin(),
                          best_genes[m].begin() + static_cast<long>(tasks[m].dim));
        best.fitness = best_cost[m];
        trace.best_chromosome[m] = std::move(best);
        trace.final_best[m] = tasks[m].objective_of(best_cost[m]);
    }
    trace.total_evaluations = evals;
    return trace;
}

}  // namespace mtga::solvers
