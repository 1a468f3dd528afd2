#pragma once

#include <cmath>
#include <utility>

#include "mtga/core.hpp"

namespace mtga::operators {

using core::Chromosome;
using core::InternalError;
using core::Population;
using core::RngStream;

/// Simulated binary crossover, distribution index beta.
struct SbxParams {
    double beta = 2.0;

    void validate() const {
        if (!(beta > 0.0)) throw core::ConfigError("SBX beta must be > 0");
    }
};

/// Polynomial mutation, distribution index eta. A gene mutates with
/// probability per_gene_rate; rate < 0 selects the 1/dim default.
struct MutationParams {
    double eta = 5.0;
    double per_gene_rate = -1.0;

    double rate_for_dim(std::size_t dim) const {
        return per_gene_rate < 0.0 ? 1.0 / static_cast<double>(dim) : per_gene_rate;
    }
    void validate() const {
        if (!(eta > 0.0)) throw core::ConfigError("mutation eta must be > 0");
        if (per_gene_rate > 1.0)
            throw core::ConfigError("mutation per_gene_rate must be <= 1");
    }
};

/// Spread factor c(j): (2r)^(1/(beta+1)) for r <= 0.5, else
/// (2(1-r))^(-1/(beta+1)). A fresh r is drawn per gene.
inline double sbx_spread(double r, double beta) {
    const double exponent = 1.0 / (beta + 1.0);
    return r <= 0.5 ? std::pow(2.0 * r, exponent)
                    : std::pow(2.0 * (1.0 - r), -exponent);
}

/// SBX on every gene. Offspring sum equals parent sum per gene before
/// clamping; the first offspring lies closer to the first parent.
inline std::pair<Chromosome, Chromosome> sbx_crossover(const Chromosome& xa,
                                                       const Chromosome& xb,
                                                       const SbxParams& params,
                                                       RngStream& rng) {
    if (xa.genes.size() != xb.genes.size())
        throw InternalError("sbx_crossover: parent gene counts differ");
    const std::size_t d = xa.genes.size();
    Chromosome xe, xf;
    xe.genes.resize(d);
    xf.genes.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double c = sbx_spread(rng.uniform(), params.beta);
        const double a = xa.genes[j];
        const double b = xb.genes[j];
        xe.genes[j] = core::clamp01(0.5 * ((1.0 + c) * a + (1.0 - c) * b));
        xf.genes[j] = core::clamp01(0.5 * ((1.0 + c) * b + (1.0 - c) * a));
    }
    return {std::move(xe), std::move(xf)};
}

/// Mutated value of one gene with range [0,1]; r is the uniform draw.
inline double polynomial_mutate_gene(double x, double r, double eta) {
    const double exponent = 1.0 / (1.0 + eta);
    if (r <= 0.5) return x + (std::pow(2.0 * r, exponent) - 1.0) * x;
    return x + (1.0 - std::pow(2.0 * (1.0 - r), exponent)) * (1.0 - x);
}

/// Per-gene stochastic polynomial mutation in normalized space.
inline Chromosome polynomial_mutation(const Chromosome& x, const MutationParams& params,
                                      RngStream& rng) {
    Chromosome out;
    out.genes = x.genes;
    const double rate = params.rate_for_dim(out.genes.size());
    for (double& g : out.genes) {
        if (rng.uniform() < rate)
            g = core::clamp01(polynomial_mutate_gene(g, rng.uniform(), params.eta));
    }
    return out;
}

/// Survivor selection: the N best of parents ∪ offspring, best-to-worst.
/// Ties are resolved in favor of parents (stable pooling order).
inline Population elitist_select(const Population& parents,
                                 const std::vector<Chromosome>& offspring) {
    for (const auto& c : parents.members)
        if (!c.evaluated()) throw InternalError("elitist_select: parent without fitness");
    for (const auto& c : offspring)
        if (!c.evaluated()) throw InternalError("elitist_select: offspring without fitness");

    Population pool;
    pool.task_id = parents.task_id;
    pool.capacity = parents.capacity;
    pool.members.reserve(parents.members.size() + offspring.size());
    pool.members.insert(pool.members.end(), parents.members.begin(), parents.members.end());
    pool.members.insert(pool.members.end(), offspring.begin(), offspring.end());
    core::sort_population(pool);
    pool.members.resize(parents.members.size());
    return pool;
}

}  // namespace mtga::operators
