#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "mtga/core.hpp"

namespace mtga::transfer {

using core::Chromosome;
using core::ConfigError;
using core::GeneKind;
using core::InternalError;
using core::Population;
using core::RngStream;

/// Per-task means of the best n_t chromosomes, used to estimate the bias
/// between two tasks' optima in normalized gene space. Categorical gene
/// positions hold NaN: they are excluded from the bias arithmetic and get
/// copied verbatim during transfer.
struct BiasEstimate {
    std::vector<double> mean_source;
    std::vector<double> mean_target;
    std::size_t n_t = 0;
};

/// Maps each target gene index to a donor gene index. `unmatched` marks
/// target positions that do not participate in transfer at all (they keep
/// the receiving population's values).
struct GeneMatching {
    static constexpr std::size_t unmatched = std::numeric_limits<std::size_t>::max();

    enum class Mode { random, fixed };

    std::vector<std::size_t> index_map;  // length d_target, entries in [0, d_source)
    Mode mode = Mode::random;

    std::size_t target_dim() const { return index_map.size(); }
    std::size_t matched_count() const {
        std::size_t n = 0;
        for (auto i : index_map) n += (i != unmatched);
        return n;
    }
};

/// Arithmetic mean of the first n_t members of a sorted population.
/// gene_kind may be empty (all numeric); categorical positions yield NaN.
inline std::vector<double> top_mean(const Population& pop, std::size_t n_t,
                                    std::span<const GeneKind> gene_kind = {}) {
    if (n_t == 0 || n_t > pop.size())
        throw ConfigError("top_mean: n_t must be in [1, population size]");
    const std::size_t d = pop.members.front().genes.size();
    std::vector<double> mean(d, 0.0);
    for (std::size_t n = 0; n < n_t; ++n)
        for (std::size_t i = 0; i < d; ++i) mean[i] += pop.members[n].genes[i];
    for (double& v : mean) v /= static_cast<double>(n_t);
    if (!gene_kind.empty()) {
        if (gene_kind.size() != d) throw ConfigError("top_mean: gene_kind length mismatch");
        for (std::size_t i = 0; i < d; ++i)
            if (gene_kind[i] == GeneKind::categorical)
                mean[i] = std::numeric_limits<double>::quiet_NaN();
    }
    return mean;
}

/// Random index matching from target positions into donor positions.
/// Sampling is without replacement when the donor has at least as many
/// genes as the target (entries distinct), with replacement otherwise.
inline GeneMatching build_matching(std::size_t d_source, std::size_t d_target, RngStream& rng) {
    if (d_source == 0 || d_target == 0)
        throw ConfigError("build_matching: dimensions must be positive");
    GeneMatching m;
    m.mode = GeneMatching::Mode::random;
    m.index_map.resize(d_target);
    if (d_source >= d_target) {
        // first d_target entries of a random permutation of the donor indices
        auto p = rng.permutation(d_source);
        for (std::size_t i = 0; i < d_target; ++i) m.index_map[i] = p[i];
    } else {
        for (std::size_t i = 0; i < d_target; ++i) m.index_map[i] = rng.uniform_index(d_source);
    }
    return m;
}

/// Wraps a user-provided fixed table (entries may include
/// GeneMatching::unmatched for excluded target positions).
inline GeneMatching fixed_matching(std::vector<std::size_t> table, std::size_t d_source,
                                   std::size_t d_target) {
    if (table.size() != d_target)
        throw ConfigError("fixed matching table length must equal the target dimensionality");
    for (auto idx : table)
        if (idx != GeneMatching::unmatched && idx >= d_source)
            throw ConfigError("fixed matching table entry out of donor range");
    GeneMatching m;
    m.mode = GeneMatching::Mode::fixed;
    m.index_map = std::move(table);
    return m;
}

/// Bias-corrected transfer of one chromosome, before clamping:
///
///   out[i] = src[I(i)] - mean_source[I(i)] + mean_target[i]
///
/// Positions whose source or target mean is NaN (categorical genes) are
/// copied from the donor without correction. Unmatched positions take the
/// value of `native` (a same-rank member of the receiving population).
inline Chromosome transfer_chromosome_raw(const Chromosome& src, const BiasEstimate& bias,
                                          const GeneMatching& matching,
                                          std::span<const double> native = {}) {
    const std::size_t d_target = matching.target_dim();
    if (bias.mean_target.size() != d_target)
        throw InternalError("transfer: target mean / matching dimension mismatch");
    if (src.genes.size() != bias.mean_source.size())
        throw InternalError("transfer: source chromosome / mean dimension mismatch");

    Chromosome out;
    out.genes.resize(d_target);
    for (std::size_t i = 0; i < d_target; ++i) {
        const std::size_t j = matching.index_map[i];
        if (j == GeneMatching::unmatched) {
            if (native.size() != d_target)
                throw InternalError("transfer: unmatched position without native chromosome");
            out.genes[i] = native[i];
            continue;
        }
        if (j >= src.genes.size())
            throw InternalError("transfer: matching index out of donor range");
        if (std::isnan(bias.mean_source[j]) || std::isnan(bias.mean_target[i]))
            out.genes[i] = src.genes[j];
        else
            out.genes[i] = src.genes[j] - bias.mean_source[j] + bias.mean_target[i];
    }
    return out;
}

/// transfer_chromosome_raw clamped back into [0,1]. Fitness is left unset:
/// transferred chromosomes are crossover material only and never enter the
/// next generation directly.
inline Chromosome transfer_chromosome(const Chromosome& src, const BiasEstimate& bias,
                                      const GeneMatching& matching,
                                      std::span<const double> native = {}) {
    Chromosome out = transfer_chromosome_raw(src, bias, matching, native);
    core::clamp01(out.genes);
    return out;
}

/// How transferred chromosomes are matched gene-by-gene to the target task.
struct MatchingSpec {
    GeneMatching::Mode mode = GeneMatching::Mode::random;
    std::optional<GeneMatching> fixed;  // required when mode == fixed

    GeneMatching make(std::size_t d_source, std::size_t d_target, RngStream& rng) const {
        if (mode == GeneMatching::Mode::fixed) {
            if (!fixed) throw ConfigError("fixed matching mode without a table");
            if (fixed->target_dim() != d_target)
                throw ConfigError("fixed matching table length must equal the target dimensionality");
            return *fixed;
        }
        return build_matching(d_source, d_target, rng);
    }
};

/// Temporary population P_t: the donor's best n_t chromosomes transferred
/// (bias-corrected, fitness unset), followed by the target's best N - n_t
/// members. A fresh random matching is built per transferred chromosome.
inline Population build_transfer_population(const Population& target, const Population& donor,
                                            const BiasEstimate& bias, std::size_t n_t,
                                            const MatchingSpec& matching, RngStream& rng) {
    const std::size_t n = target.size();
    if (n_t > n) throw ConfigError("build_transfer_population: n_t exceeds population size");
    if (n_t > donor.size())
        throw ConfigError("build_transfer_population: n_t exceeds donor population size");

    Population pt;
    pt.task_id = target.task_id;
    pt.capacity = target.capacity;
    pt.members.reserve(n);
    const std::size_t d_source = donor.members.empty() ? 0 : donor.members.front().genes.size();
    const std::size_t d_target = target.members.front().genes.size();
    for (std::size_t i = 0; i < n_t; ++i) {
        const GeneMatching m = matching.make(d_source, d_target, rng);
        pt.members.push_back(
            transfer_chromosome(donor.members[i], bias, m, target.members[i].genes));
    }
    for (std::size_t i = 0; i < n - n_t; ++i) pt.members.push_back(target.members[i]);
    return pt;
}

}  // namespace mtga::transfer
