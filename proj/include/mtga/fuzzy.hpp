#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mtga/core.hpp"
#include "mtga/transfer.hpp"

namespace mtga::fuzzy {

using core::ConfigError;
using core::InternalError;

enum class FlcKind { t1, it2 };

inline constexpr std::size_t t1_gene_count = 17;   // 2 inputs x 3 MFs x (m, d) + 5 consequents
inline constexpr std::size_t it2_gene_count = 23;  // 2 inputs x 3 MFs x (m, dl, dr) + 5

/// Gene order within a chromosome (indices into the decoded parameter
/// vector). T1: e-means(3), e-stds(3), edot-means(3), edot-stds(3),
/// consequents(5). IT2: e-means(3), e-std pairs (l,r)x3, edot-means(3),
/// edot-std pairs (l,r)x3, consequents(5).
namespace layout {
inline constexpr std::size_t t1_e_mean = 0, t1_e_std = 3, t1_de_mean = 6, t1_de_std = 9,
                             t1_conseq = 12;
inline constexpr std::size_t it2_e_mean = 0, it2_e_std = 3, it2_de_mean = 9, it2_de_std = 12,
                             it2_conseq = 18;
}  // namespace layout

/// 3x3 rulebase shared by both controllers: rule (i, j) fires consequent
/// index i + j, the anti-diagonal banding over five consequents.
inline constexpr std::size_t rule_consequent(std::size_t i, std::size_t j) { return i + j; }

/// Decoded proportional-integral FLC. Inputs are the scaled error and error
/// change; the output is the control increment. Inverse variances are
/// cached at construction since one genome is evaluated on hundreds of
/// samples.
struct FlcGenome {
    FlcKind kind = FlcKind::t1;
    std::array<double, 3> e_mean{}, de_mean{};
    std::array<double, 3> e_std{}, de_std{};          // T1 (also IT2 lower when kind==it2)
    std::array<double, 3> e_std_hi{}, de_std_hi{};    // IT2 upper
    std::array<double, 5> consequent{};

    std::array<double, 3> e_inv2{}, de_inv2{};        // 1 / (2 std^2)
    std::array<double, 3> e_inv2_hi{}, de_inv2_hi{};

    void cache_inverses() {
        for (std::size_t i = 0; i < 3; ++i) {
            e_inv2[i] = 0.5 / (e_std[i] * e_std[i]);
            de_inv2[i] = 0.5 / (de_std[i] * de_std[i]);
            if (kind == FlcKind::it2) {
                e_inv2_hi[i] = 0.5 / (e_std_hi[i] * e_std_hi[i]);
                de_inv2_hi[i] = 0.5 / (de_std_hi[i] * de_std_hi[i]);
            }
        }
    }
};

inline std::size_t gene_count(FlcKind kind) {
    return kind == FlcKind::t1 ? t1_gene_count : it2_gene_count;
}

/// Builds a valid genome from decoded parameter values: input means sorted
/// ascending within their group, consequents sorted ascending, IT2 std
/// pairs swapped so lower <= upper, stds clamped to min_std from below.
/// Idempotent on already-valid parameter vectors.
inline FlcGenome enforce_flc_constraints(std::span<const double> params, FlcKind kind,
                                         double min_std = 1e-3) {
    if (params.size() != gene_count(kind))
        throw ConfigError("FLC parameter vector has wrong length for its kind");
    namespace L = layout;
    FlcGenome g;
    g.kind = kind;
    const auto sorted3 = [&](std::size_t at) {
        std::array<double, 3> v{params[at], params[at + 1], params[at + 2]};
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto clamp_std = [&](double v) { return std::max(v, min_std); };

    if (kind == FlcKind::t1) {
        g.e_mean = sorted3(L::t1_e_mean);
        g.de_mean = sorted3(L::t1_de_mean);
        for (std::size_t i = 0; i < 3; ++i) {
            g.e_std[i] = clamp_std(params[L::t1_e_std + i]);
            g.de_std[i] = clamp_std(params[L::t1_de_std + i]);
        }
        for (std::size_t i = 0; i < 5; ++i) g.consequent[i] = params[L::t1_conseq + i];
    } else {
        g.e_mean = sorted3(L::it2_e_mean);
        g.de_mean = sorted3(L::it2_de_mean);
        for (std::size_t i = 0; i < 3; ++i) {
            double lo = clamp_std(params[L::it2_e_std + 2 * i]);
            double hi = clamp_std(params[L::it2_e_std + 2 * i + 1]);
            if (lo > hi) std::swap(lo, hi);
            g.e_std[i] = lo;
            g.e_std_hi[i] = hi;
            lo = clamp_std(params[L::it2_de_std + 2 * i]);
            hi = clamp_std(params[L::it2_de_std + 2 * i + 1]);
            if (lo > hi) std::swap(lo, hi);
            g.de_std[i] = lo;
            g.de_std_hi[i] = hi;
        }
        for (std::size_t i = 0; i < 5; ++i) g.consequent[i] = params[L::it2_conseq + i];
    }
    std::sort(g.consequent.begin(), g.consequent.end());
    g.cache_inverses();
    return g;
}

/// Flattens a genome back to its parameter vector (inverse of
/// enforce_flc_constraints on valid genomes).
inline std::vector<double> flc_params(const FlcGenome& g) {
    std::vector<double> p;
    p.reserve(gene_count(g.kind));
    for (double v : g.e_mean) p.push_back(v);
    if (g.kind == FlcKind::t1) {
        for (double v : g.e_std) p.push_back(v);
    } else {
        for (std::size_t i = 0; i < 3; ++i) {
            p.push_back(g.e_std[i]);
            p.push_back(g.e_std_hi[i]);
        }
    }
    for (double v : g.de_mean) p.push_back(v);
    if (g.kind == FlcKind::t1) {
        for (double v : g.de_std) p.push_back(v);
    } else {
        for (std::size_t i = 0; i < 3; ++i) {
            p.push_back(g.de_std[i]);
            p.push_back(g.de_std_hi[i]);
        }
    }
    for (double v : g.consequent) p.push_back(v);
    return p;
}

/// Product-inference / weighted-average output of the T1 controller.
/// Returns the middle consequent when every rule firing underflows to zero.
inline double t1_inference(const FlcGenome& g, double e, double de) {
    std::array<double, 3> fe, fd;
    for (std::size_t i = 0; i < 3; ++i) {
        const double ed = e - g.e_mean[i];
        fe[i] = std::exp(-ed * ed * g.e_inv2[i]);
        const double dd = de - g.de_mean[i];
        fd[i] = std::exp(-dd * dd * g.de_inv2[i]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const double f = fe[i] * fd[j];
            num += f * g.consequent[rule_consequent(i, j)];
            den += f;
        }
    if (den <= 0.0) return g.consequent[2];
    return num / den;
}

namespace detail {

struct RuleInterval {
    double lo, hi;  // firing interval [f_lower, f_upper]
    double y;       // crisp consequent
};

/// Left/right end of the type-reduced set for rules sorted ascending by y:
/// the weighted average over all switch points, minimized (left) or
/// maximized (right). Used as the exhaustive oracle and as the KM fallback
/// for ties.
inline double km_endpoint_exhaustive(std::span<const RuleInterval> sorted, bool left) {
    const std::size_t n = sorted.size();
    double best = left ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    // switch point k: indices <= k take one bound, the rest the other
    for (std::size_t k = 0; k + 1 <= n; ++k) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool head = i <= k;
            const double f = left == head ? sorted[i].hi : sorted[i].lo;
            num += f * sorted[i].y;
            den += f;
        }
        if (den <= 0.0) continue;
        const double v = num / den;
        best = left ? std::min(best, v) : std::max(best, v);
    }
    return best;
}

/// Karnik-Mendel iteration for one endpoint over rules sorted ascending by
/// consequent. Converges in at most n passes.
inline double km_endpoint(std::span<const RuleInterval> sorted, bool left) {
    const std::size_t n = sorted.size();
    double num = 0.0, den = 0.0;
    for (const auto& r : sorted) {
        const double f = 0.5 * (r.lo + r.hi);
        num += f * r.y;
        den += f;
    }
    if (den <= 0.0) return km_endpoint_exhaustive(sorted, left);
    double y = num / den;
    for (std::size_t pass = 0; pass < n + 1; ++pass) {
        num = 0.0;
        den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool head = sorted[i].y <= y;
            const double f = left == head ? sorted[i].hi : sorted[i].lo;
            num += f * sorted[i].y;
            den += f;
        }
        if (den <= 0.0) return km_endpoint_exhaustive(sorted, left);
        const double y_next = num / den;
        if (y_next == y) break;
        y = y_next;
    }
    return y;
}

inline bool collect_rule_intervals(const FlcGenome& g, double e, double de,
                                   std::array<RuleInterval, 9>& rules) {
    std::array<double, 3> fe_lo, fe_hi, fd_lo, fd_hi;
    for (std::size_t i = 0; i < 3; ++i) {
        const double ed = e - g.e_mean[i];
        fe_lo[i] = std::exp(-ed * ed * g.e_inv2[i]);  // narrow std -> lower MF
        fe_hi[i] = std::exp(-ed * ed * g.e_inv2_hi[i]);
        const double dd = de - g.de_mean[i];
        fd_lo[i] = std::exp(-dd * dd * g.de_inv2[i]);
        fd_hi[i] = std::exp(-dd * dd * g.de_inv2_hi[i]);
    }
    bool any = false;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            auto& r = rules[i * 3 + j];
            r.lo = fe_lo[i] * fd_lo[j];
            r.hi = fe_hi[i] * fd_hi[j];
            r.y = g.consequent[rule_consequent(i, j)];
            any = any || r.hi > 0.0;
        }
    return any;
}

}  // namespace detail

/// Type-reduced interval [y_l, y_r] of the IT2 controller via
/// Karnik-Mendel over the nine crisp-consequent rules.
inline std::pair<double, double> it2_type_reduce(const FlcGenome& g, double e, double de) {
    if (g.kind != FlcKind::it2) throw InternalError("it2_type_reduce on a T1 genome");
    std::array<detail::RuleInterval, 9> rules;
    if (!detail::collect_rule_intervals(g, e, de, rules))
        return {g.consequent[2], g.consequent[2]};
    std::sort(rules.begin(), rules.end(),
              [](const detail::RuleInterval& a, const detail::RuleInterval& b) { return a.y < b.y; });
    return {detail::km_endpoint(rules, true), detail::km_endpoint(rules, false)};
}

/// IT2 inference: midpoint of the Karnik-Mendel type-reduced interval.
/// Collapses exactly to t1_inference when every std pair is degenerate.
inline double it2_inference_km(const FlcGenome& g, double e, double de) {
    const auto [yl, yr] = it2_type_reduce(g, e, de);
    return 0.5 * (yl + yr);
}

/// Exhaustive-search reference for the type-reduced interval (test oracle).
inline std::pair<double, double> it2_type_reduce_exhaustive(const FlcGenome& g, double e,
                                                            double de) {
    std::array<detail::RuleInterval, 9> rules;
    if (!detail::collect_rule_intervals(g, e, de, rules))
        return {g.consequent[2], g.consequent[2]};
    std::sort(rules.begin(), rules.end(),
              [](const detail::RuleInterval& a, const detail::RuleInterval& b) { return a.y < b.y; });
    return {detail::km_endpoint_exhaustive(rules, true),
            detail::km_endpoint_exhaustive(rules, false)};
}

inline double flc_output(const FlcGenome& g, double e, double de) {
    return g.kind == FlcKind::t1 ? t1_inference(g, e, de) : it2_inference_km(g, e, de);
}

/// Fixed gene matching for transfer into the T1 controller: every T1
/// parameter takes its counterpart (IT2 means, lower stds, consequents).
inline transfer::GeneMatching flc_matching_into_t1() {
    namespace L = layout;
    std::vector<std::size_t> map(t1_gene_count);
    for (std::size_t i = 0; i < 3; ++i) {
        map[L::t1_e_mean + i] = L::it2_e_mean + i;
        map[L::t1_e_std + i] = L::it2_e_std + 2 * i;      // lower std
        map[L::t1_de_mean + i] = L::it2_de_mean + i;
        map[L::t1_de_std + i] = L::it2_de_std + 2 * i;
    }
    for (std::size_t i = 0; i < 5; ++i) map[L::t1_conseq + i] = L::it2_conseq + i;
    return transfer::fixed_matching(std::move(map), it2_gene_count, t1_gene_count);
}

/// Fixed gene matching for transfer into the IT2 controller: the 17
/// T1-shaped positions are matched; the six upper-std genes stay native.
inline transfer::GeneMatching flc_matching_into_it2() {
    namespace L = layout;
    std::vector<std::size_t> map(it2_gene_count, transfer::GeneMatching::unmatched);
    for (std::size_t i = 0; i < 3; ++i) {
        map[L::it2_e_mean + i] = L::t1_e_mean + i;
        map[L::it2_e_std + 2 * i] = L::t1_e_std + i;      // fills the lower std
        map[L::it2_de_mean + i] = L::t1_de_mean + i;
        map[L::it2_de_std + 2 * i] = L::t1_de_std + i;
    }
    for (std::size_t i = 0; i < 5; ++i) map[L::it2_conseq + i] = L::t1_conseq + i;
    return transfer::fixed_matching(std::move(map), t1_gene_count, it2_gene_count);
}

}  // namespace mtga::fuzzy
