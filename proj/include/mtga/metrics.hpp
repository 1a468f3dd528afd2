#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mtga/core.hpp"
#include "mtga/solvers.hpp"

namespace mtga::metrics {

using core::ConfigError;

/// Final best objectives B[k][m][l] for algorithm k, task m, repetition l.
struct ResultTensor {
    std::size_t n_algorithms = 0;
    std::size_t n_tasks = 0;
    std::size_t n_reps = 0;
    std::vector<double> values;

    ResultTensor() = default;
    ResultTensor(std::size_t k, std::size_t m, std::size_t l)
        : n_algorithms(k), n_tasks(m), n_reps(l), values(k * m * l, 0.0) {}

    double& at(std::size_t k, std::size_t m, std::size_t l) {
        return values[(k * n_tasks + m) * n_reps + l];
    }
    double at(std::size_t k, std::size_t m, std::size_t l) const {
        return values[(k * n_tasks + m) * n_reps + l];
    }
};

inline double sample_std(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Cross-algorithm performance score: per task, results are z-scored with
/// the mean and sample std over all algorithms and repetitions, then summed
/// per algorithm. Lower is better; scores always sum to zero. A degenerate
/// task (std 0) contributes nothing. Sums are accumulated in sorted order,
/// so shuffling the repetition axis leaves the scores bit-identical.
inline std::vector<double> performance_score(const ResultTensor& r) {
    if (r.n_algorithms < 1 || r.n_tasks < 1 || r.n_reps < 1)
        throw ConfigError("performance_score: empty result tensor");
    std::vector<double> scores(r.n_algorithms, 0.0);
    std::vector<double> column, reps;
    for (std::size_t m = 0; m < r.n_tasks; ++m) {
        column.clear();
        for (std::size_t k = 0; k < r.n_algorithms; ++k)
            for (std::size_t l = 0; l < r.n_reps; ++l) column.push_back(r.at(k, m, l));
        std::sort(column.begin(), column.end());
        double mu = 0.0;
        for (double v : column) mu += v;
        mu /= static_cast<double>(column.size());
        const double sigma = sample_std(column, mu);
        if (sigma == 0.0) continue;
        for (std::size_t k = 0; k < r.n_algorithms; ++k) {
            reps.clear();
            for (std::size_t l = 0; l < r.n_reps; ++l) reps.push_back(r.at(k, m, l));
            std::sort(reps.begin(), reps.end());
            for (double v : reps) scores[k] += (v - mu) / sigma;
        }
    }
    return scores;
}

/// Mean and sample std of the final best objective per task.
struct RunSummary {
    std::size_t n_tasks = 0;
    std::size_t n_runs = 0;
    std::array<double, 2> mean{};
    std::array<double, 2> stddev{};
};

inline RunSummary summarize_runs(std::span<const solvers::RunTrace> traces) {
    if (traces.empty()) throw ConfigError("summarize_runs: no traces");
    RunSummary s;
    s.n_tasks = traces.front().n_tasks;
    s.n_runs = traces.size();
    for (std::size_t m = 0; m < s.n_tasks; ++m) {
        std::vector<double> finals;
        finals.reserve(traces.size());
        for (const auto& t : traces) finals.push_back(t.final_best[m]);
        double mu = 0.0;
        for (double v : finals) mu += v;
        mu /= static_cast<double>(finals.size());
        s.mean[m] = mu;
        s.stddev[m] = sample_std(finals, mu);
    }
    return s;
}

/// Per-task mean/std ratios of each summary against a named baseline.
struct NormalizedRow {
    std::string name;
    std::array<double, 2> mean_ratio{};
    std::array<double, 2> std_ratio{};
};

inline std::vector<NormalizedRow> normalize_against(
    std::span<const std::string> names, std::span<const RunSummary> summaries,
    const std::string& baseline) {
    if (names.size() != summaries.size())
        throw ConfigError("normalize_against: name/summary count mismatch");
    std::size_t base = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == baseline) base = i;
    if (base == names.size())
        throw ConfigError("normalize_against: baseline '" + baseline + "' not found");
    std::vector<NormalizedRow> rows;
    const auto& b = summaries[base];
    for (std::size_t i = 0; i < names.size(); ++i) {
        NormalizedRow row;
        row.name = names[i];
        for (std::size_t m = 0; m < summaries[i].n_tasks && m < 2; ++m) {
            row.mean_ratio[m] = b.mean[m] != 0.0 ? summaries[i].mean[m] / b.mean[m]
                                                 : summaries[i].mean[m];
            row.std_ratio[m] = b.stddev[m] != 0.0 ? summaries[i].stddev[m] / b.stddev[m]
                                                  : summaries[i].stddev[m];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace mtga::metrics
