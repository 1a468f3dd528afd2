// Acceptance suite: one pass/fail line per criterion, exit code = failures.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mtga/mtga.hpp"

using namespace mtga;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1

bool operator_algebra(std::string& detail) {
    core::RngStream rng(1001);
    double worst_sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(), b = rng.uniform();
        const double beta = rng.uniform(0.5, 8.0);
        const double c = operators::sbx_spread(rng.uniform(), beta);
        const double e = 0.5 * ((1.0 + c) * a + (1.0 - c) * b);
        const double f = 0.5 * ((1.0 + c) * b + (1.0 - c) * a);
        worst_sum = std::max(worst_sum, std::fabs(e + f - a - b));
        if (operators::sbx_spread(0.5, beta) != 1.0) {
            detail = "sbx spread at r=0.5 is not exactly 1";
            return false;
        }
        const double x = rng.uniform();
        const double eta = rng.uniform(1.0, 20.0);
        if (operators::polynomial_mutate_gene(x, 0.5, eta) != x) {
            detail = "polynomial mutation at r=0.5 is not the identity";
            return false;
        }
    }
    std::ostringstream ss;
    ss << "worst SBX sum deviation " << worst_sum << " over 1e4 cases";
    detail = ss.str();
    return worst_sum < 1e-12;
}

// ---------------------------------------------------------------- criterion 2

bool transfer_correctness(std::string& detail) {
    core::RngStream rng(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t d = 6;
        core::Chromosome src, shifted;
        transfer::BiasEstimate bias, bias_shifted;
        const double delta = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double g = rng.uniform(), ms = rng.uniform(), mt = rng.uniform();
            src.genes.push_back(g);
            shifted.genes.push_back(g + delta);
            bias.mean_source.push_back(ms);
            bias.mean_target.push_back(mt);
            bias_shifted.mean_source.push_back(ms + delta);
            bias_shifted.mean_target.push_back(mt);
        }
        std::vector<std::size_t> table(d);
        for (std::size_t i = 0; i < d; ++i) table[i] = i;
        const auto m = transfer::fixed_matching(table, d, d);
        const auto a = transfer::transfer_chromosome_raw(src, bias, m);
        const auto b = transfer::transfer_chromosome_raw(shifted, bias_shifted, m);
        for (std::size_t i = 0; i < d; ++i)
            worst = std::max(worst, std::fabs(a.genes[i] - b.genes[i]));
    }

    core::Chromosome one;
    one.genes = {0.75};
    transfer::BiasEstimate bias{{0.7}, {0.3}, 1};
    const auto out = transfer::transfer_chromosome(one, bias, transfer::fixed_matching({0}, 1, 1));
    const double example_err = std::fabs(out.genes[0] - 0.35);
    std::ostringstream ss;
    ss << "worst equivariance deviation " << worst << ", worked example error " << example_err;
    detail = ss.str();
    return worst < 1e-12 && example_err < 1e-12;
}

// ---------------------------------------------------------------- criterion 3

bool km_oracle(std::string& detail) {
    namespace L = fuzzy::layout;
    core::RngStream rng(1003);
    double worst_oracle = 0.0, worst_collapse = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> p(fuzzy::it2_gene_count);
        for (int i = 0; i < 3; ++i) {
            p[L::it2_e_mean + i] = rng.uniform(-2.0, 2.0);
            p[L::it2_de_mean + i] = rng.uniform(-2.0, 2.0);
        }
        for (int i = 0; i < 6; ++i) {
            p[L::it2_e_std + i] = rng.uniform(0.05, 2.0);
            p[L::it2_de_std + i] = rng.uniform(0.05, 2.0);
        }
        for (int i = 0; i < 5; ++i) p[L::it2_conseq + i] = rng.uniform(-1.0, 1.0);
        const auto g = fuzzy::enforce_flc_constraints(p, fuzzy::FlcKind::it2);

        for (int pt = 0; pt < 3; ++pt) {
            const double e = rng.uniform(-2.5, 2.5), de = rng.uniform(-2.5, 2.5);
            const auto [l1, r1] = fuzzy::it2_type_reduce(g, e, de);
            const auto [l2, r2] = fuzzy::it2_type_reduce_exhaustive(g, e, de);
            worst_oracle = std::max({worst_oracle, std::fabs(l1 - l2), std::fabs(r1 - r2)});
        }

        // collapse the footprint of uncertainty
        auto q = p;
        for (int i = 0; i < 3; ++i) {
            q[L::it2_e_std + 2 * i + 1] = q[L::it2_e_std + 2 * i];
            q[L::it2_de_std + 2 * i + 1] = q[L::it2_de_std + 2 * i];
        }
        const auto g2 = fuzzy::enforce_flc_constraints(q, fuzzy::FlcKind::it2);
        std::vector<double> t1p;
        for (int i = 0; i < 3; ++i) t1p.push_back(g2.e_mean[i]);
        for (int i = 0; i < 3; ++i) t1p.push_back(g2.e_std[i]);
        for (int i = 0; i < 3; ++i) t1p.push_back(g2.de_mean[i]);
        for (int i = 0; i < 3; ++i) t1p.push_back(g2.de_std[i]);
        for (int i = 0; i < 5; ++i) t1p.push_back(g2.consequent[i]);
        const auto g1 = fuzzy::enforce_flc_constraints(t1p, fuzzy::FlcKind::t1);
        const double e = rng.uniform(-2.0, 2.0), de = rng.uniform(-2.0, 2.0);
        worst_collapse = std::max(
            worst_collapse,
            std::fabs(fuzzy::it2_inference_km(g2, e, de) - fuzzy::t1_inference(g1, e, de)));
    }
    std::ostringstream ss;
    ss << "worst KM-vs-oracle deviation " << worst_oracle << ", worst T1-collapse deviation "
       << worst_collapse;
    detail = ss.str();
    return worst_oracle < 1e-9 && worst_collapse < 1e-12;
}

// ---------------------------------------------------------------- criterion 4

bool score_identity(std::string& detail) {
    metrics::ResultTensor r(2, 1, 2);
    r.at(0, 0, 0) = 1.0;
    r.at(0, 0, 1) = 3.0;
    r.at(1, 0, 0) = 5.0;
    r.at(1, 0, 1) = 7.0;
    const auto s = metrics::performance_score(r);
    const double expected = 4.0 / std::sqrt(20.0 / 3.0);
    const double example_err = std::max(std::fabs(s[0] + expected), std::fabs(s[1] - expected));

    core::RngStream rng(1004);
    double worst_sum = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        metrics::ResultTensor t(5, 3, 7);
        for (auto& v : t.values) v = rng.uniform(0.0, 1000.0);
        const auto scores = metrics::performance_score(t);
        double sum = 0.0;
        for (double v : scores) sum += v;
        worst_sum = std::max(worst_sum, std::fabs(sum));
    }
    std::ostringstream ss;
    ss << "hand-example error " << example_err << " (score " << s[1] << "), worst score sum "
       << worst_sum;
    detail = ss.str();
    return example_err < 1e-9 && worst_sum < 1e-9 && std::fabs(s[1] - 1.549) < 1e-3;
}

// ---------------------------------------------------------------- criterion 5

std::array<core::TaskDefinition, 2> sphere_ackley_pair(std::uint64_t shift_seed) {
    core::RngStream shift_rng(shift_seed, 0x5ace);
    bench::ComposedTask s;
    s.kind = bench::FunctionKind::sphere;
    s.dim = 30;
    s.range_lo = -100.0;
    s.range_hi = 100.0;
    s.shift = bench::synthetic_shift(30, -100.0, 100.0, shift_rng);
    s.label = "sphere-30";
    bench::ComposedTask a;
    a.kind = bench::FunctionKind::ackley;
    a.dim = 30;
    a.range_lo = -50.0;
    a.range_hi = 50.0;
    a.shift = bench::synthetic_shift(30, -50.0, 50.0, shift_rng);
    a.label = "ackley-30";
    return {bench::make_task(std::move(s)), bench::make_task(std::move(a))};
}

bool mtga_helps(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto tasks = sphere_ackley_pair(42);
    solvers::SolverConfig cfg;  // N=100, K=500, n_t=40, budget 100000
    const std::size_t seeds = 20;

    std::vector<std::array<double, 2>> mtga_err(seeds), soea_err(seeds);
    parallel_for(seeds, [&](std::size_t s) {
        const auto trace = solvers::run_mtga(tasks, cfg, s + 1);
        mtga_err[s] = trace.final_best;
        auto scfg = cfg;
        scfg.eval_budget = cfg.eval_budget / 2;
        for (int m = 0; m < 2; ++m)
            soea_err[s][m] = solvers::run_soea(tasks[m], scfg, s + 1, m).final_best[0];
    });

    std::array<double, 2> mtga_mean{}, soea_mean{};
    for (std::size_t s = 0; s < seeds; ++s)
        for (int m = 0; m < 2; ++m) {
            mtga_mean[m] += mtga_err[s][m] / seeds;
            soea_mean[m] += soea_err[s][m] / seeds;
        }
    const double ratio_sphere = soea_mean[0] / mtga_mean[0];
    const double elapsed = seconds_since(t0);
    std::ostringstream ss;
    ss << "mean errors mtga (" << mtga_mean[0] << ", " << mtga_mean[1] << ") vs soea ("
       << soea_mean[0] << ", " << soea_mean[1] << "), sphere ratio " << ratio_sphere << ", "
       << elapsed << " s";
    detail = ss.str();
    return mtga_mean[0] < soea_mean[0] && mtga_mean[1] < soea_mean[1] && ratio_sphere >= 5.0 &&
           elapsed < 180.0;
}

// ---------------------------------------------------------------- criterion 6

bool nt_zero_degenerates(std::string& detail) {
    const auto tasks = sphere_ackley_pair(7);
    solvers::SolverConfig cfg;
    cfg.population_size = 20;
    cfg.max_generations = 50;
    cfg.n_transfer = 0;
    cfg.eval_budget = 100000;
    const auto joint = solvers::run_mtga(tasks, cfg, 11);
    auto scfg = cfg;
    scfg.eval_budget = cfg.eval_budget / 2;
    for (int m = 0; m < 2; ++m) {
        const auto solo = solvers::run_soea(tasks[m], scfg, 11, m);
        if (solo.rows.size() != joint.rows.size()) {
            detail = "trace lengths differ";
            return false;
        }
        for (std::size_t i = 0; i < solo.rows.size(); ++i)
            if (solo.rows[i].best[0] != joint.rows[i].best[m] ||
                solo.rows[i].mean[0] != joint.rows[i].mean[m]) {
                detail = "trace rows differ at generation " + std::to_string(i + 1);
                return false;
            }
        if (solo.best_chromosome[0].genes != joint.best_chromosome[m].genes) {
            detail = "final chromosomes differ";
            return false;
        }
    }
    detail = "per-task traces identical over " + std::to_string(joint.rows.size()) +
             " generations";
    return true;
}

// ---------------------------------------------------------------- criterion 7

bool tank_physics(std::string& detail) {
    tank::PlantConfig c;
    const auto [d1, d2] = tank::plant_derivatives(19.735, 15.0, 21.760, 0.0, c);
    const bool steady = std::fabs(d1) < 1e-2 && std::fabs(d2) < 1e-2;

    std::vector<double> zero(200, 0.0);
    const auto states = tank::simulate_open_loop(zero, c, 12.0, 6.0);
    bool monotone = true;
    double prev = 18.0;
    for (const auto& [h1, h2] : states) {
        monotone = monotone && h1 + h2 <= prev + 1e-12 && h1 >= 0.0 && h2 >= 0.0;
        prev = h1 + h2;
    }
    std::ostringstream ss;
    ss << "steady-state derivatives (" << d1 << ", " << d2 << "), drainage ended at "
       << prev << " cm total";
    detail = ss.str();
    return steady && monotone;
}

// ---------------------------------------------------------------- criterion 8

bool flc_cooptimization(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto opt = tank::cotank_task_options();
    const std::array<core::TaskDefinition, 2> tasks{
        tank::make_flc_task(fuzzy::FlcKind::t1, opt),
        tank::make_flc_task(fuzzy::FlcKind::it2, opt)};

    solvers::SolverConfig cfg;
    cfg.population_size = 100;
    cfg.max_generations = 150;
    cfg.n_transfer = 40;
    cfg.eval_budget = 200 + 150 * 200;  // init + K generations
    cfg.matching_into[0] = {transfer::GeneMatching::Mode::fixed, fuzzy::flc_matching_into_t1()};
    cfg.matching_into[1] = {transfer::GeneMatching::Mode::fixed, fuzzy::flc_matching_into_it2()};

    const std::size_t seeds = 20;
    const auto itae_of_fitness = [](double f) { return 1.0 / f - tank::fitness_epsilon; };

    std::vector<double> mtga_t1(seeds), mtga_it2(seeds), soea_t1(seeds);
    parallel_for(seeds, [&](std::size_t s) {
        const auto trace = solvers::run_mtga(tasks, cfg, 100 + s);
        mtga_t1[s] = itae_of_fitness(trace.final_best[0]);
        mtga_it2[s] = itae_of_fitness(trace.final_best[1]);
        auto scfg = cfg;
        scfg.eval_budget = cfg.eval_budget / 2;
        soea_t1[s] = itae_of_fitness(solvers::run_soea(tasks[0], scfg, 100 + s, 0).final_best[0]);
    });

    double mean_t1 = 0.0, mean_it2 = 0.0;
    std::size_t wins = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
        mean_t1 += mtga_t1[s] / seeds;
        mean_it2 += mtga_it2[s] / seeds;
        wins += mtga_t1[s] <= soea_t1[s];
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream ss;
    ss << "mean weighted ITAE: mtga-T1 " << mean_t1 << ", mtga-IT2 " << mean_it2
       << "; mtga beats soea on T1 in " << wins << "/20 seeds; " << elapsed << " s";
    detail = ss.str();
    return mean_it2 <= mean_t1 && wins >= 14 && elapsed < 1800.0;
}

// ---------------------------------------------------------------- criterion 9

bool manifest_determinism(std::string& detail) {
    using experiment::ExperimentConfig;
    using nlohmann::json;
    const std::string dir_a = "acceptance_det_a", dir_b = "acceptance_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    const json cfg_json{
        {"problem", "B1"},
        {"shift_seed", 4},
        {"repetitions", 2},
        {"base_seed", 3},
        {"out_dir", dir_a},
        {"solvers", json::array({json{{"name", "mtga"},
                                      {"population_size", 10},
                                      {"max_generations", 10},
                                      {"n_transfer", 4},
                                      {"eval_budget", 100000}},
                                 json{{"name", "soea"},
                                      {"population_size", 10},
                                      {"max_generations", 10},
                                      {"eval_budget", 100000}}})}};
    experiment::run_experiment(ExperimentConfig::from_json(cfg_json));

    auto from_manifest = ExperimentConfig::load((fs::path(dir_a) / "manifest.json").string());
    from_manifest.out_dir = dir_b;
    experiment::run_experiment(from_manifest);

    const std::vector<std::string> files{"trace_mtga_rep0.csv", "trace_mtga_rep1.csv",
                                         "trace_soea_rep0.csv", "trace_soea_rep1.csv",
                                         "scores.csv", "convergence_data.csv",
                                         "scores_vs_evals.csv"};
    for (const auto& f : files)
        if (slurp(fs::path(dir_a) / f) != slurp(fs::path(dir_b) / f)) {
            detail = f + " differs between the run and its manifest rerun";
            return false;
        }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    detail = std::to_string(files.size()) + " CSV artifacts byte-identical";
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> criteria{
        {1, "operator algebra (SBX and mutation identities, 1e4 cases)", operator_algebra},
        {2, "bias-corrected transfer (shift equivariance, worked example)", transfer_correctness},
        {3, "Karnik-Mendel matches the exhaustive oracle and collapses to T1", km_oracle},
        {4, "performance score identity and hand example", score_identity},
        {5, "mtga beats soea on the shifted sphere/ackley pair", mtga_helps},
        {6, "mtga with n_t = 0 equals soea exactly", nt_zero_degenerates},
        {7, "tank physics: steady state and monotone drainage", tank_physics},
        {8, "simultaneous T1/IT2 controller optimization orderings", flc_cooptimization},
        {9, "manifest rerun reproduces byte-identical CSVs", manifest_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double dt = seconds_since(t0);
        std::printf("%s  criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name, dt,
                    detail.empty() ? "" : " — ", detail.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
