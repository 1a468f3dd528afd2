#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mtga/benchmarks.hpp"
#include "mtga/core.hpp"
#include "mtga/fuzzy.hpp"
#include "mtga/metrics.hpp"
#include "mtga/report.hpp"
#include "mtga/solvers.hpp"
#include "mtga/tank.hpp"

namespace mtga::experiment {

namespace fs = std::filesystem;
using core::ConfigError;
using core::TaskDefinition;
using nlohmann::json;
using solvers::RunTrace;
using solvers::SolverConfig;

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

}  // namespace detail

struct SolverSpec {
    std::string name;  // mtga | soea | mfea
    SolverConfig config;

    static SolverSpec from_json(const json& j) {
        SolverSpec s;
        s.name = detail::get_or<std::string>(j, "name", "");
        if (s.name != "mtga" && s.name != "soea" && s.name != "mfea")
            throw ConfigError("solver name must be one of mtga, soea, mfea (got '" + s.name + "')");
        auto& c = s.config;
        c.population_size = detail::get_or<std::size_t>(j, "population_size", c.population_size);
        c.max_generations = detail::get_or<std::size_t>(j, "max_generations", c.max_generations);
        c.n_transfer = detail::get_or<std::size_t>(j, "n_transfer", c.n_transfer);
        c.rmp = detail::get_or<double>(j, "rmp", c.rmp);
        c.eval_budget = detail::get_or<long>(j, "eval_budget", c.eval_budget);
        c.sbx.beta = detail::get_or<double>(j, "sbx_beta", c.sbx.beta);
        c.mutation.eta = detail::get_or<double>(j, "mutation_eta", c.mutation.eta);
        c.mutation.per_gene_rate = detail::get_or<double>(j, "mutation_rate", c.mutation.per_gene_rate);
        c.recompute_means_per_transfer = detail::get_or<bool>(
            j, "recompute_means_per_transfer", c.recompute_means_per_transfer);
        c.validate();
        if (s.name == "mtga" && c.n_transfer > c.population_size)
            throw ConfigError("solver mtga: n_transfer must not exceed population_size");
        return s;
    }

    json to_json() const {
        return json{{"name", name},
                    {"population_size", config.population_size},
                    {"max_generations", config.max_generations},
                    {"n_transfer", config.n_transfer},
                    {"rmp", config.rmp},
                    {"eval_budget", config.eval_budget},
                    {"sbx_beta", config.sbx.beta},
                    {"mutation_eta", config.mutation.eta},
                    {"mutation_rate", config.mutation.per_gene_rate},
                    {"recompute_means_per_transfer", config.recompute_means_per_transfer}};
    }
};

inline json plant_to_json(const tank::PlantConfig& p) {
    json sp = json::array();
    for (const auto& s : p.setpoints) sp.push_back(json::array({s.from_sample, s.level}));
    return json{{"area1", p.area1},
                {"area2", p.area2},
                {"alpha1", p.alpha1},
                {"alpha2", p.alpha2},
                {"alpha3", p.alpha3},
                {"outlet1_open", p.outlet1_open},
                {"setpoints", sp},
                {"input_delay_s", p.input_delay_s},
                {"horizon", p.horizon},
                {"sample_period_s", p.sample_period_s},
                {"substeps", p.substeps}};
}

inline tank::PlantConfig plant_from_json(const json& j, const tank::PlantConfig& base) {
    tank::PlantConfig p = base;
    p.area1 = detail::get_or<double>(j, "area1", p.area1);
    p.area2 = detail::get_or<double>(j, "area2", p.area2);
    p.alpha1 = detail::get_or<double>(j, "alpha1", p.alpha1);
    p.alpha2 = detail::get_or<double>(j, "alpha2", p.alpha2);
    p.alpha3 = detail::get_or<double>(j, "alpha3", p.alpha3);
    p.outlet1_open = detail::get_or<bool>(j, "outlet1_open", p.outlet1_open);
    p.input_delay_s = detail::get_or<double>(j, "input_delay_s", p.input_delay_s);
    p.horizon = detail::get_or<std::size_t>(j, "horizon", p.horizon);
    p.sample_period_s = detail::get_or<double>(j, "sample_period_s", p.sample_period_s);
    p.substeps = detail::get_or<std::size_t>(j, "substeps", p.substeps);
    if (j.contains("setpoints")) {
        p.setpoints.clear();
        for (const auto& s : j.at("setpoints"))
            p.setpoints.push_back({s.at(0).get<std::size_t>(), s.at(1).get<double>()});
    }
    p.validate();
    return p;
}

inline json flc_options_to_json(const tank::FlcTaskOptions& o) {
    json plants = json::array();
    for (const auto& p : o.plants) plants.push_back(plant_to_json(p));
    return json{{"mean_lo", o.mean_lo},
                {"mean_hi", o.mean_hi},
                {"std_lo", o.std_lo},
                {"std_hi", o.std_hi},
                {"consequent_lo", o.consequent_lo},
                {"consequent_hi", o.consequent_hi},
                {"min_std", o.min_std},
                {"e_scale", o.scaling.e_scale},
                {"edot_scale", o.scaling.edot_scale},
                {"output_gain", o.scaling.output_gain},
                {"u_min", o.scaling.u_min},
                {"u_max", o.scaling.u_max},
                {"plants", plants},
                {"weights", json::array({o.weights[0], o.weights[1], o.weights[2], o.weights[3]})}};
}

inline tank::FlcTaskOptions flc_options_from_json(const json& j) {
    tank::FlcTaskOptions o = tank::cotank_task_options();
    o.mean_lo = detail::get_or<double>(j, "mean_lo", o.mean_lo);
    o.mean_hi = detail::get_or<double>(j, "mean_hi", o.mean_hi);
    o.std_lo = detail::get_or<double>(j, "std_lo", o.std_lo);
    o.std_hi = detail::get_or<double>(j, "std_hi", o.std_hi);
    o.consequent_lo = detail::get_or<double>(j, "consequent_lo", o.consequent_lo);
    o.consequent_hi = detail::get_or<double>(j, "consequent_hi", o.consequent_hi);
    o.min_std = detail::get_or<double>(j, "min_std", o.min_std);
    o.scaling.e_scale = detail::get_or<double>(j, "e_scale", o.scaling.e_scale);
    o.scaling.edot_scale = detail::get_or<double>(j, "edot_scale", o.scaling.edot_scale);
    o.scaling.output_gain = detail::get_or<double>(j, "output_gain", o.scaling.output_gain);
    o.scaling.u_min = detail::get_or<double>(j, "u_min", o.scaling.u_min);
    o.scaling.u_max = detail::get_or<double>(j, "u_max", o.scaling.u_max);
    if (j.contains("plants")) {
        const auto& arr = j.at("plants");
        if (arr.size() != 4) throw ConfigError("flc.plants must list exactly 4 configurations");
        for (std::size_t i = 0; i < 4; ++i) o.plants[i] = plant_from_json(arr[i], o.plants[i]);
    }
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        if (w.size() != 4) throw ConfigError("flc.weights must list exactly 4 values");
        for (std::size_t i = 0; i < 4; ++i) o.weights[i] = w[i].get<double>();
    }
    return o;
}

inline json composed_to_json(const bench::ComposedTask& c) {
    json j{{"label", c.label},
           {"kind", bench::kind_name(c.kind)},
           {"dim", c.dim},
           {"range_lo", c.range_lo},
           {"range_hi", c.range_hi},
           {"shift", c.shift}};
    if (c.has_rotation()) j["rotation"] = c.rotation;
    return j;
}

inline bench::ComposedTask composed_from_json(const json& j) {
    bench::ComposedTask c;
    c.label = detail::get_or<std::string>(j, "label", "");
    c.kind = bench::kind_from_name(j.at("kind").get<std::string>());
    c.dim = j.at("dim").get<std::size_t>();
    c.range_lo = j.at("range_lo").get<double>();
    c.range_hi = j.at("range_hi").get<double>();
    c.shift = j.at("shift").get<std::vector<double>>();
    if (j.contains("rotation")) c.rotation = j.at("rotation").get<std::vector<double>>();
    c.validate();
    return c;
}

/// Tasks plus the fully-resolved problem description that goes into the run
/// manifest (explicit shift vectors, FLC options with every default filled).
struct ResolvedProblem {
    std::array<TaskDefinition, 2> tasks;
    json manifest;
    bool is_flc = false;
};

inline ResolvedProblem resolve_problem(const json& problem_node, std::uint64_t shift_seed,
                                       const json* flc_overrides) {
    ResolvedProblem r;
    // manifest form: {"type": ..., "tasks"/"options": resolved data}
    if (problem_node.is_object() && problem_node.contains("type")) {
        const auto type = problem_node.at("type").get<std::string>();
        if (type == "flc-cotank") {
            const auto opt = flc_options_from_json(problem_node.at("options"));
            r.tasks = {tank::make_flc_task(fuzzy::FlcKind::t1, opt),
                       tank::make_flc_task(fuzzy::FlcKind::it2, opt)};
            r.manifest = json{{"type", "flc-cotank"}, {"options", flc_options_to_json(opt)}};
            r.is_flc = true;
            return r;
        }
        auto t1 = composed_from_json(problem_node.at("tasks").at(0));
        auto t2 = composed_from_json(problem_node.at("tasks").at(1));
        r.manifest = json{{"type", type},
                          {"tasks", json::array({composed_to_json(t1), composed_to_json(t2)})}};
        if (problem_node.contains("id")) r.manifest["id"] = problem_node.at("id");
        r.tasks = {bench::make_task(std::move(t1)), bench::make_task(std::move(t2))};
        return r;
    }

    if (problem_node.is_object() && problem_node.contains("file")) {
        const auto path = problem_node.at("file").get<std::string>();
        auto [c1, c2] = bench::load_pair_file(path);
        r.manifest = json{{"type", "file"},
                          {"id", path},
                          {"tasks", json::array({composed_to_json(c1), composed_to_json(c2)})}};
        r.tasks = {bench::make_task(std::move(c1)), bench::make_task(std::move(c2))};
        return r;
    }

    if (!problem_node.is_string())
        throw ConfigError("problem must be a benchmark id, \"flc-cotank\", or {\"file\": path}");
    const auto id = problem_node.get<std::string>();
    if (id == "flc-cotank") {
        const auto opt = flc_overrides ? flc_options_from_json(*flc_overrides)
                                       : tank::cotank_task_options();
        r.tasks = {tank::make_flc_task(fuzzy::FlcKind::t1, opt),
                   tank::make_flc_task(fuzzy::FlcKind::it2, opt)};
        r.manifest = json{{"type", "flc-cotank"}, {"options", flc_options_to_json(opt)}};
        r.is_flc = true;
        return r;
    }
    auto [c1, c2] = bench::registry_pair(id, shift_seed);
    r.manifest = json{{"type", "registry"},
                      {"id", id},
                      {"shift_seed", shift_seed},
                      {"tasks", json::array({composed_to_json(c1), composed_to_json(c2)})}};
    r.tasks = {bench::make_task(std::move(c1)), bench::make_task(std::move(c2))};
    return r;
}

struct ExperimentConfig {
    json problem = "B1";
    std::vector<SolverSpec> solvers;
    std::size_t repetitions = 1;
    std::uint64_t base_seed = 1;
    std::uint64_t shift_seed = 1;
    std::string out_dir = "runs/out";
    bool emit_csv = true;
    bool emit_json = true;
    bool emit_svg = true;
    unsigned threads = 0;  // 0 = hardware concurrency
    json flc_overrides;    // optional "flc" block

    static ExperimentConfig from_json(const json& j) {
        ExperimentConfig c;
        if (j.contains("problem")) c.problem = j.at("problem");
        if (!j.contains("solvers") || !j.at("solvers").is_array() || j.at("solvers").empty())
            throw ConfigError("config must list at least one solver in 'solvers'");
        for (const auto& s : j.at("solvers")) c.solvers.push_back(SolverSpec::from_json(s));
        c.repetitions = detail::get_or<std::size_t>(j, "repetitions", c.repetitions);
        if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");
        c.base_seed = detail::get_or<std::uint64_t>(j, "base_seed", c.base_seed);
        c.shift_seed = detail::get_or<std::uint64_t>(j, "shift_seed", c.shift_seed);
        c.out_dir = detail::get_or<std::string>(j, "out_dir", c.out_dir);
        c.threads = detail::get_or<unsigned>(j, "threads", c.threads);
        if (j.contains("emit")) {
            const auto& e = j.at("emit");
            c.emit_csv = detail::get_or<bool>(e, "csv", true);
            c.emit_json = detail::get_or<bool>(e, "json", true);
            c.emit_svg = detail::get_or<bool>(e, "svg", true);
        }
        if (j.contains("flc")) c.flc_overrides = j.at("flc");
        std::vector<std::string> seen;
        for (const auto& s : c.solvers) {
            if (std::find(seen.begin(), seen.end(), s.name) != seen.end())
                throw ConfigError("solver '" + s.name + "' listed twice");
            seen.push_back(s.name);
        }
        return c;
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
        }
        return from_json(j);
    }
};

inline std::string trace_filename(const std::string& solver, std::size_t rep) {
    return "trace_" + solver + "_rep" + std::to_string(rep) + ".csv";
}

inline void write_trace_csv(const std::string& path, const RunTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write trace file '" + path + "'");
    out << "generation,evaluations,best_T1,mean_T1,best_T2,mean_T2\n";
    for (const auto& row : trace.rows) {
        out << row.generation << ',' << row.evaluations << ',' << report::fmt_double(row.best[0])
            << ',' << report::fmt_double(row.mean[0]) << ',' << report::fmt_double(row.best[1])
            << ',' << report::fmt_double(row.mean[1]) << '\n';
    }
}

inline RunTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file '" + path + "'");
    RunTrace t;
    t.n_tasks = 2;
    std::string line;
    if (!std::getline(in, line) || line.rfind("generation,", 0) != 0)
        throw ConfigError("trace file '" + path + "' has an unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        solvers::GenerationRecord row{};
        std::istringstream is(line);
        char comma;
        if (!(is >> row.generation >> comma >> row.evaluations >> comma >> row.best[0] >> comma >>
              row.mean[0] >> comma >> row.best[1] >> comma >> row.mean[1]))
            throw ConfigError("trace file '" + path + "' has a malformed row: " + line);
        t.rows.push_back(row);
    }
    if (t.rows.empty()) throw ConfigError("trace file '" + path + "' has no data rows");
    t.final_best = t.rows.back().best;
    t.total_evaluations = t.rows.back().evaluations;
    return t;
}

/// Runs one solver on the problem. SOEA treats the two tasks independently
/// with half the evaluation budget and its own random substream each, and
/// the traces are merged; this is the equal-total-budget protocol used for
/// multi-task comparisons.
inline RunTrace run_solver(const SolverSpec& spec, const ResolvedProblem& problem,
                           std::uint64_t seed) {
    if (spec.name == "mtga") {
        SolverConfig cfg = spec.config;
        if (problem.is_flc) {
            cfg.matching_into[0] = {transfer::GeneMatching::Mode::fixed,
                                    fuzzy::flc_matching_into_t1()};
            cfg.matching_into[1] = {transfer::GeneMatching::Mode::fixed,
                                    fuzzy::flc_matching_into_it2()};
        }
        return solvers::run_mtga(problem.tasks, cfg, seed);
    }
    if (spec.name == "mfea") return solvers::run_mfea(problem.tasks, spec.config, seed);

    SolverConfig cfg = spec.config;
    cfg.eval_budget = std::max(1L, spec.config.eval_budget / 2);
    RunTrace merged;
    merged.n_tasks = 2;
    std::array<RunTrace, 2> parts;
    for (int m = 0; m < 2; ++m)
        parts[m] = solvers::run_soea(problem.tasks[m], cfg, seed, static_cast<std::uint64_t>(m));
    const std::size_t rows = std::min(parts[0].rows.size(), parts[1].rows.size());
    for (std::size_t i = 0; i < rows; ++i) {
        solvers::GenerationRecord row{};
        row.generation = parts[0].rows[i].generation;
        row.evaluations = parts[0].rows[i].evaluations + parts[1].rows[i].evaluations;
        row.best = {parts[0].rows[i].best[0], parts[1].rows[i].best[0]};
        row.mean = {parts[0].rows[i].mean[0], parts[1].rows[i].mean[0]};
        merged.rows.push_back(row);
    }
    merged.best_chromosome = {parts[0].best_chromosome[0], parts[1].best_chromosome[0]};
    merged.final_best = {parts[0].final_best[0], parts[1].final_best[0]};
    merged.total_evaluations = parts[0].total_evaluations + parts[1].total_evaluations;
    return merged;
}

/// Final-best tensor in minimized units (maximization objectives negated),
/// so that a smaller performance score always means better.
inline metrics::ResultTensor final_tensor(const std::vector<std::vector<RunTrace>>& traces,
                                          const ResolvedProblem& problem) {
    const std::size_t n_solvers = traces.size();
    const std::size_t n_reps = traces.empty() ? 0 : traces.front().size();
    metrics::ResultTensor tensor(n_solvers, 2, n_reps);
    for (std::size_t k = 0; k < n_solvers; ++k)
        for (std::size_t l = 0; l < n_reps; ++l)
            for (std::size_t m = 0; m < 2; ++m)
                tensor.at(k, m, l) = problem.tasks[m].cost_of(traces[k][l].final_best[m]);
    return tensor;
}

inline void write_scores_csv(const std::string& path, std::span<const std::string> names,
                             std::span<const double> scores) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "solver,score\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        out << names[i] << ',' << report::fmt_double(scores[i]) << '\n';
}

inline json build_manifest(const ExperimentConfig& cfg, const ResolvedProblem& problem) {
    json solvers_j = json::array();
    for (const auto& s : cfg.solvers) solvers_j.push_back(s.to_json());
    json tasks_j = json::array();
    for (const auto& t : problem.tasks)
        tasks_j.push_back(json{
            {"id", t.id},
            {"dim", t.dim},
            {"direction", t.direction == core::Direction::maximize ? "maximize" : "minimize"}});
    return json{{"problem", problem.manifest},
                {"task_info", tasks_j},
                {"solvers", solvers_j},
                {"repetitions", cfg.repetitions},
                {"base_seed", cfg.base_seed},
                {"shift_seed", cfg.shift_seed},
                {"out_dir", cfg.out_dir},
                {"emit", json{{"csv", cfg.emit_csv}, {"json", cfg.emit_json}, {"svg", cfg.emit_svg}}},
                {"threads", cfg.threads}};
}

inline void emit_reports(const std::string& dir);

/// Executes the solver x repetition grid, then writes the summary, score
/// table, manifest, and reports. Existing trace files are kept and their
/// runs skipped, which makes partially-completed experiments resumable.
inline std::string run_experiment(const ExperimentConfig& cfg) {
    const ResolvedProblem problem =
        resolve_problem(cfg.problem, cfg.shift_seed,
                        cfg.flc_overrides.is_null() ? nullptr : &cfg.flc_overrides);
    for (const auto& t : problem.tasks) t.validate();

    fs::create_directories(cfg.out_dir);

    struct Job {
        std::size_t solver;
        std::size_t rep;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
        for (std::size_t l = 0; l < cfg.repetitions; ++l) jobs.push_back({s, l});

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::vector<std::string> errors;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const auto [s, l] = jobs[i];
            const fs::path path = fs::path(cfg.out_dir) / trace_filename(cfg.solvers[s].name, l);
            if (fs::exists(path)) continue;
            try {
                const RunTrace trace =
                    run_solver(cfg.solvers[s], problem, cfg.base_seed + l);
                write_trace_csv(path.string(), trace);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                errors.push_back(cfg.solvers[s].name + " rep " + std::to_string(l) + ": " +
                                 e.what());
            }
        }
    };
    unsigned n_threads = cfg.threads > 0 ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!errors.empty()) {
        std::string all = "experiment runs failed:";
        for (const auto& e : errors) all += "\n  " + e;
        throw std::runtime_error(all);
    }

    // aggregate from the trace files themselves
    std::vector<std::vector<RunTrace>> traces(cfg.solvers.size());
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
        for (std::size_t l = 0; l < cfg.repetitions; ++l)
            traces[s].push_back(read_trace_csv(
                (fs::path(cfg.out_dir) / trace_filename(cfg.solvers[s].name, l)).string()));

    if (cfg.emit_json) {
        json summary;
        summary["problem"] = problem.manifest.contains("id") ? problem.manifest.at("id")
                                                             : problem.manifest.at("type");
        summary["tasks"] = json::array({problem.tasks[0].id, problem.tasks[1].id});
        json per_solver;
        std::vector<std::string> names;
        std::vector<metrics::RunSummary> summaries;
        for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
            const auto sum = metrics::summarize_runs(traces[s]);
            per_solver[cfg.solvers[s].name] =
                json{{"repetitions", sum.n_runs},
                     {"final_best_mean", json::array({sum.mean[0], sum.mean[1]})},
                     {"final_best_std", json::array({sum.stddev[0], sum.stddev[1]})}};
            names.push_back(cfg.solvers[s].name);
            summaries.push_back(sum);
        }
        summary["solvers"] = per_solver;
        if (std::find(names.begin(), names.end(), "soea") != names.end()) {
            json rows = json::array();
            for (const auto& row : metrics::normalize_against(names, summaries, "soea"))
                rows.push_back(json{{"name", row.name},
                                    {"mean_ratio", json::array({row.mean_ratio[0], row.mean_ratio[1]})},
                                    {"std_ratio", json::array({row.std_ratio[0], row.std_ratio[1]})}});
            summary["normalized_vs_soea"] = rows;
        }
        std::ofstream out(fs::path(cfg.out_dir) / "summary.json", std::ios::binary);
        out << summary.dump(2) << '\n';
    }

    if (cfg.emit_csv) {
        const auto tensor = final_tensor(traces, problem);
        const auto scores = metrics::performance_score(tensor);
        std::vector<std::string> names;
        for (const auto& s : cfg.solvers) names.push_back(s.name);
        write_scores_csv((fs::path(cfg.out_dir) / "scores.csv").string(), names, scores);
    }

    {
        std::ofstream out(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
        out << build_manifest(cfg, problem).dump(2) << '\n';
    }

    if (cfg.emit_svg) emit_reports(cfg.out_dir);
    return cfg.out_dir;
}

/// Loads the manifest of a finished (or resumable) experiment directory.
inline json load_manifest(const std::string& dir) {
    const fs::path path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("no manifest.json in '" + dir + "'");
    json j;
    in >> j;
    return j;
}

/// Recomputes scores.csv for a directory from its traces and manifest.
inline std::vector<double> score_directory(const std::string& dir) {
    const json manifest = load_manifest(dir);
    ExperimentConfig cfg = ExperimentConfig::from_json(manifest);
    cfg.out_dir = dir;
    const ResolvedProblem problem =
        resolve_problem(cfg.problem, cfg.shift_seed,
                        cfg.flc_overrides.is_null() ? nullptr : &cfg.flc_overrides);
    std::vector<std::vector<RunTrace>> traces(cfg.solvers.size());
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
        for (std::size_t l = 0; l < cfg.repetitions; ++l)
            traces[s].push_back(
                read_trace_csv((fs::path(dir) / trace_filename(cfg.solvers[s].name, l)).string()));
    const auto scores = metrics::performance_score(final_tensor(traces, problem));
    std::vector<std::string> names;
    for (const auto& s : cfg.solvers) names.push_back(s.name);
    write_scores_csv((fs::path(dir) / "scores.csv").string(), names, scores);
    return scores;
}

/// Convergence and score-vs-generation plots plus their data CSVs. Every
/// plotted number is also present in a CSV; the plots are derived artifacts.
inline void emit_reports(const std::string& dir) {
    const json manifest = load_manifest(dir);
    ExperimentConfig cfg = ExperimentConfig::from_json(manifest);
    cfg.out_dir = dir;
    const ResolvedProblem problem =
        resolve_problem(cfg.problem, cfg.shift_seed,
                        cfg.flc_overrides.is_null() ? nullptr : &cfg.flc_overrides);

    std::vector<std::vector<RunTrace>> traces(cfg.solvers.size());
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
        for (std::size_t l = 0; l < cfg.repetitions; ++l)
            traces[s].push_back(
                read_trace_csv((fs::path(dir) / trace_filename(cfg.solvers[s].name, l)).string()));
    if (traces.empty() || traces.front().empty())
        throw ConfigError("no trace files to report in '" + dir + "'");

    // convergence: mean best objective across repetitions, per solver and task
    {
        std::ofstream data(fs::path(dir) / "convergence_data.csv", std::ios::binary);
        data << "solver,generation,evaluations,mean_best_T1,mean_best_T2\n";
        std::array<std::vector<report::Series>, 2> chart;
        for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
            std::size_t rows = traces[s].front().rows.size();
            for (const auto& t : traces[s]) rows = std::min(rows, t.rows.size());
            report::Series s1{cfg.solvers[s].name, {}}, s2{cfg.solvers[s].name, {}};
            for (std::size_t g = 0; g < rows; ++g) {
                double b1 = 0.0, b2 = 0.0;
                for (const auto& t : traces[s]) {
                    b1 += t.rows[g].best[0];
                    b2 += t.rows[g].best[1];
                }
                b1 /= static_cast<double>(traces[s].size());
                b2 /= static_cast<double>(traces[s].size());
                const auto evals = traces[s].front().rows[g].evaluations;
                data << cfg.solvers[s].name << ',' << traces[s].front().rows[g].generation << ','
                     << evals << ',' << report::fmt_double(b1) << ',' << report::fmt_double(b2)
                     << '\n';
                s1.points.emplace_back(static_cast<double>(evals), b1);
                s2.points.emplace_back(static_cast<double>(evals), b2);
            }
            chart[0].push_back(std::move(s1));
            chart[1].push_back(std::move(s2));
        }
        const std::string problem_name =
            problem.manifest.contains("id") ? problem.manifest.at("id").get<std::string>()
                                            : problem.manifest.at("type").get<std::string>();
        for (int m = 0; m < 2; ++m)
            report::write_line_chart(
                (fs::path(dir) / ("convergence_T" + std::to_string(m + 1) + ".svg")).string(),
                problem_name + " " + problem.tasks[m].id, "objective evaluations",
                "mean best objective", chart[m]);
    }

    // performance score per generation across solvers
    {
        std::size_t rows = traces.front().front().rows.size();
        for (const auto& per_solver : traces)
            for (const auto& t : per_solver) rows = std::min(rows, t.rows.size());
        std::ofstream data(fs::path(dir) / "scores_vs_evals.csv", std::ios::binary);
        data << "generation";
        for (const auto& s : cfg.solvers) data << ",score_" << s.name;
        data << '\n';
        std::vector<report::Series> chart(cfg.solvers.size());
        for (std::size_t s = 0; s < cfg.solvers.size(); ++s) chart[s].name = cfg.solvers[s].name;
        for (std::size_t g = 0; g < rows; ++g) {
            metrics::ResultTensor tensor(cfg.solvers.size(), 2, cfg.repetitions);
            for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
                for (std::size_t l = 0; l < cfg.repetitions; ++l)
                    for (std::size_t m = 0; m < 2; ++m)
                        tensor.at(s, m, l) =
                            problem.tasks[m].cost_of(traces[s][l].rows[g].best[m]);
            const auto scores = metrics::performance_score(tensor);
            data << traces.front().front().rows[g].generation;
            for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
                data << ',' << report::fmt_double(scores[s]);
                chart[s].points.emplace_back(static_cast<double>(g + 1), scores[s]);
            }
            data << '\n';
        }
        report::write_line_chart((fs::path(dir) / "scores_vs_evals.svg").string(),
                                 "performance score by generation", "generation",
                                 "performance score", chart);
    }
}

}  // namespace mtga::experiment
