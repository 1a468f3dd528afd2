#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mtga/core.hpp"
#include "mtga/fuzzy.hpp"

namespace mtga::tank {

using core::ConfigError;

/// Setpoint schedule step: the target level applies from `from_sample` on.
struct SetpointStep {
    std::size_t from_sample = 0;
    double level = 0.0;
};

/// Physical constants and evaluation horizon of one coupled-tank plant
/// configuration. Pump #2 is always off; outlet 1 is closed by default (its
/// alpha1 term drops out), matching the single-pump level-control setup.
struct PlantConfig {
    double area1 = 36.52;   // cm^2
    double area2 = 36.52;   // cm^2
    double alpha1 = 5.6186; // outlet 1 (used only when outlet1_open)
    double alpha2 = 5.6186; // outlet 2
    double alpha3 = 10.0;   // inter-tank baffle
    bool outlet1_open = false;
    std::vector<SetpointStep> setpoints{{0, 15.0}};
    double input_delay_s = 0.0;
    std::size_t horizon = 200;      // N_p samples
    double sample_period_s = 1.0;   // T_s
    std::size_t substeps = 10;      // integrator substeps per sample

    void validate() const {
        if (area1 <= 0.0 || area2 <= 0.0) throw ConfigError("tank areas must be positive");
        if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0)
            throw ConfigError("tank proportionality constants must be >= 0");
        if (horizon < 1) throw ConfigError("plant horizon must be >= 1");
        if (sample_period_s <= 0.0) throw ConfigError("sample period must be positive");
        if (substeps < 1) throw ConfigError("integration substeps must be >= 1");
        if (input_delay_s < 0.0) throw ConfigError("input delay must be >= 0");
        if (setpoints.empty()) throw ConfigError("setpoint schedule must not be empty");
    }

    double setpoint_at(std::size_t sample) const {
        double level = setpoints.front().level;
        for (const auto& s : setpoints)
            if (s.from_sample <= sample) level = s.level;
        return level;
    }
};

/// The four fitness-evaluation configurations: nominal, 2 s input delay,
/// large setpoint swing 0 -> 22.5 -> 7.5 (switching at half horizon), and a
/// weaker baffle coupling.
inline std::array<PlantConfig, 4> evaluation_plants() {
    std::array<PlantConfig, 4> plants{};
    plants[1].input_delay_s = 2.0;
    plants[2].setpoints = {{0, 22.5}, {plants[2].horizon / 2, 7.5}};
    plants[3].alpha3 = 8.0;
    return plants;
}

/// Default ITAE weights; the large-swing plant is down-weighted because its
/// error integral is several times the others'.
inline constexpr std::array<double, 4> default_itae_weights{1.0, 1.0, 1.0 / 3.0, 1.0};

inline double ssqrt(double x) { return x >= 0.0 ? std::sqrt(x) : -std::sqrt(-x); }

/// Tank level derivatives. Negative levels are treated as empty inside the
/// outlet square roots; the signed square root on the coupling term guards
/// transients with H1 < H2.
inline std::pair<double, double> plant_derivatives(double h1, double h2, double q1, double q2,
                                                   const PlantConfig& c) {
    const double out1 = c.outlet1_open ? c.alpha1 * std::sqrt(std::max(h1, 0.0)) : 0.0;
    const double out2 = c.alpha2 * std::sqrt(std::max(h2, 0.0));
    const double coupling = c.alpha3 * ssqrt(h1 - h2);
    return {(q1 - out1 - coupling) / c.area1, (q2 - out2 + coupling) / c.area2};
}

namespace detail {

struct TankState {
    double h1 = 0.0, h2 = 0.0;
};

inline TankState rk4_step(TankState s, double q1, double q2, double dt, const PlantConfig& c) {
    const auto [k1a, k1b] = plant_derivatives(s.h1, s.h2, q1, q2, c);
    const auto [k2a, k2b] =
        plant_derivatives(s.h1 + 0.5 * dt * k1a, s.h2 + 0.5 * dt * k1b, q1, q2, c);
    const auto [k3a, k3b] =
        plant_derivatives(s.h1 + 0.5 * dt * k2a, s.h2 + 0.5 * dt * k2b, q1, q2, c);
    const auto [k4a, k4b] = plant_derivatives(s.h1 + dt * k3a, s.h2 + dt * k3b, q1, q2, c);
    return {s.h1 + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
            s.h2 + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)};
}

/// Classical fourth-order substep with event localization at the empty
/// boundary: a step that would drive a level negative is re-taken as two
/// half steps, recursively, so the clamp at the recursion floor cannot
/// create more than ~1e-12 cm of spurious volume.
inline TankState integrate_substep(TankState s, double q1, double q2, double dt,
                                   const PlantConfig& c, int depth = 0) {
    TankState n = rk4_step(s, q1, q2, dt, c);
    if ((n.h1 < 0.0 || n.h2 < 0.0) && depth < 30 && std::isfinite(n.h1) && std::isfinite(n.h2)) {
        const TankState mid = integrate_substep(s, q1, q2, 0.5 * dt, c, depth + 1);
        return integrate_substep(mid, q1, q2, 0.5 * dt, c, depth + 1);
    }
    n.h1 = std::max(n.h1, 0.0);
    n.h2 = std::max(n.h2, 0.0);
    return n;
}

}  // namespace detail

/// One recorded sample of a closed-loop run. Levels are the state at the
/// row's own sampling instant; e/edot/u/q1 are the controller quantities of
/// the sample interval that produced it.
struct SimSample {
    double time_s;
    double h1, h2;
    double setpoint;
    double e, edot;
    double u;
    double q1;
};

struct SimTrace {
    std::vector<SimSample> samples;
    bool aborted = false;  // non-finite state encountered

    /// Sum of t * |e(t)| over the recorded samplings t = 1..N_p.
    double itae() const {
        double s = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            s += static_cast<double>(i + 1) * std::fabs(samples[i].e);
        return s;
    }
};

/// Time-weighted absolute error of a bare error sequence; errors[i] is the
/// (i+1)-th sampling.
inline double itae_of(std::span<const double> errors) {
    double s = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i)
        s += static_cast<double>(i + 1) * std::fabs(errors[i]);
    return s;
}

/// Scaling between the controller and the plant. The fuzzy controller sees
/// e / e_scale and edot / edot_scale; its output is the rate of change of
/// the normalized pump command u in [0, 1], and Q1 = output_gain * u.
struct ControlScaling {
    double e_scale = 1.0;
    double edot_scale = 1.0;
    double output_gain = 50.0;  // cm^3/s at u = 1
    double u_min = 0.0;
    double u_max = 1.0;
};

/// Closed-loop run of one plant configuration under a fuzzy PI controller.
///
/// Per sample: measure e = setpoint - H2 and its backward difference,
/// run the controller for the command increment, integrate the command,
/// push it through the input-delay line, and integrate the plant with the
/// classical fourth-order method over `substeps`. Rows are recorded at the
/// post-integration sampling instants 1..N_p.
inline SimTrace simulate_closed_loop(const fuzzy::FlcGenome& flc, const PlantConfig& config,
                                     const ControlScaling& scaling = {}) {
    config.validate();
    const double ts = config.sample_period_s;
    const std::size_t delay_samples =
        static_cast<std::size_t>(std::ceil(config.input_delay_s / ts - 1e-12));

    SimTrace trace;
    trace.samples.reserve(config.horizon);
    detail::TankState state;
    double u = 0.0;
    std::deque<double> delay_line(delay_samples, 0.0);

    double e_prev = config.setpoint_at(0) - state.h2;  // first edot = 0
    const double dt = ts / static_cast<double>(config.substeps);
    for (std::size_t t = 0; t < config.horizon; ++t) {
        const double sp = config.setpoint_at(t);
        const double e = sp - state.h2;
        const double edot = (e - e_prev) / ts;
        e_prev = e;

        const double du = fuzzy::flc_output(flc, e / scaling.e_scale, edot / scaling.edot_scale);
        u = std::clamp(u + du * ts, scaling.u_min, scaling.u_max);

        double q1 = scaling.output_gain * u;
        if (delay_samples > 0) {
            delay_line.push_back(q1);
            q1 = delay_line.front();
            delay_line.pop_front();
        }

        for (std::size_t s = 0; s < config.substeps; ++s)
            state = detail::integrate_substep(state, q1, 0.0, dt, config);

        if (!std::isfinite(state.h1) || !std::isfinite(state.h2)) {
            trace.aborted = true;
            break;
        }
        const double sp_next = config.setpoint_at(t + 1);
        trace.samples.push_back(
            {(t + 1) * ts, state.h1, state.h2, sp_next, sp_next - state.h2, edot, u, q1});
    }
    return trace;
}

/// Worst-case weighted ITAE assigned to aborted simulations.
inline constexpr double aborted_itae = 1e12;
/// Regularizer keeping the fitness finite on perfect tracking.
inline constexpr double fitness_epsilon = 1e-9;

/// Weighted ITAE sum over a set of plants; aborted runs count as
/// aborted_itae each.
inline double weighted_itae(const fuzzy::FlcGenome& flc, std::span<const PlantConfig> plants,
                            std::span<const double> weights, const ControlScaling& scaling = {}) {
    if (weights.size() != plants.size())
        throw ConfigError("weighted_itae: one weight per plant required");
    double total = 0.0;
    for (std::size_t p = 0; p < plants.size(); ++p) {
        const SimTrace trace = simulate_closed_loop(flc, plants[p], scaling);
        total += weights[p] * (trace.aborted ? aborted_itae : trace.itae());
    }
    return total;
}

/// Controller fitness F = 1 / (sum_p w_p ITAE_p + eps); solvers maximize it.
inline double itae_fitness(const fuzzy::FlcGenome& flc, std::span<const PlantConfig> plants,
                           std::span<const double> weights, const ControlScaling& scaling = {}) {
    return 1.0 / (weighted_itae(flc, plants, weights, scaling) + fitness_epsilon);
}

/// Open-loop integration of a prescribed pump #1 command sequence, through
/// the same delay line and integrator as the closed-loop run. Returns the
/// (H1, H2) state after each sample.
inline std::vector<std::pair<double, double>> simulate_open_loop(
    std::span<const double> q1_commands, const PlantConfig& config, double h1 = 0.0,
    double h2 = 0.0) {
    config.validate();
    const double ts = config.sample_period_s;
    const std::size_t delay_samples =
        static_cast<std::size_t>(std::ceil(config.input_delay_s / ts - 1e-12));
    std::deque<double> delay_line(delay_samples, 0.0);
    const double dt = ts / static_cast<double>(config.substeps);

    std::vector<std::pair<double, double>> states;
    states.reserve(q1_commands.size());
    detail::TankState state{h1, h2};
    for (double command : q1_commands) {
        double q1 = command;
        if (delay_samples > 0) {
            delay_line.push_back(q1);
            q1 = delay_line.front();
            delay_line.pop_front();
        }
        for (std::size_t s = 0; s < config.substeps; ++s)
            state = detail::integrate_substep(state, q1, 0.0, dt, config);
        states.emplace_back(state.h1, state.h2);
    }
    return states;
}

/// Decode ranges of the FLC genes and the plant-side scaling for the
/// controller optimization tasks. Input MF means live in scaled input
/// units; consequents are command increments per second.
struct FlcTaskOptions {
    double mean_lo = -1.5, mean_hi = 1.5;
    double std_lo = 0.01, std_hi = 2.0;
    double consequent_lo = 0.0, consequent_hi = 1.0;
    double min_std = 1e-3;
    ControlScaling scaling{};
    std::array<PlantConfig, 4> plants = evaluation_plants();
    std::array<double, 4> weights = default_itae_weights;
};

/// Water-level control preset: errors scaled by the nominal setpoint,
/// symmetric command increments so the pump can both open and close.
inline FlcTaskOptions cotank_task_options() {
    FlcTaskOptions opt;
    opt.consequent_lo = -0.15;
    opt.consequent_hi = 0.15;
    opt.scaling.e_scale = 15.0;
    opt.scaling.edot_scale = 1.0;
    return opt;
}

/// Maximization task: genes decode to FLC parameters, constraints are
/// re-ranked, and the fitness is the reciprocal weighted ITAE over the four
/// evaluation plants.
inline core::TaskDefinition make_flc_task(fuzzy::FlcKind kind, const FlcTaskOptions& opt) {
    namespace L = fuzzy::layout;
    core::TaskDefinition task;
    task.id = kind == fuzzy::FlcKind::t1 ? "flc-t1" : "flc-it2";
    task.dim = fuzzy::gene_count(kind);
    task.lower.resize(task.dim);
    task.upper.resize(task.dim);
    auto set = [&](std::size_t at, std::size_t count, double lo, double hi) {
        for (std::size_t i = 0; i < count; ++i) {
            task.lower[at + i] = lo;
            task.upper[at + i] = hi;
        }
    };
    if (kind == fuzzy::FlcKind::t1) {
        set(L::t1_e_mean, 3, opt.mean_lo, opt.mean_hi);
        set(L::t1_e_std, 3, opt.std_lo, opt.std_hi);
        set(L::t1_de_mean, 3, opt.mean_lo, opt.mean_hi);
        set(L::t1_de_std, 3, opt.std_lo, opt.std_hi);
        set(L::t1_conseq, 5, opt.consequent_lo, opt.consequent_hi);
    } else {
        set(L::it2_e_mean, 3, opt.mean_lo, opt.mean_hi);
        set(L::it2_e_std, 6, opt.std_lo, opt.std_hi);
        set(L::it2_de_mean, 3, opt.mean_lo, opt.mean_hi);
        set(L::it2_de_std, 6, opt.std_lo, opt.std_hi);
        set(L::it2_conseq, 5, opt.consequent_lo, opt.consequent_hi);
    }
    task.direction = core::Direction::maximize;

    auto shared = std::make_shared<FlcTaskOptions>(opt);
    task.objective = [kind, shared](std::span<const double> params) {
        const auto genome = fuzzy::enforce_flc_constraints(params, kind, shared->min_std);
        return itae_fitness(genome, shared->plants, shared->weights, shared->scaling);
    };
    return task;
}

}  // namespace mtga::tank
