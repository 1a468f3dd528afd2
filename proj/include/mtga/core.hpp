#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtga::core {

/// Raised when a user-supplied configuration is inconsistent (bad bounds,
/// mismatched dimensions in inputs, invalid solver parameters).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an internal precondition is violated (a bug, not user input).
class InternalError : public std::logic_error {
  public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

enum class Direction { minimize, maximize };

enum class GeneKind { numeric, categorical };

/// Deterministic random stream. A (seed, stream) pair fully determines the
/// sequence; distinct streams derived from the same seed are independent.
/// All uniform draws are hand-rolled from the raw engine output so that runs
/// are byte-reproducible across standard library implementations.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
        // splitmix64 expansion of the (seed, stream) pair into engine state
        state_[0] = splitmix64(x);
        state_[1] = splitmix64(x);
        state_[2] = splitmix64(x);
        state_[3] = splitmix64(x);
    }

    std::uint64_t next_u64() {
        // xoshiro256** (public-domain reference construction)
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Random permutation of [0, n).
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform_index(i)]);
        return p;
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& s) {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
};

/// A candidate solution in normalized [0,1] gene space. `fitness` stores the
/// internally minimized cost: the task objective for minimization tasks, its
/// negation for maximization tasks (see TaskDefinition::direction).
struct Chromosome {
    std::vector<double> genes;
    std::optional<double> fitness;
    bool feasible = true;

    bool evaluated() const { return fitness.has_value(); }
    double cost() const {
        if (!fitness) throw InternalError("chromosome cost queried before evaluation");
        return *fitness;
    }
};

/// One optimization task: objective in task units over a box search space.
/// Genes are kept normalized to [0,1] per coordinate; decoding to task space
/// happens only at fitness evaluation, so tasks with different variable
/// ranges stay commensurable during chromosome transfer.
struct TaskDefinition {
    std::string id;
    std::size_t dim = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::function<double(std::span<const double>)> objective;
    Direction direction = Direction::minimize;
    std::vector<GeneKind> gene_kind;  // empty means all numeric

    void validate() const {
        if (dim == 0) throw ConfigError("task '" + id + "': dim must be positive");
        if (lower.size() != dim || upper.size() != dim)
            throw ConfigError("task '" + id + "': bound vectors must have length dim");
        if (!gene_kind.empty() && gene_kind.size() != dim)
            throw ConfigError("task '" + id + "': gene_kind must have length dim");
        for (std::size_t i = 0; i < dim; ++i)
            if (!(lower[i] < upper[i]))
                throw ConfigError("task '" + id + "': lower[" + std::to_string(i) +
                                  "] must be < upper[" + std::to_string(i) + "]");
        if (!objective) throw ConfigError("task '" + id + "': objective not set");
    }

    GeneKind kind(std::size_t i) const {
        return gene_kind.empty() ? GeneKind::numeric : gene_kind[i];
    }

    /// Objective in task units converted to the internal minimized cost.
    double cost_of(double objective_value) const {
        return direction == Direction::maximize ? -objective_value : objective_value;
    }
    /// Inverse of cost_of.
    double objective_of(double cost_value) const {
        return direction == Direction::maximize ? -cost_value : cost_value;
    }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline void clamp01(std::vector<double>& genes) {
    for (double& g : genes) g = clamp01(g);
}

/// point[i] = lower[i] + genes[i] * (upper[i] - lower[i])
inline std::vector<double> decode(const Chromosome& c, const TaskDefinition& task) {
    if (c.genes.size() != task.dim)
        throw ConfigError("decode: chromosome has " + std::to_string(c.genes.size()) +
                          " genes, task '" + task.id + "' expects " + std::to_string(task.dim));
    std::vector<double> point(task.dim);
    for (std::size_t i = 0; i < task.dim; ++i)
        point[i] = task.lower[i] + c.genes[i] * (task.upper[i] - task.lower[i]);
    return point;
}

/// Inverse of decode; genes are clamped to [0,1] for out-of-range points.
inline Chromosome encode(std::span<const double> point, const TaskDefinition& task) {
    if (point.size() != task.dim)
        throw ConfigError("encode: point has " + std::to_string(point.size()) +
                          " coordinates, task '" + task.id + "' expects " +
                          std::to_string(task.dim));
    Chromosome c;
    c.genes.resize(task.dim);
    for (std::size_t i = 0; i < task.dim; ++i)
        c.genes[i] = clamp01((point[i] - task.lower[i]) / (task.upper[i] - task.lower[i]));
    return c;
}

/// Evaluates the task objective on the decoded genes and stores the cost.
/// Returns the objective value in task units.
inline double evaluate(Chromosome& c, const TaskDefinition& task) {
    const auto point = decode(c, task);
    const double obj = task.objective(point);
    c.fitness = task.cost_of(obj);
    return obj;
}

/// Population of one task. Members are kept best-to-worst between
/// generations (best = lowest cost).
struct Population {
    std::string task_id;
    std::vector<Chromosome> members;
    std::size_t capacity = 0;

    std::size_t size() const { return members.size(); }
    const Chromosome& best() const {
        if (members.empty()) throw InternalError("best() on empty population");
        return members.front();
    }
};

/// Stable sort best-to-worst by cost; ties keep insertion order.
inline void sort_population(Population& pop) {
    for (const auto& m : pop.members)
        if (!m.evaluated())
            throw InternalError("sort_population: member without fitness");
    std::stable_sort(pop.members.begin(), pop.members.end(),
                     [](const Chromosome& a, const Chromosome& b) { return a.cost() < b.cost(); });
}

/// Uniform random population in [0,1]^dim, unevaluated.
inline Population random_population(const TaskDefinition& task, std::size_t n, RngStream& rng) {
    Population pop;
    pop.task_id = task.id;
    pop.capacity = n;
    pop.members.resize(n);
    for (auto& c : pop.members) {
        c.genes.resize(task.dim);
        for (double& g : c.genes) g = rng.uniform();
    }
    return pop;
}

}  // namespace mtga::core
