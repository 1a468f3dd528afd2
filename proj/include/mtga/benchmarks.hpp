#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtga/core.hpp"

namespace mtga::bench {

using core::ConfigError;
using core::TaskDefinition;

class LoadError : public std::runtime_error {
  public:
    LoadError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

enum class FunctionKind { sphere, ackley, rastrigin, rosenbrock, griewank, weierstrass, schwefel };

inline const char* kind_name(FunctionKind k) {
    switch (k) {
        case FunctionKind::sphere: return "sphere";
        case FunctionKind::ackley: return "ackley";
        case FunctionKind::rastrigin: return "rastrigin";
        case FunctionKind::rosenbrock: return "rosenbrock";
        case FunctionKind::griewank: return "griewank";
        case FunctionKind::weierstrass: return "weierstrass";
        case FunctionKind::schwefel: return "schwefel";
    }
    return "?";
}

inline FunctionKind kind_from_name(const std::string& name) {
    for (FunctionKind k : {FunctionKind::sphere, FunctionKind::ackley, FunctionKind::rastrigin,
                           FunctionKind::rosenbrock, FunctionKind::griewank,
                           FunctionKind::weierstrass, FunctionKind::schwefel})
        if (name == kind_name(k)) return k;
    throw ConfigError("unknown benchmark function kind '" + name + "'");
}

namespace detail {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Every kind is written so its minimum value is 0 at z = 0; shift/rotation
// composition then places the optimum of the composed task exactly at x = o.

inline double sphere(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

inline double ackley(std::span<const double> z) {
    const double d = static_cast<double>(z.size());
    double sq = 0.0, cs = 0.0;
    for (double v : z) {
        sq += v * v;
        cs += std::cos(two_pi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + std::numbers::e;
}

inline double rastrigin(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v - 10.0 * std::cos(two_pi * v) + 10.0;
    return s;
}

inline double rosenbrock(std::span<const double> z) {
    // optimum moved to z = 0 via the usual +1 inner shift
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i] + 1.0;
        const double b = z[i + 1] + 1.0;
        const double t = a * a - b;
        s += 100.0 * t * t + (a - 1.0) * (a - 1.0);
    }
    return s;
}

inline double griewank(std::span<const double> z) {
    double sum = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        sum += z[i] * z[i];
        prod *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sum / 4000.0 - prod;
}

struct WeierstrassTables {
    static constexpr int k_max = 20;
    double a_pow[k_max + 1];
    double b_pow[k_max + 1];
    double bias_per_dim;

    WeierstrassTables() {
        constexpr double a = 0.5, b = 3.0;
        bias_per_dim = 0.0;
        for (int k = 0; k <= k_max; ++k) {
            a_pow[k] = std::pow(a, k);
            b_pow[k] = std::pow(b, k);
            bias_per_dim += a_pow[k] * std::cos(two_pi * b_pow[k] * 0.5);
        }
    }
};

inline double weierstrass(std::span<const double> z) {
    static const WeierstrassTables t;
    double s = 0.0;
    for (double v : z) {
        for (int k = 0; k <= WeierstrassTables::k_max; ++k)
            s += t.a_pow[k] * std::cos(two_pi * t.b_pow[k] * (v + 0.5));
        s -= t.bias_per_dim;
    }
    return s;
}

inline double schwefel_offset() {
    static const double c = 420.9687462275036 * std::sin(std::sqrt(420.9687462275036));
    return c;
}

inline double schwefel(std::span<const double> z) {
    // inner variable y = z + 420.9687...; values beyond ±500 are folded back
    // with a quadratic penalty so the in-range minimum stays at y-optimum
    const double c = schwefel_offset();
    const double d = static_cast<double>(z.size());
    double s = 0.0;
    for (double v : z) {
        const double y = v + 420.9687462275036;
        if (y > 500.0) {
            const double w = 500.0 - std::fmod(y, 500.0);
            s -= w * std::sin(std::sqrt(std::fabs(w)));
            const double t = (y - 500.0) / 100.0;
            s += t * t / d;
        } else if (y < -500.0) {
            const double w = -500.0 + std::fmod(std::fabs(y), 500.0);
            s -= w * std::sin(std::sqrt(std::fabs(w)));
            const double t = (y + 500.0) / 100.0;
            s += t * t / d;
        } else {
            s -= y * std::sin(std::sqrt(std::fabs(y)));
        }
        s += c;
    }
    return s;
}

}  // namespace detail

inline double eval_base(FunctionKind kind, std::span<const double> z) {
    switch (kind) {
        case FunctionKind::sphere: return detail::sphere(z);
        case FunctionKind::ackley: return detail::ackley(z);
        case FunctionKind::rastrigin: return detail::rastrigin(z);
        case FunctionKind::rosenbrock: return detail::rosenbrock(z);
        case FunctionKind::griewank: return detail::griewank(z);
        case FunctionKind::weierstrass: return detail::weierstrass(z);
        case FunctionKind::schwefel: return detail::schwefel(z);
    }
    throw core::InternalError("eval_base: bad kind");
}

/// Conventional search range for each function kind.
inline std::pair<double, double> default_range(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::sphere: return {-100.0, 100.0};
        case FunctionKind::griewank: return {-100.0, 100.0};
        case FunctionKind::schwefel: return {-500.0, 500.0};
        case FunctionKind::weierstrass: return {-0.5, 0.5};
        default: return {-50.0, 50.0};
    }
}

/// f(x) = base(M (x - o)) with orthogonal M (identity when `rotation` is
/// empty). The global minimum value is 0 at x = o.
struct ComposedTask {
    FunctionKind kind = FunctionKind::sphere;
    std::size_t dim = 0;
    double range_lo = -1.0;
    double range_hi = 1.0;
    std::vector<double> shift;              // length dim
    std::vector<double> rotation;           // row-major dim x dim, or empty
    std::string label;

    bool has_rotation() const { return !rotation.empty(); }

    void validate() const {
        if (dim == 0) throw ConfigError("composed task: dim must be positive");
        if (shift.size() != dim) throw ConfigError("composed task: shift length mismatch");
        if (!(range_lo < range_hi)) throw ConfigError("composed task: empty search range");
        if (has_rotation()) {
            if (rotation.size() != dim * dim)
                throw ConfigError("composed task: rotation must be dim x dim");
            // || M M^T - I ||_inf
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t c = 0; c < dim; ++c) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < dim; ++k)
                        dot += rotation[r * dim + k] * rotation[c * dim + k];
                    const double want = r == c ? 1.0 : 0.0;
                    if (std::fabs(dot - want) >= 1e-9)
                        throw ConfigError("composed task: rotation matrix is not orthogonal");
                }
        }
    }

    double operator()(std::span<const double> x) const {
        if (x.size() != dim) throw ConfigError("composed task: point dimension mismatch");
        std::vector<double> z(dim);
        if (has_rotation()) {
            std::vector<double> t(dim);
            for (std::size_t i = 0; i < dim; ++i) t[i] = x[i] - shift[i];
            for (std::size_t r = 0; r < dim; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < dim; ++c) acc += rotation[r * dim + c] * t[c];
                z[r] = acc;
            }
        } else {
            for (std::size_t i = 0; i < dim; ++i) z[i] = x[i] - shift[i];
        }
        return eval_base(kind, z);
    }
};

inline double eval_function(const ComposedTask& f, std::span<const double> x) { return f(x); }

/// Seeded shift uniform in the middle half of the range, one value per
/// coordinate. Used when no official data file is supplied.
inline std::vector<double> synthetic_shift(std::size_t dim, double lo, double hi,
                                           core::RngStream& rng) {
    const double quarter = 0.25 * (hi - lo);
    std::vector<double> o(dim);
    for (double& v : o) v = rng.uniform(lo + quarter, hi - quarter);
    return o;
}

inline TaskDefinition make_task(ComposedTask composed) {
    composed.validate();
    TaskDefinition t;
    t.id = composed.label.empty()
               ? std::string(kind_name(composed.kind)) + "-" + std::to_string(composed.dim)
               : composed.label;
    t.dim = composed.dim;
    t.lower.assign(composed.dim, composed.range_lo);
    t.upper.assign(composed.dim, composed.range_hi);
    auto fn = std::make_shared<ComposedTask>(std::move(composed));
    t.objective = [fn](std::span<const double> x) { return (*fn)(x); };
    t.direction = core::Direction::minimize;
    return t;
}

struct PairEntry {
    FunctionKind kind1, kind2;
    std::size_t dim1, dim2;
    const char* similarity;  // documentation only
};

/// Registry of the nine two-task benchmark pairs, organized as
/// {complete, partial, no} intersection x {high, medium, low} similarity.
/// Shift data is synthetic (seeded) unless loaded from a file.
inline const std::vector<std::pair<std::string, PairEntry>>& registry() {
    using K = FunctionKind;
    static const std::vector<std::pair<std::string, PairEntry>> entries = {
        {"B1", {K::griewank, K::rastrigin, 50, 50, "complete intersection, high similarity"}},
        {"B2", {K::ackley, K::rastrigin, 50, 50, "complete intersection, medium similarity"}},
        {"B3", {K::ackley, K::schwefel, 50, 50, "complete intersection, low similarity"}},
        {"B4", {K::rastrigin, K::sphere, 50, 50, "partial intersection, high similarity"}},
        {"B5", {K::ackley, K::rosenbrock, 50, 50, "partial intersection, medium similarity"}},
        {"B6", {K::ackley, K::weierstrass, 50, 25, "partial intersection, low similarity"}},
        {"B7", {K::rosenbrock, K::rastrigin, 50, 50, "no intersection, high similarity"}},
        {"B8", {K::griewank, K::weierstrass, 50, 50, "no intersection, medium similarity"}},
        {"B9", {K::rastrigin, K::schwefel, 50, 50, "no intersection, low similarity"}},
    };
    return entries;
}

inline ComposedTask make_registry_task(FunctionKind kind, std::size_t dim, const std::string& label,
                                       core::RngStream& rng) {
    ComposedTask c;
    c.kind = kind;
    c.dim = dim;
    auto [lo, hi] = default_range(kind);
    c.range_lo = lo;
    c.range_hi = hi;
    c.shift = synthetic_shift(dim, lo, hi, rng);
    c.label = label;
    return c;
}

/// Two tasks for a registry id ("B1".."B9"); shift vectors are generated
/// from shift_seed and must be recorded in the run manifest.
inline std::pair<ComposedTask, ComposedTask> registry_pair(const std::string& id,
                                                           std::uint64_t shift_seed) {
    for (const auto& [name, e] : registry()) {
        if (name != id) continue;
        core::RngStream rng(shift_seed, 0x5f0c);
        ComposedTask t1 = make_registry_task(e.kind1, e.dim1, id + "-T1", rng);
        ComposedTask t2 = make_registry_task(e.kind2, e.dim2, id + "-T2", rng);
        return {std::move(t1), std::move(t2)};
    }
    throw ConfigError("unknown benchmark id '" + id + "'");
}

namespace detail {

inline std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline double parse_number(const std::string& tok, const std::string& path, std::size_t line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw LoadError(path, line, "expected a number, got '" + tok + "'");
    }
    if (pos != tok.size()) throw LoadError(path, line, "trailing characters in number '" + tok + "'");
    return v;
}

}  // namespace detail

/// Plain-text task pair file: two blocks, each
///   dim range_lo range_hi kind
///   <dim shift values on one line>
///   [dim rows of the rotation matrix]
/// Blank lines and lines starting with '#' are skipped.
inline std::pair<ComposedTask, ComposedTask> load_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open benchmark file '" + path + "'");

    std::vector<std::string> lines;
    std::vector<std::size_t> line_no;
    std::string raw;
    for (std::size_t n = 1; std::getline(in, raw); ++n) {
        const auto toks = detail::tokens_of(raw);
        if (toks.empty() || toks.front().front() == '#') continue;
        lines.push_back(raw);
        line_no.push_back(n);
    }

    std::size_t cursor = 0;
    auto next_line = [&](const char* what) -> std::pair<std::string, std::size_t> {
        if (cursor >= lines.size())
            throw LoadError(path, line_no.empty() ? 0 : line_no.back(),
                            std::string("unexpected end of file, expected ") + what);
        auto r = std::make_pair(lines[cursor], line_no[cursor]);
        ++cursor;
        return r;
    };

    auto read_block = [&](int which) -> ComposedTask {
        auto [header, hline] = next_line("task header");
        const auto h = detail::tokens_of(header);
        if (h.size() != 4)
            throw LoadError(path, hline, "task header must be 'dim range_lo range_hi kind'");
        ComposedTask c;
        const double dim_v = detail::parse_number(h[0], path, hline);
        if (dim_v < 1 || dim_v != std::floor(dim_v))
            throw LoadError(path, hline, "dim must be a positive integer");
        c.dim = static_cast<std::size_t>(dim_v);
        c.range_lo = detail::parse_number(h[1], path, hline);
        c.range_hi = detail::parse_number(h[2], path, hline);
        try {
            c.kind = kind_from_name(h[3]);
        } catch (const ConfigError& e) {
            throw LoadError(path, hline, e.what());
        }
        c.label = "file-T" + std::to_string(which);

        auto [shift_line, sline] = next_line("shift vector");
        const auto s = detail::tokens_of(shift_line);
        if (s.size() != c.dim)
            throw LoadError(path, sline, "shift vector must have exactly dim values");
        for (const auto& tok : s) c.shift.push_back(detail::parse_number(tok, path, sline));

        // optional rotation: next line is a rotation row iff it starts numerically
        // and is not a 4-token header whose last token is a kind name
        if (cursor < lines.size()) {
            const auto peek = detail::tokens_of(lines[cursor]);
            const bool looks_like_header =
                peek.size() == 4 && !std::isdigit(static_cast<unsigned char>(peek[3].front())) &&
                peek[3].front() != '-' && peek[3].front() != '+' && peek[3].front() != '.';
            if (!looks_like_header) {
                for (std::size_t r = 0; r < c.dim; ++r) {
                    auto [row_line, rline] = next_line("rotation row");
                    const auto row = detail::tokens_of(row_line);
                    if (row.size() != c.dim)
                        throw LoadError(path, rline, "rotation row must have exactly dim values");
                    for (const auto& tok : row)
                        c.rotation.push_back(detail::parse_number(tok, path, rline));
                }
            }
        }
        try {
            c.validate();
        } catch (const ConfigError& e) {
            throw LoadError(path, hline, e.what());
        }
        return c;
    };

    ComposedTask t1 = read_block(1);
    ComposedTask t2 = read_block(2);
    if (cursor != lines.size())
        throw LoadError(path, line_no[cursor], "trailing content after two task blocks");
    return {std::move(t1), std::move(t2)};
}

/// Resolves a registry id or a data file path into two TaskDefinitions with
/// validated landscapes (objective at the declared optimum is 0).
inline std::pair<TaskDefinition, TaskDefinition> load_task_pair(const std::string& spec,
                                                                std::uint64_t shift_seed = 1) {
    std::pair<ComposedTask, ComposedTask> pair;
    const bool is_registry = [&] {
        for (const auto& [name, e] : registry())
            if (name == spec) return true;
        return false;
    }();
    pair = is_registry ? registry_pair(spec, shift_seed) : load_pair_file(spec);
    for (const ComposedTask* c : {&pair.first, &pair.second}) {
        const double at_opt = (*c)(c->shift);
        if (std::fabs(at_opt) >= 1e-9)
            throw ConfigError("task '" + c->label + "': objective at declared optimum is " +
                              std::to_string(at_opt) + ", expected 0");
    }
    return {make_task(std::move(pair.first)), make_task(std::move(pair.second))};
}

}  // namespace mtga::bench
