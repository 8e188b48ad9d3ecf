#pragma once
// Inference instruments and the reductions between them.
//
// Representation conventions used throughout:
//   * an e-path / p-path is a vector of per-time values, index k holds time t = k+1;
//   * a test is its rejection time, an int in {1..T} u {kNever}, absorbing by
//     construction (once rejected, rejected forever);
//   * threshold comparisons are inclusive: a test from an e-path rejects when
//     e_t >= 1/alpha, a test from a p-path when p_t <= alpha.

#include <anytime/calibrate.hpp>
#include <anytime/model.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace anytime {

// p_t = 1 ^ inf_{s<=t} 1/e_s.  An e-value of 0 contributes 1/0 = +inf and
// leaves the running value unchanged.  Output is nonincreasing and in [0,1].
inline std::vector<double> e_to_p(const std::vector<double>& e_path) {
    std::vector<double> p;
    p.reserve(e_path.size());
    double running = std::numeric_limits<double>::infinity();
    for (double e : e_path) {
        if (!(e >= 0.0)) throw std::invalid_argument("e_to_p: e-values must be >= 0");
        double inv = e > 0.0 ? 1.0 / e : std::numeric_limits<double>::infinity();
        running = std::min(running, inv);
        p.push_back(std::min(1.0, running));
    }
    return p;
}

inline void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
}

// First t with e_t >= 1/alpha, else kNever.
inline int e_to_test(const std::vector<double>& e_path, double alpha) {
    require_alpha(alpha);
    const double threshold = 1.0 / alpha;
    for (std::size_t k = 0; k < e_path.size(); ++k) {
        if (!(e_path[k] >= 0.0)) throw std::invalid_argument("e_to_test: e-values must be >= 0");
        if (e_path[k] >= threshold) return static_cast<int>(k) + 1;
    }
    return kNever;
}

// First t with p_t <= alpha, else kNever.
inline int p_to_test(const std::vector<double>& p_path, double alpha) {
    require_alpha(alpha);
    for (std::size_t k = 0; k < p_path.size(); ++k)
        if (p_path[k] <= alpha) return static_cast<int>(k) + 1;
    return kNever;
}

// p_t = smallest grid alpha whose test has rejected by time t, else 1.
// The grid must be strictly increasing in (0,1] and the rejection times
// nonincreasing in alpha (a larger alpha can only reject earlier).
inline std::vector<double> test_family_to_p(const std::vector<double>& alpha_grid,
                                            const std::vector<int>& rejection_times,
                                            int horizon) {
    if (alpha_grid.size() != rejection_times.size())
        throw std::invalid_argument("test_family_to_p: grid/test size mismatch");
    if (alpha_grid.empty()) throw std::invalid_argument("test_family_to_p: empty grid");
    if (horizon < 1) throw std::invalid_argument("test_family_to_p: horizon must be >= 1");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        require_alpha(alpha_grid[i]);
        if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))
            throw std::invalid_argument("test_family_to_p: grid must be strictly increasing");
        if (i > 0 && rejection_times[i] > rejection_times[i - 1])
            throw std::invalid_argument("test_family_to_p: rejection times not nested in alpha");
    }
    std::vector<double> p(static_cast<std::size_t>(horizon), 1.0);
    for (int t = 1; t <= horizon; ++t) {
        double best = 1.0;
        for (std::size_t i = 0; i < alpha_grid.size(); ++i)
            if (rejection_times[i] <= t) {
                best = alpha_grid[i];  // grid increasing: first hit is the smallest
                break;
            }
        p[static_cast<std::size_t>(t - 1)] = best;
    }
    return p;
}

// e_t = f(p_t) for a calibrator f (nonincreasing, integral 1 over [0,1]).
inline std::vector<double> p_to_e_calibrated(const std::vector<double>& p_path,
                                             const Calibrator& f) {
    if (std::abs(f.integral() - 1.0) > 1e-6)
        throw std::invalid_argument("p_to_e_calibrated: calibrator must integrate to 1");
    std::vector<double> e;
    e.reserve(p_path.size());
    for (double p : p_path) e.push_back(f(p));
    return e;
}

// A confidence sequence over an explicit grid of candidate functional values.
// Each grid point carries the rejection time of its level-alpha test; the
// value is in the set at time t exactly while its test has not rejected.
// Tests are absorbing, so the masks are automatically nonincreasing in t
// (the running intersection is built in).
struct ConfidenceSequence {
    std::vector<double> grid;
    std::vector<int> exclusion_times;  // per grid point, in {1..T} u {kNever}
    double alpha = 0.05;
    int horizon = 0;
    bool running_intersection = true;

    bool included(int t, std::size_t i) const { return exclusion_times[i] > t; }

    std::vector<double> values_at(int t) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (included(t, i)) out.push_back(grid[i]);
        return out;
    }
};

inline ConfidenceSequence invert_tests_to_cs(const std::vector<double>& grid,
                                             const std::vector<int>& rejection_times,
                                             double alpha, int horizon) {
    require_alpha(alpha);
    if (grid.size() != rejection_times.size())
        throw std::invalid_argument("invert_tests_to_cs: grid/test size mismatch");
    if (grid.empty()) throw std::invalid_argument("invert_tests_to_cs: empty grid");
    ConfidenceSequence cs;
    cs.grid = grid;
    cs.exclusion_times = rejection_times;
    cs.alpha = alpha;
    cs.horizon = horizon;
    return cs;
}

// First t at which the set excludes every null value, else kNever.
inline int cs_to_test(const ConfidenceSequence& cs, const std::vector<double>& null_values) {
    if (null_values.empty()) throw std::invalid_argument("cs_to_test: empty null set");
    int when = 0;
    for (double v : null_values) {
        auto it = std::find(cs.grid.begin(), cs.grid.end(), v);
        if (it == cs.grid.end()) throw std::invalid_argument("cs_to_test: null value not on grid");
        when = std::max(when, cs.exclusion_times[static_cast<std::size_t>(it - cs.grid.begin())]);
    }
    return when <= cs.horizon ? when : kNever;
}

namespace detail {
inline void require_same_shape(const std::vector<std::vector<double>>& paths, const char* op) {
    if (paths.empty()) throw std::invalid_argument(std::string(op) + ": empty family");
    for (const auto& p : paths)
        if (p.size() != paths.front().size())
            throw std::invalid_argument(std::string(op) + ": member paths differ in length");
}
}  // namespace detail

// Composite p over a finite family: elementwise max across members.
inline std::vector<double> aggregate_composite_p(const std::vector<std::vector<double>>& member_p) {
    detail::require_same_shape(member_p, "aggregate_composite_p");
    std::vector<double> out = member_p.front();
    for (std::size_t m = 1; m < member_p.size(); ++m)
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = std::max(out[k], member_p[m][k]);
    return out;
}

// Composite e over a finite family: elementwise min across members.
inline std::vector<double> aggregate_composite_e(const std::vector<std::vector<double>>& member_e) {
    detail::require_same_shape(member_e, "aggregate_composite_e");
    std::vector<double> out = member_e.front();
    for (std::size_t m = 1; m < member_e.size(); ++m)
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = std::min(out[k], member_e[m][k]);
    return out;
}

// Composite test: every member must reject, so the composite rejection time
// is the max of the member times (kNever propagates on its own).
inline int aggregate_composite_test(const std::vector<int>& member_times) {
    if (member_times.empty()) throw std::invalid_argument("aggregate_composite_test: empty family");
    return *std::max_element(member_times.begin(), member_times.end());
}

struct MixtureCheckReport {
    double estimate = 0.0;
    double se = 0.0;
    double bound = 0.0;
    int n_paths = 0;
    bool pass = false;
};

// Monte Carlo check that a per-path statistic keeps its mean within `bound`
// under a convex mixture of models.  Each path first draws its member from
// `weights` (stream 0 of the seed), then samples that member's path on its
// own stream, so member choice and observations are independent.
// pass <=> mean <= bound + 3 standard errors.
template <class PathStat>
MixtureCheckReport convex_mixture_check(const std::vector<NullModel>& members,
                                        const std::vector<double>& weights, int horizon,
                                        int n_paths, double bound, std::uint64_t seed,
                                        PathStat&& stat) {
    if (members.empty()) throw std::invalid_argument("convex_mixture_check: empty family");
    if (members.size() != weights.size())
        throw std::invalid_argument("convex_mixture_check: members/weights size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("convex_mixture_check: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("convex_mixture_check: weights must sum to 1");
    if (n_paths < 2) throw std::invalid_argument("convex_mixture_check: need at least 2 paths");

    Rng selector(seed, 0);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n_paths; ++i) {
        double u = selector.uniform01();
        std::size_t member = 0;
        double cum = 0.0;
        for (std::size_t m = 0; m < weights.size(); ++m) {
            cum += weights[m];
            if (u < cum) {
                member = m;
                break;
            }
        }
        auto path = sample_path(members[member], horizon, seed, static_cast<std::uint64_t>(i) + 1);
        double v = stat(path);
        sum += v;
        sumsq += v * v;
    }
    MixtureCheckReport rep;
    rep.n_paths = n_paths;
    rep.bound = bound;
    rep.estimate = sum / n_paths;
    double var = std::max(0.0, sumsq / n_paths - rep.estimate * rep.estimate);
    rep.se = std::sqrt(var / n_paths);
    rep.pass = rep.estimate <= bound + 3.0 * rep.se;
    return rep;
}

}  // namespace anytime
