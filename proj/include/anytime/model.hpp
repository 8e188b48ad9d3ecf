#pragma once
// Observation models, sample paths, and stopping rules.
//
// A SamplePath bundles the initial randomizer u with the observations
// x_1..x_T; the information available at time t is exactly the prefix
// (u, x_1..x_t).  Draw order is fixed: u first, then x_1, x_2, ...,
// so the x-sequence for a given (model, seed) never depends on whether
// the caller consumes u.

#include <anytime/rng.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace anytime {

// Distinguished "never happens" time.  Stop and rejection times live in
// {1..T} u {kNever}; kNever compares greater than every real time, which
// makes min/max composition of times work without special cases.
inline constexpr int kNever = std::numeric_limits<int>::max();

struct SamplePath {
    double u = 0.0;                // initial randomizer, uniform on [0,1)
    std::vector<double> xs;        // x_1..x_T stored at indices 0..T-1
    std::vector<double> sigma_sq;  // conditional variance used per step (Gaussian kinds), else empty

    int horizon() const { return static_cast<int>(xs.size()); }
};

// Predictable variance schedules: sigma_1^2 is the base value, and for
// t >= 2, sigma_t^2 = g(x_{t-1}) with g one of the rules below.  Results
// are floored at kVarianceFloor so log-density updates stay finite.
enum class VarianceRule {
    constant,  // sigma_t^2 = base
    abs,       // sigma_t^2 = |x_{t-1}|
    square,    // sigma_t^2 = x_{t-1}^2
    affine,    // sigma_t^2 = 1 + x_{t-1}/2
};

inline constexpr double kVarianceFloor = 1e-12;

struct NullModel {
    enum class Kind {
        gaussian_iid,                // X_t ~ N(m, sigma^2) iid
        gaussian_predictable_var,    // X_t | past ~ N(m, sigma_t^2), sigma_t^2 from rule
        two_point_symmetric,         // X_t in {m - eta, m + eta}, prob 1/2 each
        rademacher_shifted,          // X_t in {m - 1, m + 1}, prob 1/2 each
        symmetric_heavy_tail,        // X_t = m + Cauchy or m + Student-t(df)
        bernoulli_first_coordinate,  // X_1 ~ Bernoulli(q) in {0,1}; X_t = 0 for t >= 2
    };
    enum class Tail { cauchy, student_t };

    Kind kind = Kind::gaussian_iid;
    double m = 0.0;
    double sigma = 1.0;  // gaussian_iid scale; base sigma_1 for predictable-var
    VarianceRule rule = VarianceRule::constant;
    double eta = 1.0;    // two_point_symmetric offset
    Tail tail = Tail::cauchy;
    int df = 1;          // student-t degrees of freedom
    double q = 0.5;      // bernoulli_first_coordinate success probability

    static NullModel gaussian(double m, double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be > 0");
        NullModel mod;
        mod.kind = Kind::gaussian_iid;
        mod.m = m;
        mod.sigma = sigma;
        return mod;
    }

    static NullModel gaussian_predictable(double m, VarianceRule rule, double base_sigma = 1.0) {
        if (!(base_sigma > 0.0)) throw std::invalid_argument("gaussian_predictable: base sigma must be > 0");
        NullModel mod;
        mod.kind = Kind::gaussian_predictable_var;
        mod.m = m;
        mod.sigma = base_sigma;
        mod.rule = rule;
        return mod;
    }

    static NullModel two_point(double m, double eta) {
        if (!(eta > 0.0)) throw std::invalid_argument("two_point: eta must be > 0");
        NullModel mod;
        mod.kind = Kind::two_point_symmetric;
        mod.m = m;
        mod.eta = eta;
        return mod;
    }

    static NullModel rademacher(double m) {
        NullModel mod;
        mod.kind = Kind::rademacher_shifted;
        mod.m = m;
        return mod;
    }

    static NullModel heavy_tail(double m, Tail tail, int df = 1) {
        if (tail == Tail::student_t && df < 1)
            throw std::invalid_argument("heavy_tail: student-t needs df >= 1");
        NullModel mod;
        mod.kind = Kind::symmetric_heavy_tail;
        mod.m = m;
        mod.tail = tail;
        mod.df = df;
        return mod;
    }

    static NullModel bernoulli_first(double q) {
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("bernoulli_first: q must be in [0,1]");
        NullModel mod;
        mod.kind = Kind::bernoulli_first_coordinate;
        mod.q = q;
        return mod;
    }

    // True when (X_t - m) ~ -(X_t - m) conditionally on the past.
    bool is_symmetric() const { return kind != Kind::bernoulli_first_coordinate; }
};

// Streaming sampler.  Construction draws u; each next() draws one x_t.
class PathSampler {
public:
    PathSampler(const NullModel& model, std::uint64_t seed, std::uint64_t stream = 0)
        : model_(model), rng_(seed, stream) {
        u_ = rng_.uniform01();
    }

    double u() const { return u_; }
    int t() const { return t_; }

    double next() {
        ++t_;
        double x = 0.0;
        switch (model_.kind) {
            case NullModel::Kind::gaussian_iid:
                last_sigma_sq_ = model_.sigma * model_.sigma;
                x = model_.m + model_.sigma * rng_.normal();
                break;
            case NullModel::Kind::gaussian_predictable_var: {
                last_sigma_sq_ = (t_ == 1) ? model_.sigma * model_.sigma
                                           : schedule_variance(prev_x_);
                x = model_.m + std::sqrt(last_sigma_sq_) * rng_.normal();
                break;
            }
            case NullModel::Kind::two_point_symmetric:
                x = model_.m + (rng_.uniform01() < 0.5 ? -model_.eta : model_.eta);
                break;
            case NullModel::Kind::rademacher_shifted:
                x = model_.m + (rng_.uniform01() < 0.5 ? -1.0 : 1.0);
                break;
            case NullModel::Kind::symmetric_heavy_tail:
                x = model_.m + (model_.tail == NullModel::Tail::cauchy
                                    ? rng_.cauchy()
                                    : rng_.student_t(model_.df));
                break;
            case NullModel::Kind::bernoulli_first_coordinate:
                x = (t_ == 1) ? (rng_.uniform01() < model_.q ? 1.0 : 0.0) : 0.0;
                break;
        }
        prev_x_ = x;
        return x;
    }

    // Variance used by the most recent next(); meaningful for Gaussian kinds.
    double last_sigma_sq() const { return last_sigma_sq_; }

private:
    double schedule_variance(double prev) const {
        double v = 0.0;
        switch (model_.rule) {
            case VarianceRule::constant: v = model_.sigma * model_.sigma; break;
            case VarianceRule::abs:      v = std::abs(prev); break;
            case VarianceRule::square:   v = prev * prev; break;
            case VarianceRule::affine:   v = 1.0 + 0.5 * prev; break;
        }
        return v < kVarianceFloor ? kVarianceFloor : v;
    }

    NullModel model_;
    Rng rng_;
    double u_ = 0.0;
    double prev_x_ = 0.0;
    double last_sigma_sq_ = 0.0;
    int t_ = 0;
};

inline SamplePath sample_path(const NullModel& model, int horizon, std::uint64_t seed,
                              std::uint64_t stream = 0) {
    if (horizon < 1) throw std::invalid_argument("sample_path: horizon must be >= 1");
    PathSampler sampler(model, seed, stream);
    SamplePath path;
    path.u = sampler.u();
    path.xs.reserve(static_cast<std::size_t>(horizon));
    const bool gaussian = model.kind == NullModel::Kind::gaussian_iid ||
                          model.kind == NullModel::Kind::gaussian_predictable_var;
    if (gaussian) path.sigma_sq.reserve(static_cast<std::size_t>(horizon));
    for (int t = 1; t <= horizon; ++t) {
        path.xs.push_back(sampler.next());
        if (gaussian) path.sigma_sq.push_back(sampler.last_sigma_sq());
    }
    return path;
}

struct StoppingRule {
    enum class Kind { fixed_time, first_crossing, randomized_time, adversarial_max };
    enum class Direction { up, down };

    Kind kind = Kind::fixed_time;
    int fixed_t = 1;
    double threshold = 0.0;
    Direction direction = Direction::up;
    // randomized_time: probabilities over {1..T, never}; entry k (0-based)
    // is the mass of time k+1, and the final entry is the mass of "never".
    std::vector<double> pmf;

    static StoppingRule fixed(int t) {
        if (t < 1) throw std::invalid_argument("fixed stopping time must be >= 1");
        StoppingRule r;
        r.kind = Kind::fixed_time;
        r.fixed_t = t;
        return r;
    }

    static StoppingRule crossing(double threshold, Direction dir = Direction::up) {
        StoppingRule r;
        r.kind = Kind::first_crossing;
        r.threshold = threshold;
        r.direction = dir;
        return r;
    }

    static StoppingRule randomized(std::vector<double> pmf) {
        if (pmf.size() < 2) throw std::invalid_argument("randomized rule needs mass for time 1 and for never");
        double total = 0.0;
        for (double p : pmf) {
            if (!(p >= 0.0)) throw std::invalid_argument("randomized rule: negative mass");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("randomized rule: masses must sum to 1");
        StoppingRule r;
        r.kind = Kind::randomized_time;
        r.pmf = std::move(pmf);
        return r;
    }

    static StoppingRule adversarial() {
        StoppingRule r;
        r.kind = Kind::adversarial_max;
        return r;
    }

    // AdversarialMax peeks at the whole trajectory; it is a random time but
    // not a stopping time, and callers requiring one must reject it.
    bool is_stopping_time() const { return kind != Kind::adversarial_max; }
};

// Returns the realized time in {1..T} u {kNever}.  All stopping kinds use
// only the prefix (u, monitored_1..t) to decide to stop at t; adversarial_max
// picks the argmax of the whole monitored sequence (earliest on ties).
inline int evaluate_stopping(const StoppingRule& rule, const SamplePath& path,
                             const std::vector<double>& monitored) {
    const int T = static_cast<int>(monitored.size());
    switch (rule.kind) {
        case StoppingRule::Kind::fixed_time:
            return rule.fixed_t <= T ? rule.fixed_t : kNever;
        case StoppingRule::Kind::first_crossing:
            for (int t = 1; t <= T; ++t) {
                double v = monitored[static_cast<std::size_t>(t - 1)];
                if (rule.direction == StoppingRule::Direction::up ? v >= rule.threshold
                                                                  : v <= rule.threshold)
                    return t;
            }
            return kNever;
        case StoppingRule::Kind::randomized_time: {
            if (static_cast<int>(rule.pmf.size()) != T + 1)
                throw std::invalid_argument("randomized rule: pmf must cover {1..T, never}");
            double cum = 0.0;
            for (int t = 1; t <= T; ++t) {
                cum += rule.pmf[static_cast<std::size_t>(t - 1)];
                if (path.u < cum) return t;
            }
            return kNever;
        }
        case StoppingRule::Kind::adversarial_max: {
            if (T == 0) return kNever;
            int best = 1;
            for (int t = 2; t <= T; ++t)
                if (monitored[static_cast<std::size_t>(t - 1)] >
                    monitored[static_cast<std::size_t>(best - 1)])
                    best = t;
            return best;
        }
    }
    return kNever;
}

}  // namespace anytime
