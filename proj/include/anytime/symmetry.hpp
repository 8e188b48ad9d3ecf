#pragma once
// Inference under conditional symmetry about a center m: the exponential
// supermartingale, its mirrored martingale upgrade, odd-increment factor
// families, the sign-walk test, the exact dyadic p-value, and the
// center-of-symmetry confidence sequence.
//
// A nonnegative factor f makes prod f(x_s - m) a test martingale for the
// symmetric family exactly when f - 1 is odd, i.e. f(y) + f(-y) = 2; with
// "<= 2" instead the product is only a supermartingale.  Mirroring lifts the
// latter to the former without lowering any factor value.

#include <anytime/instruments.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace anytime {

inline double exp_nsm_factor(double y) { return std::exp(y - 0.5 * y * y); }

// Mirrored version: equal to exp_nsm_factor on y >= 0, strictly above it on
// y < 0, and f(y) + f(-y) = 2 everywhere.  Bounded inside (0, 2).
inline double mirrored_exp_factor(double y) {
    return y >= 0.0 ? exp_nsm_factor(y) : 2.0 - exp_nsm_factor(-y);
}

// Running product of exp_nsm_factor(x - m), kept in log space.
struct ExpNsm {
    double m = 0.0;

    ExpNsm() = default;
    explicit ExpNsm(double m_) : m(m_) {}

    void step(double x) {
        double y = x - m;
        log_value_ += y - 0.5 * y * y;
    }
    double log_value() const { return log_value_; }
    double value() const { return std::exp(log_value_); }

private:
    double log_value_ = 0.0;
};

// Mirror a factor g into f(y) = g(y) if g(y) >= g(-y), else 2 - g(-y).
// The supermartingale condition g(y) + g(-y) <= 2 is probed on a symmetric
// grid first; a violation is reported with the witnessing point.
template <class F>
auto mirror(F g, double half_width = 8.0, int points = 1001) {
    if (points < 2 || !(half_width > 0.0)) throw std::invalid_argument("mirror: bad probe grid");
    for (int i = 0; i < points; ++i) {
        double y = -half_width + 2.0 * half_width * i / (points - 1);
        double s = g(y) + g(-y);
        if (!(s <= 2.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "mirror: g(y) + g(-y) = " << s << " > 2 at y = " << y;
            throw std::invalid_argument(msg.str());
        }
    }
    return [g](double y) {
        double a = g(y), b = g(-y);
        return a >= b ? a : 2.0 - b;
    };
}

// Factor families f(x) = 1 + w(h(x - m)) with h and w odd, so that f - 1 is
// odd by composition.  Whether f is also nonnegative depends on the reach of
// w ο h over the observation range; validate() probes a grid for both
// requirements and is the designated enforcement point.
struct OddFactor {
    enum class H { identity, cube, sinh, clipped };
    enum class Wrapper { arctan, sine, mirrored_exp, table };

    H h = H::identity;
    Wrapper wrapper = Wrapper::arctan;
    double m = 0.0;
    // table wrapper: odd step function, value values[i] on (knots[i-1], knots[i]]
    // for y > 0 (values.back() beyond the last knot), mirrored for y < 0.
    std::vector<double> knots;
    std::vector<double> values;

    static OddFactor arctan(H h = H::identity, double m = 0.0) { return {h, Wrapper::arctan, m, {}, {}}; }
    static OddFactor sine(H h = H::identity, double m = 0.0) { return {h, Wrapper::sine, m, {}, {}}; }
    static OddFactor mirrored_exp(H h = H::identity, double m = 0.0) {
        return {h, Wrapper::mirrored_exp, m, {}, {}};
    }
    static OddFactor step_table(std::vector<double> knots, std::vector<double> values,
                                H h = H::identity, double m = 0.0) {
        if (values.size() != knots.size() + 1)
            throw std::invalid_argument("step_table: need one more value than knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!(knots[i] > 0.0)) throw std::invalid_argument("step_table: knots must be positive");
            if (i > 0 && !(knots[i] > knots[i - 1]))
                throw std::invalid_argument("step_table: knots must be strictly increasing");
        }
        for (double v : values)
            if (!(v >= -1.0 && v <= 1.0))
                throw std::invalid_argument("step_table: values must lie in [-1, 1]");
        return {h, Wrapper::table, m, std::move(knots), std::move(values)};
    }

    double h_of(double y) const {
        switch (h) {
            case H::identity: return y;
            case H::cube: return y * y * y;
            case H::sinh: return std::sinh(y);
            case H::clipped: return std::clamp(y, -1.0, 1.0);
        }
        return y;
    }

    double wrap(double z) const {
        switch (wrapper) {
            case Wrapper::arctan: return std::atan(z);
            case Wrapper::sine: return std::sin(z);
            case Wrapper::mirrored_exp: return mirrored_exp_factor(z) - 1.0;
            case Wrapper::table: {
                if (z == 0.0) return 0.0;
                double a = std::abs(z);
                std::size_t i = std::lower_bound(knots.begin(), knots.end(), a) - knots.begin();
                double v = values[i];
                return z > 0.0 ? v : -v;
            }
        }
        return 0.0;
    }

    double operator()(double x) const { return 1.0 + wrap(h_of(x - m)); }

    // Probe |f(m+y) + f(m-y) - 2| <= 1e-12 and f >= 0 over y in
    // [-half_width, half_width]; throws with the witnessing point.
    void validate(double half_width = 1.5, int points = 1001) const {
        if (points < 2 || !(half_width > 0.0))
            throw std::invalid_argument("OddFactor::validate: bad probe grid");
        for (int i = 0; i < points; ++i) {
            double y = -half_width + 2.0 * half_width * i / (points - 1);
            double fp = (*this)(m + y), fm = (*this)(m - y);
            if (std::abs(fp + fm - 2.0) > 1e-12) {
                std::ostringstream msg;
                msg << "OddFactor: f(m+y) + f(m-y) - 2 = " << fp + fm - 2.0 << " at y = " << y;
                throw std::invalid_argument(msg.str());
            }
            if (!(fp >= 0.0)) {
                std::ostringstream msg;
                msg << "OddFactor: f = " << fp << " < 0 at y = " << y;
                throw std::invalid_argument(msg.str());
            }
        }
    }
};

// Largest deviation of the factor from 1 on |y| <= eta; drives how fast the
// product can move when observations are eta-small.
inline double factor_max_deviation(const OddFactor& f, double eta, int points = 20001) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        double y = -eta + 2.0 * eta * i / (points - 1);
        worst = std::max(worst, std::abs(f(f.m + y) - 1.0));
    }
    return worst;
}

// Running product of an odd factor, log space; a zero factor value is an
// absorbing zero for the product.  Negative factor values mean the factor
// is invalid on this data range, which is an error, not a value.
struct OddNm {
    OddFactor factor;

    explicit OddNm(OddFactor f) : factor(std::move(f)) {}

    void step(double x) {
        double f = factor(x);
        if (f < 0.0) {
            std::ostringstream msg;
            msg << "OddNm: factor " << f << " < 0 at x = " << x;
            throw std::domain_error(msg.str());
        }
        log_value_ += std::log(f);  // log(0) = -inf absorbs
    }
    double log_value() const { return log_value_; }
    double value() const { return std::exp(log_value_); }

private:
    double log_value_ = 0.0;
};

// 1/alpha as an integer threshold; the walk's exactness needs integrality.
inline int sign_walk_threshold(double alpha) {
    require_alpha(alpha);
    double inv = 1.0 / alpha;
    double rounded = std::nearbyint(inv);
    if (std::abs(inv - rounded) > 1e-9 * rounded)
        throw std::invalid_argument("sign walk: 1/alpha must be an integer");
    return static_cast<int>(rounded);
}

// Integer walk started at 1: +-1 on the sign of each nonzero observation,
// absorbing at 0 and at the threshold.  Never overshoots by construction.
struct SignWalk {
    int value = 1;
    int threshold;

    explicit SignWalk(int threshold_) : threshold(threshold_) {
        if (threshold_ < 1) throw std::invalid_argument("SignWalk: threshold must be >= 1");
    }

    bool absorbed_zero() const { return value == 0; }
    bool rejected() const { return value >= threshold; }
    bool absorbed() const { return absorbed_zero() || rejected(); }

    void step(double x) {
        if (absorbed()) return;
        if (x > 0.0) ++value;
        else if (x < 0.0) --value;
    }
};

// Rejection time of the level-alpha sign-walk test around center m.
inline int sign_walk_test(const std::vector<double>& xs, double alpha, double m = 0.0) {
    SignWalk walk(sign_walk_threshold(alpha));
    if (walk.rejected()) return xs.empty() ? kNever : 1;  // threshold 1: start is already there
    for (std::size_t k = 0; k < xs.size(); ++k) {
        walk.step(xs[k] - m);
        if (walk.rejected()) return static_cast<int>(k) + 1;
        if (walk.absorbed_zero()) return kNever;
    }
    return kNever;
}

// Exact dyadic p-value: p_t = 1 - sum_{s<=t} 2^{-N_s} 1{x_s > 0} with N_s
// counting nonzero observations.  Held as numerator / 2^k in integers; the
// k = 64 cap drops corrections below 2^{-64}, under any test's resolution.
class DyadicP {
public:
    void step(double x) {
        if (x == 0.0) return;
        ++n_nonzero_;
        if (k_ < 64) {
            ++k_;
            num_ <<= 1;
            if (x > 0.0) num_ -= 1;
        }
    }

    long long n_nonzero() const { return n_nonzero_; }
    int k() const { return k_; }

    double value() const { return std::ldexp(static_cast<double>(num_), -k_); }

    // exact comparison against num / 2^k in lowest terms
    bool equals(unsigned long long num, int k) const {
        unsigned __int128 a = num_;
        int ka = k_;
        while (ka > 0 && (a & 1) == 0) {
            a >>= 1;
            --ka;
        }
        unsigned __int128 b = num;
        int kb = k;
        while (kb > 0 && (b & 1) == 0) {
            b >>= 1;
            --kb;
        }
        return a == b && ka == kb;
    }

private:
    unsigned __int128 num_ = 1;  // p * 2^k; reaches 2^64 only when p = 1
    int k_ = 0;
    long long n_nonzero_ = 0;
};

enum class CenterEngine { sign_walk, mirrored_nm, odd_family };

// Confidence sequence for the center of symmetry: invert the chosen
// level-alpha test at every grid point.  Exclusion is absorbing.
inline ConfidenceSequence symmetry_center_cs(const std::vector<double>& xs, double alpha,
                                             const std::vector<double>& grid,
                                             CenterEngine engine) {
    require_alpha(alpha);
    if (grid.empty()) throw std::invalid_argument("symmetry_center_cs: empty grid");
    const int T = static_cast<int>(xs.size());
    const double log_threshold = std::log(1.0 / alpha);
    std::vector<int> exclusion(grid.size(), kNever);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        switch (engine) {
            case CenterEngine::sign_walk:
                exclusion[i] = sign_walk_test(xs, alpha, grid[i]);
                break;
            case CenterEngine::mirrored_nm: {
                double lv = 0.0;
                for (int t = 1; t <= T; ++t) {
                    lv += std::log(mirrored_exp_factor(xs[std::size_t(t - 1)] - grid[i]));
                    if (lv >= log_threshold) {
                        exclusion[i] = t;
                        break;
                    }
                }
                break;
            }
            case CenterEngine::odd_family: {
                // arctan of the clipped increment stays a valid factor on all
                // of R, so heavy-tailed data cannot push it negative
                OddFactor f = OddFactor::arctan(OddFactor::H::clipped, grid[i]);
                double lv = 0.0;
                for (int t = 1; t <= T; ++t) {
                    lv += std::log(f(xs[std::size_t(t - 1)]));
                    if (lv >= log_threshold) {
                        exclusion[i] = t;
                        break;
                    }
                }
                break;
            }
        }
    }
    return invert_tests_to_cs(grid, exclusion, alpha, T);
}

inline ConfidenceSequence symmetry_center_cs(const SamplePath& path, double alpha,
                                             const std::vector<double>& grid,
                                             CenterEngine engine) {
    return symmetry_center_cs(path.xs, alpha, grid, engine);
}

}  // namespace anytime
