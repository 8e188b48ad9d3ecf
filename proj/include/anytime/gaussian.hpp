#pragma once
// Gaussian test martingales for a hypothesized mean, their normal-mixture
// closed form, and the mean confidence sequence they induce.
//
// All state lives in log-space.  For observations y_t with predictable
// conditional variance sigma_t^2, the lambda-tilted martingale is
//   log G_t = lambda * S_t - (lambda^2 / 2) * V_t,
// with S_t = sum (y_s - m) and V_t = sum sigma_s^2.  Mixing G_t(lambda)
// over lambda ~ N(0, rho^2) gives
//   log M_t = -log(1 + rho^2 V_t)/2 + rho^2 S_t^2 / (2 (1 + rho^2 V_t)).

#include <anytime/instruments.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace anytime {

struct GaussianNm {
    double m = 0.0;
    double lambda = 1.0;

    GaussianNm() = default;
    GaussianNm(double m_, double lambda_) : m(m_), lambda(lambda_) {}

    void step(double y, double sigma_sq = 1.0) {
        if (!(sigma_sq > 0.0)) throw std::invalid_argument("GaussianNm: sigma_sq must be > 0");
        log_value_ += lambda * (y - m) - 0.5 * lambda * lambda * sigma_sq;
        S_ += y - m;
        V_ += sigma_sq;
    }

    double log_value() const { return log_value_; }
    double value() const { return std::exp(log_value_); }
    double S() const { return S_; }
    double V() const { return V_; }

private:
    double log_value_ = 0.0;
    double S_ = 0.0;
    double V_ = 0.0;
};

struct MixtureNm {
    double m = 0.0;
    double rho = 1.0;  // mixing standard deviation over lambda

    MixtureNm() = default;
    MixtureNm(double m_, double rho_) : m(m_), rho(rho_) {
        if (!(rho > 0.0)) throw std::invalid_argument("MixtureNm: rho must be > 0");
    }

    void step(double y, double sigma_sq = 1.0) {
        if (!(sigma_sq > 0.0)) throw std::invalid_argument("MixtureNm: sigma_sq must be > 0");
        S_ += y - m;
        V_ += sigma_sq;
    }

    double log_value() const {
        double r2v = rho * rho * V_;
        return -0.5 * std::log1p(r2v) + rho * rho * S_ * S_ / (2.0 * (1.0 + r2v));
    }
    double value() const { return std::exp(log_value()); }
    double S() const { return S_; }
    double V() const { return V_; }

private:
    double S_ = 0.0;
    double V_ = 0.0;
};

// Radius of the unit-variance normal-mixture confidence sequence:
// the interval at time t is sample mean +- radius.
inline double mixture_cs_radius(int t, double alpha) {
    if (t < 1) throw std::invalid_argument("mixture_cs_radius: t must be >= 1");
    require_alpha(alpha);
    double td = static_cast<double>(t);
    return std::sqrt((1.0 + 1.0 / td) * std::log((td + 1.0) / (alpha * alpha)) / td);
}

namespace detail {

// Nonnegative half of the 41-node Gauss-Hermite rule (weight e^{-x^2}).
// Index 0 is the central node, counted once; the rest appear at +-x.
inline constexpr int kGhHalfNodes = 21;
inline constexpr double kGhNode[kGhHalfNodes] = {
    0.0,
    3.44904463015432761e-01, 6.90305052330208113e-01, 1.03670725292420607e+00,
    1.38463578916003249e+00, 1.73464560882202923e+00, 2.08733468191872440e+00,
    2.44335955312341113e+00, 2.80345496148431872e+00, 3.16845945394198569e+00,
    3.53934993736371162e+00, 3.91728985483778214e+00, 4.30369876715465072e+00,
    4.70035689630411646e+00, 5.10956962653313429e+00, 5.53444134061344606e+00,
    5.97936500416513361e+00, 6.45098459717475325e+00, 6.96035840063674982e+00,
    7.52894546453962121e+00, 8.21300089559828095e+00,
};
inline constexpr double kGhWeight[kGhHalfNodes] = {
    3.44822083616389441e-01,
    3.06367816937851256e-01, 2.14730864490084550e-01, 1.18484391246844109e-01,
    5.12898723970946768e-02, 1.73308813621168359e-02, 4.54039298730326765e-03,
    9.14234256328708790e-04, 1.39930256596741735e-04, 1.60559657366772404e-05,
    1.35737814048707912e-06, 8.27265841874983761e-08, 3.53568164838066620e-09,
    1.02267989277822395e-10, 1.91038336468091470e-12, 2.16298724717501803e-14,
    1.35698752958611529e-16, 4.12340853753149608e-19, 4.86873793601283790e-22,
    1.47265372865204785e-25, 4.00195966466642150e-30,
};

}  // namespace detail

// log of int exp(lambda S - lambda^2 V / 2) dN(0, rho^2)(lambda), evaluated
// by Gauss-Hermite quadrature recentered at the integrand's peak S/A and
// rescaled to its curvature 1/sqrt(A), A = V + 1/rho^2.  Without the
// recentering the fixed rule misses the mass badly once |S| or V is large.
inline double mixture_log_by_quadrature(double S, double V, double rho = 1.0) {
    if (!(rho > 0.0)) throw std::invalid_argument("mixture_log_by_quadrature: rho must be > 0");
    if (!(V >= 0.0)) throw std::invalid_argument("mixture_log_by_quadrature: V must be >= 0");
    const double A = V + 1.0 / (rho * rho);
    const double mu = S / A;
    const double scale = std::sqrt(2.0 / A);  // lambda = mu + scale * x
    const double log_norm = -0.5 * std::log(2.0 * 3.14159265358979323846 * rho * rho);

    auto log_term = [&](double x, double w) {
        double lam = mu + scale * x;
        return std::log(w) + x * x + lam * S - 0.5 * A * lam * lam + log_norm;
    };

    // log-sum-exp over the 41 nodes (central one once, others mirrored)
    double mx = log_term(0.0, detail::kGhWeight[0]);
    for (int i = 1; i < detail::kGhHalfNodes; ++i) {
        mx = std::max(mx, log_term(detail::kGhNode[i], detail::kGhWeight[i]));
        mx = std::max(mx, log_term(-detail::kGhNode[i], detail::kGhWeight[i]));
    }
    double acc = std::exp(log_term(0.0, detail::kGhWeight[0]) - mx);
    for (int i = 1; i < detail::kGhHalfNodes; ++i) {
        acc += std::exp(log_term(detail::kGhNode[i], detail::kGhWeight[i]) - mx);
        acc += std::exp(log_term(-detail::kGhNode[i], detail::kGhWeight[i]) - mx);
    }
    return std::log(std::sqrt(2.0 / A)) + mx + std::log(acc);
}

struct MeanInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Exact interval form of the mixture confidence set at one time: the set of
// m with mixture value < 1/alpha is |sum_y/t - m| < halfwidth, an interval.
inline MeanInterval mixture_mean_interval(double sum_y, double V, int t, double alpha,
                                          double rho = 1.0) {
    if (t < 1) throw std::invalid_argument("mixture_mean_interval: t must be >= 1");
    require_alpha(alpha);
    double r2v = rho * rho * V;
    double A = V + 1.0 / (rho * rho);
    double hw = std::sqrt(A * (2.0 * std::log(1.0 / alpha) + std::log1p(r2v))) / t;
    double center = sum_y / t;
    return {center - hw, center + hw};
}

struct GaussianCsOptions {
    bool use_mixture = true;
    double lambda = 1.0;  // plain martingale tilt when use_mixture is false
    double rho = 1.0;     // mixing sd when use_mixture is true
};

// Grid confidence sequence: m stays in the set while its martingale has not
// yet reached 1/alpha (exclusion is absorbing, so the running intersection
// is built in).  Empty sigma_sq means unit variance throughout.
inline ConfidenceSequence gaussian_cs(const std::vector<double>& ys,
                                      const std::vector<double>& sigma_sq, double alpha,
                                      const std::vector<double>& grid,
                                      const GaussianCsOptions& opts = {}) {
    require_alpha(alpha);
    if (grid.empty()) throw std::invalid_argument("gaussian_cs: empty grid");
    if (!sigma_sq.empty() && sigma_sq.size() != ys.size())
        throw std::invalid_argument("gaussian_cs: sigma_sq length mismatch");
    const double log_threshold = std::log(1.0 / alpha);
    const int T = static_cast<int>(ys.size());
    std::vector<int> exclusion(grid.size(), kNever);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (opts.use_mixture) {
            MixtureNm nm(grid[i], opts.rho);
            for (int t = 1; t <= T; ++t) {
                nm.step(ys[std::size_t(t - 1)],
                        sigma_sq.empty() ? 1.0 : sigma_sq[std::size_t(t - 1)]);
                if (nm.log_value() >= log_threshold) {
                    exclusion[i] = t;
                    break;
                }
            }
        } else {
            GaussianNm nm(grid[i], opts.lambda);
            for (int t = 1; t <= T; ++t) {
                nm.step(ys[std::size_t(t - 1)],
                        sigma_sq.empty() ? 1.0 : sigma_sq[std::size_t(t - 1)]);
                if (nm.log_value() >= log_threshold) {
                    exclusion[i] = t;
                    break;
                }
            }
        }
    }
    return invert_tests_to_cs(grid, exclusion, alpha, T);
}

inline ConfidenceSequence gaussian_cs(const SamplePath& path, double alpha,
                                      const std::vector<double>& grid,
                                      const GaussianCsOptions& opts = {}) {
    return gaussian_cs(path.xs, path.sigma_sq, alpha, grid, opts);
}

}  // namespace anytime
