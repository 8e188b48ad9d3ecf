#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

// Calibrators (p-to-e conversion kernels), distribution functions with
// left limits, the uniform randomization device, and Kolmogorov-Smirnov
// distances used by the verification suites.

namespace anytime {

// A calibrator is a nonincreasing f: (0,1] -> [0,inf] with integral 1 over
// the unit interval; f(p) is then a fair conversion of a p-value into an
// e-value at arbitrary stopping times.
class Calibrator {
 public:
  enum class Kind { sqrt_half, power, table };

  // f(u) = 1 / (2 sqrt(u)).
  static Calibrator make_sqrt() {
    Calibrator c;
    c.kind_ = Kind::sqrt_half;
    return c;
  }

  // f(u) = kappa * u^(kappa - 1), kappa in (0, 1).
  static Calibrator make_power(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
      throw std::invalid_argument("power calibrator: kappa must be in (0,1)");
    Calibrator c;
    c.kind_ = Kind::power;
    c.kappa_ = kappa;
    return c;
  }

  // Right-continuous step function: f(u) = values[i] on [knots[i], knots[i+1])
  // with knots[0] = 0, knots.back() < 1 (last step extends to 1). The step
  // integral must equal 1 to within 1e-6 and values must be nonincreasing.
  static Calibrator make_table(std::vector<double> knots,
                               std::vector<double> values) {
    if (knots.size() != values.size() || knots.empty())
      throw std::invalid_argument("table calibrator: size mismatch");
    if (knots.front() != 0.0)
      throw std::invalid_argument("table calibrator: first knot must be 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      if (!(knots[i] < knots[i + 1]))
        throw std::invalid_argument("table calibrator: knots must increase");
      if (values[i + 1] > values[i])
        throw std::invalid_argument("table calibrator: values must be nonincreasing");
    }
    if (!(knots.back() < 1.0))
      throw std::invalid_argument("table calibrator: last knot must be < 1");
    double integral = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const double hi = (i + 1 < knots.size()) ? knots[i + 1] : 1.0;
      integral += values[i] * (hi - knots[i]);
    }
    if (std::abs(integral - 1.0) > 1e-6)
      throw std::invalid_argument("table calibrator: integral must be 1");
    Calibrator c;
    c.kind_ = Kind::table;
    c.knots_ = std::move(knots);
    c.values_ = std::move(values);
    return c;
  }

  // f(u); u = 0 maps to +inf for the unbounded kinds.
  double operator()(double u) const {
    if (u < 0.0 || u > 1.0)
      throw std::invalid_argument("calibrator: argument outside [0,1]");
    switch (kind_) {
      case Kind::sqrt_half:
        if (u == 0.0) return std::numeric_limits<double>::infinity();
        return 0.5 / std::sqrt(u);
      case Kind::power:
        if (u == 0.0) return std::numeric_limits<double>::infinity();
        return kappa_ * std::pow(u, kappa_ - 1.0);
      case Kind::table: {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
        const std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
        return values_[idx == 0 ? 0 : idx - 1];
      }
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }

  // Unit-integral identity, evaluated exactly per kind (the table kind was
  // validated at construction).
  double integral() const {
    switch (kind_) {
      case Kind::sqrt_half:
      case Kind::power:
        return 1.0;
      case Kind::table: {
        double integral = 0.0;
        for (std::size_t i = 0; i < knots_.size(); ++i) {
          const double hi = (i + 1 < knots_.size()) ? knots_[i + 1] : 1.0;
          integral += values_[i] * (hi - knots_[i]);
        }
        return integral;
      }
    }
    return 0.0;
  }

 private:
  Kind kind_ = Kind::sqrt_half;
  double kappa_ = 0.5;
  std::vector<double> knots_, values_;
};

// Distribution function with access to left limits F(y-) = P(X < y).
class Cdf {
 public:
  enum class Kind { empirical, step, uniform01, normal };

  static Cdf make_empirical(std::vector<double> samples) {
    if (samples.empty())
      throw std::invalid_argument("empirical cdf: no samples");
    std::sort(samples.begin(), samples.end());
    Cdf c;
    c.kind_ = Kind::empirical;
    c.xs_ = std::move(samples);
    return c;
  }

  // Atoms at xs[i] with masses m[i] > 0 summing to 1.
  static Cdf make_step(std::vector<double> xs, std::vector<double> masses) {
    if (xs.size() != masses.size() || xs.empty())
      throw std::invalid_argument("step cdf: size mismatch");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (!(xs[i] < xs[i + 1]))
        throw std::invalid_argument("step cdf: atoms must increase");
    double total = 0.0;
    for (double m : masses) {
      if (!(m > 0.0)) throw std::invalid_argument("step cdf: masses must be positive");
      total += m;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("step cdf: masses must sum to 1");
    Cdf c;
    c.kind_ = Kind::step;
    c.xs_ = std::move(xs);
    c.cum_.resize(c.xs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      acc += masses[i];
      c.cum_[i] = acc;
    }
    c.cum_.back() = 1.0;
    return c;
  }

  static Cdf make_uniform01() {
    Cdf c;
    c.kind_ = Kind::uniform01;
    return c;
  }

  static Cdf make_normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("normal cdf: sigma must be > 0");
    Cdf c;
    c.kind_ = Kind::normal;
    c.mu_ = mu;
    c.sigma_ = sigma;
    return c;
  }

  double at(double y) const {
    switch (kind_) {
      case Kind::empirical: {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), y);
        return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
      }
      case Kind::step: {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), y);
        return it == xs_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - xs_.begin()) - 1];
      }
      case Kind::uniform01:
        return std::clamp(y, 0.0, 1.0);
      case Kind::normal:
        return 0.5 * std::erfc(-(y - mu_) / (sigma_ * 1.41421356237309504880));
    }
    return 0.0;
  }

  double at_left(double y) const {
    switch (kind_) {
      case Kind::empirical: {
        auto it = std::lower_bound(xs_.begin(), xs_.end(), y);
        return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
      }
      case Kind::step: {
        auto it = std::lower_bound(xs_.begin(), xs_.end(), y);
        return it == xs_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - xs_.begin()) - 1];
      }
      case Kind::uniform01:
      case Kind::normal:
        return at(y);  // continuous: no left jump
    }
    return 0.0;
  }

 private:
  Kind kind_ = Kind::uniform01;
  std::vector<double> xs_, cum_;
  double mu_ = 0.0, sigma_ = 1.0;
};

// Randomized probability transform: with U uniform on [0,1] independent of Y,
// U*F(Y) + (1-U)*F(Y-) is exactly uniform on [0,1] when Y ~ F. Turns a
// discrete observation into an exactly-uniform p-variable.
inline double randomize(const Cdf& f, double y, double u) {
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("randomize: u outside [0,1]");
  return u * f.at(y) + (1.0 - u) * f.at_left(y);
}

// One-sample KS distance sup_y |F_hat(y) - y| against uniform [0,1].
// Callers are expected to provide enough mass for the distance to mean
// anything; fewer than 100 samples is rejected.
inline double ks_to_uniform(std::vector<double> samples) {
  if (samples.size() < 100)
    throw std::invalid_argument("ks_to_uniform: need at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double lo = samples[i] - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - samples[i];
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

// Two-sample KS distance sup_y |F_a(y) - F_b(y)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace anytime
