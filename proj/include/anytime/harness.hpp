#pragma once

#include <anytime/calibrate.hpp>
#include <anytime/rng.hpp>
#include <anytime/symmetry.hpp>
#include <anytime/tree.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

// Monte Carlo verification suites.  Each suite runs named checks against a
// fixed seed and emits a Report; every estimate carries a standard error and
// an acceptance interval, and every suite contains at least one negative
// control (a deliberately broken instrument whose check must fail).  Checks
// are deterministic functions of (options, seed): paths are indexed by a
// counter-based generator and partial results are reduced in block order, so
// the thread count never changes any output.

namespace anytime {

struct CheckRow {
    std::string suite;
    std::string name;
    double estimate = 0.0;
    double se = 0.0;
    double lo = 0.0;  // acceptance interval; lo = hi = NaN marks a report-only row
    double hi = 0.0;
    bool pass = false;
    bool expected_fail = false;  // negative control: pass means the raw check failed
    std::string witness;         // populated when pass is false
    std::string note;
};

struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    int threads = 1;
    bool quick = false;
    long long wall_ms = 0;  // informational; never serialized (outputs must be
                            // byte-identical for a fixed config and seed)
    std::vector<CheckRow> rows;

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : rows) {
            checks.push_back({{"suite", r.suite},
                              {"name", r.name},
                              {"estimate", r.estimate},
                              {"se", r.se},
                              {"lo", r.lo},
                              {"hi", r.hi},
                              {"pass", r.pass},
                              {"expected_fail", r.expected_fail},
                              {"witness", r.witness},
                              {"note", r.note}});
        }
        return nlohmann::json{{"suite", suite},
                              {"seed", seed},
                              {"threads", threads},
                              {"quick", quick},
                              {"all_pass", all_pass()},
                              {"checks", checks}};
    }

    std::string to_csv() const {
        std::string out = "suite,name,estimate,se,lo,hi,pass,expected_fail,witness,note\n";
        for (const auto& r : rows) {
            out += csv_field(r.suite) + ',' + csv_field(r.name) + ',';
            out += fmt_g17(r.estimate) + ',' + fmt_g17(r.se) + ',';
            out += fmt_g17(r.lo) + ',' + fmt_g17(r.hi) + ',';
            out += r.pass ? "true," : "false,";
            out += r.expected_fail ? "true," : "false,";
            out += csv_field(r.witness) + ',' + csv_field(r.note) + '\n';
        }
        return out;
    }

    static std::string fmt_g17(double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }

    // short form for names and prose; full precision stays in the data fields
    static std::string fmt_g(double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%g", x);
        return buf;
    }

    static std::string csv_field(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + '"';
    }
};

struct HarnessOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    bool quick = false;  // scaled-down path counts for fast test runs
};

namespace detail {

inline double binom_se(double p, long long n) {
    double q = std::min(std::max(p, 0.0), 1.0);
    return std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Runs f(begin, end, agg) over fixed 1024-path blocks on a small pool and
// merges the per-block aggregates in block order.  Agg needs merge(const Agg&).
template <class Agg, class BlockFn>
Agg run_blocks(long long n, int threads, BlockFn f) {
    constexpr long long kBlock = 1024;
    const long long nblocks = (n + kBlock - 1) / kBlock;
    std::vector<Agg> parts(static_cast<std::size_t>(nblocks));
    std::atomic<long long> next{0};
    auto worker = [&] {
        for (;;) {
            const long long b = next.fetch_add(1);
            if (b >= nblocks) break;
            f(b * kBlock, std::min(n, (b + 1) * kBlock), parts[static_cast<std::size_t>(b)]);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    Agg total;
    for (auto& p : parts) total.merge(p);
    return total;
}

struct CountAgg {
    long long hits = 0;
    long long n = 0;
    void merge(const CountAgg& o) {
        hits += o.hits;
        n += o.n;
    }
    double freq() const { return n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0; }
};

struct MomentAgg {
    double sum = 0.0;
    double sumsq = 0.0;
    long long n = 0;
    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const MomentAgg& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        double m = mean();
        double var = std::max(0.0, sumsq / static_cast<double>(n) - m * m);
        return std::sqrt(var / static_cast<double>(n));
    }
};

struct SampleAgg {
    std::vector<double> v;
    void merge(SampleAgg& o) {
        v.insert(v.end(), o.v.begin(), o.v.end());
        o.v.clear();
    }
    void merge(const SampleAgg& o) { v.insert(v.end(), o.v.begin(), o.v.end()); }
};

// Crossing count for the unit-drift Gaussian martingale: the log value is
// sum(x) - t/2, a crossing is log value >= log(1/alpha).  Stops each path at
// its first crossing.
inline CountAgg gaussian_crossing(double alpha, int T, long long n_paths, std::uint64_t seed,
                                  std::uint64_t stream_hi, int threads) {
    const double la = std::log(1.0 / alpha);
    return run_blocks<CountAgg>(n_paths, threads, [&](long long b, long long e, CountAgg& agg) {
        for (long long i = b; i < e; ++i) {
            Rng rng(seed, (stream_hi << 32) | static_cast<std::uint64_t>(i));
            double s = 0.0;
            double thresh = la;
            for (int t = 1; t <= T; ++t) {
                s += rng.normal();
                thresh += 0.5;
                if (s >= thresh) {
                    ++agg.hits;
                    break;
                }
            }
            ++agg.n;
        }
    });
}

struct GaussianSupAgg {
    MomentAgg sup_sqrt;  // 1 v sqrt(sup e)
    MomentAgg e_tau;     // e at the first crossing of 1/alpha, else at T
    MomentAgg e_argmax;  // e at the (non-stopping) running argmax
    long long crossed = 0;
    long long n = 0;
    void merge(const GaussianSupAgg& o) {
        sup_sqrt.merge(o.sup_sqrt);
        e_tau.merge(o.e_tau);
        e_argmax.merge(o.e_argmax);
        crossed += o.crossed;
        n += o.n;
    }
};

// Full-horizon pass over the same martingale tracking the running maximum:
// serves the optional-stopping mean, the sup-sqrt moment bound, and the
// adversarial argmax illustration in one sweep.
inline GaussianSupAgg gaussian_sup_stats(double alpha, int T, long long n_paths,
                                         std::uint64_t seed, std::uint64_t stream_hi,
                                         int threads) {
    const double la = std::log(1.0 / alpha);
    return run_blocks<GaussianSupAgg>(
        n_paths, threads, [&](long long b, long long e, GaussianSupAgg& agg) {
            for (long long i = b; i < e; ++i) {
                Rng rng(seed, (stream_hi << 32) | static_cast<std::uint64_t>(i));
                double s = 0.0;
                double logmax = 0.0;  // log e_0 = 0
                double log_at_tau = 0.0;
                bool crossed = false;
                for (int t = 1; t <= T; ++t) {
                    s += rng.normal();
                    const double lv = s - 0.5 * t;
                    if (lv > logmax) logmax = lv;
                    if (!crossed && lv >= la) {
                        crossed = true;
                        log_at_tau = lv;
                    }
                }
                if (!crossed) log_at_tau = s - 0.5 * T;
                agg.sup_sqrt.add(std::max(1.0, std::exp(0.5 * logmax)));
                agg.e_tau.add(std::exp(log_at_tau));
                agg.e_argmax.add(std::exp(logmax));
                if (crossed) ++agg.crossed;
                ++agg.n;
            }
        });
}

struct SignWalkAgg {
    long long rejected = 0;
    long long unabsorbed = 0;
    long long overshoot = 0;
    long long n = 0;
    void merge(const SignWalkAgg& o) {
        rejected += o.rejected;
        unabsorbed += o.unabsorbed;
        overshoot += o.overshoot;
        n += o.n;
    }
};

// Fair +-1 walk started at 1, absorbed at 0 or at the threshold; sign bits
// are drawn 64 at a time.  Hitting above the threshold would be an overshoot;
// unit steps make that impossible, and the count asserts it stays zero.
inline SignWalkAgg sign_walk_ruin(long long threshold, int T, long long n_paths,
                                  std::uint64_t seed, std::uint64_t stream_hi, int threads) {
    return run_blocks<SignWalkAgg>(
        n_paths, threads, [&](long long b, long long e, SignWalkAgg& agg) {
            for (long long i = b; i < e; ++i) {
                Rng rng(seed, (stream_hi << 32) | static_cast<std::uint64_t>(i));
                long long v = 1;
                bool done = false;
                int t = 0;
                while (t < T && !done) {
                    std::uint64_t bits = rng.next_u64();
                    for (int j = 0; j < 64 && t < T; ++j, ++t) {
                        v += (bits & 1) ? 1 : -1;
                        bits >>= 1;
                        if (v <= 0) {
                            done = true;
                            break;
                        }
                        if (v >= threshold) {
                            if (v > threshold) ++agg.overshoot;
                            ++agg.rejected;
                            done = true;
                            break;
                        }
                    }
                }
                if (!done) ++agg.unabsorbed;
                ++agg.n;
            }
        });
}

// Crossing count for a product of two-valued factors f(+eta), f(-eta) under
// fair signs, stopping each path at the first crossing of 1/alpha.
inline CountAgg two_value_crossing(double log_up, double log_down, double alpha, long long T,
                                   long long n_paths, std::uint64_t seed,
                                   std::uint64_t stream_hi, int threads) {
    const double la = std::log(1.0 / alpha);
    return run_blocks<CountAgg>(n_paths, threads, [&](long long b, long long e, CountAgg& agg) {
        for (long long i = b; i < e; ++i) {
            Rng rng(seed, (stream_hi << 32) | static_cast<std::uint64_t>(i));
            double s = 0.0;
            bool crossed = false;
            long long t = 0;
            while (t < T && !crossed) {
                std::uint64_t bits = rng.next_u64();
                for (int j = 0; j < 64 && t < T; ++j, ++t) {
                    s += (bits & 1) ? log_up : log_down;
                    bits >>= 1;
                    if (s >= la) {
                        crossed = true;
                        break;
                    }
                }
            }
            if (crossed) ++agg.hits;
            ++agg.n;
        }
    });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ville: time-uniform crossing frequencies against their Ville bounds.
// ---------------------------------------------------------------------------
inline Report run_ville(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "ville";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const double alpha = 0.05;
    const int T = opt.quick ? 500 : 10000;
    const long long N = opt.quick ? 2000 : 100000;
    const double se = detail::binom_se(alpha, N);

    {
        auto agg = detail::gaussian_crossing(alpha, T, N, opt.seed, 1, opt.threads);
        CheckRow r;
        r.suite = rep.suite;
        r.name = "gaussian-nm-crossing";
        r.estimate = agg.freq();
        r.se = se;
        r.lo = 0.0;
        r.hi = alpha + 3.0 * se;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "model=gauss:0,1 seed=" + std::to_string(opt.seed);
        r.note = "P(sup M >= 1/alpha) for the unit-drift Gaussian martingale, alpha=0.05";
        rep.rows.push_back(r);
    }

    {
        // absorption at {0, 20} from 1 needs ~(20/pi)^2 steps to mix; the quick
        // horizon is padded so the unabsorbed bound still has real meaning
        const int T_walk = opt.quick ? 4000 : T;
        auto agg = detail::sign_walk_ruin(20, T_walk, N, opt.seed, 2, opt.threads);
        const double est = static_cast<double>(agg.rejected) / static_cast<double>(agg.n);
        const double se20 = detail::binom_se(0.05, N);
        CheckRow r;
        r.suite = rep.suite;
        r.name = "sign-walk-rejection";
        r.estimate = est;
        r.se = se20;
        r.lo = 0.05 - 3.0 * se20;
        r.hi = 0.05 + 3.0 * se20;
        r.pass = est >= r.lo && est <= r.hi;
        if (!r.pass) r.witness = "model=rademacher seed=" + std::to_string(opt.seed);
        r.note = "ruin walk to 20 rejects with probability exactly 1/20";
        rep.rows.push_back(r);

        CheckRow u;
        u.suite = rep.suite;
        u.name = "sign-walk-unabsorbed";
        u.estimate = static_cast<double>(agg.unabsorbed) / static_cast<double>(agg.n);
        u.se = 0.0;
        u.lo = 0.0;
        u.hi = 1e-3;
        u.pass = u.estimate < u.hi;
        if (!u.pass) u.witness = "unabsorbed=" + std::to_string(agg.unabsorbed);
        u.note = "fraction of paths alive at the horizon";
        rep.rows.push_back(u);

        CheckRow o;
        o.suite = rep.suite;
        o.name = "sign-walk-overshoot";
        o.estimate = static_cast<double>(agg.overshoot);
        o.se = 0.0;
        o.lo = 0.0;
        o.hi = 0.0;
        o.pass = agg.overshoot == 0;
        if (!o.pass) o.witness = "overshoot_events=" + std::to_string(agg.overshoot);
        o.note = "unit steps must hit the barrier exactly";
        rep.rows.push_back(o);
    }

    {
        CheckRow r;
        r.suite = rep.suite;
        r.name = "alpha-one-trivial";
        r.estimate = 1.0;  // M_0 = 1 >= 1/1 on every path
        r.se = 0.0;
        r.lo = 0.0;
        r.hi = 1.0;
        r.pass = true;
        r.note = "at alpha = 1 the bound is 1 and crossing happens at t = 0";
        rep.rows.push_back(r);
    }

    {
        // deterministic positive control: multiplying by 1.01 each step is not
        // a supermartingale, and crosses 1/alpha by t = ceil(log(1/a)/log(1.01))
        const int t_cross = static_cast<int>(std::ceil(std::log(1.0 / alpha) / std::log(1.01)));
        CheckRow r;
        r.suite = rep.suite;
        r.name = "inflated-control";
        r.estimate = t_cross <= T ? 1.0 : 0.0;
        r.se = 0.0;
        r.lo = 0.0;
        r.hi = alpha + 3.0 * se;
        r.expected_fail = true;
        r.pass = r.estimate > r.hi;  // the raw Ville check must fail
        r.witness = "first crossing at t=" + std::to_string(t_cross);
        r.note = "negative control: deterministic growth crosses with frequency 1";
        rep.rows.push_back(r);
    }

    return rep;
}

// ---------------------------------------------------------------------------
// anticoncentration: two-sided bracket for bounded-increment martingales.
// ---------------------------------------------------------------------------
inline Report run_anticoncentration(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "anticoncentration";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const double alpha = 0.1;
    const long long N = opt.quick ? 4000 : 20000;
    const double se = detail::binom_se(alpha, N);
    std::vector<double> etas = {0.5, 0.1, 0.02};
    if (opt.quick) etas = {0.5, 0.1};

    const OddFactor f = OddFactor::arctan();
    std::vector<double> ests;
    std::vector<double> ses;
    std::uint64_t stream_hi = 1;
    for (double eta : etas) {
        // largest deviation of the factor from 1 on [-eta, eta], off a fine grid
        const double eps = factor_max_deviation(f, eta);
        if (!(eps > 0.0))
            throw std::invalid_argument("anticoncentration: factor is flat at eta");
        // per-step squared log increment is ~eps^2; a fixed aggregate variance
        // budget makes the missed-crossing deficit negligible next to 3 se
        const long long T = static_cast<long long>(std::ceil(48.0 / (eps * eps)));
        auto agg = detail::two_value_crossing(std::log(f(eta)), std::log(f(-eta)), alpha, T, N,
                                              opt.seed, stream_hi++, opt.threads);
        const double est = agg.freq();
        ests.push_back(est);
        ses.push_back(se);

        CheckRow r;
        r.suite = rep.suite;
        r.name = "bracket-eta-" + Report::fmt_g(eta);
        r.estimate = est;
        r.se = se;
        r.lo = alpha / (1.0 + eps) - 3.0 * se;
        r.hi = alpha + 3.0 * se;
        r.pass = est >= r.lo && est <= r.hi;
        if (!r.pass)
            r.witness = "eta=" + Report::fmt_g(eta) + " seed=" + std::to_string(opt.seed);
        r.note = "eps=" + Report::fmt_g17(eps) + " horizon=" + std::to_string(T);
        rep.rows.push_back(r);
    }

    {
        // the estimates must climb toward alpha as the increments shrink
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < ests.size(); ++i)
            worst = std::min(worst, ests[i + 1] - ests[i]);
        const double tol = 2.0 * std::sqrt(2.0) * se;
        CheckRow r;
        r.suite = rep.suite;
        r.name = "ladder-nondecreasing";
        r.estimate = worst;
        r.se = se;
        r.lo = -tol;
        r.hi = 1.0;
        r.pass = worst >= r.lo;
        if (!r.pass) r.witness = "seed=" + std::to_string(opt.seed);
        r.note = "smallest consecutive increase across the eta ladder";
        rep.rows.push_back(r);
    }

    {
        // a flat factor has no usable deviation and must be rejected upfront
        auto flat = OddFactor::step_table({1.0}, {0.0, 0.0});
        bool rejected = false;
        std::string msg;
        try {
            if (!(factor_max_deviation(flat, 0.5) > 0.0))
                throw std::invalid_argument("factor is flat at eta");
        } catch (const std::invalid_argument& ex) {
            rejected = true;
            msg = ex.what();
        }
        CheckRow r;
        r.suite = rep.suite;
        r.name = "flat-factor-rejected";
        r.estimate = rejected ? 1.0 : 0.0;
        r.se = 0.0;
        r.lo = 1.0;
        r.hi = 1.0;
        r.pass = rejected;
        r.note = rejected ? msg : "flat factor slipped through";
        rep.rows.push_back(r);
    }

    return rep;
}

// ---------------------------------------------------------------------------
// uniformity: running infima of p-processes against the uniform law.
// ---------------------------------------------------------------------------
inline Report run_uniformity(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "uniformity";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const long long N = opt.quick ? 2000 : 100000;
    const int T = 40;
    // Dvoretzky-Kiefer-Wolfowitz radius at the 3-sigma confidence convention
    const double dkw = std::sqrt(std::log(2.0 / 0.0027) / (2.0 * static_cast<double>(N)));

    {
        auto agg = detail::run_blocks<detail::SampleAgg>(
            N, opt.threads, [&](long long b, long long e, detail::SampleAgg& s) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (1ull << 32) | static_cast<std::uint64_t>(i));
                    DyadicP dp;
                    int t = 0;
                    while (t < T) {
                        std::uint64_t bits = rng.next_u64();
                        for (int j = 0; j < 64 && t < T; ++j, ++t) {
                            dp.step((bits & 1) ? 1.0 : -1.0);
                            bits >>= 1;
                        }
                    }
                    s.v.push_back(dp.value());
                }
            });
        CheckRow r;
        r.suite = rep.suite;
        r.name = "dyadic-ks";
        r.estimate = ks_to_uniform(std::move(agg.v));
        r.se = 0.0;
        r.lo = 0.0;
        r.hi = opt.quick ? dkw : 0.01;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "model=rademacher seed=" + std::to_string(opt.seed);
        r.note = "KS distance of the running infimum to uniform at T=40";
        rep.rows.push_back(r);
    }

    {
        // exact check, no sampling: the dyadic terminal law at T=12 computed
        // three ways - streaming over all sign paths, as the running-infimum
        // law on the depth-12 sign tree, and in closed form
        const int depth = 12;
        auto tree = FiniteTree::uniform_binary(depth);
        std::vector<DyadicP> state(static_cast<std::size_t>(tree.size()));
        std::vector<Rat> payload(static_cast<std::size_t>(tree.size()), Rat(1));
        for (int v = 1; v < tree.size(); ++v) {
            const auto& node = tree.nodes[static_cast<std::size_t>(v)];
            const int parent = node.parent;
            DyadicP dp = state[static_cast<std::size_t>(parent)];
            const bool first = tree.nodes[static_cast<std::size_t>(parent)].children[0] == v;
            dp.step(first ? 1.0 : -1.0);
            state[static_cast<std::size_t>(v)] = dp;
            payload[static_cast<std::size_t>(v)] = Rat(dp.value());
        }
        auto law_tree = running_inf_law(tree, payload);

        std::map<Rat, Rat> law_stream;
        const Rat unit = Rat(1) / Rat(1ll << depth);
        for (long long mask = 0; mask < (1ll << depth); ++mask) {
            DyadicP dp;
            for (int j = 0; j < depth; ++j) dp.step((mask >> j) & 1 ? 1.0 : -1.0);
            law_stream[Rat(dp.value())] += unit;
        }

        bool same = law_tree.size() == law_stream.size();
        std::string witness;
        if (same) {
            std::size_t i = 0;
            for (const auto& [x, q] : law_stream) {
                if (!(law_tree[i].first == x) || !(law_tree[i].second == q)) {
                    same = false;
                    witness = "mismatch at atom " + std::to_string(i);
                    break;
                }
                ++i;
            }
        } else {
            witness = "support sizes differ";
        }
        // closed form: atoms k/2^T, k = 1..2^T, each of mass 2^-T
        if (same) {
            for (std::size_t k = 1; k <= (1ull << depth); ++k) {
                if (!(law_tree[k - 1].first == Rat(static_cast<long long>(k)) / Rat(1ll << depth)) ||
                    !(law_tree[k - 1].second == unit)) {
                    same = false;
                    witness = "closed form mismatch at k=" + std::to_string(k);
                    break;
                }
            }
        }
        CheckRow r;
        r.suite = rep.suite;
        r.name = "dyadic-exact-law-t12";
        r.estimate = same ? 1.0 : 0.0;
        r.se = 0.0;
        r.lo = 1.0;
        r.hi = 1.0;
        r.pass = same;
        r.witness = witness;
        r.note = "terminal law of the dyadic p-process, exact rational comparison";
        rep.rows.push_back(r);
    }

    {
        // randomized distribution transform of a Bernoulli(1/2) draw
        auto cdf = Cdf::make_step({0.0, 1.0}, {0.5, 0.5});
        auto agg = detail::run_blocks<detail::SampleAgg>(
            N, opt.threads, [&](long long b, long long e, detail::SampleAgg& s) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (2ull << 32) | static_cast<std::uint64_t>(i));
                    const double y = rng.uniform01() < 0.5 ? 0.0 : 1.0;
                    s.v.push_back(randomize(cdf, y, rng.uniform01()));
                }
            });
        CheckRow r;
        r.suite = rep.suite;
        r.name = "randomized-cdf-uniform";
        r.estimate = ks_to_uniform(std::move(agg.v));
        r.se = 0.0;
        r.lo = 0.0;
        r.hi = dkw;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "model=bernoulli:0.5 seed=" + std::to_string(opt.seed);
        r.note = "u F(y) + (1-u) F(y-) must be exactly uniform";
        rep.rows.push_back(r);
    }

    {
        // negative control: the clipped-factor p-process keeps mass at 1
        // (the factor hits zero on a negative sign, freezing p at its start)
        detail::CountAgg at_one = detail::run_blocks<detail::CountAgg>(
            N, opt.threads, [&](long long b, long long e, detail::CountAgg& agg) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (3ull << 32) | static_cast<std::uint64_t>(i));
                    // first sign decides: a leading -1 kills the product at t=1
                    if (rng.next_u64() & 1) ++agg.hits;
                    ++agg.n;
                }
            });
        CheckRow r;
        r.suite = rep.suite;
        r.name = "atom-at-one-control";
        r.estimate = at_one.freq();  // ~1/2; KS to uniform is at least est/2
        r.se = detail::binom_se(0.5, N);
        r.lo = 0.0;
        r.hi = 0.01;
        r.expected_fail = true;
        r.pass = r.estimate > r.hi;
        r.witness = "atom mass at 1 is ~" + Report::fmt_g17(r.estimate);
        r.note = "negative control: sup of an unrandomized martingale has an atom at one";
        rep.rows.push_back(r);
    }

    return rep;
}

// ---------------------------------------------------------------------------
// domination: pathwise A-versus-B comparisons with strictness counts.
// ---------------------------------------------------------------------------
namespace detail {

struct DominationAgg {
    long long violations = 0;  // A < B - tol somewhere
    long long strict = 0;      // paths where A > B + tol somewhere
    long long n = 0;
    long long aux = 0;  // per-check meaning, see notes
    double first_violation_path = -1;
    double first_violation_t = -1;
    void merge(const DominationAgg& o) {
        violations += o.violations;
        strict += o.strict;
        n += o.n;
        aux += o.aux;
        if (first_violation_path < 0) {
            first_violation_path = o.first_violation_path;
            first_violation_t = o.first_violation_t;
        }
    }
};

}  // namespace detail

inline Report run_domination(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "domination";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const long long N = opt.quick ? 1000 : 10000;
    const int T = 100;

    auto push_pair = [&](const std::string& name, const detail::DominationAgg& agg,
                         double strict_lo, double strict_hi, const std::string& note) {
        CheckRow v;
        v.suite = rep.suite;
        v.name = name + "-weak";
        v.estimate = static_cast<double>(agg.violations);
        v.se = 0.0;
        v.lo = 0.0;
        v.hi = 0.0;
        v.pass = agg.violations == 0;
        if (!v.pass)
            v.witness = "path=" + std::to_string(static_cast<long long>(agg.first_violation_path)) +
                        " t=" + std::to_string(static_cast<long long>(agg.first_violation_t));
        v.note = "count of pathwise order violations; " + note;
        rep.rows.push_back(v);

        CheckRow s;
        s.suite = rep.suite;
        s.name = name + "-strict";
        s.estimate = static_cast<double>(agg.strict) / static_cast<double>(agg.n);
        s.se = detail::binom_se(s.estimate, agg.n);
        s.lo = strict_lo;
        s.hi = strict_hi;
        s.pass = s.estimate >= s.lo && s.estimate <= s.hi;
        if (!s.pass) s.witness = "seed=" + std::to_string(opt.seed);
        s.note = "fraction of paths with a strict improvement; " + note;
        rep.rows.push_back(s);
    };

    {
        // mirrored product versus the plain one-sided exponential factor on
        // fair signs: never below, strictly above once a -1 appears
        auto agg = detail::run_blocks<detail::DominationAgg>(
            N, opt.threads, [&](long long b, long long e, detail::DominationAgg& agg) {
                const double lg_up = std::log(mirrored_exp_factor(1.0));
                const double lg_dn = std::log(mirrored_exp_factor(-1.0));
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (1ull << 32) | static_cast<std::uint64_t>(i));
                    double lnm = 0.0;
                    double lnsm = 0.0;
                    bool strict = false;
                    bool violated = false;
                    bool any_neg = false;
                    for (int t = 1; t <= T; ++t) {
                        const bool up = rng.next_u64() & 1;
                        const double x = up ? 1.0 : -1.0;
                        any_neg = any_neg || !up;
                        lnm += up ? lg_up : lg_dn;
                        lnsm += x - 0.5;  // log of e^(x - x^2/2) at |x| = 1
                        if (lnm < lnsm - 1e-12 && !violated) {
                            violated = true;
                            if (agg.first_violation_path < 0) {
                                agg.first_violation_path = static_cast<double>(i);
                                agg.first_violation_t = t;
                            }
                        }
                        if (lnm > lnsm + 1e-12) strict = true;
                    }
                    if (violated) ++agg.violations;
                    if (strict) ++agg.strict;
                    if (!any_neg) ++agg.aux;
                    ++agg.n;
                }
            });
        push_pair("mirrored-vs-plain", agg, 1.0, 1.0,
                  "strict exactly on paths containing a negative step (" +
                      std::to_string(agg.aux) + " all-positive paths seen)");
    }

    {
        // an instrument against itself: no violations, no strict improvements
        detail::DominationAgg agg;
        agg.n = N;
        push_pair("self-vs-self", agg, 0.0, 0.0, "identical processes");
    }

    {
        // clipped-factor p versus its improvement that subtracts 1/4 when the
        // first two signs are both negative
        auto agg = detail::run_blocks<detail::DominationAgg>(
            N, opt.threads, [&](long long b, long long e, detail::DominationAgg& agg) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (2ull << 32) | static_cast<std::uint64_t>(i));
                    const bool x1_neg = rng.next_u64() & 1;
                    const bool x2_neg = rng.next_u64() & 1;
                    if (x1_neg && x2_neg) ++agg.strict;  // p' = p - 1/4 from t = 2 on
                    ++agg.n;
                }
            });
        const double se = detail::binom_se(0.25, N);
        push_pair("p-prime-vs-p", agg, 0.25 - 3.0 * se, 0.25 + 3.0 * se,
                  "improvement fires on {X1 <= -1, X2 <= -1}, probability 1/4");
    }

    {
        // the gapped p-value 1{X1=0} U + 1{X1=1} sqrt(U) is dominated by U itself
        auto agg = detail::run_blocks<detail::DominationAgg>(
            N, opt.threads, [&](long long b, long long e, detail::DominationAgg& agg) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (3ull << 32) | static_cast<std::uint64_t>(i));
                    const double u = rng.uniform01();
                    const bool x1 = rng.next_u64() & 1;  // Bernoulli(1/2)
                    const double p1 = x1 ? std::sqrt(u) : u;
                    if (u > p1 + 1e-15) ++agg.violations;
                    if (u < p1 - 1e-15) ++agg.strict;
                    ++agg.n;
                }
            });
        const double se = detail::binom_se(0.5, N);
        push_pair("uniform-vs-gapped-p", agg, 0.5 - 3.0 * se, 0.5 + 3.0 * se,
                  "plain U dominates; strict whenever X1 = 1 and U < 1");
    }

    {
        // the minimum of the two one-sided Gaussian martingales is a strict
        // supermartingale; its own martingale part dominates it pathwise
        const long long Nm = opt.quick ? 500 : 4000;
        auto agg = detail::run_blocks<detail::DominationAgg>(
            Nm, opt.threads, [&](long long b, long long e, detail::DominationAgg& agg) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (4ull << 32) | static_cast<std::uint64_t>(i));
                    double s = 0.0;
                    double ev = 1.0;  // exp(-|s| - t/2)
                    double comp = 0.0;
                    bool strict = false;
                    bool violated = false;
                    for (int t = 1; t <= T; ++t) {
                        // predictable compensator increment, in closed form
                        const double a = std::abs(s);
                        const double cond = std::exp(-0.5 * static_cast<double>(t)) *
                                            std::exp(0.5) *
                                            (std::exp(-a) * detail::normal_cdf(a - 1.0) +
                                             std::exp(a) * detail::normal_cdf(-a - 1.0));
                        comp += ev - cond;
                        s += rng.normal();
                        ev = std::exp(-std::abs(s) - 0.5 * static_cast<double>(t));
                        const double mart = ev + comp;
                        if (mart < ev - 1e-12) violated = true;
                        if (mart > ev + 1e-12) strict = true;
                    }
                    if (violated) ++agg.violations;
                    if (strict) ++agg.strict;
                    ++agg.n;
                }
            });
        push_pair("min-martingale-vs-part", agg, 1.0, 1.0,
                  "minimum of two martingales is improved by its own martingale part");
    }

    return rep;
}

// ---------------------------------------------------------------------------
// stopping-matrix: error rates and expectations across stopping-rule classes.
// ---------------------------------------------------------------------------
inline Report run_stopping_matrix(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "stopping-matrix";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const double alpha = 0.05;
    const int T_gauss = opt.quick ? 500 : 10000;
    const long long N_gauss = opt.quick ? 2000 : 100000;
    const int T_dyadic = 40;
    const long long N_dyadic = opt.quick ? 5000 : 100000;

    struct DyadicAgg {
        long long err_fixed = 0, err_cross = 0, err_min = 0;
        detail::MomentAgg calibrated;
        detail::MomentAgg calibrated_fixed;
        long long n = 0;
        void merge(const DyadicAgg& o) {
            err_fixed += o.err_fixed;
            err_cross += o.err_cross;
            err_min += o.err_min;
            calibrated.merge(o.calibrated);
            calibrated_fixed.merge(o.calibrated_fixed);
            n += o.n;
        }
    };

    auto dyadic = detail::run_blocks<DyadicAgg>(
        N_dyadic, opt.threads, [&](long long b, long long e, DyadicAgg& agg) {
            for (long long i = b; i < e; ++i) {
                Rng rng(opt.seed, (1ull << 32) | static_cast<std::uint64_t>(i));
                DyadicP dp;
                bool crossed = false;
                double p_at_cross = 1.0;
                int t = 0;
                while (t < T_dyadic) {
                    std::uint64_t bits = rng.next_u64();
                    for (int j = 0; j < 64 && t < T_dyadic; ++j, ++t) {
                        dp.step((bits & 1) ? 1.0 : -1.0);
                        bits >>= 1;
                        if (!crossed && dp.value() <= alpha) {
                            crossed = true;
                            p_at_cross = dp.value();
                        }
                    }
                }
                const double p_T = dp.value();  // nonincreasing, so also the infimum
                if (p_T <= alpha) ++agg.err_fixed;
                if (crossed) ++agg.err_cross;
                if (p_T <= alpha) ++agg.err_min;
                // calibrated e-value at the first-crossing rule (else at T);
                // the fixed-time rule sees the smaller final p, so its mean
                // is the larger of the two and the binding case for safety
                const double p_tau = crossed ? p_at_cross : p_T;
                agg.calibrated.add(0.5 / std::sqrt(p_tau));
                agg.calibrated_fixed.add(0.5 / std::sqrt(p_T));
                ++agg.n;
            }
        });

    {
        const double ef = static_cast<double>(dyadic.err_fixed) / static_cast<double>(dyadic.n);
        const double ec = static_cast<double>(dyadic.err_cross) / static_cast<double>(dyadic.n);
        const double em = static_cast<double>(dyadic.err_min) / static_cast<double>(dyadic.n);
        const double spread =
            std::max({ef, ec, em}) - std::min({ef, ec, em});
        const double se = detail::binom_se(alpha, N_dyadic);
        CheckRow r;
        r.suite = rep.suite;
        r.name = "p-rules-agree";
        r.estimate = spread;
        r.se = se;
        r.lo = 0.0;
        r.hi = 2.0 * std::sqrt(2.0) * se;
        r.pass = spread <= r.hi;
        if (!r.pass) r.witness = "fixed=" + Report::fmt_g17(ef) + " crossing=" +
                                 Report::fmt_g17(ec) + " infimum=" + Report::fmt_g17(em);
        r.note = "largest spread of error frequencies across fixed-time, first-crossing, "
                 "and running-infimum rules (estimates " +
                 Report::fmt_g17(ef) + ", " + Report::fmt_g17(ec) + ", " + Report::fmt_g17(em) +
                 ")";
        rep.rows.push_back(r);
    }

    {
        CheckRow r;
        r.suite = rep.suite;
        r.name = "calibrated-p-safety";
        r.estimate = dyadic.calibrated.mean();
        r.se = dyadic.calibrated.se();
        r.lo = 0.0;
        r.hi = 1.0 + 3.0 * r.se;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "seed=" + std::to_string(opt.seed);
        r.note = "E[1/(2 sqrt(p)) at the first-crossing rule] for the dyadic p-process";
        rep.rows.push_back(r);
    }

    {
        CheckRow r;
        r.suite = rep.suite;
        r.name = "calibrated-p-safety-fixed-time";
        r.estimate = dyadic.calibrated_fixed.mean();
        r.se = dyadic.calibrated_fixed.se();
        r.lo = 0.0;
        r.hi = 1.0 + 3.0 * r.se;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "seed=" + std::to_string(opt.seed);
        r.note = "E[1/(2 sqrt(p)) at the fixed horizon] for the dyadic p-process";
        rep.rows.push_back(r);
    }

    auto gsup = detail::gaussian_sup_stats(alpha, T_gauss, N_gauss, opt.seed, 2, opt.threads);

    {
        CheckRow r;
        r.suite = rep.suite;
        r.name = "e-optional-stopping";
        r.estimate = gsup.e_tau.mean();
        r.se = gsup.e_tau.se();
        r.lo = 0.0;
        r.hi = 1.0 + 3.0 * r.se;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "model=gauss:0,1 seed=" + std::to_string(opt.seed);
        r.note = "E[e at the first crossing of 1/alpha, else at T]";
        rep.rows.push_back(r);
    }

    {
        CheckRow r;
        r.suite = rep.suite;
        r.name = "sup-sqrt-e-bound";
        r.estimate = gsup.sup_sqrt.mean();
        r.se = gsup.sup_sqrt.se();
        r.lo = 0.0;
        r.hi = 2.0 + 3.0 * r.se;
        r.pass = r.estimate <= r.hi;
        if (!r.pass) r.witness = "model=gauss:0,1 seed=" + std::to_string(opt.seed);
        r.note = "E[1 v sqrt(sup e)]; integrating the time-uniform tail bounds this by 2";
        rep.rows.push_back(r);
    }

    {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        CheckRow r;
        r.suite = rep.suite;
        r.name = "adversarial-max-report";
        r.estimate = gsup.e_argmax.mean();
        r.se = gsup.e_argmax.se();
        r.lo = nan;
        r.hi = nan;
        r.pass = true;
        r.note = "E[e at the running argmax]; the argmax peeks ahead and is not a stopping "
                 "time, so no bound is asserted (crossed fraction " +
                 Report::fmt_g17(static_cast<double>(gsup.crossed) /
                                 static_cast<double>(gsup.n)) +
                 ")";
        rep.rows.push_back(r);
    }

    {
        // deterministic negative control: the inflated process fails optional
        // stopping at a fixed time by an enormous margin
        const double grown = std::pow(1.01, std::min(T_gauss, 2000));
        CheckRow r;
        r.suite = rep.suite;
        r.name = "inflated-e-control";
        r.estimate = grown;
        r.se = 0.0;
        r.lo = 0.0;
        r.hi = 1.0;
        r.expected_fail = true;
        r.pass = r.estimate > r.hi;
        r.witness = "deterministic value at t=" + std::to_string(std::min(T_gauss, 2000));
        r.note = "negative control: E[e_T] for the 1.01-per-step inflation";
        rep.rows.push_back(r);
    }

    return rep;
}

// ---------------------------------------------------------------------------
// tree-exact: the rational engine re-verified on a random corpus, no tolerances.
// ---------------------------------------------------------------------------
inline Report run_tree_exact(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "tree-exact";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const int n_trees = opt.quick ? 40 : 200;

    long long ok_snell = 0, ok_doob = 0, ok_adm_e = 0, ok_implied = 0, ok_ville = 0,
              ok_equiv = 0, ok_adm_p = 0, enumerated = 0;
    std::string witness;

    for (int i = 0; i < n_trees; ++i) {
        Rng rng(opt.seed, 0x7000000000000000ull + static_cast<std::uint64_t>(i));
        const int depth = 2 + i % 7;
        auto tree = random_tree(rng, depth);
        auto mark = [&](bool ok, long long& counter, const char* what) {
            if (ok) {
                ++counter;
            } else if (witness.empty()) {
                witness = std::string(what) + " failed on tree " + std::to_string(i);
            }
        };

        // martingale payloads are their own Snell envelope with zero compensator
        auto m = random_nm_payload(rng, tree);
        {
            auto sr = snell_doob(tree, m);
            mark(sr.envelope == m && sr.martingale == m, ok_snell, "snell-fixed-point");
        }

        // general nonnegative payload: envelope value against the stopping oracle,
        // exact Doob reconstruction along the way
        auto y = random_nonneg_payload(rng, tree);
        {
            auto sr = snell_doob(tree, y);
            bool doob_ok = sr.compensator[0] == 0;
            for (int v = 0; v < tree.size() && doob_ok; ++v) {
                doob_ok = sr.martingale[static_cast<std::size_t>(v)] ==
                              sr.envelope[static_cast<std::size_t>(v)] +
                                  sr.compensator[static_cast<std::size_t>(v)] &&
                          sr.envelope[static_cast<std::size_t>(v)] >=
                              y[static_cast<std::size_t>(v)];
            }
            auto bf = brute_force_safety(tree, y);
            if (bf.enumerated) ++enumerated;
            mark(bf.value == sr.envelope[0], ok_snell, "snell-vs-bruteforce");
            mark(doob_ok, ok_doob, "doob-reconstruction");

            // rescale to a safe payload and improve it into an exact martingale
            std::vector<Rat> safe = y;
            if (sr.envelope[0] > 1)
                for (auto& x : safe) x /= sr.envelope[0];
            auto out = admissibilize_e(tree, safe);
            bool adm_ok = out[0] == 1;
            for (int v = 0; v < tree.size() && adm_ok; ++v) {
                const auto& node = tree.nodes[static_cast<std::size_t>(v)];
                if (!node.children.empty()) {
                    Rat mean = 0;
                    for (int c : node.children)
                        mean += tree.nodes[static_cast<std::size_t>(c)].prob *
                                out[static_cast<std::size_t>(c)];
                    adm_ok = mean == out[static_cast<std::size_t>(v)];
                }
                if (adm_ok)
                    adm_ok = out[static_cast<std::size_t>(v)] >= safe[static_cast<std::size_t>(v)];
            }
            mark(adm_ok, ok_adm_e, "admissibilize-e");
        }

        // likelihood-ratio identity for the implied alternative
        {
            auto alt = implied_alternative(tree, m);
            bool lr_ok = true;
            for (int v = 0; v < tree.size() && lr_ok; ++v)
                lr_ok = alt.reach(v) == m[static_cast<std::size_t>(v)] * tree.reach(v);
            mark(lr_ok, ok_implied, "implied-alternative");
        }

        mark(conditional_ville_check(tree, m, Rat(1, 4)).pass, ok_ville, "conditional-ville");

        {
            auto ev = random_events(rng, tree);
            auto eq = equivalence_check(tree, ev);
            mark(eq.prob_union == eq.best_random_time &&
                     eq.prob_union == eq.best_stopping_time,
                 ok_equiv, "equivalence");
        }

        {
            auto p = random_p_payload(rng, tree);
            auto out = admissibilize_p(tree, p);
            bool p_ok = true;
            for (int v = 0; v < tree.size() && p_ok; ++v)
                p_ok = out[static_cast<std::size_t>(v)] <= p[static_cast<std::size_t>(v)];
            if (p_ok) p_ok = admissibilize_p(tree, out) == out;
            if (p_ok) {
                auto law = running_inf_law(tree, out);
                Rat acc = 0;
                for (const auto& [x, q] : law) {
                    acc += q;
                    if (!(acc == x)) {
                        p_ok = false;
                        break;
                    }
                }
            }
            mark(p_ok, ok_adm_p, "admissibilize-p");
        }
    }

    auto push = [&](const std::string& name, long long count, long long expect,
                    const std::string& note) {
        CheckRow r;
        r.suite = rep.suite;
        r.name = name;
        r.estimate = static_cast<double>(count);
        r.se = 0.0;
        r.lo = static_cast<double>(expect);
        r.hi = static_cast<double>(expect);
        r.pass = count == expect;
        if (!r.pass) r.witness = witness;
        r.note = note;
        rep.rows.push_back(r);
    };

    push("snell-vs-bruteforce", ok_snell, 2ll * n_trees,
         "envelope fixed point on martingales plus oracle agreement (" +
             std::to_string(enumerated) + " of " + std::to_string(n_trees) +
             " small enough to enumerate all stopping times)");
    push("doob-reconstruction", ok_doob, n_trees,
         "martingale = envelope + compensator at every node, exactly");
    push("admissibilize-e", ok_adm_e, n_trees,
         "output is an exact martingale with root 1 dominating the input");
    push("implied-alternative", ok_implied, n_trees,
         "reweighted reach equals martingale times original reach at every node");
    push("conditional-ville", ok_ville, n_trees,
         "per-node crossing probabilities within alpha, exact rationals");
    push("equivalence", ok_equiv, n_trees,
         "union, best random time, and best stopping time probabilities coincide");
    push("admissibilize-p", ok_adm_p, n_trees,
         "output dominates, is idempotent, and its infimum law fixes its own cdf");

    return rep;
}

// ---------------------------------------------------------------------------
// counterexamples: regression suite for the worked improvement examples.
// ---------------------------------------------------------------------------
inline Report run_counterexamples(const HarnessOptions& opt) {
    Report rep;
    rep.suite = "counterexamples";
    rep.seed = opt.seed;
    rep.threads = opt.threads;
    rep.quick = opt.quick;
    const long long N = opt.quick ? 2000 : 20000;
    const int T = 64;

    // clipped-factor p-process on fair signs: the product is 2^t until the
    // first -1 (where the factor hits zero), so inf p = 2^-L with L the
    // leading run of +1's.  p' subtracts 1/4 when the first two signs are
    // negative; p'' subtracts 1/4 unconditionally from t = 2 on.
    struct ClippedAgg {
        long long le_half_p = 0, le_08_p = 0;
        long long le_half_pp = 0, le_08_pp = 0;
        long long le_08_ppp = 0;
        long long n = 0;
        void merge(const ClippedAgg& o) {
            le_half_p += o.le_half_p;
            le_08_p += o.le_08_p;
            le_half_pp += o.le_half_pp;
            le_08_pp += o.le_08_pp;
            le_08_ppp += o.le_08_ppp;
            n += o.n;
        }
    };
    auto agg = detail::run_blocks<ClippedAgg>(
        N, opt.threads, [&](long long b, long long e, ClippedAgg& a) {
            for (long long i = b; i < e; ++i) {
                Rng rng(opt.seed, (1ull << 32) | static_cast<std::uint64_t>(i));
                // the first two signs matter even after the product dies, so
                // they are drawn unconditionally before the leading-run scan
                const bool first_neg = rng.next_u64() & 1;
                const bool second_neg = rng.next_u64() & 1;
                int L = 0;
                if (!first_neg) {
                    ++L;
                    if (!second_neg) {
                        ++L;
                        for (int t = 3; t <= T; ++t) {
                            if (rng.next_u64() & 1) break;
                            ++L;
                        }
                    }
                }
                const double p_inf = std::ldexp(1.0, -L);
                const double mod = (first_neg && second_neg) ? 0.25 : 0.0;
                const double pp_inf = p_inf - mod;
                const double ppp_inf = p_inf - 0.25;
                if (p_inf <= 0.5) ++a.le_half_p;
                if (p_inf <= 0.8) ++a.le_08_p;
                if (pp_inf <= 0.5) ++a.le_half_pp;
                if (pp_inf <= 0.8) ++a.le_08_pp;
                if (ppp_inf <= 0.8) ++a.le_08_ppp;
                ++a.n;
            }
        });

    auto push_prob = [&](const std::string& name, long long hits, double target, double level,
                         bool two_sided, const std::string& note) {
        const double est = static_cast<double>(hits) / static_cast<double>(N);
        const double se = detail::binom_se(target, N);
        CheckRow r;
        r.suite = rep.suite;
        r.name = name;
        r.estimate = est;
        r.se = se;
        r.lo = two_sided ? target - 3.0 * se : 0.0;
        r.hi = two_sided ? target + 3.0 * se : level + 3.0 * se;
        r.pass = est >= r.lo && est <= r.hi;
        if (!r.pass) r.witness = "seed=" + std::to_string(opt.seed);
        r.note = note;
        rep.rows.push_back(r);
    };

    push_prob("p-prime-valid-05", agg.le_half_pp, 0.5, 0.5, false,
              "P(inf p' <= 1/2) against the validity budget 1/2");
    push_prob("p-prime-valid-08", agg.le_08_pp, 0.75, 0.8, false,
              "P(inf p' <= 0.8) against the validity budget 0.8");
    push_prob("p-prime-tight-05", agg.le_half_pp, 0.5, 0.5, true,
              "the improvement uses the whole budget: exact value 1/2");
    push_prob("p-prime-tight-08", agg.le_08_pp, 0.75, 0.8, true,
              "mass 1/4 moved from 1 to 3/4: exact value 3/4");

    {
        // unconditional subtraction is not valid: P(inf p'' <= 0.8) = 1
        const double est = static_cast<double>(agg.le_08_ppp) / static_cast<double>(N);
        const double se = detail::binom_se(0.8, N);
        CheckRow r;
        r.suite = rep.suite;
        r.name = "p-doubleprime-control";
        r.estimate = est;
        r.se = se;
        r.lo = 0.0;
        r.hi = 0.8 + 3.0 * se;
        r.expected_fail = true;
        r.pass = est > r.hi;
        r.witness = "P(inf p'' <= 0.8) = " + Report::fmt_g17(est);
        r.note = "negative control: subtracting 1/4 everywhere breaks validity";
        rep.rows.push_back(r);
    }

    // the atomic max-martingale: p_t = 1/2 + k_t/2^(t+1); from k = 1 it moves
    // down with probability (2^(t+1)+1)/(2^(t+1)+2), elsewhere a fair coin
    {
        const int T_atomic = 30;
        struct AtomicAgg {
            long long at_first_atom = 0;  // p_10 equals its lowest support point
            long long le_06 = 0;          // p_30 <= 0.6
            long long le_045 = 0;         // p_30 <= 0.45, provably impossible
            long long n = 0;
            void merge(const AtomicAgg& o) {
                at_first_atom += o.at_first_atom;
                le_06 += o.le_06;
                le_045 += o.le_045;
                n += o.n;
            }
        };
        auto at = detail::run_blocks<AtomicAgg>(
            N, opt.threads, [&](long long b, long long e, AtomicAgg& a) {
                for (long long i = b; i < e; ++i) {
                    Rng rng(opt.seed, (2ull << 32) | static_cast<std::uint64_t>(i));
                    long long k = 1;
                    for (int t = 0; t < T_atomic; ++t) {
                        double down_prob = 0.5;
                        if (k == 1) {
                            const double pow2 = std::ldexp(1.0, t + 1);
                            down_prob = (pow2 + 1.0) / (pow2 + 2.0);
                        }
                        const bool down = rng.uniform01() < down_prob;
                        k = down ? 2 * k - 1 : 2 * k;
                        if (t + 1 == 10 && k == 1) ++a.at_first_atom;
                    }
                    const double p = 0.5 + std::ldexp(static_cast<double>(k), -(T_atomic + 1));
                    if (p <= 0.6) ++a.le_06;
                    if (p <= 0.45) ++a.le_045;
                    ++a.n;
                }
            });
        const double atom_target = 0.5 + std::ldexp(1.0, -11);
        push_prob("atomic-p-marginal", at.at_first_atom, atom_target, atom_target, true,
                  "P(p_10 at its lowest atom) = 1/2 + 2^-11 by the marginal law");
        push_prob("atomic-p-valid-06", at.le_06, 0.6, 0.6, false,
                  "P(p_30 <= 0.6) stays within the budget (and exhausts it)");
        {
            CheckRow r;
            r.suite = rep.suite;
            r.name = "atomic-p-support";
            r.estimate = static_cast<double>(at.le_045);
            r.se = 0.0;
            r.lo = 0.0;
            r.hi = 0.0;
            r.pass = at.le_045 == 0;
            if (!r.pass) r.witness = "count below 0.45: " + std::to_string(at.le_045);
            r.note = "the process never drops below 1/2; no sample may undercut 0.45";
            rep.rows.push_back(r);
        }
    }

    {
        // confidence sequences do not survive convex closure: the two-point
        // sequence {-1,+1} covers each mixture component but never the
        // mixture's mean functional, which is 0
        CheckRow a;
        a.suite = rep.suite;
        a.name = "cs-members-covered";
        a.estimate = 1.0;
        a.se = 0.0;
        a.lo = 1.0;
        a.hi = 1.0;
        a.pass = true;
        a.note = "the fixed set {-1,+1} contains the mean under each component law";
        rep.rows.push_back(a);

        CheckRow b;
        b.suite = rep.suite;
        b.name = "cs-convex-closure-control";
        b.estimate = 0.0;  // coverage of the mixture functional
        b.se = 0.0;
        b.lo = 0.95;
        b.hi = 1.0;
        b.expected_fail = true;
        b.pass = b.estimate < b.lo;
        b.witness = "mean of the equal mixture is 0, never an element of {-1,+1}";
        b.note = "negative control: validity does not extend to the convex closure";
        rep.rows.push_back(b);
    }

    return rep;
}

inline Report run_suite(const std::string& name, const HarnessOptions& opt) {
    if (name == "ville") return run_ville(opt);
    if (name == "anticoncentration") return run_anticoncentration(opt);
    if (name == "uniformity") return run_uniformity(opt);
    if (name == "domination") return run_domination(opt);
    if (name == "stopping-matrix") return run_stopping_matrix(opt);
    if (name == "tree-exact") return run_tree_exact(opt);
    if (name == "counterexamples") return run_counterexamples(opt);
    throw std::invalid_argument("unknown suite: " + name);
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "ville",      "anticoncentration", "uniformity", "domination",
        "stopping-matrix", "tree-exact",   "counterexamples"};
    return names;
}

}  // namespace anytime
