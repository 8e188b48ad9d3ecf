#include <anytime/calibrate.hpp>
#include <anytime/symmetry.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace anytime;

TEST_CASE("exponential supermartingale factors") {
    ExpNsm s;
    s.step(1.0);
    CHECK(s.value() == Catch::Approx(1.6487212707001281468).epsilon(1e-12));
    s.step(0.0);
    CHECK(s.value() == Catch::Approx(1.6487212707001281468).epsilon(1e-12));
    s.step(-1.0);
    // e^{1/2} * e^{-3/2} = e^{-1}
    CHECK(s.value() == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));

    ExpNsm down;
    down.step(-1.0);
    CHECK(down.value() == Catch::Approx(0.22313016014842982893).epsilon(1e-12));
}

TEST_CASE("mirroring balances a supermartingale factor") {
    auto f = mirror([](double y) { return exp_nsm_factor(y); });
    CHECK(f(1.0) == Catch::Approx(1.6487212707001281468).epsilon(1e-12));
    CHECK(f(-1.0) == Catch::Approx(0.35127872929987185315).epsilon(1e-12));
    CHECK(f(1.0) + f(-1.0) == Catch::Approx(2.0).margin(1e-15));

    for (int i = 0; i <= 100; ++i) {
        double y = -5.0 + 0.1 * i;
        CHECK(f(y) == Catch::Approx(mirrored_exp_factor(y)).margin(1e-15));
        CHECK(f(y) + f(-y) == Catch::Approx(2.0).margin(1e-12));
        CHECK(f(y) >= exp_nsm_factor(y) - 1e-15);
    }

    auto one = mirror([](double) { return 1.0; });
    CHECK(one(0.7) == 1.0);
    CHECK(one(-3.0) == 1.0);

    SECTION("already balanced factors are fixed points") {
        auto g = OddFactor::arctan();
        auto mirrored = mirror([&](double y) { return g(y); }, 1.5);
        for (int i = 0; i <= 60; ++i) {
            double y = -1.5 + 0.05 * i;
            CHECK(mirrored(y) == Catch::Approx(g(y)).margin(1e-15));
        }
    }
    SECTION("supermartingale condition is enforced with a witness") {
        CHECK_THROWS_AS(mirror([](double) { return 1.2; }), std::invalid_argument);
        CHECK_THROWS_WITH(mirror([](double) { return 1.2; }),
                          Catch::Matchers::ContainsSubstring("at y ="));
    }
}

TEST_CASE("odd factor families") {
    SECTION("arctan values") {
        auto f = OddFactor::arctan();
        CHECK(f(1.0) == Catch::Approx(1.7853981633974483096).epsilon(1e-12));
        CHECK(f(-1.0) == Catch::Approx(0.21460183660255169038).epsilon(1e-12));
        OddNm nm(f);
        nm.step(1.0);
        nm.step(-1.0);
        CHECK(nm.value() == Catch::Approx(0.38314972493191508632).epsilon(1e-12));
    }
    SECTION("sine wrapper is odd through zero") {
        auto f = OddFactor::sine();
        CHECK(f(0.0) == 1.0);
        CHECK(f(1.0) == Catch::Approx(1.0 + std::sin(1.0)).epsilon(1e-14));
        CHECK(f(1.0) + f(-1.0) == Catch::Approx(2.0).margin(1e-15));
    }
    SECTION("mirrored exponential wrapper") {
        auto f = OddFactor::mirrored_exp();
        CHECK(f(1.0) == Catch::Approx(1.6487212707001281468).epsilon(1e-12));
        CHECK(f(-1.0) == Catch::Approx(0.35127872929987185315).epsilon(1e-12));
    }
    SECTION("step table wrapper") {
        auto f = OddFactor::step_table({1.0}, {0.5, 0.9});
        CHECK(f(0.5) == 1.5);
        CHECK(f(1.0) == 1.5);  // bins are (lo, hi]
        CHECK(f(2.0) == Catch::Approx(1.9).margin(1e-15));
        CHECK(f(-2.0) == Catch::Approx(0.1).margin(1e-15));
        CHECK(f(0.0) == 1.0);
        CHECK_THROWS_AS(OddFactor::step_table({1.0}, {0.5, 1.5}), std::invalid_argument);
        CHECK_THROWS_AS(OddFactor::step_table({-1.0}, {0.5, 0.9}), std::invalid_argument);
        CHECK_THROWS_AS(OddFactor::step_table({2.0, 1.0}, {0.1, 0.2, 0.3}), std::invalid_argument);
        CHECK_THROWS_AS(OddFactor::step_table({1.0}, {0.5}), std::invalid_argument);
    }
    SECTION("composed odd transforms keep the balance") {
        for (auto h : {OddFactor::H::identity, OddFactor::H::cube, OddFactor::H::sinh,
                       OddFactor::H::clipped}) {
            auto f = OddFactor::sine(h, 0.5);
            for (int i = 0; i <= 40; ++i) {
                double y = -2.0 + 0.1 * i;
                CHECK(f(0.5 + y) + f(0.5 - y) == Catch::Approx(2.0).margin(1e-12));
            }
        }
    }
    SECTION("probe validation") {
        CHECK_NOTHROW(OddFactor::arctan().validate(1.5));
        CHECK_THROWS_AS(OddFactor::arctan().validate(8.0), std::invalid_argument);  // goes negative
        CHECK_NOTHROW(OddFactor::arctan(OddFactor::H::clipped).validate(100.0));
        CHECK_NOTHROW(OddFactor::sine().validate(50.0));
        CHECK_NOTHROW(OddFactor::mirrored_exp().validate(50.0));
        CHECK_NOTHROW(OddFactor::step_table({1.0}, {0.5, 0.9}).validate(50.0));
    }
    SECTION("max deviation near zero") {
        auto f = OddFactor::arctan();
        CHECK(factor_max_deviation(f, 0.5) == Catch::Approx(0.46364760900080611621).epsilon(1e-12));
        CHECK(factor_max_deviation(f, 0.1) == Catch::Approx(0.099668652491162027378).epsilon(1e-12));
        CHECK(factor_max_deviation(f, 0.02) == Catch::Approx(0.019997333973150533061).epsilon(1e-12));
        CHECK(factor_max_deviation(f, 0.02) < factor_max_deviation(f, 0.1));
    }
    SECTION("negative factor values are a domain error") {
        OddNm nm(OddFactor::arctan());
        CHECK_THROWS_AS(nm.step(-5.0), std::domain_error);
    }
    SECTION("zero factor value absorbs the product") {
        OddNm nm(OddFactor::step_table({1.0}, {-1.0, 0.0}));
        nm.step(0.5);  // factor 1 + (-1) = 0
        CHECK(nm.value() == 0.0);
        nm.step(-0.5);  // factor 2 cannot revive it
        CHECK(nm.value() == 0.0);
    }
}

TEST_CASE("mirrored product dominates the plain supermartingale") {
    for (int i = 0; i <= 100; ++i) {
        double y = -5.0 + 0.1 * i;
        if (y >= 0.0)
            CHECK(mirrored_exp_factor(y) == exp_nsm_factor(y));
        else
            CHECK(mirrored_exp_factor(y) > exp_nsm_factor(y));
    }

    auto path = sample_path(NullModel::gaussian(0.0, 1.0), 200, 21);
    double log_nsm = 0.0, log_nm = 0.0;
    bool seen_negative = false;
    for (double x : path.xs) {
        log_nsm += x - 0.5 * x * x;
        log_nm += std::log(mirrored_exp_factor(x));
        seen_negative = seen_negative || x < 0.0;
        if (seen_negative)
            CHECK(log_nm > log_nsm);
        else
            CHECK(log_nm == Catch::Approx(log_nsm).margin(1e-12));
    }
    REQUIRE(seen_negative);

    // an all-nonnegative stretch keeps them exactly equal
    double eq_nsm = 0.0, eq_nm = 0.0;
    for (double x : path.xs) {
        double a = std::abs(x);
        eq_nsm += a - 0.5 * a * a;
        eq_nm += std::log(mirrored_exp_factor(a));
    }
    CHECK(eq_nm == Catch::Approx(eq_nsm).margin(1e-12));
}

TEST_CASE("odd factors have exact unit mean on two-point supports") {
    std::vector<OddFactor> factors = {
        OddFactor::arctan(), OddFactor::sine(), OddFactor::mirrored_exp(),
        OddFactor::step_table({1.0}, {0.5, 0.9}), OddFactor::arctan(OddFactor::H::cube)};
    for (const auto& f : factors)
        for (double eta : {0.3, 0.8, 1.2})
            CHECK(0.5 * (f(eta) + f(-eta)) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("odd factor products keep mean one under symmetric sampling") {
    struct Case {
        NullModel model;
        const char* name;
    };
    std::vector<Case> cases = {
        {NullModel::gaussian(0.0, 1.0), "gaussian"},
        {NullModel::two_point(0.0, 0.8), "two-point"},
        {NullModel::heavy_tail(0.0, NullModel::Tail::cauchy), "cauchy"},
    };
    auto f = OddFactor::arctan(OddFactor::H::clipped);
    const int n = 20000, T = 10;
    for (const auto& c : cases) {
        INFO(c.name);
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            auto path = sample_path(c.model, T, 13, std::uint64_t(i) + 1);
            OddNm nm(f);
            for (double x : path.xs) nm.step(x);
            double v = nm.value();
            sum += v;
            sumsq += v * v;
        }
        double mean = sum / n;
        double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
        CHECK(std::abs(mean - 1.0) <= 4.0 * se);
    }
}

TEST_CASE("sign walk thresholds") {
    CHECK(sign_walk_threshold(0.05) == 20);
    CHECK(sign_walk_threshold(0.5) == 2);
    CHECK(sign_walk_threshold(1.0) == 1);
    CHECK(sign_walk_threshold(1.0 / 3.0) == 3);
    CHECK_THROWS_AS(sign_walk_threshold(0.3), std::invalid_argument);
    CHECK_THROWS_AS(sign_walk_threshold(0.0), std::invalid_argument);
    CHECK_THROWS_AS(sign_walk_threshold(1.0001), std::invalid_argument);
}

TEST_CASE("sign walk stepping and rejection") {
    CHECK(sign_walk_test({1.0}, 0.5) == 1);
    CHECK(sign_walk_test({-1.0, 1.0, 1.0, 1.0}, 0.5) == kNever);  // absorbed at zero
    CHECK(sign_walk_test({0.0, 0.0, 1.0}, 0.5) == 3);             // zeros do not move it
    CHECK(sign_walk_test({2.5, 0.5}, 1.0) == 1);                  // threshold 1: already there
    CHECK(sign_walk_test({}, 1.0) == kNever);
    CHECK(sign_walk_test({1.0, 3.0}, 0.5, 2.0) == kNever);  // centered walk drops to zero first
    CHECK(sign_walk_test({3.0, 1.0}, 0.5, 2.0) == 1);

    SignWalk w(3);
    w.step(1.0);
    w.step(1.0);
    CHECK(w.rejected());
    w.step(-1.0);  // absorbed: further steps ignored
    CHECK(w.value == 3);
}

TEST_CASE("sign walk hits the threshold with probability one over threshold") {
    const int n = 20000, T = 2000;
    const double alpha = 0.05;
    const int threshold = sign_walk_threshold(alpha);
    auto model = NullModel::rademacher(0.0);
    int rejected = 0, unabsorbed = 0;
    for (int i = 0; i < n; ++i) {
        PathSampler s(model, 2718, std::uint64_t(i) + 1);
        SignWalk walk(threshold);
        int t = 0;
        while (t < T && !walk.absorbed()) {
            walk.step(s.next());
            ++t;
        }
        CHECK(walk.value <= threshold);  // never overshoots
        rejected += walk.rejected();
        unabsorbed += !walk.absorbed();
    }
    CHECK(double(unabsorbed) / n < 0.01);
    double freq = double(rejected) / n;
    double se = std::sqrt(freq * (1.0 - freq) / n);
    CHECK(std::abs(freq - 1.0 / threshold) <= 3.0 * se);
}

TEST_CASE("dyadic p-value exact updates") {
    SECTION("signed path") {
        DyadicP p;
        p.step(1.0);
        CHECK(p.equals(1, 1));
        CHECK(p.value() == 0.5);
        p.step(-1.0);
        CHECK(p.equals(1, 1));
        p.step(1.0);
        CHECK(p.equals(3, 3));
        CHECK(p.value() == 0.375);
        CHECK(p.n_nonzero() == 3);
    }
    SECTION("zeros are inert") {
        DyadicP p;
        p.step(0.0);
        CHECK(p.equals(1, 0));
        CHECK(p.n_nonzero() == 0);
        p.step(1.0);
        CHECK(p.equals(1, 1));
    }
    SECTION("all-negative paths never move") {
        DyadicP p;
        for (int t = 0; t < 100; ++t) {
            p.step(-1.0);
            CHECK(p.equals(1, 0));
        }
        CHECK(p.n_nonzero() == 100);
        CHECK(p.value() == 1.0);
    }
    SECTION("all-positive paths halve the remainder") {
        DyadicP p;
        for (int t = 1; t <= 30; ++t) {
            p.step(2.0);
            CHECK(p.equals(1, t));
        }
    }
    SECTION("updates saturate past 64 nonzeros") {
        DyadicP p;
        for (int t = 0; t < 70; ++t) p.step(-1.0);
        CHECK(p.k() == 64);
        CHECK(p.n_nonzero() == 70);
        p.step(1.0);  // correction 2^{-71} is dropped
        CHECK(p.equals(1, 0));
        CHECK(p.value() == 1.0);
    }
    SECTION("nonincreasing along random sign paths") {
        auto path = sample_path(NullModel::rademacher(0.0), 300, 4);
        DyadicP p;
        double prev = 1.0;
        for (double x : path.xs) {
            p.step(x);
            CHECK(p.value() <= prev);
            CHECK(p.value() >= 0.0);
            prev = p.value();
        }
    }
}

TEST_CASE("dyadic terminal value is exactly uniform on the dyadic grid") {
    const int T = 12, N = 1 << T;
    std::vector<double> terminal;
    terminal.reserve(N);
    for (int mask = 0; mask < N; ++mask) {
        DyadicP p;
        for (int s = 0; s < T; ++s) p.step((mask >> s) & 1 ? 1.0 : -1.0);
        terminal.push_back(p.value());
    }
    std::sort(terminal.begin(), terminal.end());
    for (int i = 0; i < N; ++i) CHECK(terminal[std::size_t(i)] == double(i + 1) / N);
    CHECK(ks_to_uniform(terminal) == Catch::Approx(1.0 / N).margin(1e-15));
}

TEST_CASE("dyadic infimum is near-uniform under coin flips") {
    const int n = 10000, T = 40;
    auto model = NullModel::rademacher(0.0);
    std::vector<double> infs;
    infs.reserve(n);
    for (int i = 0; i < n; ++i) {
        auto path = sample_path(model, T, 55, std::uint64_t(i) + 1);
        DyadicP p;
        for (double x : path.xs) p.step(x);
        infs.push_back(p.value());  // nonincreasing: inf over t is the last value
    }
    CHECK(ks_to_uniform(infs) <= 0.02);
}

TEST_CASE("center confidence sequences") {
    SECTION("sign walk engine covers the true center") {
        const int n = 10000, T = 500;
        const double alpha = 0.05;
        auto model = NullModel::rademacher(0.0);
        int retained = 0;
        for (int i = 0; i < n; ++i) {
            auto path = sample_path(model, T, 81, std::uint64_t(i) + 1);
            retained += sign_walk_test(path.xs, alpha, 0.0) == kNever;
        }
        double freq = double(retained) / n;
        double se = std::sqrt(freq * (1.0 - freq) / n);
        CHECK(freq >= 1.0 - alpha - 3.0 * se);
    }
    SECTION("sign walk engine expels a wrong center deterministically") {
        auto path = sample_path(NullModel::two_point(2.0, 1.0), 100, 9);
        auto cs = symmetry_center_cs(path.xs, 0.05, {0.0, 2.0}, CenterEngine::sign_walk);
        // every observation is positive around 0, so the walk marches 1 -> 20
        CHECK(cs.exclusion_times[0] == 19);
        CHECK(cs.exclusion_times[1] == kNever);
        CHECK(cs.values_at(100) == std::vector<double>{2.0});
    }
    SECTION("mirrored engine keeps power near its detection window") {
        const int n = 200, T = 300;
        int excluded_wrong = 0, retained_true = 0;
        for (int i = 0; i < n; ++i) {
            auto path = sample_path(NullModel::two_point(0.8, 0.5), T, 33, std::uint64_t(i) + 1);
            auto cs = symmetry_center_cs(path.xs, 0.05, {0.0, 0.8}, CenterEngine::mirrored_nm);
            excluded_wrong += cs.exclusion_times[0] != kNever;
            retained_true += cs.exclusion_times[1] == kNever;
        }
        CHECK(double(excluded_wrong) / n >= 0.9);
        CHECK(double(retained_true) / n >= 0.9);
    }
    SECTION("odd family engine is valid on heavy tails") {
        const int n = 2000, T = 200;
        auto model = NullModel::heavy_tail(0.0, NullModel::Tail::cauchy);
        int retained = 0;
        for (int i = 0; i < n; ++i) {
            auto path = sample_path(model, T, 17, std::uint64_t(i) + 1);
            auto cs = symmetry_center_cs(path.xs, 0.05, {0.0}, CenterEngine::odd_family);
            retained += cs.exclusion_times[0] == kNever;
        }
        double freq = double(retained) / n;
        double se = std::sqrt(freq * (1.0 - freq) / n);
        CHECK(freq >= 0.95 - 3.0 * se);
    }
    SECTION("threshold one excludes at the first step") {
        auto cs = symmetry_center_cs({0.5, -0.5}, 1.0, {0.0}, CenterEngine::sign_walk);
        CHECK(cs.exclusion_times[0] == 1);
        CHECK(cs.values_at(1).empty());
    }
    SECTION("validation") {
        const std::vector<double> xs = {1.0};
        CHECK_THROWS_AS(symmetry_center_cs(xs, 0.05, {}, CenterEngine::sign_walk),
                        std::invalid_argument);
        CHECK_THROWS_AS(symmetry_center_cs(xs, 0.3, {0.0}, CenterEngine::sign_walk),
                        std::invalid_argument);
    }
}
