#include <anytime/calibrate.hpp>
#include <anytime/model.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace anytime;

TEST_CASE("model parameter validation") {
    CHECK_THROWS_AS(NullModel::gaussian(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NullModel::gaussian(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(NullModel::gaussian_predictable(0.0, VarianceRule::abs, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NullModel::two_point(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NullModel::heavy_tail(0.0, NullModel::Tail::student_t, 0), std::invalid_argument);
    CHECK_THROWS_AS(NullModel::bernoulli_first(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(NullModel::bernoulli_first(1.1), std::invalid_argument);
    CHECK_THROWS_AS(sample_path(NullModel::rademacher(0.0), 0, 1), std::invalid_argument);
}

TEST_CASE("two-point support is forced") {
    auto model = NullModel::two_point(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto path = sample_path(model, 3, seed);
        REQUIRE(path.xs.size() == 3);
        for (double x : path.xs) CHECK((x == -1.0 || x == 1.0));
    }
}

TEST_CASE("gaussian iid sample mean and variance") {
    const int T = 100000;
    auto path = sample_path(NullModel::gaussian(0.0, 1.0), T, 20260821);
    double sum = 0.0, sumsq = 0.0;
    for (double x : path.xs) {
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / T;
    double var = sumsq / T - mean * mean;
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(double(T)));
    CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / T));
}

TEST_CASE("bernoulli first coordinate support and frequency") {
    auto model = NullModel::bernoulli_first(0.5);
    int ones = 0;
    const int n = 20000;
    for (int seed = 0; seed < n; ++seed) {
        auto path = sample_path(model, 3, std::uint64_t(seed));
        REQUIRE((path.xs[0] == 0.0 || path.xs[0] == 1.0));
        CHECK(path.xs[1] == 0.0);
        CHECK(path.xs[2] == 0.0);
        ones += path.xs[0] == 1.0;
    }
    double freq = double(ones) / n;
    CHECK(std::abs(freq - 0.5) <= 4.0 * std::sqrt(0.25 / n));

    auto degenerate = sample_path(NullModel::bernoulli_first(1.0), 2, 7);
    CHECK(degenerate.xs[0] == 1.0);
}

TEST_CASE("symmetric kinds mirror in distribution") {
    struct Case {
        NullModel model;
        const char* name;
    };
    std::vector<Case> cases = {
        {NullModel::gaussian(2.0, 1.5), "gaussian"},
        {NullModel::gaussian_predictable(0.0, VarianceRule::abs), "predictable-abs"},
        {NullModel::gaussian_predictable(-1.0, VarianceRule::affine), "predictable-affine"},
        {NullModel::two_point(1.0, 0.7), "two-point"},
        {NullModel::rademacher(-0.5), "rademacher"},
        {NullModel::heavy_tail(0.0, NullModel::Tail::cauchy), "cauchy"},
        {NullModel::heavy_tail(1.0, NullModel::Tail::student_t, 3), "student-t3"},
    };
    const int T = 100000;
    for (const auto& c : cases) {
        INFO(c.name);
        REQUIRE(c.model.is_symmetric());
        auto path = sample_path(c.model, T, 99);
        std::vector<double> centered, mirrored;
        centered.reserve(T);
        mirrored.reserve(T);
        for (double x : path.xs) {
            centered.push_back(x - c.model.m);
            mirrored.push_back(-(x - c.model.m));
        }
        CHECK(ks_two_sample(centered, mirrored) <= 0.01);
    }
    CHECK_FALSE(NullModel::bernoulli_first(0.5).is_symmetric());
}

TEST_CASE("paths are reproducible and seed-sensitive") {
    auto model = NullModel::gaussian(0.0, 1.0);
    auto a = sample_path(model, 64, 42);
    auto b = sample_path(model, 64, 42);
    CHECK(a.u == b.u);
    CHECK(a.xs == b.xs);
    CHECK(a.sigma_sq == b.sigma_sq);

    auto c = sample_path(model, 64, 43);
    CHECK(a.xs != c.xs);
    auto d = sample_path(model, 64, 42, 1);
    CHECK(a.xs != d.xs);
}

TEST_CASE("streaming sampler matches sample_path") {
    auto model = NullModel::gaussian_predictable(0.5, VarianceRule::square, 2.0);
    auto path = sample_path(model, 32, 5);
    PathSampler s(model, 5);
    CHECK(s.u() == path.u);
    for (int t = 0; t < 32; ++t) {
        CHECK(s.next() == path.xs[size_t(t)]);
        CHECK(s.last_sigma_sq() == path.sigma_sq[size_t(t)]);
    }
}

TEST_CASE("predictable variance schedules") {
    const int T = 1000;
    SECTION("abs and square track the previous observation") {
        for (auto rule : {VarianceRule::abs, VarianceRule::square}) {
            auto path = sample_path(NullModel::gaussian_predictable(0.0, rule, 3.0), T, 11);
            REQUIRE(path.sigma_sq.size() == size_t(T));
            CHECK(path.sigma_sq[0] == 9.0);
            for (int t = 1; t < T; ++t) {
                double prev = path.xs[size_t(t - 1)];
                double want = rule == VarianceRule::abs ? std::abs(prev) : prev * prev;
                if (want < kVarianceFloor) want = kVarianceFloor;
                CHECK(path.sigma_sq[size_t(t)] == want);
            }
        }
    }
    SECTION("affine floors at tiny variance when 1 + x/2 goes nonpositive") {
        auto path = sample_path(NullModel::gaussian_predictable(0.0, VarianceRule::affine), T, 17);
        bool floored = false;
        for (int t = 1; t < T; ++t) {
            double prev = path.xs[size_t(t - 1)];
            double want = 1.0 + 0.5 * prev;
            if (want < kVarianceFloor) {
                want = kVarianceFloor;
                floored = true;
            }
            CHECK(path.sigma_sq[size_t(t)] == want);
        }
        CHECK(floored);  // N(0,~1) dips below -2 often enough in 1000 steps
    }
    SECTION("constant rule ignores the path") {
        auto path = sample_path(NullModel::gaussian_predictable(0.0, VarianceRule::constant, 1.5), 10, 3);
        for (double v : path.sigma_sq) CHECK(v == 2.25);
    }
}

TEST_CASE("fixed and crossing stopping rules") {
    SamplePath path;
    path.xs = {0.0, 0.0, 0.0, 0.0, 0.0};

    CHECK(evaluate_stopping(StoppingRule::fixed(5), path, path.xs) == 5);
    CHECK(evaluate_stopping(StoppingRule::fixed(6), path, path.xs) == kNever);
    CHECK_THROWS_AS(StoppingRule::fixed(0), std::invalid_argument);

    std::vector<double> rising = {1.0, 1.5, 2.2, 3.0, 3.5};
    CHECK(evaluate_stopping(StoppingRule::crossing(2.0), path, rising) == 3);
    CHECK(evaluate_stopping(StoppingRule::crossing(10.0), path, rising) == kNever);
    CHECK(evaluate_stopping(StoppingRule::crossing(1.4, StoppingRule::Direction::down), path, rising) == 1);
    CHECK(evaluate_stopping(StoppingRule::crossing(3.0), path, rising) == 4);  // crossing is inclusive
}

TEST_CASE("randomized stopping uses the initial randomizer") {
    auto rule = StoppingRule::randomized({0.3, 0.3, 0.4});
    SamplePath path;
    path.xs = {0.0, 0.0};

    path.u = 0.25;
    CHECK(evaluate_stopping(rule, path, path.xs) == 1);
    path.u = 0.5;
    CHECK(evaluate_stopping(rule, path, path.xs) == 2);
    path.u = 0.7;
    CHECK(evaluate_stopping(rule, path, path.xs) == kNever);

    SamplePath shorter;
    shorter.xs = {0.0};
    CHECK_THROWS_AS(evaluate_stopping(rule, shorter, shorter.xs), std::invalid_argument);
    CHECK_THROWS_AS(StoppingRule::randomized({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(StoppingRule::randomized({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(StoppingRule::randomized({1.0}), std::invalid_argument);
}

TEST_CASE("adversarial max is flagged and picks the earliest peak") {
    auto rule = StoppingRule::adversarial();
    CHECK_FALSE(rule.is_stopping_time());
    CHECK(StoppingRule::fixed(1).is_stopping_time());
    CHECK(StoppingRule::crossing(1.0).is_stopping_time());
    CHECK(StoppingRule::randomized({0.5, 0.5}).is_stopping_time());

    SamplePath path;
    path.xs = {0.0, 0.0, 0.0, 0.0};
    std::vector<double> monitored = {1.0, 7.0, 7.0, 3.0};
    CHECK(evaluate_stopping(rule, path, monitored) == 2);
}

TEST_CASE("crossing decisions are prefix-measurable") {
    auto path = sample_path(NullModel::gaussian(0.0, 1.0), 200, 9);
    std::vector<double> cumsum(path.xs.size());
    double s = 0.0;
    for (size_t i = 0; i < path.xs.size(); ++i) {
        s += path.xs[i];
        cumsum[i] = s;
    }
    auto rule = StoppingRule::crossing(3.0);
    int full = evaluate_stopping(rule, path, cumsum);
    REQUIRE(full != kNever);
    for (int len : {full, full + 5, 200}) {
        SamplePath prefix;
        prefix.u = path.u;
        prefix.xs.assign(path.xs.begin(), path.xs.begin() + len);
        std::vector<double> mon(cumsum.begin(), cumsum.begin() + len);
        CHECK(evaluate_stopping(rule, prefix, mon) == full);
    }
    // Too-short prefix cannot know the answer; it reports "not yet".
    SamplePath shortp;
    shortp.u = path.u;
    shortp.xs.assign(path.xs.begin(), path.xs.begin() + (full - 1));
    std::vector<double> mon(cumsum.begin(), cumsum.begin() + (full - 1));
    CHECK(evaluate_stopping(rule, shortp, mon) == kNever);
}
