#include <anytime/instruments.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace anytime;

namespace {

// Symmetric-null test martingale on +-eta observations: M_t = prod (1 + x_s/2).
std::vector<double> half_tilt_e_path(const SamplePath& path) {
    std::vector<double> e;
    e.reserve(path.xs.size());
    double m = 1.0;
    for (double x : path.xs) {
        m *= 1.0 + 0.5 * x;
        e.push_back(m);
    }
    return e;
}

}  // namespace

TEST_CASE("e_to_p recursion and capping") {
    CHECK(e_to_p({2.0, 0.5, 4.0}) == std::vector<double>{0.5, 0.5, 0.25});
    CHECK(e_to_p({1.0, 1.0, 1.0}) == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(e_to_p({0.5, 0.25}) == std::vector<double>{1.0, 1.0});
    // e = 0 maps to 1/e = +inf and leaves the running infimum alone
    CHECK(e_to_p({4.0, 0.0, 2.0}) == std::vector<double>{0.25, 0.25, 0.25});
    CHECK(e_to_p({0.0}) == std::vector<double>{1.0});
    CHECK_THROWS_AS(e_to_p({-1.0}), std::invalid_argument);
}

TEST_CASE("e_to_test thresholds inclusively") {
    CHECK(e_to_test({10.0, 30.0}, 0.05) == 2);
    CHECK(e_to_test({20.0, 1.0}, 0.05) == 1);
    CHECK(e_to_test({5.0, 5.0, 5.0}, 0.05) == kNever);
    CHECK_THROWS_AS(e_to_test({1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(e_to_test({1.0}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(e_to_test({-0.5}, 0.5), std::invalid_argument);
}

TEST_CASE("p_to_test thresholds inclusively") {
    CHECK(p_to_test({0.2, 0.04}, 0.05) == 2);
    CHECK(p_to_test({0.05, 0.5}, 0.05) == 1);
    CHECK(p_to_test({0.5, 0.9, 0.6}, 0.05) == kNever);
}

TEST_CASE("test family inverts to a p-path") {
    std::vector<double> grid = {0.01, 0.05, 0.1};
    auto p = test_family_to_p(grid, {kNever, 7, 3}, 10);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 1.0);
    CHECK(p[2] == 0.1);
    CHECK(p[5] == 0.1);
    CHECK(p[6] == 0.05);
    CHECK(p[9] == 0.05);
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] <= p[k - 1]);

    auto ones = test_family_to_p(grid, {kNever, kNever, kNever}, 4);
    CHECK(ones == std::vector<double>(4, 1.0));

    auto all_at_1 = test_family_to_p(grid, {1, 1, 1}, 2);
    CHECK(all_at_1[0] == 0.01);

    CHECK_THROWS_AS(test_family_to_p(grid, {3, 7, kNever}, 10), std::invalid_argument);
    CHECK_THROWS_AS(test_family_to_p({0.1, 0.05}, {2, 2}, 10), std::invalid_argument);
    CHECK_THROWS_AS(test_family_to_p(grid, {1, 1}, 10), std::invalid_argument);
    CHECK_THROWS_AS(test_family_to_p({}, {}, 10), std::invalid_argument);
}

TEST_CASE("p_to_e with the square-root calibrator") {
    auto f = Calibrator::make_sqrt();
    auto e = p_to_e_calibrated({0.25, 1.0, 0.01}, f);
    CHECK(e[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(e[1] == Catch::Approx(0.5).margin(1e-12));
    CHECK(e[2] == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("inverting tests yields a shrinking confidence set") {
    auto cs = invert_tests_to_cs({-1.0, 0.0, 1.0}, {2, kNever, 2}, 0.05, 5);
    CHECK(cs.values_at(1) == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(cs.values_at(2) == std::vector<double>{0.0});
    CHECK(cs.values_at(5) == std::vector<double>{0.0});
    CHECK(cs.running_intersection);

    auto full = invert_tests_to_cs({-1.0, 0.0, 1.0}, {kNever, kNever, kNever}, 0.05, 5);
    for (int t = 1; t <= 5; ++t) CHECK(full.values_at(t).size() == 3);

    auto empty_at_1 = invert_tests_to_cs({-1.0, 0.0, 1.0}, {1, 1, 1}, 0.05, 5);
    CHECK(empty_at_1.values_at(1).empty());

    CHECK_THROWS_AS(invert_tests_to_cs({0.0}, {1, 2}, 0.05, 5), std::invalid_argument);
    CHECK_THROWS_AS(invert_tests_to_cs({}, {}, 0.05, 5), std::invalid_argument);

    SECTION("cs_to_test") {
        CHECK(cs_to_test(cs, {0.0}) == kNever);
        CHECK(cs_to_test(cs, {-1.0}) == 2);
        CHECK(cs_to_test(cs, {-1.0, 1.0}) == 2);
        CHECK(cs_to_test(cs, {-1.0, 0.0}) == kNever);
        CHECK(cs_to_test(full, {-1.0, 0.0, 1.0}) == kNever);
        CHECK_THROWS_AS(cs_to_test(cs, {}), std::invalid_argument);
        CHECK_THROWS_AS(cs_to_test(cs, {0.5}), std::invalid_argument);
    }
}

TEST_CASE("composite aggregation over finite families") {
    CHECK(aggregate_composite_p({{0.3, 0.6}, {0.4, 0.2}}) == std::vector<double>{0.4, 0.6});
    CHECK(aggregate_composite_e({{2.0, 1.0}, {3.0, 0.5}}) == std::vector<double>{2.0, 0.5});
    CHECK(aggregate_composite_p({{0.7, 0.1}}) == std::vector<double>{0.7, 0.1});
    CHECK(aggregate_composite_test({3, 5}) == 5);
    CHECK(aggregate_composite_test({3, kNever}) == kNever);
    CHECK(aggregate_composite_test({4}) == 4);
    CHECK_THROWS_AS(aggregate_composite_p({}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_composite_e({{1.0}, {1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_composite_test({}), std::invalid_argument);
}

TEST_CASE("nestedness of rejection times in alpha") {
    auto model = NullModel::two_point(0.0, 1.0);
    std::vector<double> alphas = {0.01, 0.02, 0.05, 0.1, 0.25, 0.5, 0.9};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto path = sample_path(model, 200, seed);
        auto e = half_tilt_e_path(path);
        auto p = e_to_p(e);
        int prev_e = kNever, prev_p = kNever;
        bool first = true;
        for (double a : alphas) {
            int te = e_to_test(e, a);
            int tp = p_to_test(p, a);
            if (!first) {
                CHECK(te <= prev_e);
                CHECK(tp <= prev_p);
            }
            prev_e = te;
            prev_p = tp;
            first = false;
        }
    }
}

TEST_CASE("e to p to e round trip is a function of the running max") {
    auto model = NullModel::two_point(0.0, 1.0);
    auto f = Calibrator::make_sqrt();
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        auto path = sample_path(model, 100, seed);
        auto e = half_tilt_e_path(path);
        auto p = e_to_p(e);
        auto back = p_to_e_calibrated(p, f);
        double running_max = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k) {
            running_max = std::max(running_max, e[k]);
            double want = 0.5 * std::sqrt(std::max(1.0, running_max));
            CHECK(back[k] == Catch::Approx(want).epsilon(1e-12));
            CHECK(p[k] >= 0.0);
            CHECK(p[k] <= 1.0);
            if (k > 0) CHECK(p[k] <= p[k - 1]);
        }
    }
}

TEST_CASE("test martingale keeps mean one and respects the crossing bound") {
    auto model = NullModel::two_point(0.0, 1.0);
    const int n = 10000, T = 50;
    const double alpha = 0.1;
    double sum_eT = 0.0, sumsq_eT = 0.0;
    int crossings = 0;
    for (int i = 0; i < n; ++i) {
        auto path = sample_path(model, T, 7, std::uint64_t(i) + 1);
        auto e = half_tilt_e_path(path);
        sum_eT += e.back();
        sumsq_eT += e.back() * e.back();
        crossings += e_to_test(e, alpha) != kNever;
    }
    double mean = sum_eT / n;
    double se = std::sqrt(std::max(0.0, sumsq_eT / n - mean * mean) / n);
    CHECK(mean <= 1.0 + 3.0 * se);
    double freq = double(crossings) / n;
    double fse = std::sqrt(freq * (1.0 - freq) / n);
    CHECK(freq <= alpha + 3.0 * fse);
}

TEST_CASE("convex mixtures preserve e-process safety") {
    std::vector<NullModel> members = {NullModel::two_point(0.0, 1.0), NullModel::two_point(0.0, 0.5)};
    auto stat = [](const SamplePath& path) { return half_tilt_e_path(path).back(); };

    auto rep = convex_mixture_check(members, {0.5, 0.5}, 30, 4000, 1.0, 99, stat);
    CHECK(rep.pass);
    CHECK(rep.estimate <= 1.0 + 3.0 * rep.se);

    SECTION("degenerate weights reduce to the first member") {
        auto deg = convex_mixture_check(members, {1.0, 0.0}, 30, 4000, 1.0, 99, stat);
        auto solo = convex_mixture_check({members[0]}, {1.0}, 30, 4000, 1.0, 99, stat);
        CHECK(deg.estimate == solo.estimate);
        CHECK(deg.se == solo.se);
    }
    SECTION("comparator flags violations") {
        auto bad = convex_mixture_check(members, {0.5, 0.5}, 5, 500, 1.0, 99,
                                        [](const SamplePath&) { return 2.0; });
        CHECK_FALSE(bad.pass);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(convex_mixture_check({}, {}, 5, 100, 1.0, 1, stat), std::invalid_argument);
        CHECK_THROWS_AS(convex_mixture_check(members, {0.7, 0.7}, 5, 100, 1.0, 1, stat),
                        std::invalid_argument);
        CHECK_THROWS_AS(convex_mixture_check(members, {1.0}, 5, 100, 1.0, 1, stat),
                        std::invalid_argument);
    }
}
