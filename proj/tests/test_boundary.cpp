#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "nugap/boundary.hpp"

using namespace nugap;

TEST_CASE("make_axis_grid layout") {
    const AxisGrid g = make_axis_grid(1e-6, 1e6, 4096);
    CHECK(g.per_sign == 4096);
    REQUIRE(g.points.size() == 8192);
    CHECK(g.points.front() == -1e6);
    CHECK(g.points[4095] == -1e-6);
    CHECK(g.points[4096] == 1e-6);
    CHECK(g.points.back() == 1e6);
    for (std::size_t i = 1; i < g.points.size(); ++i) {
        REQUIRE(g.points[i] > g.points[i - 1]);
    }

    const AxisGrid small = make_axis_grid(1e-2, 1e2, 64);
    CHECK(small.points[64] == 1e-2);
    CHECK(small.points.back() == 1e2);

    CHECK_THROWS_AS(make_axis_grid(1.0, 1.0, 128), std::invalid_argument);
    CHECK_THROWS_AS(make_axis_grid(2.0, 1.0, 128), std::invalid_argument);
    CHECK_THROWS_AS(make_axis_grid(0.0, 1.0, 128), std::invalid_argument);
    CHECK_THROWS_AS(make_axis_grid(1e-6, 1e6, 8), std::invalid_argument);
}

TEST_CASE("make_circle_grid layout") {
    const CircleGrid g = make_circle_grid(0.9, 256);
    CHECK(g.count == 256);
    CHECK(g.thetas.front() == 0.0);
    const double step = g.thetas[1] - g.thetas[0];
    for (std::size_t i = 1; i < g.count; ++i) {
        CHECK(g.thetas[i] == doctest::Approx(i * step).epsilon(1e-12));
    }
    CHECK(g.thetas.back() < 2.0 * M_PI);

    CHECK_THROWS_AS(make_circle_grid(1.0, 512), std::invalid_argument);
    CHECK_THROWS_AS(make_circle_grid(0.5, 100), std::invalid_argument);
}

TEST_CASE("adaptive_sup finds boundary maxima and flags them") {
    const AxisGrid g = make_axis_grid(1e-3, 1e3, 512);
    const SupEstimate est = adaptive_sup(
        [](double y) -> std::optional<double> { return 1.0 / (1.0 + y * y); }, g, 30);
    CHECK(est.value == doctest::Approx(1.0 / (1.0 + 1e-6)).epsilon(1e-12));
    CHECK(std::abs(est.arg) == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(est.at_contour_end);
    CHECK(est.failures == 0);
}

TEST_CASE("adaptive_sup on a constant") {
    const AxisGrid g = make_axis_grid(1e-3, 1e3, 128);
    const SupEstimate est =
        adaptive_sup([](double) -> std::optional<double> { return 0.5; }, g, 10);
    CHECK(est.value == 0.5);
}

TEST_CASE("adaptive_sup refines an interior peak to 1e-10") {
    const AxisGrid g = make_axis_grid(1e-3, 1e3, 512);
    const SupEstimate est = adaptive_sup(
        [](double y) -> std::optional<double> { return y / (1.0 + y * y); }, g, 40);
    // calculus oracle: max 1/2 at y = 1
    CHECK(std::abs(est.value - 0.5) < 1e-10);
    CHECK(est.arg == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(!est.at_contour_end);
}

TEST_CASE("adaptive_inf mirrors adaptive_sup") {
    const AxisGrid g = make_axis_grid(1e-3, 1e3, 512);
    const SupEstimate low = adaptive_inf(
        [](double y) -> std::optional<double> { return 1.0 / (1.0 + y * y); }, g, 30);
    CHECK(low.value == doctest::Approx(1.0 / (1.0 + 1e6)).epsilon(1e-9));
    CHECK(low.at_contour_end);

    const SupEstimate constant = adaptive_inf(
        [](double) -> std::optional<double> { return 0.5; }, g, 10);
    CHECK(constant.value == 0.5);

    const SupEstimate valley = adaptive_inf(
        [](double y) -> std::optional<double> { return y / (1.0 + y * y); }, g, 40);
    CHECK(std::abs(valley.value - (-0.5)) < 1e-10);
    CHECK(valley.arg == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("refinement never loses the incumbent grid maximum") {
    const AxisGrid g = make_axis_grid(1e-2, 1e2, 256);
    auto wiggly = [](double y) -> std::optional<double> {
        return std::sin(10.0 * std::log(std::abs(y))) / (1.0 + 0.1 * std::abs(y));
    };
    double grid_max = -1e300;
    for (double y : g.points) {
        grid_max = std::max(grid_max, *wiggly(y));
    }
    const SupEstimate est = adaptive_sup(wiggly, g, 25);
    CHECK(est.value >= grid_max);
}

TEST_CASE("doubling resolution never decreases the estimate") {
    auto peak = [](double y) -> std::optional<double> { return y / (1.0 + y * y); };
    auto end_max = [](double y) -> std::optional<double> { return 1.0 / (1.0 + y * y); };
    auto constant = [](double) -> std::optional<double> { return 0.25; };

    for (auto& f : {RealFn(peak), RealFn(end_max), RealFn(constant)}) {
        const SupEstimate coarse = adaptive_sup(f, make_axis_grid(1e-3, 1e3, 64), 10);
        const SupEstimate fine = adaptive_sup(f, make_axis_grid(1e-3, 1e3, 128), 20);
        CHECK(fine.value >= coarse.value);
    }
}

TEST_CASE("failures are skipped, counted, and bounded") {
    const AxisGrid g = make_axis_grid(1e-3, 1e3, 512);

    SUBCASE("isolated failures are tolerated") {
        std::size_t hits = 0;
        const SupEstimate est = adaptive_sup(
            [&](double y) -> std::optional<double> {
                if (std::abs(y - g.points[700]) < 1e-18) {
                    ++hits;
                    return std::nullopt;
                }
                return 1.0 / (1.0 + y * y);
            },
            g, 5);
        CHECK(est.failures >= 1);
        CHECK(est.value > 0.9);
    }
    SUBCASE("all points failing is fatal") {
        CHECK_THROWS_AS(
            adaptive_sup([](double) -> std::optional<double> { return std::nullopt; }, g, 5),
            SweepError);
    }
    SUBCASE("more than 1% failing is fatal") {
        try {
            adaptive_sup(
                [](double y) -> std::optional<double> {
                    if (y < 0.0) return std::nullopt;  // half the contour
                    return y;
                },
                g, 5);
            FAIL("expected SweepError");
        } catch (const SweepError& e) {
            CHECK(e.kind() == SweepError::Kind::excessive_failures);
        }
    }
    SUBCASE("non-finite samples count as failures") {
        const SupEstimate est = adaptive_sup(
            [&](double y) -> std::optional<double> {
                if (std::abs(y - g.points[100]) < 1e-18) {
                    return std::numeric_limits<double>::quiet_NaN();
                }
                return 1.0 / (1.0 + y * y);
            },
            g, 5);
        CHECK(est.failures >= 1);
    }
}

TEST_CASE("grid evaluation is deterministic across thread budgets") {
    const AxisGrid g = make_axis_grid(1e-4, 1e4, 1024);
    auto f = [](double y) -> std::optional<double> {
        return std::cos(3.0 * std::log(std::abs(y))) / (1.0 + std::abs(y) * 0.01);
    };

    setenv("NU_GAP_THREADS", "1", 1);
    const SupEstimate serial = adaptive_sup(f, g, 20);
    setenv("NU_GAP_THREADS", "4", 1);
    const SupEstimate parallel = adaptive_sup(f, g, 20);
    unsetenv("NU_GAP_THREADS");

    CHECK(serial.value == parallel.value);
    CHECK(serial.arg == parallel.arg);
    CHECK(serial.failures == parallel.failures);
}

TEST_CASE("thread budget honors NU_GAP_THREADS") {
    setenv("NU_GAP_THREADS", "3", 1);
    CHECK(thread_budget() == 3);
    setenv("NU_GAP_THREADS", "0", 1);
    CHECK(thread_budget() >= 1);
    unsetenv("NU_GAP_THREADS");
    CHECK(thread_budget() >= 1);
}
