#include "doctest.h"

#include <cmath>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/theory_checks.hpp"

using namespace lowrate;

TEST_CASE("stopped-walk residuals vanish identically on a point mass") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    const std::vector<double> levels = {10.0, 100.0};
    const GridReport report = wald_residuals(det, levels, 200, 1);
    REQUIRE(!report.rows.empty());
    for (const auto& row : report.rows) {
        CHECK(row.check_name == "wald_mean_residual");
        CHECK(row.statistic == 0.0);
        CHECK(row.pass);
    }
}

TEST_CASE("stopped-walk residual mean and variance ratio at Monte Carlo "
          "scale") {
    const IncrementModel ex = IncrementModel::gamma(1.0, 1.0);
    const std::vector<double> levels = {100.0};
    const GridReport report = wald_residuals(ex, levels, 20000, 2);
    CHECK(report.all_pass());
}

TEST_CASE("excess bound on point-mass and exponential walks") {
    {
        const IncrementModel det = IncrementModel::deterministic(4.0);
        const std::vector<double> levels = {10.0, 100.0};
        CHECK(lorden_bounds(det, levels, 200, 3).all_pass());
    }
    {
        const IncrementModel ex = IncrementModel::gamma(1.0, 1.0);
        const std::vector<double> levels = {10.0, 100.0};
        const GridReport report = lorden_bounds(ex, levels, 5000, 4);
        CHECK(report.all_pass());
        // Memoryless steps overshoot by 1 in expectation; the bound is 2.
        for (const auto& row : report.rows) {
            if (row.check_name != "lorden_excess") continue;
            CHECK(std::abs(row.statistic - 1.0) <= 4.0 * row.se);
            CHECK(*row.bound_rhs == doctest::Approx(2.0));
        }
    }
}

TEST_CASE("age bound for geometric sampling times") {
    const SamplingScheme scheme = SamplingScheme::exogenous_geometric(20.0);
    const std::vector<std::int64_t> horizons = {2000};
    CHECK(age_bound_exogenous(scheme, horizons, 5000, 5).all_pass());
}

TEST_CASE("count-error table is exact for deterministic sampling times") {
    // With interarrival delta dividing t the passage index is t/delta + 1,
    // so |delta nu / t - 1| = delta / t exactly.
    const IncrementModel det = IncrementModel::deterministic(1.0);
    const std::vector<LrGridPoint> grid = {{10.0, 1000}};
    const GridReport report = lr_error_table(
        det, SamplingScheme::Kind::ExogDeterministic, 1.0, grid, 10, 6);
    bool found = false;
    for (const auto& row : report.rows) {
        if (row.check_name != "lr_nu") continue;
        found = true;
        CHECK(row.statistic == doctest::Approx(10.0 / 1000.0));
    }
    CHECK(found);
}

TEST_CASE("sampling-age ratio vanishes when the deterministic period divides "
          "the horizon") {
    const IncrementModel det = IncrementModel::deterministic(1.0);
    const std::vector<LrGridPoint> grid = {{10.0, 1000}};
    const GridReport report = anscombe_ratio(
        det, SamplingScheme::Kind::ExogDeterministic, grid, 10, 7);
    REQUIRE(!report.rows.empty());
    CHECK(report.rows.front().statistic == doctest::Approx(0.0));
    CHECK(report.all_pass());
}

TEST_CASE("count-error table fits a decay slope with its uncertainty") {
    const IncrementModel det = IncrementModel::deterministic(1.0);
    const std::vector<LrGridPoint> grid = {
        {10.0, 100}, {10.0, 1000}, {10.0, 10000}};
    const GridReport report = lr_error_table(
        det, SamplingScheme::Kind::ExogDeterministic, 1.0, grid, 10, 8);
    bool found = false;
    for (const auto& s : report.slopes) {
        if (s.label.rfind("lr_nu_vs_t@", 0) != 0) continue;
        found = true;
        CHECK(s.fitted == doctest::Approx(-1.0).epsilon(1e-6));
    }
    CHECK(found);
}

TEST_CASE("grid points with too short a horizon are rejected") {
    const IncrementModel det = IncrementModel::deterministic(1.0);
    const std::vector<LrGridPoint> grid = {{10.0, 50}};
    CHECK_THROWS(lr_error_table(det, SamplingScheme::Kind::ExogDeterministic,
                                1.0, grid, 10, 9));
}
