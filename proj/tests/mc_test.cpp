#include "doctest.h"

#include <cmath>
#include <vector>

#include "lowrate/mc.hpp"
#include "lowrate/stats.hpp"

using namespace lowrate;

namespace {

double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("normal sup-distance on reference samples") {
    {
        // Stratified quantiles attain the minimum 1/(2n).
        std::vector<double> sample;
        for (int i = 1; i <= 100; ++i)
            sample.push_back(normal_quantile((i - 0.5) / 100.0));
        CHECK(ks_distance(sample) == doctest::Approx(0.005).epsilon(1e-6));
    }
    {
        std::vector<double> zeros(50, 0.0);
        CHECK(ks_distance(zeros) == doctest::Approx(0.5));
    }
    {
        std::vector<double> sample;
        RngStream g(123);
        for (int i = 0; i < 10000; ++i) {
            // Box-Muller from two uniforms.
            const double u = g.uniform(), v = g.uniform();
            sample.push_back(std::sqrt(-2.0 * std::log(1.0 - u)) *
                             std::cos(2.0 * M_PI * v));
        }
        CHECK(ks_distance(sample) < 0.0136);
    }
}

TEST_CASE("slope fit recovers an exact line") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y = {5.0, 3.0, 1.0, -1.0};
    const SlopeFit fit = fit_slope(x, y);
    CHECK(fit.slope == doctest::Approx(-2.0));
    CHECK(fit.intercept == doctest::Approx(7.0));
    CHECK(fit.slope_se == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("relative efficiency is zero for exact estimators") {
    ExperimentSpec spec;
    spec.model = IncrementModel::deterministic(4.0);
    spec.delta_grid = {2.0, 4.0};
    spec.t = 300;
    spec.kinds = {EstimatorKind::Bar, EstimatorKind::Hat};
    spec.reps = 50;
    spec.master_seed = 1;
    const MCSummary table = re_sweep(spec);
    REQUIRE(table.rows.size() == 4);
    for (const auto& row : table.rows) {
        CHECK(row.mse == 0.0);
        CHECK(row.excluded_frac == 0.0);
    }
    CHECK(table.find(EstimatorKind::Hat, 2.0) != nullptr);
    CHECK(table.find(EstimatorKind::Hat, 3.0) == nullptr);
}

TEST_CASE("sweep results do not depend on the worker count") {
    ExperimentSpec spec;
    spec.model = IncrementModel::gaussian_curved(4.0, 4.0);
    spec.delta_grid = {2.0, 10.0};
    spec.t = 300;
    spec.kinds = {EstimatorKind::Hat, EstimatorKind::Check};
    spec.reps = 3000;
    spec.master_seed = 9;
    spec.threads = 1;
    const MCSummary one = re_sweep(spec);
    spec.threads = 4;
    const MCSummary four = re_sweep(spec);
    REQUIRE(one.rows.size() == four.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
        CHECK(one.rows[i].mse == four.rows[i].mse);
        CHECK(one.rows[i].re == four.rows[i].re);
        CHECK(one.rows[i].delta_empirical == four.rows[i].delta_empirical);
    }
}

TEST_CASE("every summary row carries its standard error") {
    ExperimentSpec spec;
    spec.model = IncrementModel::gaussian_curved(4.0, 4.0);
    spec.delta_grid = {5.0};
    spec.t = 300;
    spec.kinds = {EstimatorKind::Check};
    spec.reps = 500;
    spec.master_seed = 10;
    const MCSummary table = re_sweep(spec);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].se_re > 0.0);
    CHECK(table.rows[0].se_mse > 0.0);
    CHECK(table.rows[0].re > 0.0);
}

TEST_CASE("diagnostic sample is standardized by the true scale") {
    ExperimentSpec spec;
    spec.model = IncrementModel::gaussian_curved(4.0, 4.0);
    // delta well inside (sqrt(t), t): the overshoot bias -mu rho/Delta is
    // negligible against the sigma/sqrt(t) scale here.
    spec.delta_grid = {500.0};
    spec.t = 10000;
    spec.kinds = {EstimatorKind::Hat};
    spec.reps = 400;
    spec.master_seed = 11;
    const CltResult result = clt_diagnostic(spec);
    CHECK(result.standardized.size() >= 390);
    CHECK(result.standardized.size() <= 400);
    CHECK(std::abs(result.sample_mean) < 1.0);
    CHECK(std::abs(result.sample_variance - 1.0) < 0.5);
    CHECK(result.ks_stat > 0.0);
}

TEST_CASE("ordering claims on a synthetic efficiency table") {
    auto add = [](MCSummary& table, EstimatorKind kind, double delta, double re,
                  double se) {
        MCRow row;
        row.kind = kind;
        row.delta_target = delta;
        row.re = re;
        row.se_re = se;
        table.rows.push_back(row);
    };
    const std::vector<double> grid = {2.0, 10.0, 60.0};
    MCSummary good;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        add(good, EstimatorKind::Bar, grid[i], 1.0, 0.01);
        add(good, EstimatorKind::Tilde, grid[i], 1.2 + 0.1 * i, 0.01);
        add(good, EstimatorKind::Hat, grid[i], 3.0 - 0.8 * i, 0.01);
        add(good, EstimatorKind::GCheck, grid[i], 1.1, 0.01);
        add(good, EstimatorKind::Check, grid[i],
            i == 1 ? 1.5 : 4.0, 0.01);
    }
    const auto claims = ordering_report(good);
    REQUIRE(claims.size() == 4);
    for (const auto& claim : claims) CHECK(claim.pass);

    MCSummary bad = good;
    // Make the sample-mean estimator clearly worse than its horizon variant.
    for (auto& row : bad.rows)
        if (row.kind == EstimatorKind::Bar) row.re = 2.0;
    const auto bad_claims = ordering_report(bad);
    CHECK(!bad_claims[0].pass);
}
