#include "doctest.h"

#include <cmath>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/estimators.hpp"
#include "lowrate/fusion.hpp"
#include "lowrate/stats.hpp"

using namespace lowrate;

namespace {

SensorSpec curved_sensor(std::uint64_t id, double c, double delta) {
    SensorSpec s;
    s.sensor_id = id;
    s.model = IncrementModel::gaussian_curved(4.0, c);
    s.delta_threshold = delta;
    return s;
}

} // namespace

TEST_CASE("two identical zero-variance sensors fuse exactly") {
    std::vector<SensorSpec> sensors;
    for (std::uint64_t id : {1ULL, 2ULL}) {
        SensorSpec s;
        s.sensor_id = id;
        s.model = IncrementModel::deterministic(4.0);
        s.delta_threshold = 8.0;
        sensors.push_back(s);
    }
    const std::vector<std::int64_t> checkpoints = {7};
    const NetworkRun run = run_network(sensors, checkpoints, 1);
    REQUIRE(run.checkpoints.size() == 1);
    CHECK(run.weights[0] == doctest::Approx(0.5));
    CHECK(run.checkpoints[0].fused.at(EstimatorKind::Hat).value ==
          doctest::Approx(4.0));
    CHECK(run.total_bits == 6);
}

TEST_CASE("fused value is the exact precision-weighted combination") {
    std::vector<SensorSpec> sensors = {curved_sensor(1, 1.0 / 16.0, 50.0),
                                       curved_sensor(2, 4.0 / 16.0, 50.0)};
    // Sensor sds are 1 and 2, so the weights are 0.8 and 0.2.
    const std::vector<std::int64_t> checkpoints = {500};
    const NetworkRun run = run_network(sensors, checkpoints, 2);
    CHECK(run.weights[0] == doctest::Approx(0.8));
    CHECK(run.weights[1] == doctest::Approx(0.2));
    const Estimate h0 = estimate(run.sensor_traces[0], EstimatorKind::Hat);
    const Estimate h1 = estimate(run.sensor_traces[1], EstimatorKind::Hat);
    CHECK(run.checkpoints[0].fused.at(EstimatorKind::Hat).value ==
          doctest::Approx(0.8 * h0.value + 0.2 * h1.value).epsilon(1e-12));
}

TEST_CASE("fused estimates need only the message log") {
    // The recorded traces carry no walk values; recomputing every count
    // estimator from them must reproduce the fused numbers exactly.
    std::vector<SensorSpec> sensors = {curved_sensor(1, 4.0, 40.0),
                                       curved_sensor(2, 4.0, 60.0),
                                       curved_sensor(3, 1.0, 40.0)};
    const std::vector<std::int64_t> checkpoints = {2000};
    const NetworkRun run = run_network(sensors, checkpoints, 3);
    for (const auto kind : {EstimatorKind::Hat, EstimatorKind::Check}) {
        std::vector<Estimate> parts;
        for (std::size_t k = 0; k < sensors.size(); ++k) {
            CHECK(!run.sensor_traces[k].observed_s);
            parts.push_back(estimate(run.sensor_traces[k], kind));
        }
        CHECK(fuse(parts, run.weights).value ==
              run.checkpoints[0].fused.at(kind).value);
    }
}

TEST_CASE("checkpoints never peek past their time") {
    std::vector<SensorSpec> sensors = {curved_sensor(1, 4.0, 40.0)};
    const std::vector<std::int64_t> both = {500, 2000};
    const NetworkRun run = run_network(sensors, both, 4);
    const std::vector<std::int64_t> early = {500};
    const NetworkRun rerun = run_network(sensors, early, 4);
    CHECK(run.checkpoints[0].fused.at(EstimatorKind::Hat).value ==
          rerun.checkpoints[0].fused.at(EstimatorKind::Hat).value);
}

TEST_CASE("sensor order does not change the fused value") {
    std::vector<SensorSpec> sensors = {curved_sensor(1, 1.0, 40.0),
                                       curved_sensor(2, 4.0, 60.0)};
    std::vector<SensorSpec> swapped = {sensors[1], sensors[0]};
    const std::vector<std::int64_t> checkpoints = {2000};
    const NetworkRun a = run_network(sensors, checkpoints, 5);
    const NetworkRun b = run_network(swapped, checkpoints, 5);
    CHECK(a.checkpoints[0].fused.at(EstimatorKind::Hat).value ==
          doctest::Approx(b.checkpoints[0].fused.at(EstimatorKind::Hat).value)
              .epsilon(1e-12));
}

TEST_CASE("changing one sensor leaves the others' traces bit-identical") {
    std::vector<SensorSpec> sensors = {curved_sensor(1, 4.0, 40.0),
                                       curved_sensor(2, 4.0, 40.0)};
    const std::vector<std::int64_t> checkpoints = {2000};
    const NetworkRun base = run_network(sensors, checkpoints, 6);
    sensors[1].delta_threshold = 80.0;
    const NetworkRun changed = run_network(sensors, checkpoints, 6);
    REQUIRE(base.sensor_traces[0].n_t() == changed.sensor_traces[0].n_t());
    for (std::size_t i = 0; i < base.sensor_traces[0].events.size(); ++i) {
        CHECK(base.sensor_traces[0].events[i].tau ==
              changed.sensor_traces[0].events[i].tau);
        CHECK(base.sensor_traces[0].events[i].eta ==
              changed.sensor_traces[0].events[i].eta);
    }
}

TEST_CASE("network validation") {
    const std::vector<std::int64_t> checkpoints = {10};
    std::vector<SensorSpec> empty;
    CHECK_THROWS(run_network(empty, checkpoints, 1));
    std::vector<SensorSpec> dup = {curved_sensor(1, 4.0, 8.0),
                                   curved_sensor(1, 4.0, 8.0)};
    CHECK_THROWS(run_network(dup, checkpoints, 1));
}

TEST_CASE("standardized fused sample has unit scale for a heterogeneous "
          "network") {
    std::vector<SensorSpec> sensors = {curved_sensor(1, 1.0, 2520.0),
                                       curved_sensor(2, 4.0, 2520.0),
                                       curved_sensor(3, 16.0, 2520.0)};
    const NetworkCltSample sample = network_clt_sample(sensors, 10000, 600, 7);
    REQUIRE(sample.standardized.size() > 500);
    RunningStat s;
    for (const double v : sample.standardized) s.add(v);
    CHECK(std::abs(s.variance() - 1.0) < 0.15);
}
