#include "doctest.h"

#include <cmath>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/estimators.hpp"
#include "lowrate/renewal.hpp"

using namespace lowrate;

namespace {

RenewalTrace point_mass_trace(bool observe) {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    RngStream g(1);
    return simulate_trace(det, SamplingScheme::hitting_one_sided(8.0), 7, g,
                          observe);
}

} // namespace

TEST_CASE("the four direct estimators on a point-mass trace") {
    const RenewalTrace trace = point_mass_trace(true);
    CHECK(estimate(trace, EstimatorKind::Hat).value == doctest::Approx(4.0));
    CHECK(estimate(trace, EstimatorKind::Bar).value == doctest::Approx(4.0));
    CHECK(estimate(trace, EstimatorKind::Check).value ==
          doctest::Approx(24.0 / 7.0));
    CHECK(estimate(trace, EstimatorKind::Tilde).value ==
          doctest::Approx(24.0 / 7.0));
}

TEST_CASE("empty traces: ratio estimators have no value, horizon estimators "
          "are zero") {
    RenewalTrace empty;
    empty.horizon = 10;
    empty.delta_threshold = 8.0;
    CHECK(estimate(empty, EstimatorKind::Hat).status ==
          EstimateStatus::NoSample);
    const Estimate check = estimate(empty, EstimatorKind::Check);
    CHECK(check.status == EstimateStatus::Ok);
    CHECK(check.value == 0.0);
}

TEST_CASE("overshoot correction arithmetic") {
    Estimate est;
    est.kind = EstimatorKind::Hat;
    est.value = 4.0;
    const IncrementModel ex = IncrementModel::gamma(1.0, 1.0);
    // rho(4) = 4 for exponential steps, so g(4) = 4 (1 + 4/8) = 6.
    CHECK(overshoot_correct(est, 8.0, ex).value == doctest::Approx(6.0));
    CHECK(overshoot_correct(est, 8.0, ex).kind == EstimatorKind::GHat);
    // The correction shrinks as the threshold grows.
    CHECK(overshoot_correct(est, 400.0, ex).value == doctest::Approx(4.04));
}

TEST_CASE("overshoot correction passes through where undefined") {
    Estimate est;
    est.kind = EstimatorKind::Check;
    est.value = -1.0;
    const IncrementModel ex = IncrementModel::gamma(1.0, 1.0);
    const Estimate neg = overshoot_correct(est, 8.0, ex);
    CHECK(neg.status == EstimateStatus::CorrectionSkipped);
    CHECK(neg.value == doctest::Approx(-1.0));

    est.value = 4.0;
    const IncrementModel lat = IncrementModel::two_point_lattice(2.0, 6.0, 0.5);
    CHECK(overshoot_correct(est, 8.0, lat).status ==
          EstimateStatus::CorrectionSkipped);
}

TEST_CASE("corrected estimators preserve the order of positive inputs") {
    for (const auto& model : {IncrementModel::gamma(2.0, 1.0),
                              IncrementModel::gaussian_curved(4.0, 4.0)}) {
        double prev = 0.0;
        for (const double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            Estimate est;
            est.kind = EstimatorKind::Hat;
            est.value = x;
            const double gx = overshoot_correct(est, 10.0, model).value;
            CHECK(gx > prev);
            prev = gx;
        }
    }
}

TEST_CASE("scale estimator is zero on a zero-variance walk") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    RngStream g(1);
    const PairedTraces paired = simulate_paired_traces(det, 8.0, 32.0, 7, g);
    const Estimate sig = estimate_sigma(paired.mu_trace, paired.z_trace);
    CHECK(sig.status == EstimateStatus::Ok);
    CHECK(sig.value == doctest::Approx(0.0));
    CHECK(sig.clamp_count == 0);
}

TEST_CASE("scale estimator clamps a negative radicand and reports it") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    RngStream g(1);
    // Gamma = 8: the squared walk jumps 16 per step, so every step crosses
    // and Gamma M/theta = 8 < Hat^2 = 16.
    const PairedTraces paired = simulate_paired_traces(det, 8.0, 8.0, 7, g);
    const Estimate sig = estimate_sigma(paired.mu_trace, paired.z_trace);
    CHECK(sig.value == 0.0);
    CHECK(sig.clamp_count == 1);
}

TEST_CASE("precision weights") {
    {
        const std::vector<double> w = weights_from_sigmas(std::vector{2.0, 2.0});
        CHECK(w[0] == doctest::Approx(0.5));
        CHECK(w[1] == doctest::Approx(0.5));
    }
    {
        const std::vector<double> w = weights_from_sigmas(std::vector{1.0, 2.0});
        CHECK(w[0] == doctest::Approx(0.8));
        CHECK(w[1] == doctest::Approx(0.2));
    }
    {
        const std::vector<double> w =
            weights_from_sigmas(std::vector{1.0, 1.0, 1.0, 1.0});
        for (const double wk : w) CHECK(wk == doctest::Approx(0.25));
    }
    CHECK_THROWS(weights_from_sigmas(std::vector{1.0, 0.0}));
}

TEST_CASE("weighted combination") {
    auto ok = [](double v) {
        Estimate e;
        e.kind = EstimatorKind::Hat;
        e.value = v;
        return e;
    };
    {
        const std::vector<Estimate> ests = {ok(4.0), ok(4.0)};
        CHECK(fuse(ests, std::vector{0.5, 0.5}).value == doctest::Approx(4.0));
    }
    {
        const std::vector<Estimate> ests = {ok(3.0), ok(5.0)};
        CHECK(fuse(ests, std::vector{0.8, 0.2}).value == doctest::Approx(3.4));
    }
    {
        Estimate missing;
        missing.kind = EstimatorKind::Hat;
        missing.status = EstimateStatus::NoSample;
        const std::vector<Estimate> ests = {ok(3.0), missing};
        CHECK(fuse(ests, std::vector{0.5, 0.5}).status ==
              EstimateStatus::NoSample);
    }
}

TEST_CASE("sample-mean estimators decompose into count estimators plus the "
          "overshoot share") {
    const IncrementModel gc = IncrementModel::gaussian_curved(4.0, 4.0);
    RngStream g(7);
    const RenewalTrace trace =
        simulate_trace(gc, SamplingScheme::hitting_one_sided(40.0), 1000, g,
                       true);
    REQUIRE(trace.n_t() > 0);
    const TraceStats st = trace_stats(trace);
    const double bar = estimate(trace, EstimatorKind::Bar).value;
    const double tilde = estimate(trace, EstimatorKind::Tilde).value;
    const double hat = estimate(trace, EstimatorKind::Hat).value;
    const double check = estimate(trace, EstimatorKind::Check).value;
    CHECK(bar == doctest::Approx(hat + st.overshoot_sum /
                                           static_cast<double>(st.tau_of_t))
                     .epsilon(1e-12));
    CHECK(tilde ==
          doctest::Approx(check + st.overshoot_sum /
                                      static_cast<double>(trace.horizon))
              .epsilon(1e-12));
    // With every overshoot zero the two routes coincide exactly.
    const RenewalTrace det_trace = point_mass_trace(true);
    CHECK(estimate(det_trace, EstimatorKind::Bar).value ==
          estimate(det_trace, EstimatorKind::Hat).value);
}
