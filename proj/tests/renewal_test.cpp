#include "doctest.h"

#include <cmath>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/renewal.hpp"
#include "lowrate/stats.hpp"

using namespace lowrate;

TEST_CASE("hitting scheme on a point-mass walk samples on schedule") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    RngStream g(1);
    const RenewalTrace trace = simulate_trace(
        det, SamplingScheme::hitting_one_sided(8.0), 7, g, true);
    REQUIRE(trace.n_t() == 3);
    CHECK(trace.events[0].tau == 2);
    CHECK(trace.events[1].tau == 4);
    CHECK(trace.events[2].tau == 6);
    CHECK(trace.tau_of_t() == 6);
    for (const auto& ev : trace.events) CHECK(ev.eta == 0.0);
}

TEST_CASE("overshoot records the jump past the threshold") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    RngStream g(1);
    const RenewalTrace trace =
        simulate_trace(det, SamplingScheme::hitting_one_sided(7.0), 7, g);
    REQUIRE(trace.n_t() == 3);
    for (const auto& ev : trace.events) CHECK(ev.eta == doctest::Approx(1.0));
}

TEST_CASE("first passage uses a strict boundary") {
    const IncrementModel det = IncrementModel::deterministic(2.0);
    {
        RngStream g(1);
        const FirstPassageRecord rec = first_passage(det, 5.0, g);
        CHECK(rec.nu == 3);
        CHECK(rec.tau_at_nu == doctest::Approx(6.0));
        CHECK(rec.overshoot == doctest::Approx(1.0));
    }
    {
        RngStream g(1);
        const FirstPassageRecord rec = first_passage(det, 6.0, g);
        CHECK(rec.nu == 4);
        CHECK(rec.tau_at_nu == doctest::Approx(8.0));
        CHECK(rec.overshoot == doctest::Approx(2.0));
    }
}

TEST_CASE("mean passage index matches the renewal function for exponential "
          "steps") {
    // E[first sum past level] = level + 1 by memorylessness, and the mean
    // index equals that by the stopped-sum identity with unit mean steps.
    const IncrementModel ex = IncrementModel::gamma(1.0, 1.0);
    RunningStat nu;
    for (std::size_t rep = 0; rep < 20000; ++rep) {
        RngStream g(2, rep);
        nu.add(static_cast<double>(first_passage(ex, 100.0, g).nu));
    }
    CHECK(std::abs(nu.mean() - 101.0) <= 4.0 * nu.se());
}

TEST_CASE("squared-increment walk crossings on a point mass") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    {
        RngStream g(1);
        const SecondMomentTrace z = simulate_second_moment_trace(det, 32.0, 7, g);
        REQUIRE(z.m_t() == 3);
        CHECK(z.theta_events[0] == 2);
        CHECK(z.theta_events[1] == 4);
        CHECK(z.theta_events[2] == 6);
    }
    {
        RngStream g(1);
        const SecondMomentTrace z = simulate_second_moment_trace(det, 33.0, 7, g);
        REQUIRE(z.m_t() == 2);
        CHECK(z.theta_events[0] == 3);
        CHECK(z.theta_events[1] == 6);
    }
}

TEST_CASE("trace accessors") {
    const IncrementModel det = IncrementModel::deterministic(4.0);
    RngStream g(1);
    const RenewalTrace trace =
        simulate_trace(det, SamplingScheme::hitting_one_sided(8.0), 7, g);
    const TraceStats st = trace_stats(trace);
    CHECK(st.n_t == 3);
    CHECK(st.tau_of_t == 6);
    CHECK(st.age == 1);
    CHECK(st.bit_sum == 3);
    CHECK(st.overshoot_sum == 0.0);
}

TEST_CASE("empty trace accessors degenerate cleanly") {
    RenewalTrace trace;
    trace.horizon = 10;
    const TraceStats st = trace_stats(trace);
    CHECK(st.n_t == 0);
    CHECK(st.tau_of_t == 0);
    CHECK(st.age == 10);
    CHECK(st.bit_sum == 0);
    CHECK(st.overshoot_sum == 0.0);
}

TEST_CASE("two-sided bit bookkeeping") {
    RenewalTrace trace;
    trace.horizon = 10;
    trace.two_sided = true;
    trace.events = {TraceEvent{2, 1, 0.0, 0.0}, TraceEvent{5, 0, 0.0, 0.0},
                    TraceEvent{9, 1, 0.0, 0.0}};
    CHECK(trace_stats(trace).bit_sum == 1);
}

TEST_CASE("walk value at each sampling time recovers count times threshold "
          "plus overshoots") {
    const IncrementModel gc = IncrementModel::gaussian_curved(4.0, 4.0);
    RngStream g(3);
    const RenewalTrace trace =
        simulate_trace(gc, SamplingScheme::hitting_one_sided(40.0), 1000, g,
                       true);
    REQUIRE(trace.n_t() > 0);
    const TraceStats st = trace_stats(trace);
    const double recovered =
        static_cast<double>(st.n_t) * 40.0 + st.overshoot_sum;
    CHECK(trace.events.back().s_at_tau ==
          doctest::Approx(recovered).epsilon(1e-12));
}

TEST_CASE("passage index is the sample count plus one on positive walks") {
    // Accumulate one positive-increment path and compare the two counts on
    // the same partial sums.
    const IncrementModel gam = IncrementModel::gamma(2.0, 1.0);
    RngStream g(4);
    const double level = 50.0;
    double s = 0.0;
    std::size_t n_le = 0, nu = 0;
    while (true) {
        s += gam.sample(g);
        ++nu;
        if (s > level) break;
        ++n_le;
    }
    CHECK(nu == n_le + 1);
}

TEST_CASE("hitting interarrival mean and variance follow the stopped-walk "
          "first-order laws") {
    const IncrementModel gc = IncrementModel::gaussian_curved(4.0, 4.0);
    const double threshold = 1e4;
    RunningStat nu;
    for (std::size_t rep = 0; rep < 3000; ++rep) {
        RngStream g(5, rep);
        nu.add(static_cast<double>(first_passage(gc, threshold, g).nu));
    }
    const double rho = *rho_closed_form(gc);
    CHECK(std::abs(nu.mean() - (threshold + rho) / 4.0) <= 4.0 * nu.se());
    // Var[interarrival] ~= (sigma^2 / mu^3) * threshold.
    const double predicted = 64.0 / 64.0 * threshold;
    CHECK(std::abs(nu.variance() / predicted - 1.0) < 0.10);
}

TEST_CASE("exogenous interarrival closed forms match simulation") {
    for (const auto scheme : {SamplingScheme::exogenous_exponential(20.0),
                              SamplingScheme::exogenous_geometric(20.0)}) {
        const IncrementModel det = IncrementModel::deterministic(1.0);
        RunningStat first, second;
        for (std::size_t rep = 0; rep < 20000; ++rep) {
            RngStream g(6, rep, 0, static_cast<std::uint64_t>(scheme.kind));
            const RenewalTrace tr = simulate_trace(det, scheme, 10000, g);
            REQUIRE(tr.n_t() > 0);
            const double tau1 = static_cast<double>(tr.events.front().tau);
            first.add(tau1);
            second.add(tau1 * tau1);
        }
        CHECK(std::abs(first.mean() - scheme.interarrival_mean()) <=
              4.0 * first.se());
        CHECK(std::abs(second.mean() - scheme.interarrival_second_moment()) <=
              4.0 * second.se());
    }
}
