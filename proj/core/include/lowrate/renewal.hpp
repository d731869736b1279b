#pragma once

#include <cstdint>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/rng.hpp"

namespace lowrate {

/// How sampling times are generated. Time is integer valued throughout.
struct SamplingScheme {
    enum class Kind {
        HittingOneSided,   ///< tau_n = inf{t: S_t - S_{tau_{n-1}} >= Delta}
        HittingTwoSided,   ///< threshold on |S_t - S_{tau_{n-1}}|
        ExogExponential,   ///< i.i.d. Exp(delta) interarrivals, rounded up
        ExogGeometric,     ///< geometric interarrivals with mean delta
        ExogDeterministic, ///< fixed integer interarrival delta
    };

    Kind kind = Kind::HittingOneSided;
    double threshold = 0.0;         ///< Delta, hitting schemes only
    double mean_interarrival = 0.0; ///< delta, exogenous schemes only

    static SamplingScheme hitting_one_sided(double delta_threshold);
    static SamplingScheme hitting_two_sided(double delta_threshold);
    static SamplingScheme exogenous_exponential(double delta);
    static SamplingScheme exogenous_geometric(double delta);
    static SamplingScheme exogenous_deterministic(double delta);

    bool hitting() const {
        return kind == Kind::HittingOneSided || kind == Kind::HittingTwoSided;
    }
    /// Closed-form first two interarrival moments for exogenous schemes.
    /// For the exponential variant these account for the integer-grid
    /// rounding (the rounded interarrival is geometric with q = e^{-1/delta}).
    double interarrival_mean() const;
    double interarrival_second_moment() const;
};

struct TraceEvent {
    std::int64_t tau = 0;   ///< sampling time
    int z = 1;              ///< 1 iff the upper threshold was crossed
    double eta = 0.0;       ///< overshoot (0 for exogenous schemes)
    double s_at_tau = 0.0;  ///< walk value, only if observe_S was set
};

/// One simulated path's event record up to the horizon.
struct RenewalTrace {
    std::int64_t horizon = 0;
    std::vector<TraceEvent> events;
    double delta_threshold = 0.0;  ///< copied from the scheme, 0 for exogenous
    bool observed_s = false;
    bool two_sided = false;

    std::size_t n_t() const { return events.size(); }
    std::int64_t tau_of_t() const {
        return events.empty() ? 0 : events.back().tau;
    }
};

struct TraceStats {
    std::size_t n_t = 0;
    std::int64_t tau_of_t = 0;
    std::int64_t age = 0;
    std::int64_t bit_sum = 0;      ///< sum of (2 z_n - 1)
    double overshoot_sum = 0.0;
};

struct FirstPassageRecord {
    std::size_t nu = 0;       ///< first index with partial sum > level
    double tau_at_nu = 0.0;   ///< the partial sum at that index
    double overshoot = 0.0;   ///< tau_at_nu - level
    double level = 0.0;
};

/// Event record of the squared-increment walk Z_t crossing multiples of Gamma.
struct SecondMomentTrace {
    std::int64_t horizon = 0;
    std::vector<std::int64_t> theta_events;
    double gamma_threshold = 0.0;

    std::size_t m_t() const { return theta_events.size(); }
    std::int64_t theta_of_t() const {
        return theta_events.empty() ? 0 : theta_events.back();
    }
};

RenewalTrace simulate_trace(const IncrementModel& model,
                            const SamplingScheme& scheme, std::int64_t t,
                            RngStream& stream, bool observe_s = false);

FirstPassageRecord first_passage(const IncrementModel& model, double level,
                                 RngStream& stream);

SecondMomentTrace simulate_second_moment_trace(const IncrementModel& model,
                                               double gamma_threshold,
                                               std::int64_t t,
                                               RngStream& stream);

/// Both observation channels of one underlying path: the mu-walk hitting
/// Delta and the Z-walk hitting Gamma share the same X draws.
struct PairedTraces {
    RenewalTrace mu_trace;
    SecondMomentTrace z_trace;
};
PairedTraces simulate_paired_traces(const IncrementModel& model,
                                    double delta_threshold,
                                    double gamma_threshold, std::int64_t t,
                                    RngStream& stream, bool observe_s = false);

TraceStats trace_stats(const RenewalTrace& trace);

} // namespace lowrate
