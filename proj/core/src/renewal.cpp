#include "lowrate/renewal.hpp"

#include <cmath>
#include <stdexcept>

namespace lowrate {

SamplingScheme SamplingScheme::hitting_one_sided(double delta_threshold) {
    if (!(delta_threshold > 0.0))
        throw std::invalid_argument("hitting scheme: Delta must be > 0");
    SamplingScheme s;
    s.kind = Kind::HittingOneSided;
    s.threshold = delta_threshold;
    return s;
}

SamplingScheme SamplingScheme::hitting_two_sided(double delta_threshold) {
    SamplingScheme s = hitting_one_sided(delta_threshold);
    s.kind = Kind::HittingTwoSided;
    return s;
}

SamplingScheme SamplingScheme::exogenous_exponential(double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("exogenous scheme: delta must be > 0");
    SamplingScheme s;
    s.kind = Kind::ExogExponential;
    s.mean_interarrival = delta;
    return s;
}

SamplingScheme SamplingScheme::exogenous_geometric(double delta) {
    if (!(delta >= 1.0))
        throw std::invalid_argument("geometric scheme: delta must be >= 1");
    SamplingScheme s;
    s.kind = Kind::ExogGeometric;
    s.mean_interarrival = delta;
    return s;
}

SamplingScheme SamplingScheme::exogenous_deterministic(double delta) {
    if (!(delta >= 1.0) || delta != std::floor(delta))
        throw std::invalid_argument(
            "deterministic scheme: delta must be a positive integer");
    SamplingScheme s;
    s.kind = Kind::ExogDeterministic;
    s.mean_interarrival = delta;
    return s;
}

double SamplingScheme::interarrival_mean() const {
    switch (kind) {
        case Kind::ExogExponential: {
            // ceil(Exp(delta)) is geometric with q = e^{-1/delta}.
            const double q = std::exp(-1.0 / mean_interarrival);
            return 1.0 / (1.0 - q);
        }
        case Kind::ExogGeometric:
        case Kind::ExogDeterministic:
            return mean_interarrival;
        default:
            throw std::logic_error(
                "interarrival_mean: closed form only for exogenous schemes");
    }
}

double SamplingScheme::interarrival_second_moment() const {
    switch (kind) {
        case Kind::ExogExponential: {
            const double q = std::exp(-1.0 / mean_interarrival);
            const double p = 1.0 - q;
            // Geometric on {1,2,...}: E[tau^2] = (2 - p) / p^2.
            return (2.0 - p) / (p * p);
        }
        case Kind::ExogGeometric: {
            const double d = mean_interarrival;
            return d * (2.0 * d - 1.0);
        }
        case Kind::ExogDeterministic:
            return mean_interarrival * mean_interarrival;
        default:
            throw std::logic_error(
                "interarrival_second_moment: closed form only for exogenous schemes");
    }
}

namespace {

std::int64_t draw_interarrival(const SamplingScheme& scheme, RngStream& g) {
    switch (scheme.kind) {
        case SamplingScheme::Kind::ExogExponential: {
            double u;
            do { u = g.uniform(); } while (u <= 0.0);
            return static_cast<std::int64_t>(
                std::ceil(-scheme.mean_interarrival * std::log(u)));
        }
        case SamplingScheme::Kind::ExogGeometric: {
            const double p = 1.0 / scheme.mean_interarrival;
            double u;
            do { u = g.uniform(); } while (u <= 0.0);
            const double v = std::ceil(std::log(u) / std::log1p(-p));
            return std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
        }
        case SamplingScheme::Kind::ExogDeterministic:
            return static_cast<std::int64_t>(scheme.mean_interarrival);
        default:
            throw std::logic_error("draw_interarrival: hitting scheme");
    }
}

} // namespace

RenewalTrace simulate_trace(const IncrementModel& model,
                            const SamplingScheme& scheme, std::int64_t t,
                            RngStream& stream, bool observe_s) {
    if (t < 1) throw std::invalid_argument("simulate_trace: t must be >= 1");
    RenewalTrace trace;
    trace.horizon = t;
    trace.observed_s = observe_s;
    trace.two_sided = scheme.kind == SamplingScheme::Kind::HittingTwoSided;
    if (scheme.hitting()) {
        trace.delta_threshold = scheme.threshold;
        const double delta = scheme.threshold;
        double s = 0.0, anchor = 0.0;
        for (std::int64_t step = 1; step <= t; ++step) {
            s += model.sample(stream);
            const double change = s - anchor;
            const bool up = change >= delta;
            const bool down = trace.two_sided && -change >= delta;
            if (up || down) {
                TraceEvent ev;
                ev.tau = step;
                ev.z = up ? 1 : 0;
                ev.eta = std::abs(change) - delta;
                if (observe_s) ev.s_at_tau = s;
                trace.events.push_back(ev);
                anchor = s;
            }
        }
    } else {
        std::int64_t now = 0;
        double s = 0.0;
        for (;;) {
            const std::int64_t gap = draw_interarrival(scheme, stream);
            if (now + gap > t) break;
            now += gap;
            if (observe_s)
                for (std::int64_t i = 0; i < gap; ++i) s += model.sample(stream);
            TraceEvent ev;
            ev.tau = now;
            if (observe_s) ev.s_at_tau = s;
            trace.events.push_back(ev);
        }
    }
    return trace;
}

FirstPassageRecord first_passage(const IncrementModel& model, double level,
                                 RngStream& stream) {
    if (!(model.mean() > 0.0))
        throw std::invalid_argument("first_passage: requires positive drift");
    if (level < 0.0)
        throw std::invalid_argument("first_passage: level must be >= 0");
    FirstPassageRecord rec;
    rec.level = level;
    double s = 0.0;
    std::size_t n = 0;
    do {
        s += model.sample(stream);
        ++n;
    } while (s <= level);
    rec.nu = n;
    rec.tau_at_nu = s;
    rec.overshoot = s - level;
    return rec;
}

SecondMomentTrace simulate_second_moment_trace(const IncrementModel& model,
                                               double gamma_threshold,
                                               std::int64_t t,
                                               RngStream& stream) {
    if (!(gamma_threshold > 0.0))
        throw std::invalid_argument("second_moment_trace: Gamma must be > 0");
    if (t < 1) throw std::invalid_argument("second_moment_trace: t must be >= 1");
    SecondMomentTrace trace;
    trace.horizon = t;
    trace.gamma_threshold = gamma_threshold;
    double z = 0.0, anchor = 0.0;
    for (std::int64_t step = 1; step <= t; ++step) {
        const double x = model.sample(stream);
        z += x * x;
        if (z - anchor >= gamma_threshold) {
            trace.theta_events.push_back(step);
            anchor = z;
        }
    }
    return trace;
}

PairedTraces simulate_paired_traces(const IncrementModel& model,
                                    double delta_threshold,
                                    double gamma_threshold, std::int64_t t,
                                    RngStream& stream, bool observe_s) {
    if (!(delta_threshold > 0.0) || !(gamma_threshold > 0.0))
        throw std::invalid_argument("simulate_paired_traces: thresholds must be > 0");
    if (t < 1) throw std::invalid_argument("simulate_paired_traces: t must be >= 1");
    PairedTraces out;
    out.mu_trace.horizon = t;
    out.mu_trace.delta_threshold = delta_threshold;
    out.mu_trace.observed_s = observe_s;
    out.z_trace.horizon = t;
    out.z_trace.gamma_threshold = gamma_threshold;
    double s = 0.0, s_anchor = 0.0, z = 0.0, z_anchor = 0.0;
    for (std::int64_t step = 1; step <= t; ++step) {
        const double x = model.sample(stream);
        s += x;
        z += x * x;
        if (s - s_anchor >= delta_threshold) {
            TraceEvent ev;
            ev.tau = step;
            ev.eta = s - s_anchor - delta_threshold;
            if (observe_s) ev.s_at_tau = s;
            out.mu_trace.events.push_back(ev);
            s_anchor = s;
        }
        if (z - z_anchor >= gamma_threshold) {
            out.z_trace.theta_events.push_back(step);
            z_anchor = z;
        }
    }
    return out;
}

TraceStats trace_stats(const RenewalTrace& trace) {
    TraceStats st;
    st.n_t = trace.n_t();
    st.tau_of_t = trace.tau_of_t();
    st.age = trace.horizon - st.tau_of_t;
    for (const auto& ev : trace.events) {
        st.bit_sum += 2 * ev.z - 1;
        st.overshoot_sum += ev.eta;
    }
    return st;
}

} // namespace lowrate
