#include "lowrate/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lowrate {

namespace {

constexpr std::uint64_t kPurposeSensorWalk = 0x1000;

RenewalTrace truncated(const RenewalTrace& trace, std::int64_t t) {
    RenewalTrace out;
    out.horizon = t;
    out.delta_threshold = trace.delta_threshold;
    out.observed_s = trace.observed_s;
    out.two_sided = trace.two_sided;
    for (const auto& ev : trace.events) {
        if (ev.tau > t) break;
        out.events.push_back(ev);
    }
    return out;
}

SecondMomentTrace truncated(const SecondMomentTrace& trace, std::int64_t t) {
    SecondMomentTrace out;
    out.horizon = t;
    out.gamma_threshold = trace.gamma_threshold;
    for (const auto theta : trace.theta_events) {
        if (theta > t) break;
        out.theta_events.push_back(theta);
    }
    return out;
}

void validate(std::span<const SensorSpec> sensors,
              std::span<const std::int64_t> checkpoints) {
    if (sensors.empty())
        throw std::invalid_argument("run_network: need at least one sensor");
    if (checkpoints.empty())
        throw std::invalid_argument("run_network: need at least one checkpoint");
    std::set<std::uint64_t> ids;
    for (const auto& s : sensors) {
        if (!ids.insert(s.sensor_id).second)
            throw std::invalid_argument("run_network: duplicate sensor_id");
        if (!(s.delta_threshold > 0.0))
            throw std::invalid_argument("run_network: Delta must be > 0");
    }
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1])
            throw std::invalid_argument("run_network: checkpoints must increase");
}

} // namespace

NetworkRun run_network(std::span<const SensorSpec> sensors,
                       std::span<const std::int64_t> checkpoints,
                       std::uint64_t master_seed, const FusionConfig& config) {
    validate(sensors, checkpoints);
    const std::int64_t horizon = checkpoints.back();
    const bool sigma_channel =
        std::all_of(sensors.begin(), sensors.end(),
                    [](const SensorSpec& s) { return s.gamma_threshold.has_value(); });
    const bool rho_supported =
        !config.two_sided &&
        std::none_of(sensors.begin(), sensors.end(),
                     [](const SensorSpec& s) { return s.model.lattice(); });

    NetworkRun run;
    std::vector<double> sigmas;
    for (const auto& s : sensors) sigmas.push_back(s.model.sd());
    // Zero-variance sensors carry no precision information; fall back to
    // equal weights instead of dividing by sigma = 0.
    if (std::all_of(sigmas.begin(), sigmas.end(),
                    [](double s) { return s > 0.0; })) {
        run.weights = weights_from_sigmas(sigmas);
    } else {
        run.weights.assign(sensors.size(),
                           1.0 / static_cast<double>(sensors.size()));
    }

    for (const auto& s : sensors) {
        RngStream g(master_seed, 0, s.sensor_id, kPurposeSensorWalk);
        if (sigma_channel && !config.two_sided) {
            PairedTraces paired = simulate_paired_traces(
                s.model, s.delta_threshold, *s.gamma_threshold, horizon, g,
                /*observe_s=*/false);
            run.sensor_traces.push_back(std::move(paired.mu_trace));
            run.z_traces.push_back(std::move(paired.z_trace));
        } else {
            const SamplingScheme scheme =
                config.two_sided
                    ? SamplingScheme::hitting_two_sided(s.delta_threshold)
                    : SamplingScheme::hitting_one_sided(s.delta_threshold);
            run.sensor_traces.push_back(
                simulate_trace(s.model, scheme, horizon, g, /*observe_s=*/false));
        }
    }

    for (const std::int64_t t : checkpoints) {
        CheckpointEstimates cp;
        cp.t = t;
        std::vector<Estimate> hats, checks, ghats, gchecks;
        double fused_second = 0.0;
        bool sigma_ok = sigma_channel;
        for (std::size_t k = 0; k < sensors.size(); ++k) {
            const RenewalTrace view = truncated(run.sensor_traces[k], t);
            if (view.n_t() == 0) ++cp.exclusions;
            const Estimate hat = estimate(view, EstimatorKind::Hat);
            const Estimate check = estimate(view, EstimatorKind::Check);
            hats.push_back(hat);
            checks.push_back(check);
            if (rho_supported && hat.status == EstimateStatus::Ok) {
                ghats.push_back(overshoot_correct(hat, sensors[k].delta_threshold,
                                                  sensors[k].model));
                gchecks.push_back(overshoot_correct(
                    check, sensors[k].delta_threshold, sensors[k].model));
            } else if (rho_supported) {
                ghats.push_back(hat);
                gchecks.push_back(check);
            }
            if (sigma_channel) {
                const SecondMomentTrace zview = truncated(run.z_traces[k], t);
                if (zview.m_t() == 0) {
                    sigma_ok = false;
                } else {
                    fused_second += run.weights[k] * zview.gamma_threshold *
                                    static_cast<double>(zview.m_t()) /
                                    static_cast<double>(zview.theta_of_t());
                }
            }
        }
        cp.fused[EstimatorKind::Hat] = fuse(hats, run.weights);
        cp.fused[EstimatorKind::Check] = fuse(checks, run.weights);
        if (rho_supported) {
            cp.fused[EstimatorKind::GHat] = fuse(ghats, run.weights);
            cp.fused[EstimatorKind::GCheck] = fuse(gchecks, run.weights);
        }
        if (sigma_channel) {
            Estimate sig;
            sig.kind = EstimatorKind::Sigma;
            const Estimate& fused_hat = cp.fused.at(EstimatorKind::Hat);
            if (!sigma_ok || fused_hat.status != EstimateStatus::Ok) {
                sig.status = EstimateStatus::NoSample;
            } else {
                const double inner =
                    fused_second - fused_hat.value * fused_hat.value;
                if (inner < 0.0) {
                    sig.value = 0.0;
                    sig.clamp_count = 1;
                } else {
                    sig.value = std::sqrt(inner);
                }
            }
            cp.fused[EstimatorKind::Sigma] = sig;
        }
        run.checkpoints.push_back(std::move(cp));
    }

    for (std::size_t k = 0; k < sensors.size(); ++k) {
        run.total_bits += run.sensor_traces[k].n_t();
        if (sigma_channel) run.total_bits += run.z_traces[k].m_t();
    }
    return run;
}

NetworkCltSample network_clt_sample(std::span<const SensorSpec> sensors,
                                    std::int64_t t, std::size_t reps,
                                    std::uint64_t master_seed) {
    if (reps < 100)
        throw std::invalid_argument("network_clt_sample: reps must be >= 100");
    std::vector<std::int64_t> cp = {t};
    validate(sensors, cp);
    std::vector<double> sigmas;
    for (const auto& s : sensors) sigmas.push_back(s.model.sd());
    const std::vector<double> w = weights_from_sigmas(sigmas);
    double scale2 = 0.0;
    for (std::size_t k = 0; k < sensors.size(); ++k)
        scale2 += w[k] * w[k] * sigmas[k] * sigmas[k];
    const double scale = std::sqrt(scale2 / static_cast<double>(t));
    const double mu = sensors.front().model.mean();

    NetworkCltSample out;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        double fused = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < sensors.size(); ++k) {
            RngStream g(master_seed, rep, sensors[k].sensor_id,
                        kPurposeSensorWalk);
            const SamplingScheme scheme =
                SamplingScheme::hitting_one_sided(sensors[k].delta_threshold);
            const RenewalTrace trace =
                simulate_trace(sensors[k].model, scheme, t, g);
            const Estimate hat = estimate(trace, EstimatorKind::Hat);
            if (hat.status != EstimateStatus::Ok) {
                ok = false;
                break;
            }
            fused += w[k] * hat.value;
        }
        if (!ok) {
            ++out.excluded;
            continue;
        }
        out.standardized.push_back((fused - mu) / scale);
    }
    return out;
}

} // namespace lowrate
