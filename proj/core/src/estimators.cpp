#include "lowrate/estimators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lowrate {

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Bar: return "bar";
        case EstimatorKind::Tilde: return "tilde";
        case EstimatorKind::Hat: return "hat";
        case EstimatorKind::Check: return "check";
        case EstimatorKind::GHat: return "ghat";
        case EstimatorKind::GCheck: return "gcheck";
        case EstimatorKind::Sigma: return "sigma";
    }
    return "?";
}

Estimate estimate(const RenewalTrace& trace, EstimatorKind kind) {
    Estimate est;
    est.kind = kind;
    est.n_messages = trace.n_t();
    est.denominator =
        (kind == EstimatorKind::Bar || kind == EstimatorKind::Hat)
            ? Denominator::LastSampleTime
            : Denominator::Horizon;
    const bool needs_s = kind == EstimatorKind::Bar || kind == EstimatorKind::Tilde;
    if (needs_s && !trace.observed_s)
        throw std::invalid_argument(
            "estimate: Bar/Tilde need a trace with observed walk values");
    const double t = static_cast<double>(trace.horizon);
    const double tau_t = static_cast<double>(trace.tau_of_t());
    if (trace.n_t() == 0) {
        if (est.denominator == Denominator::LastSampleTime) {
            est.status = EstimateStatus::NoSample;
        } else {
            est.value = 0.0;  // empty sum
        }
        return est;
    }
    double numerator = 0.0;
    switch (kind) {
        case EstimatorKind::Bar:
        case EstimatorKind::Tilde:
            numerator = trace.events.back().s_at_tau;
            break;
        case EstimatorKind::Hat:
        case EstimatorKind::Check: {
            if (trace.two_sided) {
                std::int64_t bits = 0;
                for (const auto& ev : trace.events) bits += 2 * ev.z - 1;
                numerator = trace.delta_threshold * static_cast<double>(bits);
            } else {
                numerator = trace.delta_threshold *
                            static_cast<double>(trace.n_t());
            }
            break;
        }
        default:
            throw std::invalid_argument(
                "estimate: only Bar/Tilde/Hat/Check are direct estimators");
    }
    est.value =
        numerator / (est.denominator == Denominator::LastSampleTime ? tau_t : t);
    return est;
}

namespace {

// rho(x) = coeff * x for the families with a proportional overshoot limit.
// The GaussianCurved series constant is cached per curvature c.
double rho_linear_coefficient(const IncrementModel& model) {
    switch (model.family()) {
        case Family::Deterministic:
            return 0.5;
        case Family::Gamma:
            return (1.0 + 1.0 / model.shape_k()) / 2.0;
        case Family::GaussianCurved: {
            static std::mutex mu;
            static std::map<double, double> cache;
            std::lock_guard<std::mutex> lock(mu);
            auto it = cache.find(model.curvature_c());
            if (it == cache.end())
                it = cache.emplace(model.curvature_c(),
                                   gaussian_w_constant(model.curvature_c()))
                         .first;
            return it->second;
        }
        default:
            throw std::logic_error("rho_linear_coefficient: family not linear");
    }
}

double rho_plugin(const IncrementModel& model, double x) {
    switch (model.family()) {
        case Family::Deterministic:
        case Family::Gamma:
        case Family::GaussianCurved:
            return rho_linear_coefficient(model) * x;
        case Family::Gaussian:
            return *rho_closed_form(IncrementModel::gaussian(x, model.sd()));
        default:
            throw std::logic_error("rho_plugin: lattice family");
    }
}

} // namespace

Estimate overshoot_correct(const Estimate& est, double delta_threshold,
                           const IncrementModel& model) {
    if (est.kind != EstimatorKind::Hat && est.kind != EstimatorKind::Check)
        throw std::invalid_argument("overshoot_correct: input must be Hat or Check");
    if (est.status != EstimateStatus::Ok)
        throw std::invalid_argument("overshoot_correct: input status must be ok");
    Estimate out = est;
    out.kind = est.kind == EstimatorKind::Hat ? EstimatorKind::GHat
                                              : EstimatorKind::GCheck;
    if (est.value <= 0.0 || model.lattice()) {
        out.status = EstimateStatus::CorrectionSkipped;
        return out;
    }
    const double x = est.value;
    out.value = x * (1.0 + rho_plugin(model, x) / delta_threshold);
    return out;
}

Estimate estimate_sigma(const RenewalTrace& mu_trace,
                        const SecondMomentTrace& z_trace) {
    if (mu_trace.horizon != z_trace.horizon)
        throw std::invalid_argument("estimate_sigma: traces have different horizons");
    Estimate est;
    est.kind = EstimatorKind::Sigma;
    est.n_messages = mu_trace.n_t() + z_trace.m_t();
    if (mu_trace.n_t() == 0 || z_trace.m_t() == 0) {
        est.status = EstimateStatus::NoSample;
        return est;
    }
    const Estimate hat = estimate(mu_trace, EstimatorKind::Hat);
    const double second = z_trace.gamma_threshold *
                          static_cast<double>(z_trace.m_t()) /
                          static_cast<double>(z_trace.theta_of_t());
    const double inner = second - hat.value * hat.value;
    if (inner < 0.0) {
        est.value = 0.0;
        est.clamp_count = 1;
    } else {
        est.value = std::sqrt(inner);
    }
    return est;
}

std::vector<double> weights_from_sigmas(std::span<const double> sigmas) {
    std::vector<double> w(sigmas.size());
    double total = 0.0;
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        if (!(sigmas[k] > 0.0))
            throw std::invalid_argument("weights_from_sigmas: sigma must be > 0");
        w[k] = 1.0 / (sigmas[k] * sigmas[k]);
        total += w[k];
    }
    for (auto& wk : w) wk /= total;
    return w;
}

Estimate fuse(std::span<const Estimate> estimates,
              std::span<const double> weights) {
    if (estimates.size() != weights.size() || estimates.empty())
        throw std::invalid_argument("fuse: estimates and weights must match");
    Estimate out;
    out.kind = estimates.front().kind;
    out.denominator = estimates.front().denominator;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        out.n_messages += estimates[k].n_messages;
        if (estimates[k].status != EstimateStatus::Ok) {
            out.status = EstimateStatus::NoSample;
            out.value = 0.0;
            return out;
        }
        out.value += weights[k] * estimates[k].value;
    }
    return out;
}

} // namespace lowrate
