#pragma once

#include <span>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/renewal.hpp"

namespace lowrate {

enum class EstimatorKind { Bar, Tilde, Hat, Check, GHat, GCheck, Sigma };

enum class EstimateStatus { Ok, NoSample, CorrectionSkipped };

enum class Denominator { LastSampleTime, Horizon };

struct Estimate {
    EstimatorKind kind = EstimatorKind::Bar;
    double value = 0.0;
    std::size_t n_messages = 0;
    Denominator denominator = Denominator::LastSampleTime;
    EstimateStatus status = EstimateStatus::Ok;
    std::size_t clamp_count = 0;  ///< sigma estimator: negative radicand clamps
};

const char* estimator_name(EstimatorKind kind);

/// The four direct mu estimators. Bar/Tilde need the trace to carry observed
/// walk values; Hat/Check work from (tau_n, z_n) alone.
///   Bar   = S_{tau(t)} / tau(t)        Tilde = S_{tau(t)} / t
///   Hat   = N(t) Delta / tau(t)        Check = N(t) Delta / t
/// On two-sided traces the count N(t) Delta is replaced by
/// Delta * sum(2 z_n - 1).
/// Bar and Hat have no value when N(t) = 0 (their denominator is tau(t) = 0);
/// Tilde and Check are 0 with status Ok in that case.
Estimate estimate(const RenewalTrace& trace, EstimatorKind kind);

/// Overshoot correction g(x) = x (1 + rho(x)/Delta) applied to Hat or Check,
/// with rho evaluated at the plug-in mean under the model's variance link
/// (sigma^2(x) = c x^2 for GaussianCurved, x^2/k for Gamma). Non-positive
/// inputs and lattice families pass through with status CorrectionSkipped.
Estimate overshoot_correct(const Estimate& est, double delta_threshold,
                           const IncrementModel& model);

/// sigma_hat = sqrt(Gamma M(t)/theta(t) - Hat^2), clamped at 0.
Estimate estimate_sigma(const RenewalTrace& mu_trace,
                        const SecondMomentTrace& z_trace);

/// w_k proportional to sigma_k^{-2}, normalized to sum 1.
std::vector<double> weights_from_sigmas(std::span<const double> sigmas);

/// Weighted combination of per-sensor estimates. Any component without a
/// sample fails the whole fusion (status NoSample).
Estimate fuse(std::span<const Estimate> estimates,
              std::span<const double> weights);

} // namespace lowrate
