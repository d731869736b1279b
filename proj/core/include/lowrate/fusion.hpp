#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lowrate/estimators.hpp"
#include "lowrate/renewal.hpp"

namespace lowrate {

/// One sensor of the decentralized protocol. All sensors observe the same
/// true mean; sigma may differ per sensor.
struct SensorSpec {
    std::uint64_t sensor_id = 0;
    IncrementModel model = IncrementModel::deterministic(0.0);
    double delta_threshold = 0.0;
    std::optional<double> gamma_threshold;  ///< absent: no sigma channel
};

struct CheckpointEstimates {
    std::int64_t t = 0;
    std::map<EstimatorKind, Estimate> fused;
    std::size_t exclusions = 0;  ///< sensors with no message by this checkpoint
};

struct NetworkRun {
    std::vector<RenewalTrace> sensor_traces;  ///< 1-bit channel: no walk values
    std::vector<SecondMomentTrace> z_traces;  ///< empty unless all Gamma present
    std::vector<CheckpointEstimates> checkpoints;
    std::vector<double> weights;
    std::size_t total_bits = 0;  ///< sum of N^k(t) (+ M^k(t) with sigma channels)
};

struct FusionConfig {
    bool two_sided = false;  ///< z-bit protocol; disables GHat/GCheck
};

/// Simulates the K-sensor protocol to the last checkpoint and computes the
/// fused estimators at every checkpoint from the message logs alone.
/// Estimates at checkpoint t use events with tau_n <= t only.
NetworkRun run_network(std::span<const SensorSpec> sensors,
                       std::span<const std::int64_t> checkpoints,
                       std::uint64_t master_seed, const FusionConfig& config = {});

struct NetworkCltSample {
    std::vector<double> standardized;  ///< one fused, standardized Hat per rep
    std::size_t excluded = 0;          ///< reps with a sensor lacking samples
};

/// Standardizes the fused Hat by the empirical normalizer
/// sqrt(sum_k w_k^2 sigma_k^2 / t).
NetworkCltSample network_clt_sample(std::span<const SensorSpec> sensors,
                                    std::int64_t t, std::size_t reps,
                                    std::uint64_t master_seed);

} // namespace lowrate
