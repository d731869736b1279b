#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lowrate/estimators.hpp"
#include "lowrate/renewal.hpp"
#include "lowrate/stats.hpp"

namespace lowrate {

/// One relative-efficiency or CLT experiment. delta_grid entries are target
/// mean sampling periods; hitting schemes realize them as
/// Delta = delta * mu (Wald first order) and the empirical mean interarrival
/// is reported alongside.
struct ExperimentSpec {
    IncrementModel model = IncrementModel::deterministic(0.0);
    SamplingScheme::Kind scheme_kind = SamplingScheme::Kind::HittingOneSided;
    std::vector<double> delta_grid;
    std::int64_t t = 0;
    std::vector<EstimatorKind> kinds;
    std::size_t reps = 0;
    std::uint64_t master_seed = 0;
    std::string experiment_id = "experiment";
    int threads = 1;
};

struct MCRow {
    std::string experiment_id;
    EstimatorKind kind = EstimatorKind::Bar;
    double delta_target = 0.0;
    double delta_empirical = 0.0;
    double delta_threshold = 0.0;  ///< Delta (0 for exogenous schemes)
    std::int64_t t = 0;
    std::size_t reps = 0;
    double mean_error = 0.0;
    double mse = 0.0;
    double se_mse = 0.0;
    double re = 0.0;     ///< mse / (sigma^2 / t)
    double se_re = 0.0;
    double excluded_frac = 0.0;
};

struct MCSummary {
    std::vector<MCRow> rows;
    void write_csv(std::ostream& os) const;
    const MCRow* find(EstimatorKind kind, double delta_target) const;
};

MCSummary re_sweep(const ExperimentSpec& spec);

struct CltResult {
    std::vector<double> standardized;
    double ks_stat = 0.0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    double excluded_frac = 0.0;
};

/// Standardized (est - mu)/(sigma/sqrt(t)) sample at a single grid point
/// (the first entry of delta_grid), with its KS distance from N(0,1).
CltResult clt_diagnostic(const ExperimentSpec& spec);

struct OrderingClaim {
    std::string claim;
    bool pass = false;
    double margin = 0.0;  ///< worst-case slack in SE-adjusted units
};

/// The qualitative relative-efficiency claims: Bar dominates Tilde and
/// GCheck dominates Check at every grid point; Hat improves from the small-
/// to the large-delta end; Check is U-shaped. Each tested at 3 SE.
std::vector<OrderingClaim> ordering_report(const MCSummary& table);

} // namespace lowrate
