#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/renewal.hpp"
#include "lowrate/stats.hpp"

namespace lowrate {

/// One bound/statistic evaluation at a grid point. bound_rhs is absent for
/// purely informational rows; pass is then true.
struct GridRow {
    std::string check_name;
    double delta = 0.0;
    double t = 0.0;
    double r = 0.0;
    double statistic = 0.0;
    double se = 0.0;
    std::optional<double> bound_rhs;
    bool pass = true;
};

struct SlopeRow {
    std::string label;       ///< e.g. "nu_vs_t@delta=100"
    double fitted = 0.0;
    double se = 0.0;
    double predicted = 0.0;  ///< exponent implied by the scheme's q
};

struct GridReport {
    std::vector<GridRow> rows;
    std::vector<SlopeRow> slopes;
    std::vector<std::string> metadata;

    bool all_pass() const;
    void write_csv(std::ostream& os) const;
};

/// Residuals of the stopped walk tau_nu - delta*nu at each level:
/// mean (expected 0) and the variance over E[nu]*Var[increment] (expected 1).
GridReport wald_residuals(const IncrementModel& model,
                          std::span<const double> levels, std::size_t reps,
                          std::uint64_t master_seed);

/// Excess over a boundary against E[(X+)^2]/mu at each level. For
/// positive-support models also checks the renewal-age bound E[t - tau(t)]
/// <= E[tau^2]/delta, treating the model's draws as interarrivals.
GridReport lorden_bounds(const IncrementModel& model,
                         std::span<const double> levels, std::size_t reps,
                         std::uint64_t master_seed);

/// Age bound for an exogenous sampling scheme at horizons t.
GridReport age_bound_exogenous(const SamplingScheme& scheme,
                               std::span<const std::int64_t> horizons,
                               std::size_t reps, std::uint64_t master_seed);

struct LrGridPoint {
    double delta_target = 0.0;
    std::int64_t t = 0;
};

/// E|delta nu(t)/t - 1|^r and E|delta N(t)/t - 1|^r over a (delta, t) grid,
/// with log-log slope fits against t (at fixed delta) and against delta (at
/// fixed t/delta ratio). For hitting kinds the threshold is
/// Delta = delta_target * mu and the empirical mean interarrival is used as
/// delta in the statistic.
GridReport lr_error_table(const IncrementModel& model,
                          SamplingScheme::Kind scheme_kind, double r,
                          std::span<const LrGridPoint> grid, std::size_t reps,
                          std::uint64_t master_seed);

/// E|tau(t)/t - 1| with the age bound (E[tau^2]/delta)/t where a closed form
/// for E[tau^2] exists (exogenous schemes).
GridReport anscombe_ratio(const IncrementModel& model,
                          SamplingScheme::Kind scheme_kind,
                          std::span<const LrGridPoint> grid, std::size_t reps,
                          std::uint64_t master_seed);

} // namespace lowrate
