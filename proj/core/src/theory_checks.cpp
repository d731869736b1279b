#include "lowrate/theory_checks.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lowrate {

namespace {

// Stream purpose tags; one block of ids per check keeps levels decorrelated.
constexpr std::uint64_t kPurposeWald = 0x100;
constexpr std::uint64_t kPurposeLorden = 0x200;
constexpr std::uint64_t kPurposeAge = 0x300;
constexpr std::uint64_t kPurposeLr = 0x400;
constexpr std::uint64_t kPurposeAnscombe = 0x500;

// Welford accumulator through the fourth central moment; gives a standard
// error for the sample variance.
class Stat4 {
public:
    void add(double x) {
        ++n_;
        const double n = static_cast<double>(n_);
        const double d = x - m1_;
        const double dn = d / n;
        const double dn2 = dn * dn;
        const double t1 = d * dn * (n - 1.0);
        m1_ += dn;
        m4_ += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
        m3_ += t1 * dn * (n - 2.0) - 3.0 * dn * m2_;
        m2_ += t1;
    }
    std::size_t count() const { return n_; }
    double mean() const { return m1_; }
    double variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double se_mean() const {
        return std::sqrt(variance() / static_cast<double>(n_));
    }
    double se_variance() const {
        const double n = static_cast<double>(n_);
        const double m4 = m4_ / n;
        const double v = variance();
        return std::sqrt(std::max(0.0, m4 - v * v) / n);
    }

private:
    std::size_t n_ = 0;
    double m1_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

std::size_t count_hitting_events(const IncrementModel& model, double delta,
                                 std::int64_t t, RngStream& g) {
    double s = 0.0, anchor = 0.0;
    std::size_t n = 0;
    for (std::int64_t step = 1; step <= t; ++step) {
        s += model.sample(g);
        if (s - anchor >= delta) {
            ++n;
            anchor = s;
        }
    }
    return n;
}

std::size_t count_exogenous_events(const SamplingScheme& scheme, std::int64_t t,
                                   RngStream& g, std::int64_t* tau_of_t) {
    SamplingScheme local = scheme;
    std::int64_t now = 0;
    std::size_t n = 0;
    for (;;) {
        const std::int64_t gap = [&] {
            switch (local.kind) {
                case SamplingScheme::Kind::ExogExponential: {
                    double u;
                    do { u = g.uniform(); } while (u <= 0.0);
                    return static_cast<std::int64_t>(
                        std::ceil(-local.mean_interarrival * std::log(u)));
                }
                case SamplingScheme::Kind::ExogGeometric: {
                    const double p = 1.0 / local.mean_interarrival;
                    double u;
                    do { u = g.uniform(); } while (u <= 0.0);
                    return std::max<std::int64_t>(
                        1, static_cast<std::int64_t>(
                               std::ceil(std::log(u) / std::log1p(-p))));
                }
                case SamplingScheme::Kind::ExogDeterministic:
                    return static_cast<std::int64_t>(local.mean_interarrival);
                default:
                    throw std::logic_error("count_exogenous_events: hitting kind");
            }
        }();
        if (now + gap > t) break;
        now += gap;
        ++n;
    }
    if (tau_of_t) *tau_of_t = now;
    return n;
}

} // namespace

bool GridReport::all_pass() const {
    for (const auto& row : rows)
        if (!row.pass) return false;
    return true;
}

void GridReport::write_csv(std::ostream& os) const {
    os << "check_name,delta,t,r,statistic,se,bound_rhs,pass\n";
    for (const auto& row : rows) {
        os << row.check_name << ',' << row.delta << ',' << row.t << ','
           << row.r << ',' << row.statistic << ',' << row.se << ',';
        if (row.bound_rhs) os << *row.bound_rhs;
        os << ',' << (row.pass ? 1 : 0) << '\n';
    }
}

GridReport wald_residuals(const IncrementModel& model,
                          std::span<const double> levels, std::size_t reps,
                          std::uint64_t master_seed) {
    if (!(model.mean() > 0.0))
        throw std::invalid_argument("wald_residuals: requires positive drift");
    GridReport report;
    const double delta = model.mean();
    const double var_inc = model.variance();
    for (std::size_t li = 0; li < levels.size(); ++li) {
        Stat4 resid;
        RunningStat nu_stat;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            RngStream g(master_seed, rep, 0, kPurposeWald + li);
            const FirstPassageRecord rec = first_passage(model, levels[li], g);
            resid.add(rec.tau_at_nu - delta * static_cast<double>(rec.nu));
            nu_stat.add(static_cast<double>(rec.nu));
        }
        GridRow mean_row;
        mean_row.check_name = "wald_mean_residual";
        mean_row.delta = delta;
        mean_row.t = levels[li];
        mean_row.statistic = resid.mean();
        mean_row.se = resid.se_mean();
        mean_row.bound_rhs = 0.0;
        mean_row.pass = std::abs(resid.mean()) <= 4.0 * resid.se_mean();
        report.rows.push_back(mean_row);

        if (var_inc > 0.0) {
            const double denom = nu_stat.mean() * var_inc;
            GridRow var_row;
            var_row.check_name = "wald_variance_ratio";
            var_row.delta = delta;
            var_row.t = levels[li];
            var_row.statistic = resid.variance() / denom;
            var_row.se = resid.se_variance() / denom;
            var_row.bound_rhs = 1.0;
            var_row.pass =
                std::abs(var_row.statistic - 1.0) <= 4.0 * var_row.se;
            report.rows.push_back(var_row);
        }
    }
    return report;
}

GridReport lorden_bounds(const IncrementModel& model,
                         std::span<const double> levels, std::size_t reps,
                         std::uint64_t master_seed) {
    if (!(model.mean() > 0.0))
        throw std::invalid_argument("lorden_bounds: requires positive drift");
    GridReport report;
    const MomentSummary mom = moments(model);
    if (!mom.pos_part[1])
        throw std::invalid_argument("lorden_bounds: E[(X+)^2] unavailable");
    const double excess_bound = *mom.pos_part[1] / model.mean();
    for (std::size_t li = 0; li < levels.size(); ++li) {
        RunningStat excess;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            RngStream g(master_seed, rep, 0, kPurposeLorden + li);
            excess.add(first_passage(model, levels[li], g).overshoot);
        }
        GridRow row;
        row.check_name = "lorden_excess";
        row.delta = model.mean();
        row.t = levels[li];
        row.statistic = excess.mean();
        row.se = excess.se();
        row.bound_rhs = excess_bound;
        row.pass = excess.mean() <= excess_bound + 3.0 * excess.se();
        report.rows.push_back(row);
    }
    if (model.positive_support()) {
        // The model's draws double as renewal interarrivals; check the age
        // bound at each level used as a horizon.
        const double age_bound =
            (model.variance() + model.mean() * model.mean()) / model.mean();
        for (std::size_t li = 0; li < levels.size(); ++li) {
            RunningStat age;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                RngStream g(master_seed, rep, 0, kPurposeAge + li);
                double s = 0.0, last = 0.0;
                while (s <= levels[li]) {
                    last = s;
                    s += model.sample(g);
                }
                age.add(levels[li] - last);
            }
            GridRow row;
            row.check_name = "lorden_age";
            row.delta = model.mean();
            row.t = levels[li];
            row.statistic = age.mean();
            row.se = age.se();
            row.bound_rhs = age_bound;
            row.pass = age.mean() <= age_bound + 3.0 * age.se();
            report.rows.push_back(row);
        }
    }
    return report;
}

GridReport age_bound_exogenous(const SamplingScheme& scheme,
                               std::span<const std::int64_t> horizons,
                               std::size_t reps, std::uint64_t master_seed) {
    if (scheme.hitting())
        throw std::invalid_argument("age_bound_exogenous: exogenous scheme required");
    GridReport report;
    const double bound =
        scheme.interarrival_second_moment() / scheme.interarrival_mean();
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
        RunningStat age;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            RngStream g(master_seed, rep, 0, kPurposeAge + hi);
            std::int64_t tau_t = 0;
            (void)count_exogenous_events(scheme, horizons[hi], g, &tau_t);
            age.add(static_cast<double>(horizons[hi] - tau_t));
        }
        GridRow row;
        row.check_name = "age_bound";
        row.delta = scheme.interarrival_mean();
        row.t = static_cast<double>(horizons[hi]);
        row.statistic = age.mean();
        row.se = age.se();
        row.bound_rhs = bound;
        row.pass = age.mean() <= bound + 3.0 * age.se();
        report.rows.push_back(row);
    }
    return report;
}

GridReport lr_error_table(const IncrementModel& model,
                          SamplingScheme::Kind scheme_kind, double r,
                          std::span<const LrGridPoint> grid, std::size_t reps,
                          std::uint64_t master_seed) {
    if (reps < 2) throw std::invalid_argument("lr_error_table: reps too small");
    GridReport report;
    const bool hitting = scheme_kind == SamplingScheme::Kind::HittingOneSided ||
                         scheme_kind == SamplingScheme::Kind::HittingTwoSided;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto& pt = grid[gi];
        if (static_cast<double>(pt.t) / pt.delta_target < 10.0)
            throw std::invalid_argument("lr_error_table: grid needs t/delta >= 10");
        std::vector<std::size_t> counts(reps);
        double total_time = 0.0, total_events = 0.0;
        double delta_used = pt.delta_target;
        if (hitting) {
            const double threshold = pt.delta_target * model.mean();
            for (std::size_t rep = 0; rep < reps; ++rep) {
                RngStream g(master_seed, rep, 0, kPurposeLr + gi);
                double s = 0.0, anchor = 0.0;
                std::size_t n = 0;
                std::int64_t last_tau = 0;
                for (std::int64_t step = 1; step <= pt.t; ++step) {
                    s += model.sample(g);
                    if (s - anchor >= threshold) {
                        ++n;
                        anchor = s;
                        last_tau = step;
                    }
                }
                counts[rep] = n;
                total_time += static_cast<double>(last_tau);
                total_events += static_cast<double>(n);
            }
            // Wald-consistent empirical mean interarrival.
            if (total_events > 0.0) delta_used = total_time / total_events;
        } else {
            SamplingScheme scheme;
            scheme.kind = scheme_kind;
            scheme.mean_interarrival = pt.delta_target;
            delta_used = scheme.interarrival_mean();
            for (std::size_t rep = 0; rep < reps; ++rep) {
                RngStream g(master_seed, rep, 0, kPurposeLr + gi);
                counts[rep] = count_exogenous_events(scheme, pt.t, g, nullptr);
            }
        }
        RunningStat stat_n, stat_nu;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const double n = static_cast<double>(counts[rep]);
            const double t = static_cast<double>(pt.t);
            stat_n.add(std::pow(std::abs(delta_used * n / t - 1.0), r));
            // nu = N + 1 for positive interarrivals.
            stat_nu.add(std::pow(std::abs(delta_used * (n + 1.0) / t - 1.0), r));
        }
        GridRow row_n;
        row_n.check_name = "lr_N";
        row_n.delta = delta_used;
        row_n.t = static_cast<double>(pt.t);
        row_n.r = r;
        row_n.statistic = stat_n.mean();
        row_n.se = stat_n.se();
        report.rows.push_back(row_n);
        GridRow row_nu = row_n;
        row_nu.check_name = "lr_nu";
        row_nu.statistic = stat_nu.mean();
        row_nu.se = stat_nu.se();
        report.rows.push_back(row_nu);
    }
    // Slope fits: log statistic against log t within fixed-delta groups, and
    // against log delta within fixed-ratio groups.
    const double predicted_t_slope = hitting ? -r : -r / 2.0;
    for (const char* name : {"lr_N", "lr_nu"}) {
        std::map<double, std::vector<std::pair<double, double>>> by_delta;
        std::map<double, std::vector<std::pair<double, double>>> by_ratio;
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const GridRow& row = report.rows[2 * gi + (name[3] == 'n' ? 1 : 0)];
            by_delta[grid[gi].delta_target].push_back(
                {std::log(row.t), std::log(row.statistic)});
            by_ratio[static_cast<double>(grid[gi].t) / grid[gi].delta_target]
                .push_back({std::log(grid[gi].delta_target),
                            std::log(row.statistic)});
        }
        auto emit = [&](const auto& groups, const char* axis, double predicted) {
            for (const auto& [key, pts] : groups) {
                if (pts.size() < 2) continue;
                std::vector<double> x, y;
                for (const auto& [xv, yv] : pts) { x.push_back(xv); y.push_back(yv); }
                const SlopeFit fit = fit_slope(x, y);
                SlopeRow srow;
                std::ostringstream label;
                label << name << "_vs_" << axis << "@" << key;
                srow.label = label.str();
                srow.fitted = fit.slope;
                srow.se = fit.slope_se;
                srow.predicted = predicted;
                report.slopes.push_back(srow);
            }
        };
        emit(by_delta, "t", predicted_t_slope);
        emit(by_ratio, "delta", 0.0);
    }
    report.metadata.push_back("grid_min_ratio_policy=t/delta>=10");
    return report;
}

GridReport anscombe_ratio(const IncrementModel& model,
                          SamplingScheme::Kind scheme_kind,
                          std::span<const LrGridPoint> grid, std::size_t reps,
                          std::uint64_t master_seed) {
    GridReport report;
    const bool hitting = scheme_kind == SamplingScheme::Kind::HittingOneSided ||
                         scheme_kind == SamplingScheme::Kind::HittingTwoSided;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto& pt = grid[gi];
        RunningStat ratio;
        std::optional<double> bound;
        double delta_used = pt.delta_target;
        if (hitting) {
            const double threshold = pt.delta_target * model.mean();
            for (std::size_t rep = 0; rep < reps; ++rep) {
                RngStream g(master_seed, rep, 0, kPurposeAnscombe + gi);
                double s = 0.0, anchor = 0.0;
                std::int64_t last_tau = 0;
                for (std::int64_t step = 1; step <= pt.t; ++step) {
                    s += model.sample(g);
                    if (s - anchor >= threshold) {
                        anchor = s;
                        last_tau = step;
                    }
                }
                ratio.add(static_cast<double>(pt.t - last_tau) /
                          static_cast<double>(pt.t));
            }
        } else {
            SamplingScheme scheme;
            scheme.kind = scheme_kind;
            scheme.mean_interarrival = pt.delta_target;
            delta_used = scheme.interarrival_mean();
            bound = scheme.interarrival_second_moment() /
                    (delta_used * static_cast<double>(pt.t));
            for (std::size_t rep = 0; rep < reps; ++rep) {
                RngStream g(master_seed, rep, 0, kPurposeAnscombe + gi);
                std::int64_t tau_t = 0;
                (void)count_exogenous_events(scheme, pt.t, g, &tau_t);
                ratio.add(static_cast<double>(pt.t - tau_t) /
                          static_cast<double>(pt.t));
            }
        }
        GridRow row;
        row.check_name = "anscombe";
        row.delta = delta_used;
        row.t = static_cast<double>(pt.t);
        row.r = 1.0;
        row.statistic = ratio.mean();
        row.se = ratio.se();
        row.bound_rhs = bound;
        row.pass = !bound || ratio.mean() <= *bound + 3.0 * ratio.se();
        report.rows.push_back(row);
    }
    return report;
}

} // namespace lowrate
