#include "lowrate/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace lowrate {

namespace {

constexpr std::uint64_t kPurposeSweep = 0x2000;
constexpr std::size_t kBlockSize = 1024;

bool is_hitting(SamplingScheme::Kind kind) {
    return kind == SamplingScheme::Kind::HittingOneSided ||
           kind == SamplingScheme::Kind::HittingTwoSided;
}

struct KindAccum {
    RunningStat err;
    RunningStat err2;
    std::size_t excluded = 0;
};

struct BlockPartial {
    std::vector<KindAccum> per_kind;
    double tau_sum = 0.0;
    double n_sum = 0.0;
};

// Fixed-size blocks processed by a small pool and merged in block order, so
// the reduction is identical for any thread count.
template <typename Work>
std::vector<BlockPartial> run_blocks(std::size_t reps, int threads, Work work) {
    const std::size_t n_blocks = (reps + kBlockSize - 1) / kBlockSize;
    std::vector<BlockPartial> partials(n_blocks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) break;
            const std::size_t lo = b * kBlockSize;
            const std::size_t hi = std::min(reps, lo + kBlockSize);
            partials[b] = work(lo, hi);
        }
    };
    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return partials;
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.reps < 1) throw std::invalid_argument("spec: reps must be >= 1");
    if (spec.delta_grid.empty())
        throw std::invalid_argument("spec: delta grid must be nonempty");
    if (spec.t < 1) throw std::invalid_argument("spec: t must be >= 1");
    if (spec.kinds.empty())
        throw std::invalid_argument("spec: estimator list must be nonempty");
    const bool hitting = is_hitting(spec.scheme_kind);
    for (const EstimatorKind kind : spec.kinds) {
        const bool count_based =
            kind == EstimatorKind::Hat || kind == EstimatorKind::Check ||
            kind == EstimatorKind::GHat || kind == EstimatorKind::GCheck;
        if (count_based && !hitting)
            throw std::invalid_argument(
                "spec: count-based estimators need a hitting scheme");
        if ((kind == EstimatorKind::GHat || kind == EstimatorKind::GCheck) &&
            spec.model.lattice())
            throw std::invalid_argument(
                "spec: overshoot correction undefined for lattice families");
        if (kind == EstimatorKind::Sigma)
            throw std::invalid_argument(
                "spec: sigma estimation is not part of a mu sweep");
    }
}

SamplingScheme make_scheme(const ExperimentSpec& spec, double delta_target) {
    switch (spec.scheme_kind) {
        case SamplingScheme::Kind::HittingOneSided:
            return SamplingScheme::hitting_one_sided(delta_target *
                                                     spec.model.mean());
        case SamplingScheme::Kind::HittingTwoSided:
            return SamplingScheme::hitting_two_sided(delta_target *
                                                     std::abs(spec.model.mean()));
        case SamplingScheme::Kind::ExogExponential:
            return SamplingScheme::exogenous_exponential(delta_target);
        case SamplingScheme::Kind::ExogGeometric:
            return SamplingScheme::exogenous_geometric(delta_target);
        case SamplingScheme::Kind::ExogDeterministic:
            return SamplingScheme::exogenous_deterministic(delta_target);
    }
    throw std::logic_error("make_scheme: unknown kind");
}

// Value of one estimator on a trace; false when the replication is excluded.
bool evaluate(const RenewalTrace& trace, EstimatorKind kind,
              const IncrementModel& model, double* value) {
    Estimate est;
    switch (kind) {
        case EstimatorKind::GHat:
        case EstimatorKind::GCheck: {
            const Estimate base = estimate(
                trace, kind == EstimatorKind::GHat ? EstimatorKind::Hat
                                                   : EstimatorKind::Check);
            if (base.status != EstimateStatus::Ok) return false;
            est = overshoot_correct(base, trace.delta_threshold, model);
            break;
        }
        default:
            est = estimate(trace, kind);
            break;
    }
    if (est.status == EstimateStatus::NoSample) return false;
    *value = est.value;
    return true;
}

} // namespace

void MCSummary::write_csv(std::ostream& os) const {
    os << "experiment_id,estimator,delta_target,delta_empirical,Delta,t,reps,"
          "mse,se_mse,re,se_re,excluded_frac\n";
    for (const auto& row : rows) {
        os << row.experiment_id << ',' << estimator_name(row.kind) << ','
           << row.delta_target << ',' << row.delta_empirical << ','
           << row.delta_threshold << ',' << row.t << ',' << row.reps << ','
           << row.mse << ',' << row.se_mse << ',' << row.re << ','
           << row.se_re << ',' << row.excluded_frac << '\n';
    }
}

const MCRow* MCSummary::find(EstimatorKind kind, double delta_target) const {
    for (const auto& row : rows)
        if (row.kind == kind && row.delta_target == delta_target) return &row;
    return nullptr;
}

MCSummary re_sweep(const ExperimentSpec& spec) {
    validate_spec(spec);
    const bool needs_s =
        std::any_of(spec.kinds.begin(), spec.kinds.end(), [](EstimatorKind k) {
            return k == EstimatorKind::Bar || k == EstimatorKind::Tilde;
        });
    const double mu = spec.model.mean();
    const double sigma2 = spec.model.variance();
    const double baseline = sigma2 / static_cast<double>(spec.t);

    MCSummary summary;
    for (std::size_t gi = 0; gi < spec.delta_grid.size(); ++gi) {
        const double delta_target = spec.delta_grid[gi];
        const SamplingScheme scheme = make_scheme(spec, delta_target);
        auto work = [&](std::size_t lo, std::size_t hi) {
            BlockPartial partial;
            partial.per_kind.resize(spec.kinds.size());
            for (std::size_t rep = lo; rep < hi; ++rep) {
                RngStream g(spec.master_seed, rep, 0, kPurposeSweep + gi);
                const RenewalTrace trace =
                    simulate_trace(spec.model, scheme, spec.t, g, needs_s);
                partial.tau_sum += static_cast<double>(trace.tau_of_t());
                partial.n_sum += static_cast<double>(trace.n_t());
                for (std::size_t ki = 0; ki < spec.kinds.size(); ++ki) {
                    double value = 0.0;
                    if (!evaluate(trace, spec.kinds[ki], spec.model, &value)) {
                        ++partial.per_kind[ki].excluded;
                        continue;
                    }
                    const double e = value - mu;
                    partial.per_kind[ki].err.add(e);
                    partial.per_kind[ki].err2.add(e * e);
                }
            }
            return partial;
        };
        const auto partials = run_blocks(spec.reps, spec.threads, work);
        std::vector<KindAccum> merged(spec.kinds.size());
        double tau_sum = 0.0, n_sum = 0.0;
        for (const auto& p : partials) {
            tau_sum += p.tau_sum;
            n_sum += p.n_sum;
            for (std::size_t ki = 0; ki < spec.kinds.size(); ++ki) {
                merged[ki].err.merge(p.per_kind[ki].err);
                merged[ki].err2.merge(p.per_kind[ki].err2);
                merged[ki].excluded += p.per_kind[ki].excluded;
            }
        }
        const double delta_empirical = n_sum > 0.0 ? tau_sum / n_sum : 0.0;
        for (std::size_t ki = 0; ki < spec.kinds.size(); ++ki) {
            MCRow row;
            row.experiment_id = spec.experiment_id;
            row.kind = spec.kinds[ki];
            row.delta_target = delta_target;
            row.delta_empirical = delta_empirical;
            row.delta_threshold = scheme.hitting() ? scheme.threshold : 0.0;
            row.t = spec.t;
            row.reps = spec.reps;
            row.mean_error = merged[ki].err.mean();
            row.mse = merged[ki].err2.mean();
            row.se_mse = merged[ki].err2.se();
            row.re = row.mse / baseline;
            row.se_re = row.se_mse / baseline;
            row.excluded_frac = static_cast<double>(merged[ki].excluded) /
                                static_cast<double>(spec.reps);
            summary.rows.push_back(std::move(row));
        }
    }
    return summary;
}

CltResult clt_diagnostic(const ExperimentSpec& spec) {
    validate_spec(spec);
    if (spec.reps < 100)
        throw std::invalid_argument("clt_diagnostic: reps must be >= 100");
    const EstimatorKind kind = spec.kinds.front();
    const double delta_target = spec.delta_grid.front();
    const SamplingScheme scheme = make_scheme(spec, delta_target);
    const bool needs_s =
        kind == EstimatorKind::Bar || kind == EstimatorKind::Tilde;
    const double mu = spec.model.mean();
    const double scale = spec.model.sd() / std::sqrt(static_cast<double>(spec.t));

    CltResult result;
    std::size_t excluded = 0;
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        RngStream g(spec.master_seed, rep, 0, kPurposeSweep);
        const RenewalTrace trace =
            simulate_trace(spec.model, scheme, spec.t, g, needs_s);
        double value = 0.0;
        if (!evaluate(trace, kind, spec.model, &value)) {
            ++excluded;
            continue;
        }
        result.standardized.push_back((value - mu) / scale);
    }
    result.excluded_frac =
        static_cast<double>(excluded) / static_cast<double>(spec.reps);
    RunningStat st;
    for (const double v : result.standardized) st.add(v);
    result.sample_mean = st.mean();
    result.sample_variance = st.variance();
    result.ks_stat = ks_distance(result.standardized);
    return result;
}

namespace {

struct Curve {
    std::vector<double> deltas;
    std::vector<double> re;
    std::vector<double> se;
};

Curve extract(const MCSummary& table, EstimatorKind kind) {
    Curve c;
    for (const auto& row : table.rows) {
        if (row.kind != kind) continue;
        c.deltas.push_back(row.delta_target);
        c.re.push_back(row.re);
        c.se.push_back(row.se_re);
    }
    if (c.deltas.size() < 3)
        throw std::invalid_argument(
            std::string("ordering_report: missing or short curve for ") +
            estimator_name(kind));
    return c;
}

// Both curves come from the same replications, so their correlation is
// unknown here; sd(a-b) <= sd(a)+sd(b) is the only bound that needs no
// independence assumption.
double comb_se(double a, double b) { return a + b; }

} // namespace

std::vector<OrderingClaim> ordering_report(const MCSummary& table) {
    const Curve bar = extract(table, EstimatorKind::Bar);
    const Curve tilde = extract(table, EstimatorKind::Tilde);
    const Curve hat = extract(table, EstimatorKind::Hat);
    const Curve check = extract(table, EstimatorKind::Check);
    const Curve gcheck = extract(table, EstimatorKind::GCheck);

    std::vector<OrderingClaim> claims;
    auto dominates = [&](const Curve& lo, const Curve& hi, const char* name) {
        OrderingClaim claim;
        claim.claim = name;
        claim.pass = true;
        claim.margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lo.re.size(); ++i) {
            const double slack =
                hi.re[i] + 3.0 * comb_se(lo.se[i], hi.se[i]) - lo.re[i];
            claim.margin = std::min(claim.margin, slack);
            if (slack < 0.0) claim.pass = false;
        }
        claims.push_back(claim);
    };
    dominates(bar, tilde, "re_bar<=re_tilde_for_all_delta");
    dominates(gcheck, check, "re_gcheck<=re_check_for_all_delta");

    {
        OrderingClaim claim;
        claim.claim = "re_hat_decreasing_small_to_large_delta";
        const double slack = hat.re.front() - hat.re.back() -
                             3.0 * comb_se(hat.se.front(), hat.se.back());
        claim.margin = slack;
        claim.pass = slack > 0.0;
        claims.push_back(claim);
    }
    {
        OrderingClaim claim;
        claim.claim = "re_check_u_shaped";
        std::size_t arg_min = 1;
        for (std::size_t i = 1; i + 1 < check.re.size(); ++i)
            if (check.re[i] < check.re[arg_min]) arg_min = i;
        const double lo_slack =
            check.re.front() - check.re[arg_min] -
            3.0 * comb_se(check.se.front(), check.se[arg_min]);
        const double hi_slack =
            check.re.back() - check.re[arg_min] -
            3.0 * comb_se(check.se.back(), check.se[arg_min]);
        claim.margin = std::min(lo_slack, hi_slack);
        claim.pass = lo_slack > 0.0 && hi_slack > 0.0;
        claims.push_back(claim);
    }
    return claims;
}

} // namespace lowrate
