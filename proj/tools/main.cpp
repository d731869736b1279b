// lowrate command-line driver: binds config files to the simulation library
// and writes CSV artifacts. Exit codes: 0 ok, 1 failed verification, 2
// config error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "config.hpp"
#include "lowrate/fusion.hpp"
#include "lowrate/mc.hpp"
#include "lowrate/theory_checks.hpp"

namespace fs = std::filesystem;
using namespace lowrate;
using cli::ConfigError;
using cli::ConfigFile;
using cli::SectionView;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;

struct CliOptions {
    std::string config_path;
    std::optional<std::int64_t> seed_override;
    int threads = 0;  // 0: hardware concurrency
    std::string out_dir;
    bool dry_run = false;
    bool trace_dump = false;
    bool ordering = false;
};

int resolved_threads(const CliOptions& opt) {
    if (opt.threads > 0) return opt.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

fs::path resolve_out_dir(const CliOptions& opt) {
    std::string dir = opt.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("LOWRATE_OUT");
        dir = env ? env : ".";
    }
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_csv(const fs::path& dir, const std::string& name) {
    const fs::path path = dir / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << std::setprecision(17);
    std::cout << "writing " << path.string() << "\n";
    return out;
}

SectionView require_section(const ConfigFile& file, const std::string& name) {
    const auto* sec = file.find(name);
    if (!sec) throw ConfigError("missing required section [" + name + "]");
    return SectionView(*sec);
}

struct ExperimentHeader {
    std::string kind;
    std::string id;
    std::uint64_t seed = 0;
};

ExperimentHeader read_header(SectionView& exp, const std::string& expected_kind,
                             const CliOptions& opt) {
    ExperimentHeader h;
    h.kind = exp.require("kind");
    if (h.kind != expected_kind)
        throw ConfigError("[experiment].kind is '" + h.kind +
                          "' but the subcommand expects '" + expected_kind +
                          "'");
    h.id = exp.get_string("id", expected_kind);
    h.seed = exp.get_seed("seed", 1);
    if (opt.seed_override)
        h.seed = static_cast<std::uint64_t>(*opt.seed_override);
    return h;
}

SamplingScheme::Kind read_scheme_kind(const ConfigFile& file) {
    const auto* sec = file.find("scheme");
    if (!sec) return SamplingScheme::Kind::HittingOneSided;
    SectionView scheme(*sec);
    const auto kind =
        cli::parse_scheme_kind(scheme.require("kind"), "[scheme].kind");
    scheme.finish();
    return kind;
}

void dump_traces(const ExperimentSpec& spec, const fs::path& dir,
                 const std::string& id) {
    const double delta = spec.delta_grid.front();
    const SamplingScheme scheme =
        spec.scheme_kind == SamplingScheme::Kind::HittingOneSided
            ? SamplingScheme::hitting_one_sided(delta * spec.model.mean())
            : SamplingScheme::hitting_two_sided(delta *
                                                std::abs(spec.model.mean()));
    std::ofstream out = open_csv(dir, id + "_traces.csv");
    out << "rep,n,tau_n,z_n,eta_n,S_tau_n\n";
    const std::size_t dump_reps = std::min<std::size_t>(spec.reps, 100);
    for (std::size_t rep = 0; rep < dump_reps; ++rep) {
        RngStream g(spec.master_seed, rep, 0, 0x2000);
        const RenewalTrace trace =
            simulate_trace(spec.model, scheme, spec.t, g, /*observe_s=*/true);
        for (std::size_t n = 0; n < trace.events.size(); ++n) {
            const auto& ev = trace.events[n];
            out << rep << ',' << n + 1 << ',' << ev.tau << ',' << ev.z << ','
                << ev.eta << ',' << ev.s_at_tau << '\n';
        }
    }
}

int run_sweep(const ConfigFile& file, const CliOptions& opt) {
    SectionView exp = require_section(file, "experiment");
    const ExperimentHeader h = read_header(exp, "sweep", opt);

    ExperimentSpec spec;
    spec.experiment_id = h.id;
    spec.master_seed = h.seed;
    spec.t = exp.require_int("t");
    spec.reps = exp.require_count("reps");
    spec.delta_grid = exp.require_double_list("delta_grid");
    for (const auto& name : exp.require_string_list("estimators"))
        spec.kinds.push_back(
            cli::parse_estimator_kind(name, "[experiment].estimators"));
    const bool want_ordering =
        opt.ordering || exp.get_bool("ordering", false);
    exp.finish();

    SectionView model = require_section(file, "model");
    spec.model = cli::parse_model(model);
    model.finish();
    spec.scheme_kind = read_scheme_kind(file);
    spec.threads = resolved_threads(opt);

    if (opt.dry_run) {
        std::cout << "plan: sweep '" << h.id << "', grid points "
                  << spec.delta_grid.size() << ", estimators "
                  << spec.kinds.size() << ", reps " << spec.reps
                  << ", horizon " << spec.t << ", total simulated increments "
                  << static_cast<double>(spec.delta_grid.size()) *
                         static_cast<double>(spec.reps) *
                         static_cast<double>(spec.t)
                  << "\n";
        return kExitOk;
    }

    const fs::path dir = resolve_out_dir(opt);
    const MCSummary table = re_sweep(spec);
    {
        std::ofstream out = open_csv(dir, h.id + "_re.csv");
        table.write_csv(out);
    }
    if (opt.trace_dump) dump_traces(spec, dir, h.id);

    if (want_ordering) {
        bool all_pass = true;
        for (const auto& claim : ordering_report(table)) {
            std::cout << (claim.pass ? "PASS " : "FAIL ") << claim.claim
                      << " margin=" << claim.margin << "\n";
            all_pass = all_pass && claim.pass;
        }
        if (!all_pass) return kExitVerifyFailed;
    }
    return kExitOk;
}

int run_sigma_consistency(const ExperimentHeader& h, const IncrementModel& model,
                          std::int64_t t, std::size_t reps, double delta_target,
                          double gamma, const CliOptions& opt) {
    const double threshold = delta_target * model.mean();
    std::vector<double> rel_errors;
    std::ofstream out = open_csv(resolve_out_dir(opt), h.id + "_sigma.csv");
    out << "rep,sigma_hat,rel_err\n";
    for (std::size_t rep = 0; rep < reps; ++rep) {
        RngStream g(h.seed, rep, 0, 0x3000);
        const PairedTraces paired =
            simulate_paired_traces(model, threshold, gamma, t, g);
        const Estimate sig = estimate_sigma(paired.mu_trace, paired.z_trace);
        if (sig.status == EstimateStatus::NoSample) continue;
        const double rel = std::abs(sig.value - model.sd()) / model.sd();
        rel_errors.push_back(rel);
        out << rep << ',' << sig.value << ',' << rel << '\n';
    }
    if (rel_errors.empty()) throw ConfigError("sigma run: no usable samples");
    std::nth_element(rel_errors.begin(),
                     rel_errors.begin() + rel_errors.size() / 2,
                     rel_errors.end());
    std::cout << std::setprecision(10) << "sigma median relative error: "
              << rel_errors[rel_errors.size() / 2] << " over "
              << rel_errors.size() << " usable reps\n";
    return kExitOk;
}

int run_clt(const ConfigFile& file, const CliOptions& opt) {
    SectionView exp = require_section(file, "experiment");
    const ExperimentHeader h = read_header(exp, "clt", opt);
    const std::int64_t t = exp.require_int("t");
    const std::size_t reps = exp.require_count("reps");
    if (reps < 100)
        throw ConfigError("[experiment].reps: minimum for a clt run is 100");
    const EstimatorKind kind = cli::parse_estimator_kind(
        exp.require("estimator"), "[experiment].estimator");
    const double delta = exp.require_double("delta");
    const std::optional<double> gamma = exp.get_double("gamma");
    exp.finish();

    SectionView model_sec = require_section(file, "model");
    const IncrementModel model = cli::parse_model(model_sec);
    model_sec.finish();

    if (opt.dry_run) {
        std::cout << "plan: clt '" << h.id << "', estimator "
                  << estimator_name(kind) << ", delta " << delta << ", reps "
                  << reps << ", horizon " << t
                  << ", total simulated increments "
                  << static_cast<double>(reps) * static_cast<double>(t)
                  << "\n";
        return kExitOk;
    }

    if (kind == EstimatorKind::Sigma) {
        if (!gamma)
            throw ConfigError(
                "[experiment].gamma is required for estimator = sigma");
        return run_sigma_consistency(h, model, t, reps, delta, *gamma, opt);
    }
    if (gamma)
        throw ConfigError(
            "[experiment].gamma only applies to estimator = sigma");

    ExperimentSpec spec;
    spec.experiment_id = h.id;
    spec.master_seed = h.seed;
    spec.model = model;
    spec.scheme_kind = read_scheme_kind(file);
    spec.delta_grid = {delta};
    spec.t = t;
    spec.reps = reps;
    spec.kinds = {kind};
    spec.threads = resolved_threads(opt);

    const CltResult result = clt_diagnostic(spec);
    {
        std::ofstream out = open_csv(resolve_out_dir(opt), h.id + "_clt.csv");
        out << "standardized\n";
        for (const double v : result.standardized) out << v << '\n';
    }
    std::cout << std::setprecision(10) << "ks_stat " << result.ks_stat
              << "\nsample_mean " << result.sample_mean << "\nsample_variance "
              << result.sample_variance << "\nexcluded_frac "
              << result.excluded_frac << "\n";
    return kExitOk;
}

std::vector<LrGridPoint> parse_lr_grid(SectionView& sec,
                                       const std::string& key) {
    std::vector<LrGridPoint> grid;
    for (const auto& item : sec.require_string_list(key)) {
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("[" + sec.name() + "]." + key +
                              ": expected 'delta:t' entries, got '" + item +
                              "'");
        LrGridPoint pt;
        try {
            pt.delta_target = std::stod(item.substr(0, colon));
            pt.t = std::stoll(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("[" + sec.name() + "]." + key +
                              ": bad grid entry '" + item + "'");
        }
        grid.push_back(pt);
    }
    return grid;
}

GridReport run_rho_check(SectionView& sec, std::uint64_t seed) {
    const IncrementModel model = cli::parse_model(sec);
    const double level = sec.get_double("delta").value_or(1e4);
    const std::size_t direct_reps = sec.require_count("reps");
    const std::size_t ladder_reps =
        sec.has("ladder_reps") ? sec.require_count("ladder_reps") : direct_reps;

    const auto rho = rho_closed_form(model);
    if (!rho)
        throw ConfigError("[" + sec.name() +
                          "]: family has no closed-form overshoot constant");

    RngStream ladder_stream(seed, 0, 0, 0x4000);
    const LadderMoments lm =
        ladder_height_moments(model, ladder_reps, ladder_stream);
    // Delta-method SE of m2/(2 m1).
    const double se_ladder = std::sqrt(
        std::pow(lm.se_m2 / (2.0 * lm.m1), 2) +
        std::pow(lm.m2 * lm.se_m1 / (2.0 * lm.m1 * lm.m1), 2));

    RunningStat direct;
    for (std::size_t rep = 0; rep < direct_reps; ++rep) {
        RngStream g(seed, rep, 0, 0x4100);
        direct.add(first_passage(model, level, g).overshoot);
    }

    GridReport report;
    GridRow ladder_row;
    ladder_row.check_name = "rho_ladder_vs_closed_form";
    ladder_row.delta = level;
    ladder_row.statistic = lm.rho_hat;
    ladder_row.se = se_ladder;
    ladder_row.bound_rhs = *rho;
    ladder_row.pass = std::abs(lm.rho_hat - *rho) <= 4.0 * se_ladder;
    report.rows.push_back(ladder_row);

    GridRow direct_row;
    direct_row.check_name = "rho_direct_overshoot_vs_closed_form";
    direct_row.delta = level;
    direct_row.statistic = direct.mean();
    direct_row.se = direct.se();
    direct_row.bound_rhs = *rho;
    direct_row.pass = std::abs(direct.mean() - *rho) <= 4.0 * direct.se();
    report.rows.push_back(direct_row);
    return report;
}

GridReport run_exact_check(SectionView& sec) {
    const IncrementModel model = cli::parse_model(sec);
    const double threshold = sec.require_double("Delta");
    const std::int64_t t = sec.require_int("t");
    RngStream g(0, 0, 0, 0);
    const RenewalTrace trace = simulate_trace(
        model, SamplingScheme::hitting_one_sided(threshold), t, g, true);
    const TraceStats st = trace_stats(trace);
    const double expected_ratio =
        static_cast<double>(st.n_t) * threshold / static_cast<double>(t);

    GridReport report;
    auto row = [&](const char* name, double got, double want, bool exact_ok) {
        GridRow r;
        r.check_name = name;
        r.delta = threshold;
        r.t = static_cast<double>(t);
        r.statistic = got;
        r.bound_rhs = want;
        r.pass = exact_ok && got == want;
        report.rows.push_back(r);
    };
    const Estimate hat = estimate(trace, EstimatorKind::Hat);
    const Estimate bar = estimate(trace, EstimatorKind::Bar);
    row("exact_hat", hat.value, model.mean(),
        hat.status == EstimateStatus::Ok);
    row("exact_bar", bar.value, model.mean(),
        bar.status == EstimateStatus::Ok);
    row("exact_check", estimate(trace, EstimatorKind::Check).value,
        expected_ratio, true);
    row("exact_tilde", estimate(trace, EstimatorKind::Tilde).value,
        expected_ratio, true);
    row("exact_zero_overshoot", st.overshoot_sum, 0.0, true);
    return report;
}

int run_verify(const ConfigFile& file, const CliOptions& opt) {
    SectionView exp = require_section(file, "experiment");
    const ExperimentHeader h = read_header(exp, "verify", opt);
    exp.finish();

    std::vector<const ConfigFile::Section*> checks;
    for (const auto& sec : file.sections)
        if (sec.name.rfind("check.", 0) == 0) checks.push_back(&sec);
    if (checks.empty())
        throw ConfigError("verify config needs at least one [check.*] section");

    if (opt.dry_run) {
        std::cout << "plan: verify '" << h.id << "', " << checks.size()
                  << " checks:";
        for (const auto* c : checks) std::cout << " " << c->name;
        std::cout << "\n";
        return kExitOk;
    }

    GridReport combined;
    bool all_pass = true;
    std::size_t check_index = 0;
    for (const auto* csec : checks) {
        SectionView sec(*csec);
        const std::string type = sec.require("type");
        // Per-check seed offset keeps repeated checks of one type on
        // non-overlapping streams.
        const std::uint64_t seed = h.seed + 1000003 * check_index++;
        GridReport report;
        if (type == "wald") {
            const IncrementModel model = cli::parse_model(sec);
            report = wald_residuals(model, sec.require_double_list("levels"),
                                    sec.require_count("reps"), seed);
        } else if (type == "lorden") {
            const IncrementModel model = cli::parse_model(sec);
            report = lorden_bounds(model, sec.require_double_list("levels"),
                                   sec.require_count("reps"), seed);
        } else if (type == "age") {
            const auto kind = cli::parse_scheme_kind(
                sec.require("scheme"), "[" + sec.name() + "].scheme");
            SamplingScheme scheme;
            scheme.kind = kind;
            scheme.mean_interarrival = sec.require_double("delta");
            if (scheme.hitting())
                throw ConfigError("[" + sec.name() +
                                  "].scheme: age check needs an exogenous "
                                  "scheme");
            report = age_bound_exogenous(scheme, sec.require_int_list("t"),
                                         sec.require_count("reps"), seed);
        } else if (type == "lr") {
            const IncrementModel model = cli::parse_model(sec);
            const auto kind = cli::parse_scheme_kind(
                sec.require("scheme"), "[" + sec.name() + "].scheme");
            const double r = sec.get_double("r").value_or(1.0);
            const auto grid = parse_lr_grid(sec, "grid");
            const std::optional<double> slope_max = sec.get_double("slope_max");
            report = lr_error_table(model, kind, r, grid,
                                    sec.require_count("reps"), seed);
            if (slope_max) {
                // Gate on the N(t) statistic; the nu = N+1 variant is
                // reported but not gated.
                for (auto& srow : report.slopes) {
                    const bool gated = srow.label.rfind("lr_N_vs_t@", 0) == 0;
                    GridRow row;
                    row.check_name = "slope_" + srow.label;
                    row.r = r;
                    row.statistic = srow.fitted;
                    row.se = srow.se;
                    if (gated) {
                        row.bound_rhs = *slope_max;
                        row.pass = srow.fitted <= *slope_max;
                    }
                    report.rows.push_back(row);
                }
            }
        } else if (type == "anscombe") {
            const IncrementModel model = cli::parse_model(sec);
            const auto kind = cli::parse_scheme_kind(
                sec.require("scheme"), "[" + sec.name() + "].scheme");
            const auto grid = parse_lr_grid(sec, "grid");
            report = anscombe_ratio(model, kind, grid,
                                    sec.require_count("reps"), seed);
        } else if (type == "rho") {
            report = run_rho_check(sec, seed);
        } else if (type == "exact") {
            report = run_exact_check(sec);
        } else {
            throw ConfigError("[" + sec.name() + "].type: unknown check type '" +
                              type + "'");
        }
        sec.finish();
        const bool pass = report.all_pass();
        std::cout << (pass ? "PASS " : "FAIL ") << csec->name << " ("
                  << report.rows.size() << " rows)\n";
        all_pass = all_pass && pass;
        for (auto& row : report.rows) combined.rows.push_back(std::move(row));
        for (auto& s : report.slopes) combined.slopes.push_back(std::move(s));
        for (auto& m : report.metadata)
            combined.metadata.push_back(csec->name + ": " + std::move(m));
    }
    {
        std::ofstream out = open_csv(resolve_out_dir(opt), h.id + "_verify.csv");
        combined.write_csv(out);
    }
    return all_pass ? kExitOk : kExitVerifyFailed;
}

int run_fusion(const ConfigFile& file, const CliOptions& opt) {
    SectionView exp = require_section(file, "experiment");
    const ExperimentHeader h = read_header(exp, "fusion", opt);
    exp.finish();

    std::vector<SensorSpec> sensors;
    for (const auto& sec : file.sections) {
        if (sec.name.rfind("sensor.", 0) != 0) continue;
        SectionView view(sec);
        SensorSpec s;
        try {
            s.sensor_id = static_cast<std::uint64_t>(
                std::stoull(sec.name.substr(7)));
        } catch (const std::exception&) {
            throw ConfigError("[" + sec.name +
                              "]: sensor sections are named [sensor.<id>]");
        }
        s.model = cli::parse_model(view);
        s.delta_threshold = view.require_double("delta");
        s.gamma_threshold = view.get_double("gamma");
        view.finish();
        sensors.push_back(s);
    }
    if (sensors.empty())
        throw ConfigError("fusion config needs at least one [sensor.*] section");

    SectionView fusion = require_section(file, "fusion");
    const std::string mode = fusion.get_string("mode", "run");
    const std::size_t reps = fusion.require_count("reps");
    if (mode == "clt") {
        const std::int64_t t = fusion.require_int("t");
        fusion.finish();
        if (opt.dry_run) {
            std::cout << "plan: fusion clt '" << h.id << "', " << sensors.size()
                      << " sensors, reps " << reps << ", horizon " << t << "\n";
            return kExitOk;
        }
        const NetworkCltSample sample =
            network_clt_sample(sensors, t, reps, h.seed);
        {
            std::ofstream out =
                open_csv(resolve_out_dir(opt), h.id + "_fusion_clt.csv");
            out << "standardized\n";
            for (const double v : sample.standardized) out << v << '\n';
        }
        RunningStat st;
        for (const double v : sample.standardized) st.add(v);
        std::cout << std::setprecision(10) << "ks_stat "
                  << ks_distance(sample.standardized) << "\nsample_mean "
                  << st.mean() << "\nsample_variance " << st.variance()
                  << "\nexcluded " << sample.excluded << "\n";
        return kExitOk;
    }
    if (mode != "run")
        throw ConfigError("[fusion].mode must be 'run' or 'clt'");

    const std::vector<std::int64_t> checkpoints =
        fusion.require_int_list("checkpoints");
    FusionConfig cfg;
    cfg.two_sided = fusion.get_bool("two_sided", false);
    fusion.finish();

    if (opt.dry_run) {
        std::cout << "plan: fusion run '" << h.id << "', " << sensors.size()
                  << " sensors, reps " << reps << ", checkpoints "
                  << checkpoints.size() << ", horizon " << checkpoints.back()
                  << "\n";
        return kExitOk;
    }

    std::ofstream out = open_csv(resolve_out_dir(opt), h.id + "_fusion.csv");
    out << "rep,checkpoint,estimator,value,total_bits,exclusions\n";
    for (std::size_t rep = 0; rep < reps; ++rep) {
        // Replications vary the seed slot; sensor/purpose slots are managed
        // inside run_network.
        const NetworkRun run =
            run_network(sensors, checkpoints, h.seed + rep, cfg);
        for (const auto& cp : run.checkpoints) {
            for (const auto& [kind, est] : cp.fused) {
                out << rep << ',' << cp.t << ',' << estimator_name(kind) << ',';
                if (est.status == EstimateStatus::NoSample)
                    out << "nan";
                else
                    out << est.value;
                out << ',' << run.total_bits << ',' << cp.exclusions << '\n';
            }
        }
    }
    return kExitOk;
}

bool expect(bool cond, const char* what, bool* ok) {
    std::cout << (cond ? "PASS " : "FAIL ") << what << "\n";
    if (!cond) *ok = false;
    return cond;
}

int run_selftest() {
    bool ok = true;
    {
        RngStream g(1, 0, 0, 0);
        const RenewalTrace trace =
            simulate_trace(IncrementModel::deterministic(4.0),
                           SamplingScheme::hitting_one_sided(8.0), 7, g, true);
        const TraceStats st = trace_stats(trace);
        expect(st.n_t == 3 && st.tau_of_t == 6 && st.overshoot_sum == 0.0,
               "deterministic trace events at 2,4,6 with zero overshoot", &ok);
        expect(estimate(trace, EstimatorKind::Hat).value == 4.0 &&
                   estimate(trace, EstimatorKind::Bar).value == 4.0,
               "deterministic hat and bar exactly 4", &ok);
        expect(estimate(trace, EstimatorKind::Check).value == 24.0 / 7.0 &&
                   estimate(trace, EstimatorKind::Tilde).value == 24.0 / 7.0,
               "deterministic check and tilde exactly 24/7", &ok);
    }
    {
        std::vector<double> quantiles;
        const int n = 100;
        for (int i = 1; i <= n; ++i) {
            const double p = (i - 0.5) / n;
            double lo = -10, hi = 10;  // bisect Phi since no inverse at hand
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (normal_cdf(mid) < p ? lo : hi) = mid;
            }
            quantiles.push_back(0.5 * (lo + hi));
        }
        expect(std::abs(ks_distance(quantiles) - 0.005) < 1e-9,
               "ks distance of stratified quantiles is 1/(2n)", &ok);
        const std::vector<double> zeros(50, 0.0);
        expect(std::abs(ks_distance(zeros) - 0.5) < 1e-12,
               "ks distance of a point mass at 0 is 0.5", &ok);
    }
    {
        RngStream a(42, 3, 1, 9), b(42, 3, 1, 9);
        bool same = true;
        const IncrementModel model = IncrementModel::gaussian_curved(4.0, 4.0);
        for (int i = 0; i < 1000; ++i)
            same = same && model.sample(a) == model.sample(b);
        expect(same, "identical streams reproduce identical draws", &ok);
    }
    {
        const auto w = weights_from_sigmas(std::vector<double>{1.0, 2.0});
        expect(std::abs(w[0] - 0.8) < 1e-15 && std::abs(w[1] - 0.2) < 1e-15,
               "weights for sigma (1,2) are (0.8, 0.2)", &ok);
        Estimate e;
        e.kind = EstimatorKind::Hat;
        e.value = 4.0;
        const Estimate g = overshoot_correct(
            e, 8.0, IncrementModel::gamma(1.0, 0.25));
        expect(std::abs(g.value - 6.0) < 1e-12,
               "overshoot correction g(4) = 6 for exponential at Delta 8", &ok);
    }
    {
        RngStream g(7, 0, 0, 0);
        const FirstPassageRecord fp =
            first_passage(IncrementModel::deterministic(2.0), 6.0, g);
        expect(fp.nu == 4 && fp.tau_at_nu == 8.0 && fp.overshoot == 2.0,
               "first passage is strict: level 6 with step 2 stops at 8", &ok);
    }
    return ok ? kExitOk : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rate sampling estimation toolkit"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", opt.config_path, "config file path")
                ->required();
        sub->add_option("--seed", opt.seed_override,
                        "override [experiment].seed");
        sub->add_option("--threads", opt.threads,
                        "worker threads (default: available parallelism)");
        sub->add_option("--out", opt.out_dir,
                        "output directory (default $LOWRATE_OUT or .)");
        sub->add_flag("--dry-run", opt.dry_run,
                      "print the resolved plan without simulating");
    };
    CLI::App* sweep = app.add_subcommand("sweep", "relative-efficiency sweep");
    add_common(sweep, true);
    sweep->add_flag("--trace-dump", opt.trace_dump,
                    "write per-event trace CSV for the first grid point");
    sweep->add_flag("--ordering", opt.ordering,
                    "run the qualitative ordering report on the sweep");
    CLI::App* clt = app.add_subcommand("clt", "CLT / consistency diagnostic");
    add_common(clt, true);
    CLI::App* verify = app.add_subcommand("verify", "bound and rate checks");
    add_common(verify, true);
    CLI::App* fusion = app.add_subcommand("fusion", "multi-sensor network run");
    add_common(fusion, true);
    app.add_subcommand("selftest", "built-in exact sanity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (app.got_subcommand("selftest")) return run_selftest();
        const ConfigFile file = ConfigFile::parse_file(opt.config_path);
        if (app.got_subcommand(sweep)) return run_sweep(file, opt);
        if (app.got_subcommand(clt)) return run_clt(file, opt);
        if (app.got_subcommand(verify)) return run_verify(file, opt);
        if (app.got_subcommand(fusion)) return run_fusion(file, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}
