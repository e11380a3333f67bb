// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// mcvd: run enzyme-deployment sweeps, print analytic curves, recompute ITR
// from stored arrivals, and run the quick oracle checks.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcvd/experiment.hpp"
#include "mcvd/oracles.hpp"

namespace {

using namespace mcvd;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    unsigned workers = 0;
    std::optional<double> bin_width_s;
    bool verbose = false;
};

int cmd_run(const RunArgs& a) {
    SweepSpec spec;
    try {
        spec = parse_config_file(a.config);
        if (a.seed) spec.fixed.base_seed = *a.seed;
        if (a.bin_width_s) {
            if (!(*a.bin_width_s > 0.0) || *a.bin_width_s > spec.fixed.t_end_s)
                throw ConfigError("--bin-width-s must be in (0, t_end_s]");
            spec.bin_width_s = *a.bin_width_s;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    RunManifest m;
    try {
        m = execute_sweep(spec, {a.out, a.workers, !a.verbose});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    std::cout << "wrote " << m.results.rows << " ITR rows for " << m.points.size() << " points to " << a.out
              << " (config " << m.config_hash.substr(0, 12) << ")\n";
    if (m.failures() > 0) {
        std::cerr << m.failures() << " point(s) failed; see manifest.json\n";
        return kExitPartial;
    }
    return kExitOk;
}

struct AnalyticArgs {
    double diffusion = 100.0;
    double distance = 4.0;
    double radius = 5.0;
    std::optional<double> half_life_s;
    double t_end_s = 2.0;
    double step_s = 0.001;
    std::vector<double> itr_ts;
    std::string out;
};

int cmd_analytic(const AnalyticArgs& a) {
    const ChannelParams p{a.diffusion, a.distance, a.radius};
    p.validate();
    std::optional<EnzymeKinetics> k;
    if (a.half_life_s) k = EnzymeKinetics::from_half_life(*a.half_life_s);

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw std::runtime_error("cannot write '" + a.out + "'");
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    out << "t_s,hitting_rate_per_s,cumulative_fraction";
    if (k) out << ",hitting_rate_enzyme_per_s,cumulative_fraction_enzyme";
    out << '\n';
    const auto n = static_cast<std::size_t>(std::llround(a.t_end_s / a.step_s));
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) * a.step_s;
        out << fmt_num(t) << ',' << fmt_num(hitting_rate(p, t)) << ',' << fmt_num(cumulative_fraction(p, t));
        if (k)
            out << ',' << fmt_num(hitting_rate_with_enzyme(p, k->degradation_rate_per_s, t)) << ','
                << fmt_num(cumulative_fraction_with_enzyme(p, *k, t));
        out << '\n';
    }
    for (double ts : a.itr_ts)
        std::cerr << "analytic ITR(t_s=" << ts << ", t_end=" << a.t_end_s << ") = " << analytic_itr(p, k, ts, a.t_end_s)
                  << '\n';
    return kExitOk;
}

struct ItrArgs {
    std::string arrivals;
    std::vector<double> ts;
    double t_end_s = 2.0;
    std::optional<std::size_t> replications;
};

int cmd_itr(const ItrArgs& a) {
    const auto by_rep = read_arrivals(a.arrivals);
    std::size_t reps = a.replications.value_or(by_rep.empty() ? 0 : by_rep.rbegin()->first + 1);
    if (reps == 0) throw std::runtime_error("no replications in '" + a.arrivals + "'");
    std::vector<double> pooled_times;
    for (const auto& [_, times] : by_rep) pooled_times.insert(pooled_times.end(), times.begin(), times.end());

    std::cout << "ts_s,itr_mean,itr_std,itr_pooled,replications\n";
    for (double ts : a.ts) {
        std::vector<double> per_rep;
        for (std::size_t r = 0; r < reps; ++r) {
            auto it = by_rep.find(r);
            if (it == by_rep.end())
                throw std::domain_error("itr undefined: replication " + std::to_string(r) + " has no arrivals");
            per_rep.push_back(itr_from_times(it->second, ts, a.t_end_s));
        }
        const auto s = sample_stats(per_rep);
        std::cout << fmt_num(ts) << ',' << fmt_num(s.mean) << ',' << fmt_num(s.stddev) << ','
                  << fmt_num(itr_from_times(pooled_times, ts, a.t_end_s)) << ',' << s.n << '\n';
    }
    return kExitOk;
}

int cmd_validate(unsigned workers) {
    int failed = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
        failed += ok ? 0 : 1;
    };
    const ChannelParams p{100, 4, 5};

    double worst = 0.0;
    for (double x = -3.0; x <= 6.0; x += 0.01)
        worst = std::max(worst, std::abs(std::erfc(x) - oracle::erfc_reference(x)) / oracle::erfc_reference(x));
    report("erfc", worst <= 1e-10, "max rel err " + fmt_num(worst));

    worst = 0.0;
    for (double hl : {0.002, 0.01, 0.1})
        for (double t : {0.05, 0.5, 1.0, 2.0}) {
            const double lambda = std::numbers::ln2 / hl;
            const double q = oracle::received_fraction_quadrature(100, 4, 5, lambda, t);
            worst = std::max(worst, std::abs(cumulative_fraction_with_enzyme(p, lambda, t) - q) / q);
        }
    report("enzyme closed form vs quadrature", worst <= 1e-6, "max rel err " + fmt_num(worst));

    bool vol_ok = true;
    std::string vol_detail;
    std::uint64_t seed = 1;
    for (double r_enz : {2.0, 8.0, 16.0}) {
        const auto topo = make_topology(5, 4);
        const auto mc = oracle::enzyme_shell_volume_mc(5, 4, r_enz, 1'000'000, seed++);
        const double v = total_enzyme_volume(topo, EnzymeHost::AroundRx, r_enz);
        const double z = std::abs(v - mc.volume) / mc.standard_error;
        vol_ok = vol_ok && z < 3.0;
        vol_detail += "r_enz=" + fmt_num(r_enz) + " z=" + fmt_num(std::round(z * 100) / 100) + " ";
    }
    report("enzyme volume vs Monte Carlo", vol_ok, vol_detail);

    auto cfg = make_config(p, EnzymeHost::None, 0, 1.0, TxGeometry::PointSource);
    cfg.molecules_per_emission = 2000;
    cfg.t_end_s = 0.25;
    cfg.symbol_period_s = 0.1;
    const auto recs = run_experiment(cfg, 1, workers);
    const double frac = static_cast<double>(recs[0].absorbed_total) / 2000.0;
    const double expected = cumulative_fraction(p, 0.25);
    const double z = std::abs(frac - expected) / oracle::binomial_se(expected, 2000.0);
    report("point-source simulation vs closed form", z < 3.0,
           "simulated " + fmt_num(frac) + " expected " + fmt_num(expected) + " z=" + fmt_num(std::round(z * 100) / 100));

    auto small = make_config(p, EnzymeHost::AroundRx, 2.0, 0.002);
    small.molecules_per_emission = 100;
    small.t_end_s = 0.05;
    small.symbol_period_s = 0.01;
    const bool same = run_experiment(small, 4, 1) == run_experiment(small, 4, workers == 1 ? 2 : workers);
    report("determinism across worker counts", same, "");

    return failed == 0 ? kExitOk : kExitPartial;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Molecular communication channel simulator with limited enzyme deployment"};
    app.set_version_flag("--version", std::string(mcvd::kToolVersion));
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a parameter sweep described by a config file");
    run_cmd->add_option("--config", run.config, "Sweep config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "Base seed (overrides the config)");
    run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)")->capture_default_str();
    run_cmd->add_option("--bin-width-s", run.bin_width_s, "Signal histogram bin width (overrides the config)");
    run_cmd->add_flag("-v,--verbose", run.verbose, "Print per-point progress");

    AnalyticArgs an;
    auto* an_cmd = app.add_subcommand("analytic", "Print point-source hitting-rate and received-fraction curves");
    an_cmd->add_option("--diffusion-um2-per-s", an.diffusion)->capture_default_str();
    an_cmd->add_option("--distance-um", an.distance)->capture_default_str();
    an_cmd->add_option("--radius-um", an.radius)->capture_default_str();
    an_cmd->add_option("--half-life-s", an.half_life_s, "Add curves for enzymes everywhere with this half-life");
    an_cmd->add_option("--t-end-s", an.t_end_s)->capture_default_str();
    an_cmd->add_option("--step-s", an.step_s, "Time grid spacing")->capture_default_str();
    an_cmd->add_option("--itr-ts", an.itr_ts, "Also print the analytic ITR for these symbol periods");
    an_cmd->add_option("--out", an.out, "Output CSV (default stdout)");

    ItrArgs itr;
    auto* itr_cmd = app.add_subcommand("itr", "Recompute ITR from a stored arrivals CSV");
    itr_cmd->add_option("--arrivals", itr.arrivals, "arrivals_<point>.csv")->required()->check(CLI::ExistingFile);
    itr_cmd->add_option("--ts", itr.ts, "Symbol period(s) in seconds")->required();
    itr_cmd->add_option("--t-end-s", itr.t_end_s)->capture_default_str();
    itr_cmd->add_option("--replications", itr.replications, "Replication count (default: highest index + 1)");

    unsigned validate_workers = 0;
    auto* val_cmd = app.add_subcommand("validate", "Check closed forms and the simulator against reference oracles");
    val_cmd->add_option("--workers", validate_workers)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run);
        if (*an_cmd) return cmd_analytic(an);
        if (*itr_cmd) return cmd_itr(itr);
        if (*val_cmd) return cmd_validate(validate_workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
