// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance driver. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   mcvd_acceptance --suite fast   criteria 1, 2, 3, 6, 7, 8
//   mcvd_acceptance --suite slow   criteria 4, 5

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcvd/experiment.hpp"
#include "mcvd/oracles.hpp"

namespace {

using namespace mcvd;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            detail << "[violated] " << why << "; ";
        }
    }
};

std::string fixed(double v, int digits = 5) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(digits);
    o << v;
    return o.str();
}

const ChannelParams kBaseline{100.0, 4.0, 5.0};

std::uint64_t arrivals_until(const ArrivalRecord& r, double t) {
    const auto it = std::upper_bound(r.absorption_times_s.begin(), r.absorption_times_s.end(), t + kTimeSnap_s);
    return static_cast<std::uint64_t>(it - r.absorption_times_s.begin());
}

// --- 1 ---------------------------------------------------------------------

void point_source_no_enzyme(Outcome& o) {
    auto cfg = make_config(kBaseline, EnzymeHost::None, 0.0, 1.0, TxGeometry::PointSource);
    cfg.molecules_per_emission = 50'000;
    cfg.t_end_s = 1.0;
    const auto rec = run_replication(cfg, 0);
    const double n = static_cast<double>(rec.emitted_total);
    for (double t : {0.25, 0.5, 1.0}) {
        const double expected = cumulative_fraction(kBaseline, t);
        const double got = static_cast<double>(arrivals_until(rec, t)) / n;
        const double z = (got - expected) / oracle::binomial_se(expected, n);
        o.detail << "t=" << t << " sim=" << fixed(got) << " closed=" << fixed(expected) << " z=" << fixed(z, 2) << "; ";
        o.require(std::abs(z) < 3.0, "absorbed fraction outside 3 SE at t=" + fmt_num(t));
    }
}

// --- 2 ---------------------------------------------------------------------

void point_source_everywhere(Outcome& o) {
    auto cfg = make_config(kBaseline, EnzymeHost::Everywhere, 0.0, 0.002, TxGeometry::PointSource);
    cfg.molecules_per_emission = 50'000;
    cfg.t_end_s = 1.0;
    const auto rec = run_replication(cfg, 0);
    const double n = static_cast<double>(rec.emitted_total);
    const auto k = EnzymeKinetics::from_half_life(0.002);
    const double expected = cumulative_fraction_with_enzyme(kBaseline, k, 1.0);
    const double got = static_cast<double>(arrivals_until(rec, 1.0)) / n;
    const double z = (got - expected) / oracle::binomial_se(expected, n);
    o.detail << "sim=" << fixed(got, 6) << " closed=" << fixed(expected, 6) << " z=" << fixed(z, 2) << "; ";
    o.require(std::abs(z) < 3.0, "absorbed fraction outside 3 SE");

    double worst = 0.0;
    for (double hl : {0.002, 0.005, 0.02, 0.1, 1.0})
        for (double t : {0.01, 0.05, 0.25, 0.5, 1.0, 2.0, 4.0}) {
            const double lambda = std::numbers::ln2 / hl;
            const double q = oracle::received_fraction_quadrature(100, 4, 5, lambda, t);
            worst = std::max(worst, std::abs(cumulative_fraction_with_enzyme(kBaseline, lambda, t) - q) / q);
        }
    o.detail << "closed form vs quadrature max rel err " << worst;
    o.require(worst <= 1e-6, "closed form differs from quadrature by more than 1e-6");
}

// --- 3 ---------------------------------------------------------------------

void enzyme_volume(Outcome& o) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int per_case[3] = {0, 0, 0};
    double worst_z = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double r_r = 1.0 + 9.0 * u01(rng);
        const double d = 0.5 + 9.5 * u01(rng);
        // Cycle through the disjoint, partial and full overlap regimes.
        double r_enz = 0.0;
        switch (i % 3) {
        case 0: r_enz = d * (0.05 + 0.9 * u01(rng)); break;
        case 1: r_enz = d + 2.0 * r_r * (0.05 + 0.9 * u01(rng)); break;
        default: r_enz = (d + 2.0 * r_r) * (1.02 + 0.5 * u01(rng)); break;
        }
        const int regime = r_enz < d ? 0 : (r_enz < d + 2.0 * r_r ? 1 : 2);
        ++per_case[regime];
        const auto topo = make_topology(r_r, d);
        const double v = total_enzyme_volume(topo, EnzymeHost::AroundRx, r_enz);
        const auto mc = oracle::enzyme_shell_volume_mc(r_r, d, r_enz, 10'000'000, 1000 + i);
        const double z = (v - mc.volume) / mc.standard_error;
        worst_z = std::max(worst_z, std::abs(z));
        o.require(std::abs(z) < 3.0, "volume off by " + fixed(z, 2) + " SE at (r_r, d, r_enz)=(" + fixed(r_r, 3) +
                                         ", " + fixed(d, 3) + ", " + fixed(r_enz, 3) + ")");
        o.require(total_enzyme_volume(topo, EnzymeHost::AroundTx, r_enz) == v, "around-Tx volume differs");
    }
    o.detail << "regimes " << per_case[0] << "/" << per_case[1] << "/" << per_case[2] << ", max |z| " << fixed(worst_z, 2);
    o.require(per_case[0] > 0 && per_case[1] > 0 && per_case[2] > 0, "not all regimes sampled");

    double worst_jump = 0.0;
    for (double r_r : {0.5, 1.0, 5.0, 10.0})
        for (double d : {0.25, 1.0, 4.0, 12.0}) {
            const auto topo = make_topology(r_r, d);
            for (double b : {d, d + 2.0 * r_r}) {
                const double lo = total_enzyme_volume(topo, EnzymeHost::AroundRx, b * (1.0 - 1e-13));
                const double hi = total_enzyme_volume(topo, EnzymeHost::AroundRx, b * (1.0 + 1e-13));
                const double at = total_enzyme_volume(topo, EnzymeHost::AroundRx, b);
                worst_jump = std::max({worst_jump, std::abs(hi - lo) / at, std::abs(at - lo) / at});
            }
        }
    o.detail << ", max boundary jump " << worst_jump;
    o.require(worst_jump <= 1e-9, "case boundaries not continuous to 1e-9");
}

// --- 6 ---------------------------------------------------------------------

using ItrTable = std::map<std::tuple<EnzymeHost, double, double>, double>; // (scenario, d, r_enz) -> mean ITR

ItrTable run_itr_sweep(const std::string& config_text, const fs::path& work, unsigned workers) {
    const auto spec = parse_config_text(config_text);
    const auto manifest = execute_sweep(spec, {work, workers, true});
    verify_manifest(manifest, work);
    ItrTable table;
    for (const auto& p : manifest.points) {
        if (p.error) throw std::runtime_error("point " + p.point.label() + " failed: " + *p.error);
        table[{p.point.scenario, p.point.d_um, p.point.r_enz_um}] = std::get<1>(p.itr_by_ts.at(0));
    }
    return table;
}

void monotonicity(Outcome& o, unsigned workers, const fs::path& work) {
    // Reduced grid: three distances, a small, a middle and a large extension.
    const auto t = run_itr_sweep("scenarios = around_rx\n"
                                 "distance_um = 4, 6, 8\n"
                                 "r_enz_um = 2, 10, 20\n"
                                 "ts_s = 1\nt_end_s = 2\nunit_half_life_s = 0.002\n"
                                 "molecules = 5000\nreplications = 4\nseed = 6\n",
                                 work / "c6", workers);
    const double ds[] = {4, 6, 8};
    for (double r : {2.0, 10.0, 20.0}) {
        o.detail << "r_enz=" << r << ":";
        for (double d : ds) o.detail << " " << fixed(t.at({EnzymeHost::AroundRx, d, r}));
        o.detail << "; ";
    }
    for (double r : {2.0, 20.0})
        for (int i = 0; i + 1 < 3; ++i)
            o.require(t.at({EnzymeHost::AroundRx, ds[i + 1], r}) > t.at({EnzymeHost::AroundRx, ds[i], r}),
                      "ITR does not grow from d=" + fmt_num(ds[i]) + " to d=" + fmt_num(ds[i + 1]) +
                          " at r_enz=" + fmt_num(r));
    for (double d : ds) {
        const double mid = t.at({EnzymeHost::AroundRx, d, 10.0});
        const double far = t.at({EnzymeHost::AroundRx, d, 20.0});
        o.require(far > mid, "ITR keeps decreasing in r_enz at d=" + fmt_num(d));
    }
}

// --- 7 ---------------------------------------------------------------------

void conservation_and_determinism(Outcome& o, unsigned workers, const fs::path& work) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const EnzymeHost hosts[] = {EnzymeHost::None, EnzymeHost::AroundRx, EnzymeHost::AroundTx, EnzymeHost::Everywhere};
    std::uint64_t checked_steps = 0, bad_steps = 0;
    for (int i = 0; i < 1000; ++i) {
        const ChannelParams ch{20.0 + 180.0 * u01(rng), 0.5 + 8.0 * u01(rng), 1.0 + 6.0 * u01(rng)};
        const auto host = hosts[i % 4];
        const auto tx = u01(rng) < 0.5 ? TxGeometry::ReflectingSphere : TxGeometry::PointSource;
        auto cfg = make_config(ch, host, 0.5 + 15.0 * u01(rng), 0.001 + 0.05 * u01(rng), tx);
        cfg.dt_s = 1e-5;
        cfg.molecules_per_emission = 5 + static_cast<std::uint64_t>(40 * u01(rng));
        cfg.t_end_s = 0.01 * (1 + static_cast<int>(3 * u01(rng)));
        cfg.symbol_period_s = 0.01;
        cfg.base_seed = rng();
        if (u01(rng) < 0.5) {
            std::vector<bool> bits(1 + static_cast<std::size_t>(3 * u01(rng)));
            for (std::size_t b = 0; b < bits.size(); ++b) bits[b] = u01(rng) < 0.6;
            cfg.emission = EmissionSchedule::periodic(bits);
        }
        const auto rec = run_replication(cfg, static_cast<std::uint64_t>(i),
                                         [&](std::uint64_t, double, const std::vector<MoleculeState>& ms,
                                             const ArrivalRecord& r) {
                                             ++checked_steps;
                                             if (!r.conserved() || r.alive_at_end != ms.size()) ++bad_steps;
                                         });
        if (!rec.conserved()) ++bad_steps;
    }
    o.detail << checked_steps << " steps over 1000 configs, " << bad_steps << " unbalanced; ";
    o.require(bad_steps == 0, "emitted != absorbed + degraded + alive");

    const std::string cfg_text = "scenarios = no_enzyme, around_rx, around_tx, everywhere\n"
                                 "distance_um = 2, 4\nr_enz_um = 1, 3\nts_s = 0.02, 0.03\n"
                                 "unit_half_life_s = 0.002, 0.01\nmolecules = 150\nt_end_s = 0.05\n"
                                 "replications = 5\nseed = 12345\n";
    const auto spec = parse_config_text(cfg_text);
    const unsigned many = std::max(4u, workers);
    execute_sweep(spec, {work / "c7_serial", 1, true});
    execute_sweep(spec, {work / "c7_parallel", many, true});
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(work / "c7_serial")) {
        if (entry.path().filename() == "manifest.json") continue; // wall-clock times differ
        ++files;
        if (slurp(entry.path()) != slurp(work / "c7_parallel" / entry.path().filename())) ++differing;
    }
    const auto itr = slurp(work / "c7_serial" / "itr_results.csv");
    o.detail << "1 vs " << many << " workers: " << files << " files compared, " << differing << " differ";
    o.require(!itr.empty() && itr == slurp(work / "c7_parallel" / "itr_results.csv"),
              "itr_results.csv not byte-identical");
    o.require(differing == 0, "some outputs depend on the worker count");
}

// --- 8 ---------------------------------------------------------------------

void diffusion_statistics(Outcome& o) {
    const double D = 100.0, dt = 1e-5;
    const double var = 2.0 * D * dt;
    Engine rng(replication_seed(8, 0));
    const MoleculeState m{{0, 0, 0}, {0, 0, 0}, true};
    constexpr std::uint64_t n = 1'000'000;
    double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
    for (std::uint64_t i = 0; i < n; ++i) {
        const Vec3 p = diffusion_step(m, D, dt, rng);
        const double c[3] = {p.x, p.y, p.z};
        for (int a = 0; a < 3; ++a) {
            sum[a] += c[a];
            sq[a] += c[a] * c[a];
        }
    }
    const char axis[3] = {'x', 'y', 'z'};
    for (int a = 0; a < 3; ++a) {
        const double mean = sum[a] / n;
        const double v = sq[a] / n - mean * mean;
        const double mean_bound = 5.0 * std::sqrt(var / n);
        o.detail << axis[a] << ": mean/bound=" << fixed(mean / mean_bound, 3) << " var/2Ddt=" << fixed(v / var, 5) << "; ";
        o.require(std::abs(mean) <= mean_bound, std::string("mean off on axis ") + axis[a]);
        o.require(std::abs(v / var - 1.0) <= 0.01, std::string("variance off on axis ") + axis[a]);
    }
}

// --- 4 ---------------------------------------------------------------------

struct TailStats {
    double mean = 0.0, se = 0.0;
};

TailStats tail_mass(const SimulationConfig& cfg, std::uint64_t reps, unsigned workers) {
    const auto recs = run_experiment(cfg, reps, workers);
    std::vector<double> tails;
    for (const auto& r : recs) tails.push_back(itr_from_record(r, 1.0, cfg.t_end_s));
    const auto s = sample_stats(tails);
    return {s.mean, s.stddev / std::sqrt(static_cast<double>(s.n))};
}

void tail_reduction(Outcome& o, unsigned workers) {
    constexpr std::uint64_t reps = 10, molecules = 10'000;
    auto with = make_config(kBaseline, EnzymeHost::AroundRx, 4.0, 0.002);
    auto without = make_config(kBaseline, EnzymeHost::None, 0.0, 1.0);
    for (auto* c : {&with, &without}) {
        c->t_end_s = 4.0;
        c->molecules_per_emission = molecules;
        c->base_seed = 4;
    }
    const auto a = tail_mass(without, reps, workers);
    const auto b = tail_mass(with, reps, workers);
    // One-sided 95% lower bound on the ratio, delta method on the log scale.
    const double log_ratio = std::log(a.mean / b.mean);
    const double se_log = std::hypot(a.se / a.mean, b.se / b.mean);
    const double lower = std::exp(log_ratio - 1.6449 * se_log);
    o.detail << reps << " reps x " << molecules << " molecules: tail without=" << fixed(a.mean) << "+-" << fixed(a.se)
             << " with=" << fixed(b.mean) << "+-" << fixed(b.se) << " ratio=" << fixed(a.mean / b.mean, 2)
             << " (95% lower bound " << fixed(lower, 2) << ")";
    o.require(b.mean < a.mean, "enzymes did not reduce the tail");
    o.require(lower >= 2.0, "tail reduction not at least 2x at 95% confidence");
}

// --- 5 ---------------------------------------------------------------------

void crossover(Outcome& o, unsigned workers, const fs::path& work) {
    const auto t = run_itr_sweep("scenarios = around_rx, around_tx\n"
                                 "distance_um = 4, 6, 8\n"
                                 "r_enz_um = 2:20:2\n"
                                 "ts_s = 1\nt_end_s = 2\nunit_half_life_s = 0.002\n"
                                 "molecules = 5000\nreplications = 10\nseed = 5\n",
                                 work / "c5", workers);
    double best = std::numeric_limits<double>::infinity();
    std::tuple<EnzymeHost, double, double> argmin{};
    for (const auto& [key, v] : t)
        if (v < best) {
            best = v;
            argmin = key;
        }
    for (double d : {4.0, 6.0, 8.0}) {
        const double rx0 = t.at({EnzymeHost::AroundRx, d, 2.0}), tx0 = t.at({EnzymeHost::AroundTx, d, 2.0});
        std::vector<double> reversed;
        for (double r = 4.0; r <= 20.0; r += 2.0)
            if (t.at({EnzymeHost::AroundRx, d, r}) < t.at({EnzymeHost::AroundTx, d, r})) reversed.push_back(r);
        o.detail << "d=" << d << ": r_enz=2 tx " << fixed(tx0) << " rx " << fixed(rx0) << ", rx lower at r_enz {";
        for (std::size_t i = 0; i < reversed.size(); ++i) o.detail << (i ? "," : "") << reversed[i];
        o.detail << "}; ";
        o.require(tx0 < rx0, "around-Tx not lower at the smallest r_enz for d=" + fmt_num(d));
        o.require(!reversed.empty(), "no crossover for d=" + fmt_num(d));
    }
    o.detail << "global minimum " << to_string(std::get<0>(argmin)) << " d=" << std::get<1>(argmin)
             << " r_enz=" << std::get<2>(argmin) << " ITR=" << fixed(best);
    o.require(std::get<0>(argmin) == EnzymeHost::AroundRx, "global minimum is not an around-Rx point");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for the mcvd simulator"};
    std::string suite = "fast";
    unsigned workers = 0;
    std::vector<int> only;
    std::string work_dir = "acceptance_work";
    app.add_option("--suite", suite, "fast, slow or all")->check(CLI::IsMember({"fast", "slow", "all"}));
    app.add_option("--workers", workers, "Worker threads (0 = all cores)");
    app.add_option("--only", only, "Run only these criterion numbers");
    app.add_option("--work-dir", work_dir, "Scratch directory for sweep outputs");
    CLI11_PARSE(app, argc, argv);

    const fs::path work = work_dir;
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* name;
        bool slow;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "point source without enzymes matches the closed-form received fraction", false, point_source_no_enzyme},
        {2, "point source with enzymes everywhere matches the closed form", false, point_source_everywhere},
        {3, "enzyme region volume matches Monte Carlo", false, enzyme_volume},
        {4, "enzymes around Rx cut the ISI tail at least 2x", true, [&](Outcome& o) { tail_reduction(o, workers); }},
        {5, "around-Tx/around-Rx crossover and around-Rx global minimum", true,
         [&](Outcome& o) { crossover(o, workers, work); }},
        {6, "ITR grows with d and eventually rises with r_enz", false,
         [&](Outcome& o) { monotonicity(o, workers, work); }},
        {7, "conservation at every step and worker-count determinism", false,
         [&](Outcome& o) { conservation_and_determinism(o, workers, work); }},
        {8, "diffusion step mean and variance", false, diffusion_statistics},
    };

    int failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        if (only.empty() && suite != "all" && c.slow != (suite == "slow")) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception] " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++ran;
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << fixed(secs, 1)
                  << " s) | " << o.detail.str() << std::endl;
    }
    std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
