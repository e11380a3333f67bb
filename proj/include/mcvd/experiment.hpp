// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Sweep orchestration and the on-disk data contract.
//
// Output directory layout:
//   itr_results.csv            scenario,d_um,r_enz_um,ts_s,half_life_s,itr_mean,itr_std,replications
//   arrivals_<point>.csv       replication,absorption_time_s
//   tallies_<point>.csv        replication,seed,emitted,absorbed,degraded,alive_at_end
//   signal_<point>.csv         t_bin_start_s,count_mean,count_std
//   manifest.json              run metadata, per-point files, row counts, timings, failures
//
// All numbers are written in shortest round-trip form, so equal inputs give
// byte-identical files.
#pragma once

#include <chrono>
#include <iostream>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"
#include "mcvd/config.hpp"
#include "mcvd/metrics.hpp"
#include "mcvd/simulation.hpp"
#include "mcvd/version.hpp"

namespace mcvd {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kItrHeader = "scenario,d_um,r_enz_um,ts_s,half_life_s,itr_mean,itr_std,replications";
inline constexpr const char* kArrivalsHeader = "replication,absorption_time_s";
inline constexpr const char* kTalliesHeader = "replication,seed,emitted,absorbed,degraded,alive_at_end";
inline constexpr const char* kSignalHeader = "t_bin_start_s,count_mean,count_std";

inline std::string fmt_num(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline std::string fmt_num(std::uint64_t v) { return std::to_string(v); }

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

/// Canonical text of every field that influences the results.
inline std::string canonical_text(const SweepSpec& s) {
    std::ostringstream o;
    auto list = [&](const char* key, const std::vector<double>& v) {
        o << key << '=';
        for (std::size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << fmt_num(v[i]);
        o << '\n';
    };
    o << "scenarios=";
    for (std::size_t i = 0; i < s.scenarios.size(); ++i) o << (i ? "," : "") << to_string(s.scenarios[i]);
    o << '\n';
    list("distance_um", s.d_values_um);
    list("r_enz_um", s.r_enz_values_um);
    list("ts_s", s.ts_values_s);
    list("unit_half_life_s", s.unit_half_life_values_s);
    o << "diffusion_um2_per_s=" << fmt_num(s.diffusion_um2_per_s) << '\n'
      << "radius_um=" << fmt_num(s.radius_um) << '\n'
      << "molecules=" << s.fixed.molecules_per_emission << '\n'
      << "dt_s=" << fmt_num(s.fixed.dt_s) << '\n'
      << "t_end_s=" << fmt_num(s.fixed.t_end_s) << '\n'
      << "replications=" << s.replications << '\n'
      << "tx_geometry=" << (s.fixed.tx_geometry == TxGeometry::ReflectingSphere ? "reflecting" : "point") << '\n'
      << "symbol_period_s=" << fmt_num(s.fixed.symbol_period_s) << '\n'
      << "seed=" << s.fixed.base_seed << '\n'
      << "bin_width_s=" << fmt_num(s.bin_width_s) << '\n'
      << "emission=";
    if (!s.fixed.emission.every_period) {
        o << "single";
    } else {
        o << "bits:";
        for (bool b : s.fixed.emission.bits) o << (b ? '1' : '0');
    }
    o << '\n';
    return o.str();
}

inline std::string config_hash(const SweepSpec& s) { return sha256_hex(canonical_text(s)); }

/// One simulated configuration. The symbol period does not need its own
/// simulation: every t_s is evaluated on the same single-emission records.
struct SweepPoint {
    EnzymeHost scenario = EnzymeHost::None;
    double d_um = 0.0;
    double r_enz_um = 0.0;      // 0 when the scenario has no finite region
    double unit_half_life_s = 0.0; // 0 for no_enzyme

    std::string label() const {
        std::string s = to_string(scenario) + "_d" + fmt_num(d_um);
        if (scenario == EnzymeHost::AroundRx || scenario == EnzymeHost::AroundTx) s += "_renz" + fmt_num(r_enz_um);
        if (scenario != EnzymeHost::None) s += "_hl" + fmt_num(unit_half_life_s);
        return s;
    }
    auto key() const { return std::tuple(static_cast<int>(scenario), d_um, r_enz_um, unit_half_life_s); }
};

/// Simulation points of the grid, in sorted coordinate order. The no_enzyme
/// scenario ignores r_enz and half-life; everywhere ignores r_enz.
inline std::vector<SweepPoint> expand_grid(const SweepSpec& spec) {
    std::vector<SweepPoint> pts;
    for (auto h : spec.scenarios)
        for (double d : spec.d_values_um) {
            if (h == EnzymeHost::None) {
                pts.push_back({h, d, 0.0, 0.0});
            } else if (h == EnzymeHost::Everywhere) {
                for (double hl : spec.unit_half_life_values_s) pts.push_back({h, d, 0.0, hl});
            } else {
                for (double r : spec.r_enz_values_um)
                    for (double hl : spec.unit_half_life_values_s) pts.push_back({h, d, r, hl});
            }
        }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.key() == b.key(); }),
              pts.end());
    return pts;
}

inline SimulationConfig point_config(const SweepSpec& spec, const SweepPoint& pt) {
    const ChannelParams ch{spec.diffusion_um2_per_s, pt.d_um, spec.radius_um};
    SimulationConfig cfg = make_config(ch, pt.scenario, pt.r_enz_um, pt.unit_half_life_s > 0 ? pt.unit_half_life_s : 1.0,
                                       spec.fixed.tx_geometry);
    cfg.dt_s = spec.fixed.dt_s;
    cfg.t_end_s = spec.fixed.t_end_s;
    cfg.molecules_per_emission = spec.fixed.molecules_per_emission;
    cfg.symbol_period_s = spec.fixed.symbol_period_s;
    cfg.base_seed = spec.fixed.base_seed;
    cfg.emission = EmissionSchedule::single_shot();
    return cfg;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

inline void close_checked(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

} // namespace detail

/// Writes per-bin mean/std of received counts across `records`. Returns the
/// number of data rows.
inline std::size_t emit_signal_table(std::span<const ArrivalRecord> records, double t_end_s, double bin_width_s,
                                     const std::filesystem::path& path) {
    const auto table = mean_signal(records, t_end_s, bin_width_s);
    auto out = detail::open_out(path);
    out << kSignalHeader << '\n';
    for (std::size_t i = 0; i < table.mean.size(); ++i)
        out << fmt_num(static_cast<double>(i) * bin_width_s) << ',' << fmt_num(table.mean[i]) << ','
            << fmt_num(table.stddev[i]) << '\n';
    detail::close_checked(out, path);
    return table.mean.size();
}

inline std::size_t write_arrivals(std::span<const ArrivalRecord> records, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << kArrivalsHeader << '\n';
    std::size_t rows = 0;
    for (std::size_t r = 0; r < records.size(); ++r)
        for (double t : records[r].absorption_times_s) {
            out << r << ',' << fmt_num(t) << '\n';
            ++rows;
        }
    detail::close_checked(out, path);
    return rows;
}

inline std::size_t write_tallies(std::span<const ArrivalRecord> records, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << kTalliesHeader << '\n';
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& x = records[r];
        out << r << ',' << x.replication_seed << ',' << x.emitted_total << ',' << x.absorbed_total << ','
            << x.degraded_total << ',' << x.alive_at_end << '\n';
    }
    detail::close_checked(out, path);
    return records.size();
}

/// Arrival times grouped by replication index, as stored by write_arrivals.
inline std::map<std::size_t, std::vector<double>> read_arrivals(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kArrivalsHeader)
        throw std::runtime_error("'" + path.string() + "': expected header '" + kArrivalsHeader + "'");
    std::map<std::size_t, std::vector<double>> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto parts = detail::split(line, ',');
        std::size_t rep = 0;
        double t = 0.0;
        bool ok = parts.size() == 2;
        if (ok) {
            auto r1 = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), rep);
            auto r2 = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), t);
            ok = r1.ec == std::errc{} && r2.ec == std::errc{};
        }
        if (!ok) throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) + ": malformed row");
        out[rep].push_back(t);
    }
    return out;
}

struct OutputFile {
    std::string path; // relative to the output directory
    std::size_t rows = 0;
};

struct PointReport {
    SweepPoint point;
    double half_life_s = 0.0;
    std::vector<OutputFile> files;
    double wall_clock_s = 0.0;
    std::uint64_t emitted = 0, absorbed = 0, degraded = 0, alive_at_end = 0;
    std::vector<std::tuple<double, double, double>> itr_by_ts; // ts, mean over replications, pooled
    std::optional<std::string> error;
};

struct RunManifest {
    std::string config_hash;
    std::uint64_t base_seed = 0;
    std::string tool_version{kToolVersion};
    OutputFile results;
    std::vector<PointReport> points;

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.error.has_value(); }));
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["tool_version"] = tool_version;
        j["config_hash"] = config_hash;
        j["base_seed"] = base_seed;
        j["schemas"] = {{"itr_results", kItrHeader},
                        {"arrivals", kArrivalsHeader},
                        {"tallies", kTalliesHeader},
                        {"signal", kSignalHeader}};
        j["results"] = {{"path", results.path}, {"rows", results.rows}};
        auto& pts = j["points"] = nlohmann::ordered_json::array();
        for (const auto& p : points) {
            nlohmann::ordered_json e;
            e["label"] = p.point.label();
            e["scenario"] = to_string(p.point.scenario);
            e["d_um"] = p.point.d_um;
            e["r_enz_um"] = p.point.r_enz_um;
            e["unit_half_life_s"] = p.point.unit_half_life_s;
            e["half_life_s"] = p.half_life_s;
            e["status"] = p.error ? "failed" : "ok";
            if (p.error) e["error"] = *p.error;
            e["wall_clock_s"] = p.wall_clock_s;
            e["tallies"] = {{"emitted", p.emitted}, {"absorbed", p.absorbed}, {"degraded", p.degraded},
                            {"alive_at_end", p.alive_at_end}};
            auto& files = e["files"] = nlohmann::ordered_json::array();
            for (const auto& f : p.files) files.push_back({{"path", f.path}, {"rows", f.rows}});
            auto& itr = e["itr"] = nlohmann::ordered_json::array();
            for (const auto& [ts, mean, pooled] : p.itr_by_ts)
                itr.push_back({{"ts_s", ts}, {"itr_mean", mean}, {"itr_pooled", pooled}});
            pts.push_back(std::move(e));
        }
        j["failures"] = failures();
        return j;
    }
};

inline std::size_t count_data_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing output '" + path.string() + "'");
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    return lines == 0 ? 0 : lines - 1;
}

/// Throws unless every file the manifest lists exists with its recorded row
/// count.
inline void verify_manifest(const RunManifest& m, const std::filesystem::path& out_dir) {
    auto check = [&](const OutputFile& f) {
        const auto rows = count_data_rows(out_dir / f.path);
        if (rows != f.rows)
            throw std::runtime_error("'" + f.path + "' has " + std::to_string(rows) + " rows, manifest says " +
                                     std::to_string(f.rows));
    };
    check(m.results);
    for (const auto& p : m.points)
        for (const auto& f : p.files) check(f);
}

struct RunOptions {
    std::filesystem::path out_dir = "out";
    unsigned workers = 0;
    bool quiet = true;
};

/// Runs every grid point, writes all tables, and returns the manifest (also
/// written as manifest.json). A failing point is recorded and skipped.
inline RunManifest execute_sweep(const SweepSpec& spec, const RunOptions& opt) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);

    RunManifest manifest;
    manifest.config_hash = config_hash(spec);
    manifest.base_seed = spec.fixed.base_seed;

    struct Row {
        std::tuple<int, double, double, double, double> key;
        std::string text;
    };
    std::vector<Row> rows;

    for (const auto& pt : expand_grid(spec)) {
        PointReport rep;
        rep.point = pt;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const SimulationConfig cfg = point_config(spec, pt);
            rep.half_life_s = pt.scenario == EnzymeHost::None ? 0.0 : cfg.half_life_s;
            const auto records = run_experiment(cfg, spec.replications, opt.workers);
            for (const auto& r : records) {
                rep.emitted += r.emitted_total;
                rep.absorbed += r.absorbed_total;
                rep.degraded += r.degraded_total;
                rep.alive_at_end += r.alive_at_end;
            }

            std::vector<Row> point_rows;
            for (double ts : spec.ts_values_s) {
                std::vector<double> per_rep;
                per_rep.reserve(records.size());
                for (const auto& r : records) per_rep.push_back(itr_from_record(r, ts, cfg.t_end_s));
                ItrSummary meta;
                meta.scenario = to_string(pt.scenario);
                meta.d_um = pt.d_um;
                meta.r_enz_um = pt.r_enz_um;
                meta.ts_s = ts;
                meta.t_end_s = cfg.t_end_s;
                meta.half_life_s = rep.half_life_s;
                const auto s = aggregate(per_rep, meta);
                rep.itr_by_ts.emplace_back(ts, s.itr_mean, pooled_itr(records, ts, cfg.t_end_s));
                point_rows.push_back(
                    {{static_cast<int>(pt.scenario), pt.d_um, pt.r_enz_um, ts, pt.unit_half_life_s},
                     s.scenario + ',' + fmt_num(s.d_um) + ',' + fmt_num(s.r_enz_um) + ',' + fmt_num(s.ts_s) + ',' +
                         fmt_num(s.half_life_s) + ',' + fmt_num(s.itr_mean) + ',' + fmt_num(s.itr_std) + ',' +
                         std::to_string(s.replications)});
            }

            const std::string label = pt.label();
            const std::string arrivals = "arrivals_" + label + ".csv";
            const std::string tallies = "tallies_" + label + ".csv";
            const std::string signal = "signal_" + label + ".csv";
            rep.files.push_back({arrivals, write_arrivals(records, opt.out_dir / arrivals)});
            rep.files.push_back({tallies, write_tallies(records, opt.out_dir / tallies)});
            if (spec.fixed.emission.every_period) {
                SimulationConfig periodic = cfg;
                periodic.emission = spec.fixed.emission;
                periodic.symbol_period_s = spec.fixed.symbol_period_s;
                const auto signal_records = run_experiment(periodic, spec.replications, opt.workers);
                rep.files.push_back(
                    {signal, emit_signal_table(signal_records, cfg.t_end_s, spec.bin_width_s, opt.out_dir / signal)});
            } else {
                rep.files.push_back({signal, emit_signal_table(records, cfg.t_end_s, spec.bin_width_s, opt.out_dir / signal)});
            }
            rows.insert(rows.end(), point_rows.begin(), point_rows.end());
        } catch (const std::exception& err) {
            rep.error = err.what();
            rep.files.clear();
            rep.itr_by_ts.clear();
        }
        rep.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!opt.quiet)
            std::cerr << pt.label() << (rep.error ? " FAILED: " + *rep.error : " ok") << " (" << rep.wall_clock_s
                      << " s)\n";
        manifest.points.push_back(std::move(rep));
    }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
    const fs::path results = opt.out_dir / "itr_results.csv";
    auto out = detail::open_out(results);
    out << kItrHeader << '\n';
    for (const auto& r : rows) out << r.text << '\n';
    detail::close_checked(out, results);
    manifest.results = {"itr_results.csv", rows.size()};

    auto mout = detail::open_out(opt.out_dir / "manifest.json");
    mout << manifest.to_json().dump(2) << '\n';
    detail::close_checked(mout, opt.out_dir / "manifest.json");
    return manifest;
}

} // namespace mcvd
