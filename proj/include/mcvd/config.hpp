// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Sweep configuration: a flat `key = value` document with units in the key
// names. Grammar:
//
//   document := { line }
//   line     := [ key "=" value ] [ "#" comment ]
//   value    := item { "," item }
//   item     := number | word | start ":" stop ":" step   (inclusive range)
//
// Keys are unique. Unknown keys are rejected. See README.md for the key list
// and defaults.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mcvd/simulation.hpp"

namespace mcvd {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct SweepSpec {
    std::vector<EnzymeHost> scenarios;
    std::vector<double> d_values_um{4.0};
    std::vector<double> r_enz_values_um{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    std::vector<double> ts_values_s{1.0};
    std::vector<double> unit_half_life_values_s{0.002};
    double diffusion_um2_per_s = 100.0;
    double radius_um = 5.0;
    std::uint64_t replications = 50;
    double bin_width_s = 0.001;
    SimulationConfig fixed; // dt, t_end, molecules, emission, tx geometry, seed
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_number(std::string_view s, const std::string& key, int line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty())
        throw ConfigError(key + ": expected a number, got '" + std::string(s) + "'", line);
    return v;
}

struct Entry {
    std::string value;
    int line = 0;
};

} // namespace detail

inline EnzymeHost parse_scenario(std::string_view s) {
    for (auto h : {EnzymeHost::None, EnzymeHost::AroundRx, EnzymeHost::AroundTx, EnzymeHost::Everywhere})
        if (to_string(h) == s) return h;
    throw std::invalid_argument("unknown scenario '" + std::string(s) + "'");
}

inline SweepSpec parse_config_text(std::string_view text) {
    std::map<std::string, detail::Entry> entries;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string value{detail::trim(line.substr(eq + 1))};
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.empty()) throw ConfigError(key + ": empty value", line_no);
        if (!entries.emplace(key, detail::Entry{value, line_no}).second)
            throw ConfigError("duplicate key '" + key + "'", line_no);
    }

    auto take = [&](const std::string& key) -> const detail::Entry* {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto number_list = [&](const std::string& key, std::vector<double>& out) {
        const auto* e = take(key);
        if (!e) return;
        out.clear();
        for (auto item : detail::split(e->value, ',')) {
            if (item.find(':') != std::string_view::npos) {
                const auto parts = detail::split(item, ':');
                if (parts.size() != 3) throw ConfigError(key + ": range must be start:stop:step", e->line);
                const double a = detail::parse_number(parts[0], key, e->line);
                const double b = detail::parse_number(parts[1], key, e->line);
                const double step = detail::parse_number(parts[2], key, e->line);
                if (!(step > 0.0) || b < a) throw ConfigError(key + ": range needs step > 0 and stop >= start", e->line);
                for (std::size_t i = 0;; ++i) {
                    const double v = a + static_cast<double>(i) * step;
                    if (v > b + 1e-9 * step) break;
                    out.push_back(v);
                }
            } else {
                out.push_back(detail::parse_number(item, key, e->line));
            }
        }
        for (double v : out)
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError(key + ": values must be positive and finite", e->line);
    };
    auto scalar = [&](const std::string& key, double& out) {
        if (const auto* e = take(key)) {
            out = detail::parse_number(e->value, key, e->line);
            if (!(out > 0.0) || !std::isfinite(out)) throw ConfigError(key + ": must be positive and finite", e->line);
        }
    };
    auto count = [&](const std::string& key, std::uint64_t& out, bool allow_zero) {
        if (const auto* e = take(key)) {
            std::uint64_t v = 0;
            const auto* end = e->value.data() + e->value.size();
            auto [p, ec] = std::from_chars(e->value.data(), end, v);
            if (ec != std::errc{} || p != end) throw ConfigError(key + ": expected a non-negative integer", e->line);
            if (!allow_zero && v == 0) throw ConfigError(key + ": must be at least 1", e->line);
            out = v;
        }
    };

    static const std::vector<std::string> known = {
        "scenarios",  "distance_um",    "r_enz_um",        "ts_s",    "unit_half_life_s", "diffusion_um2_per_s",
        "radius_um",  "molecules",      "dt_s",            "t_end_s", "replications",     "tx_geometry",
        "emission",   "symbol_period_s", "seed",           "bin_width_s"};
    for (const auto& [key, e] : entries)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + key + "'", e.line);

    SweepSpec spec;
    const auto* sc = take("scenarios");
    if (!sc) throw ConfigError("missing required key 'scenarios'");
    for (auto item : detail::split(sc->value, ',')) {
        if (item.empty()) continue;
        try {
            spec.scenarios.push_back(parse_scenario(item));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("scenarios: ") + err.what(), sc->line);
        }
    }
    if (spec.scenarios.empty()) throw ConfigError("scenarios: list must not be empty", sc->line);

    number_list("distance_um", spec.d_values_um);
    number_list("r_enz_um", spec.r_enz_values_um);
    number_list("ts_s", spec.ts_values_s);
    number_list("unit_half_life_s", spec.unit_half_life_values_s);
    scalar("diffusion_um2_per_s", spec.diffusion_um2_per_s);
    scalar("radius_um", spec.radius_um);
    scalar("dt_s", spec.fixed.dt_s);
    scalar("t_end_s", spec.fixed.t_end_s);
    scalar("bin_width_s", spec.bin_width_s);
    count("molecules", spec.fixed.molecules_per_emission, false);
    count("replications", spec.replications, false);
    count("seed", spec.fixed.base_seed, true);

    spec.fixed.symbol_period_s = spec.ts_values_s.front();
    scalar("symbol_period_s", spec.fixed.symbol_period_s);

    if (const auto* e = take("tx_geometry")) {
        if (e->value == "reflecting") spec.fixed.tx_geometry = TxGeometry::ReflectingSphere;
        else if (e->value == "point") spec.fixed.tx_geometry = TxGeometry::PointSource;
        else throw ConfigError("tx_geometry: expected 'reflecting' or 'point'", e->line);
    }
    if (const auto* e = take("emission")) {
        if (e->value == "single") {
            spec.fixed.emission = EmissionSchedule::single_shot();
        } else if (e->value.starts_with("bits:")) {
            std::vector<bool> bits;
            for (char c : std::string_view(e->value).substr(5)) {
                if (c != '0' && c != '1') throw ConfigError("emission: bits must be 0 or 1", e->line);
                bits.push_back(c == '1');
            }
            if (bits.empty()) throw ConfigError("emission: empty bit sequence", e->line);
            spec.fixed.emission = EmissionSchedule::periodic(std::move(bits));
        } else {
            throw ConfigError("emission: expected 'single' or 'bits:<01...>'", e->line);
        }
    }

    for (double ts : spec.ts_values_s)
        if (!(ts < spec.fixed.t_end_s)) throw ConfigError("ts_s: every symbol period must be below t_end_s");
    if (!(spec.bin_width_s <= spec.fixed.t_end_s)) throw ConfigError("bin_width_s: must not exceed t_end_s");

    // Representative point to check the time discretisation and geometry.
    try {
        const ChannelParams ch{spec.diffusion_um2_per_s, spec.d_values_um.front(), spec.radius_um};
        SimulationConfig probe = spec.fixed;
        probe.channel = ch;
        probe.topo = make_topology(ch.radius_um, ch.distance_um, spec.fixed.tx_geometry == TxGeometry::ReflectingSphere);
        probe.validate();
        for (double ts : spec.ts_values_s)
            if (!(ts >= 1000.0 * spec.fixed.dt_s)) throw std::invalid_argument("ts_s must be at least 1000 * dt_s");
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    return spec;
}

inline SweepSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace mcvd
