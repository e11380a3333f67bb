// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Brownian-dynamics Monte Carlo of messenger molecules between a reflecting
// transmitter and an absorbing receiver, with degradation inside an enzyme
// region.
//
// Every replication owns its random engine, seeded from
// (base_seed, replication index). Molecules inside one replication are
// updated serially in a fixed order, so a record depends only on the config
// and its index; replications are distributed over worker threads and the
// returned list is the same for any worker count.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "mcvd/analytic.hpp"
#include "mcvd/geometry.hpp"
#include "mcvd/parallel.hpp"
#include "mcvd/rng.hpp"

namespace mcvd {

enum class TxGeometry { ReflectingSphere, PointSource };

struct EmissionSchedule {
    bool every_period = false;
    std::vector<bool> bits; // used when every_period; bit j is the symbol sent at j * t_s

    static EmissionSchedule single_shot() { return {}; }
    static EmissionSchedule periodic(std::vector<bool> bits) { return {true, std::move(bits)}; }
    bool operator==(const EmissionSchedule&) const = default;
};

struct SimulationConfig {
    ChannelParams channel;
    ChannelTopology topo;
    EnzymeRegion region;
    double half_life_s = std::numeric_limits<double>::infinity(); // inside the region
    double dt_s = 1e-5;
    double t_end_s = 2.0;
    std::uint64_t molecules_per_emission = 50000;
    double symbol_period_s = 1.0;
    EmissionSchedule emission;
    TxGeometry tx_geometry = TxGeometry::ReflectingSphere;
    std::uint64_t base_seed = 1;

    std::uint64_t step_count() const { return static_cast<std::uint64_t>(std::llround(t_end_s / dt_s)); }

    void validate() const {
        channel.validate();
        if (!(dt_s > 0.0) || !(t_end_s > 0.0)) throw std::invalid_argument("dt_s and t_end_s must be positive");
        if (std::abs(static_cast<double>(step_count()) * dt_s - t_end_s) > 1e-9 * t_end_s)
            throw std::invalid_argument("t_end_s must be an integer multiple of dt_s");
        if (!(symbol_period_s >= 1000.0 * dt_s))
            throw std::invalid_argument("symbol_period_s must be at least 1000 * dt_s");
        if (topo.radius() != channel.radius_um || topo.surface_gap_um != channel.distance_um)
            throw std::invalid_argument("topology does not match channel parameters");
        if (topo.tx_solid != (tx_geometry == TxGeometry::ReflectingSphere))
            throw std::invalid_argument("topology tx_solid must match tx_geometry");
        if (region.host != EnzymeHost::None && !(half_life_s > 0.0))
            throw std::invalid_argument("half_life_s must be positive when enzymes are present");
        if (emission.every_period && emission.bits.empty())
            throw std::invalid_argument("periodic emission needs a non-empty bit sequence");
    }
};

/// Builds a config for one scenario with the half-life scaled to keep the
/// enzyme count fixed. For enzymes everywhere the unit half-life is used
/// as is.
inline SimulationConfig make_config(const ChannelParams& channel, EnzymeHost host, double r_enz_um,
                                    double unit_half_life_s, TxGeometry tx = TxGeometry::ReflectingSphere) {
    SimulationConfig cfg;
    cfg.channel = channel;
    cfg.tx_geometry = tx;
    cfg.topo = make_topology(channel.radius_um, channel.distance_um, tx == TxGeometry::ReflectingSphere);
    cfg.region = make_region(cfg.topo, host, r_enz_um);
    if (host == EnzymeHost::Everywhere) {
        cfg.half_life_s = unit_half_life_s;
    } else if (cfg.region.limited()) {
        cfg.half_life_s = effective_half_life(unit_half_life_s, cfg.topo, cfg.region);
    }
    return cfg;
}

struct MoleculeState {
    Vec3 position;
    Vec3 previous_position;
    bool alive = true;
};

struct ArrivalRecord {
    std::vector<double> absorption_times_s;
    std::uint64_t emitted_total = 0;
    std::uint64_t absorbed_total = 0;
    std::uint64_t degraded_total = 0;
    std::uint64_t alive_at_end = 0;
    std::uint64_t replication_seed = 0;

    bool conserved() const { return emitted_total == absorbed_total + degraded_total + alive_at_end; }
    bool operator==(const ArrivalRecord&) const = default;
};

template <typename Rng>
Vec3 diffusion_step(const MoleculeState& state, double diffusion_um2_per_s, double dt_s, Rng& rng) {
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(2.0 * diffusion_um2_per_s * dt_s));
    const double dx = normal(rng);
    const double dy = normal(rng);
    const double dz = normal(rng);
    return state.position + Vec3{dx, dy, dz};
}

/// One dt for every alive molecule: move, reflect off the transmitter,
/// absorb at the receiver, then degrade inside the enzyme region. Dead
/// molecules are dropped from `molecules`; survivors keep their order.
template <typename Rng>
void advance_step(std::vector<MoleculeState>& molecules, const SimulationConfig& cfg, double survival_p, Rng& rng,
                  ArrivalRecord& record, double t_now) {
    const bool reflect = cfg.tx_geometry == TxGeometry::ReflectingSphere;
    const bool degrade = cfg.region.host != EnzymeHost::None && survival_p < 1.0;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (auto& m : molecules) {
        if (!m.alive) continue;
        m.previous_position = m.position;
        const Vec3 proposed = diffusion_step(m, cfg.channel.diffusion_um2_per_s, cfg.dt_s, rng);
        if (!(reflect && contains(cfg.topo.tx, proposed))) m.position = proposed;
        if (contains(cfg.topo.rx, m.position)) {
            record.absorption_times_s.push_back(t_now);
            ++record.absorbed_total;
            m.alive = false;
        } else if (degrade && in_enzyme_region(cfg.topo, cfg.region, m.position)) {
            if (uniform(rng) >= survival_p) {
                ++record.degraded_total;
                m.alive = false;
            }
        }
    }
    std::erase_if(molecules, [](const MoleculeState& m) { return !m.alive; });
    record.alive_at_end = molecules.size();
}

namespace detail {

inline std::vector<std::uint64_t> emission_steps(const SimulationConfig& cfg) {
    if (!cfg.emission.every_period) return {0};
    std::vector<std::uint64_t> steps;
    const auto n_steps = cfg.step_count();
    for (std::size_t j = 0; j < cfg.emission.bits.size(); ++j) {
        if (!cfg.emission.bits[j]) continue;
        const auto step = static_cast<std::uint64_t>(std::llround(static_cast<double>(j) * cfg.symbol_period_s / cfg.dt_s));
        if (step < n_steps) steps.push_back(step);
    }
    return steps;
}

} // namespace detail

struct NoObserver {
    void operator()(std::uint64_t, double, const std::vector<MoleculeState>&, const ArrivalRecord&) const {}
};

/// Runs one replication to t_end. `observer(step, t, molecules, record)` is
/// called after every completed step.
template <typename Observer = NoObserver>
ArrivalRecord run_replication(const SimulationConfig& cfg, std::uint64_t replication_index, Observer&& observer = {}) {
    cfg.validate();
    ArrivalRecord record;
    record.replication_seed = replication_seed(cfg.base_seed, replication_index);
    if (cfg.molecules_per_emission == 0) return record;

    Engine rng(record.replication_seed);
    const double survival_p =
        cfg.region.host == EnzymeHost::None ? 1.0 : survival_probability_per_step(cfg.half_life_s, cfg.dt_s);
    const auto emissions = detail::emission_steps(cfg);
    const auto n_steps = cfg.step_count();
    const Vec3 emit = cfg.topo.emit_point();

    std::vector<MoleculeState> molecules;
    molecules.reserve(cfg.molecules_per_emission);
    auto next_emission = emissions.begin();
    for (std::uint64_t step = 0; step < n_steps; ++step) {
        if (next_emission != emissions.end() && *next_emission == step) {
            molecules.insert(molecules.end(), cfg.molecules_per_emission, MoleculeState{emit, emit, true});
            record.emitted_total += cfg.molecules_per_emission;
            ++next_emission;
        }
        if (molecules.empty() && next_emission == emissions.end()) break;
        const double t_now = static_cast<double>(step + 1) * cfg.dt_s;
        advance_step(molecules, cfg, survival_p, rng, record, t_now);
        observer(step + 1, t_now, molecules, record);
    }
    record.alive_at_end = molecules.size();
    return record;
}

/// One record per replication; the result does not depend on `workers`
/// (0 means all hardware threads).
inline std::vector<ArrivalRecord> run_experiment(const SimulationConfig& cfg, std::uint64_t replications,
                                                 unsigned workers = 0) {
    if (replications < 1) throw std::invalid_argument("run_experiment: replications must be >= 1");
    cfg.validate();
    std::vector<ArrivalRecord> records(replications);
    parallel_for(replications, workers, [&](std::size_t i) { records[i] = run_replication(cfg, i); });
    return records;
}

} // namespace mcvd
