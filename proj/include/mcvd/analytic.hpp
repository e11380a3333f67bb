// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form first-hitting models for a point transmitter and an absorbing
// spherical receiver, with and without first-order enzymatic degradation.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "mcvd/geometry.hpp"

namespace mcvd {

struct ChannelParams {
    double diffusion_um2_per_s = 100.0;
    double distance_um = 4.0; // surface gap between point source and receiver
    double radius_um = 5.0;

    void validate() const {
        if (!(diffusion_um2_per_s > 0.0) || !(distance_um > 0.0) || !(radius_um > 0.0))
            throw std::invalid_argument("channel parameters must be positive");
    }

    /// Probability of ever hitting the receiver.
    double capture_probability() const { return radius_um / (distance_um + radius_um); }
};

/// First-order decay of the messenger molecule, parametrised by half-life.
struct EnzymeKinetics {
    double degradation_rate_per_s = 0.0;
    double half_life_s = std::numeric_limits<double>::infinity();
    double unit_half_life_s = std::numeric_limits<double>::infinity();

    static EnzymeKinetics from_half_life(double half_life_s, double unit_half_life_s) {
        if (!(half_life_s > 0.0) || !(unit_half_life_s > 0.0))
            throw std::invalid_argument("half-lives must be positive");
        return {std::numbers::ln2 / half_life_s, half_life_s, unit_half_life_s};
    }
    static EnzymeKinetics from_half_life(double half_life_s) { return from_half_life(half_life_s, half_life_s); }
};

inline double hitting_rate(const ChannelParams& p, double t_s) {
    if (!(t_s > 0.0)) throw std::invalid_argument("hitting_rate: t must be positive");
    const double D = p.diffusion_um2_per_s;
    const double d = p.distance_um;
    const double exponent = -d * d / (4.0 * D * t_s);
    return p.capture_probability() * d / std::sqrt(4.0 * std::numbers::pi * D * t_s * t_s * t_s) *
           std::exp(exponent);
}

/// Hitting density conditioned on survival of degradation with rate lambda.
inline double hitting_rate_with_enzyme(const ChannelParams& p, double lambda_per_s, double t_s) {
    return hitting_rate(p, t_s) * std::exp(-lambda_per_s * t_s);
}

inline double cumulative_fraction(const ChannelParams& p, double t_s) {
    if (t_s < 0.0 || std::isnan(t_s)) throw std::invalid_argument("cumulative_fraction: t must be >= 0");
    if (t_s == 0.0) return 0.0;
    return p.capture_probability() * std::erfc(p.distance_um / std::sqrt(4.0 * p.diffusion_um2_per_s * t_s));
}

inline double cumulative_fraction_with_enzyme(const ChannelParams& p, double lambda_per_s, double t_s) {
    if (lambda_per_s < 0.0 || std::isnan(lambda_per_s))
        throw std::invalid_argument("cumulative_fraction_with_enzyme: lambda must be >= 0");
    if (t_s < 0.0 || std::isnan(t_s))
        throw std::invalid_argument("cumulative_fraction_with_enzyme: t must be >= 0");
    if (t_s == 0.0) return 0.0;
    const double D = p.diffusion_um2_per_s;
    const double d = p.distance_um;
    const double a = d * std::sqrt(lambda_per_s / D);
    const double base = d / std::sqrt(4.0 * D * t_s);
    const double shift = std::sqrt(lambda_per_s * t_s);
    // exp(+a) * erfc(base + shift) is evaluated in log space so that the
    // underflowing erfc never meets an overflowing exponential.
    const double lo = std::exp(-a) * std::erfc(base - shift);
    const double hi_erfc = std::erfc(base + shift);
    const double hi = hi_erfc > 0.0 ? std::exp(a + std::log(hi_erfc)) : 0.0;
    return 0.5 * p.capture_probability() * (lo + hi);
}

inline double cumulative_fraction_with_enzyme(const ChannelParams& p, const EnzymeKinetics& k, double t_s) {
    return cumulative_fraction_with_enzyme(p, k.degradation_rate_per_s, t_s);
}

/// Half-life that keeps the enzyme count fixed when the shell grows from the
/// 1 um reference thickness to `region.r_enz_um`.
inline double effective_half_life(double unit_half_life_s, const ChannelTopology& topo, const EnzymeRegion& region) {
    if (!(unit_half_life_s > 0.0)) throw std::invalid_argument("effective_half_life: unit half-life must be positive");
    if (!region.limited())
        throw std::invalid_argument("effective_half_life: region must be around_rx or around_tx");
    const double v = total_enzyme_volume(topo, region.host, region.r_enz_um);
    const double v_unit = total_enzyme_volume(topo, region.host, 1.0);
    return unit_half_life_s * v / v_unit;
}

inline double survival_probability_per_step(double half_life_s, double dt_s) {
    if (!(half_life_s > 0.0) || !(dt_s > 0.0))
        throw std::invalid_argument("survival_probability_per_step: inputs must be positive");
    return std::exp2(-dt_s / half_life_s);
}

/// Fraction of the arrivals up to t_end that land after t_s.
inline double analytic_itr(const ChannelParams& p, const std::optional<EnzymeKinetics>& k, double ts_s, double t_end_s) {
    if (!(ts_s > 0.0) || !(ts_s < t_end_s)) throw std::invalid_argument("analytic_itr: need 0 < t_s < t_end");
    auto F = [&](double t) {
        return k ? cumulative_fraction_with_enzyme(p, *k, t) : cumulative_fraction(p, t);
    };
    const double total = F(t_end_s);
    if (!(total > 0.0)) throw std::domain_error("analytic_itr: no arrivals before t_end");
    return (total - F(ts_s)) / total;
}

} // namespace mcvd
