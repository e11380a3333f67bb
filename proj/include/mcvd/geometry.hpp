// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Spheres, containment, and the overlap volumes that size an enzyme shell
// placed around the receiver or the transmitter.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcvd {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

struct Sphere {
    Vec3 center;
    double radius = 1.0;
};

inline double sphere_volume(double radius) {
    return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

// Surface points count as inside.
inline bool contains(const Sphere& s, const Vec3& p) {
    return (p - s.center).norm2() <= s.radius * s.radius;
}

/// Receiver at the origin, transmitter on the +x axis. Both spheres share the
/// same radius; `surface_gap_um` is the distance between their surfaces.
///
/// `tx_solid` is false when the transmitter is modelled as a point source: the
/// sphere is then only a reference for the emit point and is neither a
/// reflector nor excluded from the enzyme region.
struct ChannelTopology {
    Sphere tx;
    Sphere rx;
    double surface_gap_um = 0.0;
    double center_distance_um = 0.0;
    bool tx_solid = true;

    double radius() const { return rx.radius; }

    /// Point on the transmitter surface closest to the receiver.
    Vec3 emit_point() const { return {center_distance_um - tx.radius, 0.0, 0.0}; }
};

inline ChannelTopology make_topology(double radius_um, double surface_gap_um, bool tx_solid = true) {
    if (!(radius_um > 0.0) || !std::isfinite(radius_um))
        throw std::invalid_argument("radius_um must be positive and finite");
    if (!(surface_gap_um >= 0.0) || !std::isfinite(surface_gap_um))
        throw std::invalid_argument("surface_gap_um must be non-negative and finite");
    ChannelTopology t;
    t.center_distance_um = surface_gap_um + 2.0 * radius_um;
    t.surface_gap_um = surface_gap_um;
    t.rx = Sphere{{0.0, 0.0, 0.0}, radius_um};
    t.tx = Sphere{{t.center_distance_um, 0.0, 0.0}, radius_um};
    t.tx_solid = tx_solid;
    return t;
}

enum class EnzymeHost { None, AroundRx, AroundTx, Everywhere };

inline std::string to_string(EnzymeHost h) {
    switch (h) {
    case EnzymeHost::None: return "no_enzyme";
    case EnzymeHost::AroundRx: return "around_rx";
    case EnzymeHost::AroundTx: return "around_tx";
    case EnzymeHost::Everywhere: return "everywhere";
    }
    return "unknown";
}

/// Volume of the intersection of two spheres whose centers are
/// `center_dist` apart.
inline double lens_volume(double r1, double r2, double center_dist) {
    if (!(r1 > 0.0) || !(r2 > 0.0) || !(center_dist > 0.0))
        throw std::invalid_argument("lens_volume: radii and center distance must be positive");
    const double dcc = center_dist;
    if (dcc >= r1 + r2) return 0.0;
    if (dcc <= std::abs(r1 - r2)) return sphere_volume(std::min(r1, r2));
    const double gap = r1 + r2 - dcc;
    return std::numbers::pi * gap * gap *
           (dcc * dcc + 2.0 * dcc * r2 - 3.0 * r2 * r2 + 2.0 * dcc * r1 + 6.0 * r1 * r2 - 3.0 * r1 * r1) /
           (12.0 * dcc);
}

/// Homocentric shell of thickness `r_enz_um` on the host sphere. The shell
/// never includes the transmitter or receiver interiors.
struct EnzymeRegion {
    EnzymeHost host = EnzymeHost::None;
    double r_enz_um = 0.0;
    double bounding_radius_um = 0.0;
    double total_volume_um3 = 0.0;

    bool limited() const { return host == EnzymeHost::AroundRx || host == EnzymeHost::AroundTx; }
};

inline const Sphere& host_sphere(const ChannelTopology& topo, EnzymeHost host) {
    return host == EnzymeHost::AroundTx ? topo.tx : topo.rx;
}

/// Part of the transmitter and receiver volume that lies inside the shell's
/// bounding sphere. The host is always fully inside; the far sphere is
/// disjoint, cut by a lens, or fully swallowed depending on r_enz.
inline double overlap_volume(const ChannelTopology& topo, EnzymeHost host, double r_enz_um) {
    if (host != EnzymeHost::AroundRx && host != EnzymeHost::AroundTx)
        throw std::invalid_argument("overlap_volume: host must be around_rx or around_tx");
    if (!(r_enz_um > 0.0)) throw std::invalid_argument("overlap_volume: r_enz must be positive");
    const double rr = topo.radius();
    const double d = topo.surface_gap_um;
    const double one = sphere_volume(rr);
    if (r_enz_um >= d + 2.0 * rr) return 2.0 * one;
    if (r_enz_um <= d) return one;
    return one + lens_volume(rr + r_enz_um, rr, topo.center_distance_um);
}

inline double overlap_volume(const ChannelTopology& topo, const EnzymeRegion& region) {
    return overlap_volume(topo, region.host, region.r_enz_um);
}

inline double total_enzyme_volume(const ChannelTopology& topo, EnzymeHost host, double r_enz_um) {
    const double v_lp = overlap_volume(topo, host, r_enz_um);
    return sphere_volume(topo.radius() + r_enz_um) - v_lp;
}

inline double total_enzyme_volume(const ChannelTopology& topo, const EnzymeRegion& region) {
    return total_enzyme_volume(topo, region.host, region.r_enz_um);
}

inline EnzymeRegion make_region(const ChannelTopology& topo, EnzymeHost host, double r_enz_um = 0.0) {
    EnzymeRegion r;
    r.host = host;
    switch (host) {
    case EnzymeHost::None:
        break;
    case EnzymeHost::Everywhere:
        r.bounding_radius_um = std::numeric_limits<double>::infinity();
        r.total_volume_um3 = std::numeric_limits<double>::infinity();
        break;
    case EnzymeHost::AroundRx:
    case EnzymeHost::AroundTx:
        if (!(r_enz_um > 0.0) || !std::isfinite(r_enz_um))
            throw std::invalid_argument("r_enz_um must be positive and finite");
        r.r_enz_um = r_enz_um;
        r.bounding_radius_um = host_sphere(topo, host).radius + r_enz_um;
        r.total_volume_um3 = total_enzyme_volume(topo, host, r_enz_um);
        break;
    }
    return r;
}

inline bool in_enzyme_region(const ChannelTopology& topo, const EnzymeRegion& region, const Vec3& p) {
    if (region.host == EnzymeHost::None) return false;
    if (contains(topo.rx, p)) return false;
    if (topo.tx_solid && contains(topo.tx, p)) return false;
    if (region.host == EnzymeHost::Everywhere) return true;
    const Sphere bound{host_sphere(topo, region.host).center, region.bounding_radius_um};
    return contains(bound, p);
}

} // namespace mcvd
