// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations used to check the library. None of these call the
// closed forms they are compared against.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace mcvd::oracle {

/// erfc from the Maclaurin series of erf for |x| < 2.5 and a Lentz continued
/// fraction beyond.
inline double erfc_reference(double x) {
    if (x < 0.0) return 2.0 - erfc_reference(-x);
    if (x < 2.5) {
        long double sum = 0.0L;
        long double term = x; // x^(2n+1) (-1)^n / n!
        for (int n = 0; n < 200; ++n) {
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
            term *= -static_cast<long double>(x) * x / (n + 1);
        }
        return static_cast<double>(1.0L - 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const long double xl = x;
    const long double tiny = 1e-300L;
    long double f = xl, c = xl, d = 0.0L;
    for (int n = 1; n < 500; ++n) {
        const long double a = n / 2.0L;
        d = xl + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = xl + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-20L) break;
    }
    return static_cast<double>(std::exp(-xl * xl) / std::sqrt(std::numbers::pi_v<long double>) / f);
}

/// Hitting density of a point source at surface gap d from an absorbing
/// sphere, thinned by first-order decay at rate lambda.
inline double hitting_density(double D, double d, double r_r, double lambda, double t) {
    if (t <= 0.0) return 0.0;
    return r_r / (d + r_r) * d / std::sqrt(4.0 * std::numbers::pi * D * t * t * t) *
           std::exp(-d * d / (4.0 * D * t) - lambda * t);
}

/// Adaptive Gauss-Kronrod integral of hitting_density over (0, t].
inline double received_fraction_quadrature(double D, double d, double r_r, double lambda, double t,
                                           double tol = 1e-12) {
    auto f = [&](double s) { return hitting_density(D, d, r_r, lambda, s); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, t, 30, tol);
}

struct VolumeEstimate {
    double volume = 0.0;
    double standard_error = 0.0;
};

/// Volume of {|p - c1| <= r1 and |p - c2| <= r2} with centers on the x axis
/// `center_dist` apart, by rejection sampling in the smaller sphere's box.
inline VolumeEstimate lens_volume_mc(double r1, double r2, double center_dist, std::uint64_t samples,
                                     std::uint64_t seed) {
    boost::random::mt19937_64 rng(seed);
    const bool first_small = r1 <= r2;
    const double rs = first_small ? r1 : r2;
    const double cx = first_small ? 0.0 : center_dist;
    boost::random::uniform_real_distribution<double> ux(cx - rs, cx + rs), uyz(-rs, rs);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double x = ux(rng), y = uyz(rng), z = uyz(rng);
        const double a = x * x + y * y + z * z;
        const double b = (x - center_dist) * (x - center_dist) + y * y + z * z;
        if (a <= r1 * r1 && b <= r2 * r2) ++hits;
    }
    const double box = 8.0 * rs * rs * rs;
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// Volume of the shell of thickness r_enz around the host sphere (centered at
/// the origin) minus the parts inside the host and inside the second sphere of
/// radius r_r at distance d + 2 r_r.
inline VolumeEstimate enzyme_shell_volume_mc(double r_r, double d, double r_enz, std::uint64_t samples,
                                             std::uint64_t seed) {
    boost::random::mt19937_64 rng(seed);
    const double R = r_r + r_enz;
    const double dc = d + 2.0 * r_r;
    boost::random::uniform_real_distribution<double> u(-R, R);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double x = u(rng), y = u(rng), z = u(rng);
        const double a = x * x + y * y + z * z;
        const double b = (x - dc) * (x - dc) + y * y + z * z;
        if (a <= R * R && a > r_r * r_r && b > r_r * r_r) ++hits;
    }
    const double box = 8.0 * R * R * R;
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// Standard error of a fraction p estimated from n Bernoulli trials.
inline double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

} // namespace mcvd::oracle
