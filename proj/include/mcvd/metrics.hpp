// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Received-signal histograms and interference-to-total-received (ITR) ratios
// computed from arrival records.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcvd/simulation.hpp"

namespace mcvd {

/// Arrival times are integer multiples of dt, so they often sit exactly on a
/// bin edge or on t_s. Times within this many seconds of an edge are treated
/// as lying on it.
inline constexpr double kTimeSnap_s = 1e-9;

struct BinnedSignal {
    double bin_width_s = 0.0;
    double t_end_s = 0.0;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }
};

inline std::size_t bin_count(double t_end_s, double bin_width_s) {
    return static_cast<std::size_t>(std::ceil(t_end_s / bin_width_s - kTimeSnap_s / bin_width_s));
}

/// counts[i] holds arrivals in [i * w, (i + 1) * w). Arrivals at exactly
/// t_end go into the last bin.
inline BinnedSignal bin_arrivals(std::span<const double> times_s, double t_end_s, double bin_width_s) {
    if (!(bin_width_s > 0.0)) throw std::invalid_argument("bin_arrivals: bin width must be positive");
    BinnedSignal s;
    s.bin_width_s = bin_width_s;
    s.t_end_s = t_end_s;
    s.counts.assign(std::max<std::size_t>(1, bin_count(t_end_s, bin_width_s)), 0);
    for (double t : times_s) {
        auto i = static_cast<std::size_t>(std::max(0.0, std::floor((t + kTimeSnap_s) / bin_width_s)));
        ++s.counts[std::min(i, s.counts.size() - 1)];
    }
    return s;
}

inline BinnedSignal bin_arrivals(const ArrivalRecord& record, double t_end_s, double bin_width_s) {
    return bin_arrivals(record.absorption_times_s, t_end_s, bin_width_s);
}

/// Arrivals in (t_s, t_end] over arrivals in (0, t_end]. An arrival at t_s
/// counts as desired signal.
inline double itr_from_times(std::span<const double> times_s, double ts_s, double t_end_s) {
    if (!(ts_s > 0.0) || !(ts_s < t_end_s)) throw std::invalid_argument("itr: need 0 < t_s < t_end");
    std::uint64_t total = 0;
    std::uint64_t late = 0;
    for (double t : times_s) {
        if (t <= 0.0 || t > t_end_s + kTimeSnap_s) continue;
        ++total;
        if (t > ts_s + kTimeSnap_s) ++late;
    }
    if (total == 0) throw std::domain_error("itr: undefined, no molecules received before t_end");
    return static_cast<double>(late) / static_cast<double>(total);
}

inline double itr_from_record(const ArrivalRecord& record, double ts_s, double t_end_s) {
    if (record.absorbed_total == 0) throw std::domain_error("itr: undefined, record has no absorbed molecules");
    return itr_from_times(record.absorption_times_s, ts_s, t_end_s);
}

/// ITR over the arrivals of all records taken together.
inline double pooled_itr(std::span<const ArrivalRecord> records, double ts_s, double t_end_s) {
    std::vector<double> all;
    for (const auto& r : records) all.insert(all.end(), r.absorption_times_s.begin(), r.absorption_times_s.end());
    return itr_from_times(all, ts_s, t_end_s);
}

struct SampleStats {
    double mean = 0.0;
    double stddev = 0.0; // n - 1 denominator; 0 for a single sample
    std::size_t n = 0;
};

inline SampleStats sample_stats(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("sample_stats: empty sample");
    SampleStats s;
    s.n = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

struct ItrSummary {
    std::string scenario;
    double d_um = 0.0;
    double r_enz_um = 0.0;
    double ts_s = 0.0;
    double t_end_s = 0.0;
    double half_life_s = 0.0;
    double itr_mean = 0.0;
    double itr_std = 0.0;
    std::size_t replications = 0;
    bool single_replication = false; // std is not meaningful
};

/// Mean and sample std of per-replication ITRs. `meta` supplies the point
/// coordinates; its statistics fields are overwritten.
inline ItrSummary aggregate(std::span<const double> per_replication_itr, ItrSummary meta) {
    if (per_replication_itr.empty()) throw std::invalid_argument("aggregate: no replications");
    const auto s = sample_stats(per_replication_itr);
    meta.itr_mean = s.mean;
    meta.itr_std = s.stddev;
    meta.replications = s.n;
    meta.single_replication = s.n == 1;
    return meta;
}

/// Per-bin mean and std of received counts across replications.
struct SignalTable {
    double bin_width_s = 0.0;
    std::vector<double> mean;
    std::vector<double> stddev;
};

inline SignalTable mean_signal(std::span<const ArrivalRecord> records, double t_end_s, double bin_width_s) {
    if (records.empty()) throw std::invalid_argument("mean_signal: no records");
    std::vector<BinnedSignal> bins;
    bins.reserve(records.size());
    for (const auto& r : records) bins.push_back(bin_arrivals(r, t_end_s, bin_width_s));
    SignalTable table;
    table.bin_width_s = bin_width_s;
    const std::size_t n_bins = bins.front().counts.size();
    table.mean.resize(n_bins);
    table.stddev.resize(n_bins);
    std::vector<double> column(bins.size());
    for (std::size_t i = 0; i < n_bins; ++i) {
        for (std::size_t r = 0; r < bins.size(); ++r) column[r] = static_cast<double>(bins[r].counts[i]);
        const auto s = sample_stats(column);
        table.mean[i] = s.mean;
        table.stddev[i] = s.stddev;
    }
    return table;
}

} // namespace mcvd
