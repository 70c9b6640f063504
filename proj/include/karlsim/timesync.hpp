#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "topology.hpp"

/* Time synchronization over the vehicle network.
 *
 * The grandmaster and the PTP-capable devices run two-way end-to-end
 * delay exchanges (t1..t4) once per sync interval; each device disciplines
 * its clock with a PI servo on the estimated offset. The switches do not
 * participate (no transparent clocking), so their store-and-forward
 * residence time appears as per-hop noise in the exchange, and any
 * direction-dependent path delay appears as a bias of half the asymmetry
 * that no end-to-end estimator can observe.
 *
 * Host-timestamped devices inherit their host's clock; NTP-only devices
 * coarse-sync against the hpc at a slow poll interval. */

namespace karlsim::timesync {

struct ExchangeTimestamps {
    double t1_s = 0;  // sync departure, master clock
    double t2_s = 0;  // sync arrival, device clock
    double t3_s = 0;  // delay-req departure, device clock
    double t4_s = 0;  // delay-req arrival, master clock

    friend bool operator==(const ExchangeTimestamps&, const ExchangeTimestamps&) = default;
};

/* Standard end-to-end estimates. For true offset o and one-way delays
 * d_f (master to device) and d_r (back), the offset estimate comes out as
 * o + (d_f - d_r) / 2: exact for symmetric delays, biased by half the
 * asymmetry otherwise. */
inline double estimate_offset_s(const ExchangeTimestamps& e) {
    return ((e.t2_s - e.t1_s) - (e.t4_s - e.t3_s)) / 2.0;
}

inline double estimate_delay_s(const ExchangeTimestamps& e) {
    return ((e.t2_s - e.t1_s) + (e.t4_s - e.t3_s)) / 2.0;
}

/* Device clock as seen by the servo: current offset from the reference and
 * net drift (oscillator plus accumulated frequency correction). */
struct ServoClock {
    double offset_s = 0;
    double drift_ppm = 0;

    friend bool operator==(const ServoClock&, const ServoClock&) = default;
};

/* One PI update per exchange: the integral term adjusts the clock
 * frequency, the proportional term steps the phase, then the clock runs
 * for dt until the next exchange. With kp + ki = 1 the estimate is fully
 * consumed each round; the closed loop converges (|lambda| = sqrt(ki))
 * and the integrator absorbs constant oscillator drift. */
inline ServoClock servo_step(const ServoClock& c, double estimated_offset_s, double dt_s,
                             double kp = 0.7, double ki = 0.3) {
    if (!(dt_s > 0)) throw std::invalid_argument("servo_step: dt must be positive");
    ServoClock n;
    n.drift_ppm = c.drift_ppm - ki * estimated_offset_s / dt_s * 1e6;
    n.offset_s = c.offset_s - kp * estimated_offset_s + n.drift_ppm * 1e-6 * dt_s;
    return n;
}

struct SyncConfig {
    double sync_interval_s = 1.0;
    double kp = 0.7;
    double ki = 0.3;
    double timestamp_noise_s = 50e-9;    // sigma per hardware timestamp
    double residence_jitter_s = 0.2e-6;  // uniform [0, x] per traversed switch
    double granularity_s = 8e-9;         // timestamp quantization step
    double drift_ppm_range = 5.0;        // initial oscillator drift, uniform +-x
    double init_offset_s = 50e-6;        // initial clock offset, uniform +-x
    double ntp_noise_s = 200e-6;         // sigma per NTP poll
    double ntp_poll_s = 16.0;

    /* Noise sources off, seeded initial offsets kept so convergence is
     * still exercised. */
    static SyncConfig zero_noise() {
        SyncConfig c;
        c.timestamp_noise_s = 0;
        c.residence_jitter_s = 0;
        c.granularity_s = 0;
        c.drift_ppm_range = 0;
        c.ntp_noise_s = 0;
        return c;
    }

    friend bool operator==(const SyncConfig&, const SyncConfig&) = default;
};

struct SyncSample {
    double t_s = 0;
    double offset_s = 0;

    friend bool operator==(const SyncSample&, const SyncSample&) = default;
};

struct SyncSeries {
    double interval_s = 1.0;
    std::map<std::string, std::vector<SyncSample>> by_device;

    friend bool operator==(const SyncSeries&, const SyncSeries&) = default;
};

namespace detail {

inline double quantize(double v, double granularity_s) {
    if (granularity_s <= 0) return v;
    return std::floor(v / granularity_s) * granularity_s;
}

}  // namespace detail

/* Simulate the sync plane for `duration_s`. Offsets are recorded on the
 * sync-interval grid; sample k holds the device offset right before the
 * exchange at t = k * interval. Every stochastic draw comes from a
 * per-device stream derived from (seed, device id), so each device's
 * series is stable no matter what else runs. */
inline SyncSeries simulate_sync(const topology::Topology& topo, const SyncConfig& cfg,
                                double duration_s, std::uint64_t seed) {
    using topology::DeviceNode;
    using topology::SyncClass;

    if (!(cfg.sync_interval_s > 0)) throw std::invalid_argument("simulate_sync: bad sync interval");
    const DeviceNode* gm = nullptr;
    for (const auto& n : topo.nodes)
        if (n.sync_class == SyncClass::Grandmaster) gm = &n;
    if (!gm) throw std::runtime_error("simulate_sync: topology has no grandmaster");

    const int steps = static_cast<int>(std::lround(duration_s / cfg.sync_interval_s));
    if (steps < 1) throw std::invalid_argument("simulate_sync: duration shorter than one interval");
    const double dt = cfg.sync_interval_s;

    SyncSeries series;
    series.interval_s = dt;

    /* Grandmaster: the reference itself. */
    auto& gm_samples = series.by_device[gm->id];
    for (int k = 0; k <= steps; ++k) gm_samples.push_back({k * dt, 0.0});

    /* PTP devices first (the hpc series feeds the NTP pass). */
    for (const auto& n : topo.nodes) {
        if (n.sync_class != SyncClass::PtpNative) continue;
        rng::Rng rng(rng::derive_stream(seed, "timesync/" + n.id));

        const double d_f = topology::one_way_delay_s(topo, gm->id, n.id);
        const double d_r = topology::one_way_delay_s(topo, n.id, gm->id);
        const std::size_t n_switches = topology::intermediate_switches(topo, gm->id, n.id).size();

        ServoClock clock;
        clock.offset_s = rng.uniform(-cfg.init_offset_s, cfg.init_offset_s);
        clock.drift_ppm = rng.uniform(-cfg.drift_ppm_range, cfg.drift_ppm_range);

        auto& samples = series.by_device[n.id];
        samples.reserve(static_cast<std::size_t>(steps) + 1);
        for (int k = 0; k <= steps; ++k) {
            const double t = k * dt;
            samples.push_back({t, clock.offset_s});
            if (k == steps) break;

            double sync_residence = 0;
            for (std::size_t i = 0; i < n_switches; ++i)
                sync_residence += rng.uniform(0.0, cfg.residence_jitter_s);
            const double t1 = detail::quantize(t + rng.gauss(0, cfg.timestamp_noise_s),
                                               cfg.granularity_s);
            const double sync_arrival = t + d_f + sync_residence;
            const double t2 = detail::quantize(
                sync_arrival + clock.offset_s + rng.gauss(0, cfg.timestamp_noise_s), cfg.granularity_s);

            double req_residence = 0;
            for (std::size_t i = 0; i < n_switches; ++i)
                req_residence += rng.uniform(0.0, cfg.residence_jitter_s);
            const double req_departure = t + 0.05;  // delay-req follows the sync
            const double t3 = detail::quantize(
                req_departure + clock.offset_s + rng.gauss(0, cfg.timestamp_noise_s), cfg.granularity_s);
            const double t4 = detail::quantize(
                req_departure + d_r + req_residence + rng.gauss(0, cfg.timestamp_noise_s),
                cfg.granularity_s);

            const double est = estimate_offset_s({t1, t2, t3, t4});
            clock = servo_step(clock, est, dt, cfg.kp, cfg.ki);
        }
    }

    /* NTP devices poll the hpc clock if present, else the grandmaster. */
    const std::vector<SyncSample>* ntp_server = &gm_samples;
    if (auto it = series.by_device.find("hpc"); it != series.by_device.end())
        ntp_server = &it->second;
    const int poll_every = std::max(1, static_cast<int>(std::lround(cfg.ntp_poll_s / dt)));
    for (const auto& n : topo.nodes) {
        if (n.sync_class != SyncClass::NtpOnly) continue;
        rng::Rng rng(rng::derive_stream(seed, "timesync/" + n.id));
        double offset = rng.uniform(-cfg.init_offset_s, cfg.init_offset_s);
        const double drift_ppm = rng.uniform(-cfg.drift_ppm_range, cfg.drift_ppm_range);

        auto& samples = series.by_device[n.id];
        samples.reserve(static_cast<std::size_t>(steps) + 1);
        for (int k = 0; k <= steps; ++k) {
            if (k > 0) offset += drift_ppm * 1e-6 * dt;
            if (k % poll_every == 0)
                offset = (*ntp_server)[static_cast<std::size_t>(k)].offset_s +
                         rng.gauss(0, cfg.ntp_noise_s);
            samples.push_back({k * dt, offset});
        }
    }

    /* Host-timestamped devices mirror their host's clock. */
    for (const auto& n : topo.nodes) {
        if (n.sync_class != SyncClass::HostTimestamped) continue;
        if (!n.host) throw std::runtime_error("simulate_sync: host-timestamped without host: " + n.id);
        auto it = series.by_device.find(*n.host);
        if (it == series.by_device.end())
            throw std::runtime_error("simulate_sync: host has no series: " + *n.host);
        series.by_device[n.id] = it->second;
    }

    return series;
}

struct OffsetStats {
    double mean_abs_s = 0;
    double max_abs_s = 0;
    int samples = 0;
};

/* Sample a device's offset series n times across the trailing window and
 * report mean and max absolute offset, the shape of a repeated clock-probe
 * measurement. */
inline OffsetStats measure_offsets(const SyncSeries& series, const std::string& device_id,
                                   int n = 30, double window_s = 180.0) {
    auto it = series.by_device.find(device_id);
    if (it == series.by_device.end())
        throw std::invalid_argument("measure_offsets: unknown device: " + device_id);
    const auto& samples = it->second;
    if (n < 2) throw std::invalid_argument("measure_offsets: need at least two probes");
    const double t_end = samples.back().t_s;
    if (t_end < window_s)
        throw std::invalid_argument("measure_offsets: series shorter than the window");

    OffsetStats stats;
    stats.samples = n;
    for (int k = 0; k < n; ++k) {
        const double t = t_end - window_s + window_s * k / (n - 1);
        const auto idx = static_cast<std::size_t>(std::lround(t / series.interval_s));
        const double off = std::abs(samples[idx].offset_s);
        stats.mean_abs_s += off;
        stats.max_abs_s = std::max(stats.max_abs_s, off);
    }
    stats.mean_abs_s /= n;
    return stats;
}

}  // namespace karlsim::timesync
