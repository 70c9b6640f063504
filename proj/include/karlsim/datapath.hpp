#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coverage.hpp"

/* Sensor-to-consumer message pipeline: stamping semantics, latency and
 * stream data rates.
 *
 * A frame acquired at true time tau passes through three stages:
 *   capture   (sweep or exposure duration)
 *   driver    (in-sensor or driver-side processing)
 *   transport (network + middleware until the consumer can read it)
 * The header stamp is written at a semantics-dependent instant, by either
 * the sensor clock or the consumer host clock, and reported latency is
 * measured between the stamp and availability on the consumer. */

namespace karlsim::datapath {

enum class StampSemantics {
    StartOfSweep,   // stamp at acquisition start, sensor clock
    AtCapture,      // stamp when capture completes, sensor clock
    HostAtArrival,  // stamp on the consumer host when data arrives
};

struct LatencyModel {
    double capture_s = 0;
    double driver_s = 0;
    double transport_s = 0;
    StampSemantics semantics = StampSemantics::AtCapture;
    /* Experiment overrides; 0 means "use the sensor's native values". */
    double rate_override_hz = 0;
    std::int64_t frame_bytes_override = 0;

    friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

struct MessageEvent {
    std::string sensor_id;
    std::int64_t seq = 0;
    double stamp_s = 0;      // header stamp, in the stamping clock
    double available_s = 0;  // availability instant, in the consumer clock
    std::int64_t bytes = 0;

    double latency_s() const { return available_s - stamp_s; }

    friend bool operator==(const MessageEvent&, const MessageEvent&) = default;
};

/* Deterministic frame stream over [0, duration). Clock offsets translate
 * true time into the clocks doing the stamping and the consuming; for
 * host-stamped sensors only the consumer offset matters. */
inline std::vector<MessageEvent> simulate_stream(const coverage::SensorSpec& spec,
                                                 const LatencyModel& m,
                                                 double sensor_clock_offset_s,
                                                 double consumer_clock_offset_s,
                                                 double duration_s,
                                                 std::int64_t frame_bytes) {
    const double rate = m.rate_override_hz > 0 ? m.rate_override_hz : spec.rate_hz;
    if (!(rate > 0)) throw std::invalid_argument("simulate_stream: rate must be positive: " + spec.id);
    if (m.capture_s < 0 || m.driver_s < 0 || m.transport_s < 0)
        throw std::invalid_argument("simulate_stream: negative pipeline stage: " + spec.id);
    const std::int64_t bytes = m.frame_bytes_override > 0 ? m.frame_bytes_override : frame_bytes;

    std::vector<MessageEvent> out;
    const double period = 1.0 / rate;
    for (std::int64_t k = 0;; ++k) {
        const double tau = static_cast<double>(k) * period;
        if (tau >= duration_s) break;
        double stamp_true = 0;
        double stamp_clock_offset = 0;
        switch (m.semantics) {
            case StampSemantics::StartOfSweep:
                stamp_true = tau;
                stamp_clock_offset = sensor_clock_offset_s;
                break;
            case StampSemantics::AtCapture:
                stamp_true = tau + m.capture_s;
                stamp_clock_offset = sensor_clock_offset_s;
                break;
            case StampSemantics::HostAtArrival:
                stamp_true = tau + m.capture_s + m.driver_s;
                stamp_clock_offset = consumer_clock_offset_s;
                break;
        }
        const double available_true = tau + m.capture_s + m.driver_s + m.transport_s;
        out.push_back({spec.id, k, stamp_true + stamp_clock_offset,
                       available_true + consumer_clock_offset_s, bytes});
    }
    return out;
}

inline double mean_latency_s(const std::vector<MessageEvent>& events) {
    if (events.empty()) throw std::invalid_argument("mean_latency_s: empty stream");
    double sum = 0;
    for (const auto& e : events) sum += e.latency_s();
    return sum / static_cast<double>(events.size());
}

/* Wire encoding of one sensor stream. stream_count covers multi-imager
 * units; compression_ratio is raw/encoded. Sensors without a grid
 * resolution (radar target lists) report a configured nominal rate. */
struct EncodingConfig {
    double bytes_per_element = 0;
    int stream_count = 1;
    double compression_ratio = 1.0;
    double nominal_rate_bps = 0;

    friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

inline double sensor_data_rate_bps(const coverage::SensorSpec& spec, const EncodingConfig& enc) {
    if (spec.cols <= 0 || spec.rows <= 0) return enc.nominal_rate_bps;
    if (!(enc.compression_ratio > 0))
        throw std::invalid_argument("sensor_data_rate_bps: compression ratio must be positive");
    return static_cast<double>(spec.cols) * spec.rows * spec.rate_hz * enc.bytes_per_element * 8.0 *
           enc.stream_count / enc.compression_ratio;
}

/* Encoded size of one frame, for message bookkeeping. */
inline std::int64_t frame_bytes(const coverage::SensorSpec& spec, const EncodingConfig& enc) {
    if (!(spec.rate_hz > 0)) return 0;
    const double bits_per_frame = sensor_data_rate_bps(spec, enc) / spec.rate_hz;
    return static_cast<std::int64_t>(bits_per_frame / 8.0 + 0.5);
}

/* Default encodings: 12 byte/point lidar, dual-imager camera at 16 bit/px
 * with 10:1 compression, radar target lists at a nominal 1 Mbit/s. */
inline EncodingConfig default_encoding(coverage::Modality m) {
    switch (m) {
        case coverage::Modality::Camera: return {2.0, 2, 10.0, 0};
        case coverage::Modality::LidarRotating:
        case coverage::Modality::LidarFmcw: return {12.0, 1, 1.0, 0};
        case coverage::Modality::Radar: return {0.0, 1, 1.0, 1e6};
    }
    throw std::invalid_argument("default_encoding: bad modality");
}

/* Measured pipeline models for the reference vehicle. Rotating lidars
 * stamp at sweep start and spend 50 ms sweeping, 20 ms in the driver and
 * 2 ms in transport. The fmcw lidar stamps at capture and needs 219 ms of
 * internal processing plus 1 ms transport. Cameras are characterized with
 * the 1280x720@15 evaluation profile: 120 ms processing, 19 ms transport.
 * Radar target lists are stamped on the host at arrival and become
 * readable 0.5 ms later. */
inline LatencyModel reference_latency_model(coverage::Modality m) {
    switch (m) {
        case coverage::Modality::LidarRotating:
            return {0.050, 0.020, 0.002, StampSemantics::StartOfSweep, 0, 0};
        case coverage::Modality::LidarFmcw:
            return {0.0, 0.219, 0.001, StampSemantics::AtCapture, 0, 0};
        case coverage::Modality::Camera:
            return {0.0, 0.120, 0.019, StampSemantics::AtCapture, 15.0,
                    static_cast<std::int64_t>(1280.0 * 720 * 2 * 2 / 10.0)};
        case coverage::Modality::Radar:
            return {0.0, 0.0, 0.0005, StampSemantics::HostAtArrival, 0, 0};
    }
    throw std::invalid_argument("reference_latency_model: bad modality");
}

}  // namespace karlsim::datapath
