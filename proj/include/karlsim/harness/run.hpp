#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "../power_registers.hpp"
#include "event_queue.hpp"
#include "log.hpp"
#include "report.hpp"
#include "scenario.hpp"

/* One full simulation run: sync plane, sensor streams, network load,
 * coverage, power, drive-by-wire experiments, then the scenario's event
 * script through the deterministic kernel queue. */

namespace karlsim::harness {

namespace detail {

inline const datapath::EncodingConfig& encoding_for(const Scenario& sc, coverage::Modality m) {
    auto it = sc.encodings.find(io::to_string(m));
    if (it == sc.encodings.end())
        throw std::runtime_error(std::string("run: no encoding for modality: ") + io::to_string(m));
    return it->second;
}

/* The uplink is the unique fiber link; scenarios without exactly one
 * fiber link report no uplink utilization. */
inline std::string find_uplink_key(const topology::Topology& t) {
    std::string key;
    int fiber = 0;
    for (const auto& e : t.links)
        if (e.medium == topology::LinkMedium::Fiber) {
            ++fiber;
            key = topology::link_key(e);
        }
    return fiber == 1 ? key : std::string{};
}

/* Fixed-curvature loop at constant speed; exact closure is a property of
 * the integrator, so the gap between start and end positions after one
 * full turn measures integration error. */
inline double circle_closure_m() {
    constexpr double v = 3.0;
    constexpr double kappa = 2.0 * 3.14159265358979323846 / 36.0;
    constexpr double dt = 1e-3;
    constexpr int steps = 12000;  // v * kappa * dt * steps = 2 pi

    dbw::VehicleState s;
    s.v_mps = v;
    const dbw::ControlRequest req{0.0, kappa, dbw::TurnSignal::None};
    for (int k = 0; k < steps; ++k) s = step_vehicle(s, req, dt, 0.0);
    return std::hypot(s.x_m, s.y_m);
}

struct ScriptPayload {
    std::string action;
    std::uint16_t reg = 0;
    std::uint16_t value = 0;
};

}  // namespace detail

inline Report run(const Scenario& sc) {
    if (auto v = topology::validate_topology(sc.topology); !v.empty())
        throw std::runtime_error("run: invalid topology: " + v.front().subject + ": " + v.front().rule);
    for (const auto* tree : {&sc.power_idle, &sc.power_full})
        if (auto v = power::validate_tree(*tree); !v.empty())
            throw std::runtime_error("run: invalid power tree: " + v.front().subject + ": " +
                                     v.front().rule);

    Report r;
    r.scenario_name = sc.name;
    r.seed = sc.seed;

    /* Sync plane. */
    log::info("sync: simulating " + std::to_string(sc.sync_duration_s) + " s");
    r.sync_series = timesync::simulate_sync(sc.topology, sc.sync, sc.sync_duration_s, sc.seed);
    for (const auto& dev : sc.sync_monitor)
        r.sync_stats[dev] = timesync::measure_offsets(r.sync_series, dev);

    /* Sensor streams. Stamping clocks are taken as settled (ideal); sync
     * error is reported separately by the sync plane, so the latency table
     * reflects the pipeline model alone. */
    for (const auto& sensor : sc.rig.sensors) {
        auto it = sc.latency_models.find(sensor.id);
        if (it == sc.latency_models.end()) continue;
        const auto& enc = detail::encoding_for(sc, sensor.modality);
        auto events = datapath::simulate_stream(sensor, it->second, 0.0, 0.0, sc.stream_duration_s,
                                                datapath::frame_bytes(sensor, enc));
        r.mean_latency_s[sensor.id] = datapath::mean_latency_s(events);
        r.streams[sensor.id] = std::move(events);
        r.data_rate_bps[sensor.id] = datapath::sensor_data_rate_bps(sensor, enc);
    }

    /* Network load: the scenario demand set, plus the counterfactual of
     * every camera streamed uncompressed from its host to the hpc. */
    r.utilization = topology::link_utilization(sc.topology, sc.demands);
    r.uplink_key = detail::find_uplink_key(sc.topology);
    if (!r.uplink_key.empty()) r.uplink_utilization = r.utilization.by_link.at(r.uplink_key);
    if (sc.topology.find_node("hpc")) {
        std::vector<topology::TrafficDemand> raw;
        for (const auto& sensor : sc.rig.sensors) {
            if (sensor.modality != coverage::Modality::Camera) continue;
            const topology::DeviceNode* node = sc.topology.find_node(sensor.id);
            if (!node || !node->host) continue;
            datapath::EncodingConfig enc = detail::encoding_for(sc, sensor.modality);
            enc.compression_ratio = 1.0;
            raw.push_back({*node->host, "hpc", datapath::sensor_data_rate_bps(sensor, enc)});
        }
        r.uncompressed_camera_utilization = topology::link_utilization(sc.topology, raw);
    }

    /* Coverage. */
    r.grid = coverage::compute_coverage(sc.rig, sc.grid);
    r.ring = coverage::ring_coverage(sc.rig, sc.ring.radius_m, sc.ring.height_m, sc.ring.bins);
    {
        int both = 0, two = 0;
        for (const auto& b : r.ring) {
            if (b.family_count(coverage::Family::Lidar) >= 1 &&
                b.family_count(coverage::Family::Camera) >= 1)
                ++both;
            if (b.total() >= 2) ++two;
        }
        const double n = static_cast<double>(r.ring.size());
        r.ring_lidar_and_camera_fraction = both / n;
        r.ring_two_sensor_fraction = two / n;
    }
    r.redundancy = coverage::redundancy_histogram(r.grid);
    r.blind_spot_camera_m2 = coverage::blind_spot_area_m2(r.grid, coverage::Family::Camera);
    r.blind_spot_lidar_m2 = coverage::blind_spot_area_m2(r.grid, coverage::Family::Lidar);
    r.blind_spot_radar_m2 = coverage::blind_spot_area_m2(r.grid, coverage::Family::Radar);

    /* Power. */
    auto power_section = [](const power::PowerTree& t) {
        PowerSection p;
        p.total_w = power::total_load_w(t);
        const auto limits = power::check_output_limits(t);
        p.ac_w = limits.ac_load_w;
        p.dc_w = limits.dc_load_w;
        p.ac_within_limit = limits.ac_within_limit;
        p.dc_within_limit = limits.dc_within_limit;
        p.endurance = power::endurance_h(t, false);
        p.endurance_charging = power::endurance_h(t, true);
        p.tripped = power::check_fuses(t);
        return p;
    };
    r.power_idle = power_section(sc.power_idle);
    r.power_full = power_section(sc.power_full);
    r.power_idle_tree = sc.power_idle;
    r.power_full_tree = sc.power_full;

    /* Drive-by-wire. */
    const dbw::SafetyEnvelope env;
    for (const auto& exp : sc.dbw_experiments)
        r.dbw_steps.push_back(
            dbw::run_step_experiment(exp.nominal_mps2, exp.v0_mps, env, sc.actuator_lag_s));
    r.dbw_machine_ok = dbw::check_machine().empty();
    r.circle_closure_m = detail::circle_closure_m();

    /* Event script: dbw transitions and rooftop register writes merged
     * through the kernel queue, applied in (time, source, seq) order. */
    {
        EventQueue<detail::ScriptPayload> q;
        std::int64_t seq = 0;
        for (const auto& ev : sc.dbw_script)
            q.push({ev.t_s, "dbw", seq++, {dbw::to_string(ev.event), 0, 0}});
        seq = 0;
        for (const auto& w : sc.power_script)
            q.push({w.t_s, "power", seq++, {"write", w.reg, w.value}});

        dbw::DbwState state;
        power::RooftopRegisterMap regs(sc.power_full);
        while (!q.empty()) {
            const auto ev = q.pop();
            ScriptLogEntry entry;
            entry.t_s = ev.time_s;
            entry.source = ev.source;
            if (ev.source == "dbw") {
                state = dbw::transition(state, dbw_event_from(ev.payload.action));
                entry.action = ev.payload.action;
                entry.result = std::string(dbw::to_string(state.mode)) +
                               (state.engaged ? "/engaged" : "/disengaged");
            } else {
                regs.write_holding(ev.payload.reg, ev.payload.value);
                entry.action = "write[" + std::to_string(ev.payload.reg) + "]=" +
                               std::to_string(ev.payload.value);
                entry.result = "read=" + std::to_string(regs.read_holding(ev.payload.reg));
            }
            r.script_log.push_back(std::move(entry));
        }
        r.dbw_final = state;
        for (std::uint16_t a = 0; a < regs.rooftop_channel_count(); ++a)
            r.rooftop_registers.push_back(regs.read_holding(a));
        r.feeder_register = regs.read_holding(power::RooftopRegisterMap::kFeederRegister);
    }

    return r;
}

}  // namespace karlsim::harness
