#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "../coverage.hpp"
#include "../csv.hpp"
#include "../datapath.hpp"
#include "../dbw.hpp"
#include "../json_io.hpp"
#include "../power.hpp"
#include "../timesync.hpp"
#include "../topology.hpp"

/* Simulation report: summary metrics in report.json, bulk tables as CSV.
 * Everything written here is deterministic in (scenario, seed): maps are
 * ordered, doubles print shortest-round-trip, files are binary-mode. */

namespace karlsim::harness {

struct PowerSection {
    double total_w = 0;
    double ac_w = 0;
    double dc_w = 0;
    bool ac_within_limit = true;
    bool dc_within_limit = true;
    power::Endurance endurance;
    power::Endurance endurance_charging;
    std::vector<std::string> tripped;
};

struct ScriptLogEntry {
    double t_s = 0;
    std::string source;  // "dbw" | "power"
    std::string action;
    std::string result;
};

struct Report {
    std::string scenario_name;
    std::uint64_t seed = 0;

    /* sync plane */
    timesync::SyncSeries sync_series;
    std::map<std::string, timesync::OffsetStats> sync_stats;  // monitored devices

    /* datapath */
    std::map<std::string, std::vector<datapath::MessageEvent>> streams;
    std::map<std::string, double> mean_latency_s;
    std::map<std::string, double> data_rate_bps;

    /* network */
    topology::LinkUtilization utilization;  // scenario demand set
    std::string uplink_key;
    double uplink_utilization = 0;
    topology::LinkUtilization uncompressed_camera_utilization;  // counterfactual

    /* coverage */
    coverage::CoverageGrid grid;
    std::vector<coverage::RingBin> ring;
    double ring_lidar_and_camera_fraction = 0;  // bins with >=1 lidar and >=1 camera
    double ring_two_sensor_fraction = 0;        // bins with >=2 sensors total
    std::map<int, long> redundancy;
    double blind_spot_camera_m2 = 0;
    double blind_spot_lidar_m2 = 0;
    double blind_spot_radar_m2 = 0;

    /* power */
    PowerSection power_idle;
    PowerSection power_full;
    power::PowerTree power_idle_tree;
    power::PowerTree power_full_tree;

    /* drive-by-wire */
    std::vector<dbw::StepReport> dbw_steps;
    bool dbw_machine_ok = false;
    double circle_closure_m = 0;
    dbw::DbwState dbw_final;
    std::vector<std::uint16_t> rooftop_registers;  // end state after the script
    std::uint16_t feeder_register = 1;
    std::vector<ScriptLogEntry> script_log;
};

inline io::json to_json(const PowerSection& p) {
    io::json j;
    j["total_w"] = p.total_w;
    j["ac_w"] = p.ac_w;
    j["dc_w"] = p.dc_w;
    j["ac_within_limit"] = p.ac_within_limit;
    j["dc_within_limit"] = p.dc_within_limit;
    j["endurance_h"] = p.endurance.unbounded ? -1.0 : p.endurance.hours;
    j["endurance_unbounded"] = p.endurance.unbounded;
    j["endurance_charging_h"] = p.endurance_charging.unbounded ? -1.0 : p.endurance_charging.hours;
    j["endurance_charging_unbounded"] = p.endurance_charging.unbounded;
    j["tripped"] = p.tripped;
    return j;
}

inline io::json to_json(const Report& r) {
    io::json j;
    j["scenario"] = r.scenario_name;
    j["seed"] = r.seed;

    io::json sync = io::json::object();
    for (const auto& [dev, st] : r.sync_stats)
        sync[dev] = {{"mean_abs_offset_s", st.mean_abs_s},
                     {"max_abs_offset_s", st.max_abs_s},
                     {"samples", st.samples}};
    j["sync"] = std::move(sync);

    io::json lat = io::json::object();
    for (const auto& [id, v] : r.mean_latency_s) {
        const auto& events = r.streams.at(id);
        lat[id] = {{"mean_latency_s", v},
                   {"events", static_cast<std::int64_t>(events.size())}};
    }
    j["latency"] = std::move(lat);

    io::json rates = io::json::object();
    for (const auto& [id, v] : r.data_rate_bps) rates[id] = v;
    j["data_rate_bps"] = std::move(rates);

    io::json net;
    net["uplink"] = r.uplink_key;
    net["uplink_utilization"] = r.uplink_utilization;
    io::json per_link = io::json::object();
    for (const auto& [k, u] : r.utilization.by_link) per_link[k] = u;
    net["utilization"] = std::move(per_link);
    net["oversubscribed"] = r.utilization.oversubscribed;
    net["uncompressed_camera_oversubscribed"] =
        !r.uncompressed_camera_utilization.oversubscribed.empty();
    io::json cf = io::json::object();
    for (const auto& [k, u] : r.uncompressed_camera_utilization.by_link)
        if (u > 0) cf[k] = u;
    net["uncompressed_camera_utilization"] = std::move(cf);
    j["network"] = std::move(net);

    io::json cov;
    cov["grid_cells"] = static_cast<std::int64_t>(r.grid.cells.size());
    cov["ring_lidar_and_camera_fraction"] = r.ring_lidar_and_camera_fraction;
    cov["ring_two_sensor_fraction"] = r.ring_two_sensor_fraction;
    io::json redundancy = io::json::object();
    for (const auto& [k, n] : r.redundancy) redundancy[std::to_string(k)] = n;
    cov["redundancy"] = std::move(redundancy);
    cov["blind_spot_m2"] = {{"camera", r.blind_spot_camera_m2},
                            {"lidar", r.blind_spot_lidar_m2},
                            {"radar", r.blind_spot_radar_m2}};
    j["coverage"] = std::move(cov);

    j["power"] = {{"idle", to_json(r.power_idle)}, {"full_load", to_json(r.power_full)}};

    io::json dbw_j;
    io::json steps = io::json::array();
    for (const auto& st : r.dbw_steps)
        steps.push_back({{"v0_mps", st.v0_mps},
                         {"nominal_mps2", st.nominal_mps2},
                         {"settled_mps2", st.settled_mps2},
                         {"decel_limit_mps2", st.decel_limit_mps2},
                         {"limit_adherence", st.limit_adherence}});
    dbw_j["steps"] = std::move(steps);
    dbw_j["machine_ok"] = r.dbw_machine_ok;
    dbw_j["circle_closure_m"] = r.circle_closure_m;
    dbw_j["final_state"] = {{"mode", dbw::to_string(r.dbw_final.mode)},
                            {"engaged", r.dbw_final.engaged},
                            {"estop", r.dbw_final.estop},
                            {"driver_override", r.dbw_final.driver_override},
                            {"key_access", r.dbw_final.key_access}};
    j["dbw"] = std::move(dbw_j);

    io::json regs = io::json::array();
    for (auto v : r.rooftop_registers) regs.push_back(v);
    j["rooftop_registers"] = std::move(regs);
    j["feeder_register"] = r.feeder_register;

    io::json script = io::json::array();
    for (const auto& e : r.script_log)
        script.push_back(
            {{"t_s", e.t_s}, {"source", e.source}, {"action", e.action}, {"result", e.result}});
    j["script_log"] = std::move(script);
    return j;
}

/* Write report.json plus, for format "csv", the five metric tables. */
inline void emit(const Report& r, const std::filesystem::path& dir, const std::string& format) {
    if (format != "json" && format != "csv")
        throw std::invalid_argument("emit: format must be json or csv: " + format);
    std::filesystem::create_directories(dir);
    io::save_json_file(dir / "report.json", to_json(r));
    if (format == "json") return;

    {
        csv::Writer w(dir / "offsets.csv", "time_s,device_id,offset_s");
        for (const auto& [dev, samples] : r.sync_series.by_device)
            for (const auto& s : samples) w.row(s.t_s, dev, s.offset_s);
    }
    {
        csv::Writer w(dir / "latency.csv", "sensor_id,seq,stamp_s,available_s,latency_s,bytes");
        for (const auto& [id, events] : r.streams)
            for (const auto& e : events)
                w.row(e.sensor_id, e.seq, e.stamp_s, e.available_s, e.latency_s(), e.bytes);
    }
    {
        csv::Writer w(dir / "coverage.csv", "x,y,camera_n,lidar_n,radar_n");
        for (int iy = 0; iy < r.grid.n; ++iy)
            for (int ix = 0; ix < r.grid.n; ++ix) {
                const auto& c = r.grid.at(ix, iy);
                if (c.excluded) continue;
                w.row(r.grid.x_of(ix), r.grid.y_of(iy), c.family_count(coverage::Family::Camera),
                      c.family_count(coverage::Family::Lidar), c.family_count(coverage::Family::Radar));
            }
    }
    {
        csv::Writer w(dir / "power.csv", "profile,channel_id,stage,rail,on,device_w,battery_w");
        auto emit_profile = [&](const char* name, const power::PowerTree& t) {
            for (const auto& c : t.channels) {
                const double dev_w = power::channel_effective(t, c) ? c.device_w() : 0.0;
                const double bat_w = dev_w / power::path_efficiency(t, c);
                w.row(name, c.id, io::to_string(c.stage), io::to_string(c.rail), c.on, dev_w, bat_w);
            }
        };
        emit_profile("idle", r.power_idle_tree);
        emit_profile("full_load", r.power_full_tree);
    }
    {
        csv::Writer w(dir / "dbw_step.csv", "t,v,a_nominal,a_clamped,a_measured");
        if (!r.dbw_steps.empty())
            for (const auto& s : r.dbw_steps.back().series)
                w.row(s.t_s, s.v_mps, s.a_nominal_mps2, s.a_clamped_mps2, s.a_measured_mps2);
    }
}

}  // namespace karlsim::harness
