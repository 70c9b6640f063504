#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "coverage.hpp"
#include "datapath.hpp"
#include "power.hpp"
#include "timesync.hpp"
#include "topology.hpp"

/* JSON (de)serialization for the model types. ordered_json keeps emitted
 * field order exactly as written here, so serialized output is stable
 * byte for byte. Enums travel as strings; optional fields are simply
 * omitted. Readers use at(), so a missing field fails with its name. */

namespace karlsim::io {

using json = nlohmann::ordered_json;

template <typename E>
E enum_from(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
            const char* what) {
    for (const auto& [name, value] : table)
        if (s == name) return value;
    throw std::runtime_error(std::string(what) + ": unknown value: " + s);
}

/* ---- topology ---- */

inline const char* to_string(topology::DeviceKind k) {
    using topology::DeviceKind;
    switch (k) {
        case DeviceKind::Sensor: return "sensor";
        case DeviceKind::EmbeddedComputer: return "embedded-computer";
        case DeviceKind::Hpc: return "hpc";
        case DeviceKind::Switch: return "switch";
        case DeviceKind::Router: return "router";
        case DeviceKind::PowerController: return "power-controller";
        case DeviceKind::InsGrandmaster: return "ins-grandmaster";
        case DeviceKind::V2xUnit: return "v2x-unit";
    }
    return "?";
}

inline topology::DeviceKind device_kind_from(const std::string& s) {
    using topology::DeviceKind;
    return enum_from<DeviceKind>(s,
                                 {{"sensor", DeviceKind::Sensor},
                                  {"embedded-computer", DeviceKind::EmbeddedComputer},
                                  {"hpc", DeviceKind::Hpc},
                                  {"switch", DeviceKind::Switch},
                                  {"router", DeviceKind::Router},
                                  {"power-controller", DeviceKind::PowerController},
                                  {"ins-grandmaster", DeviceKind::InsGrandmaster},
                                  {"v2x-unit", DeviceKind::V2xUnit}},
                                 "device kind");
}

inline const char* to_string(topology::SyncClass c) {
    using topology::SyncClass;
    switch (c) {
        case SyncClass::Grandmaster: return "grandmaster";
        case SyncClass::PtpNative: return "ptp-native";
        case SyncClass::HostTimestamped: return "host-timestamped";
        case SyncClass::NtpOnly: return "ntp-only";
    }
    return "?";
}

inline topology::SyncClass sync_class_from(const std::string& s) {
    using topology::SyncClass;
    return enum_from<SyncClass>(s,
                                {{"grandmaster", SyncClass::Grandmaster},
                                 {"ptp-native", SyncClass::PtpNative},
                                 {"host-timestamped", SyncClass::HostTimestamped},
                                 {"ntp-only", SyncClass::NtpOnly}},
                                "sync class");
}

inline const char* to_string(topology::LinkMedium m) {
    using topology::LinkMedium;
    switch (m) {
        case LinkMedium::Copper: return "copper";
        case LinkMedium::Fiber: return "fiber";
        case LinkMedium::AutomotiveEthernet: return "automotive-ethernet";
    }
    return "?";
}

inline topology::LinkMedium link_medium_from(const std::string& s) {
    using topology::LinkMedium;
    return enum_from<LinkMedium>(s,
                                 {{"copper", LinkMedium::Copper},
                                  {"fiber", LinkMedium::Fiber},
                                  {"automotive-ethernet", LinkMedium::AutomotiveEthernet}},
                                 "link medium");
}

inline json to_json(const topology::Topology& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["kind"] = to_string(n.kind);
        jn["sync"] = to_string(n.sync_class);
        if (n.host) jn["host"] = *n.host;
        if (n.power_channel) jn["power_channel"] = *n.power_channel;
        nodes.push_back(std::move(jn));
    }
    json links = json::array();
    for (const auto& e : t.links) {
        json je;
        je["a"] = e.node_a;
        je["b"] = e.node_b;
        je["medium"] = to_string(e.medium);
        je["capacity_bps"] = e.capacity_bps;
        je["prop_delay_s"] = e.prop_delay_s;
        je["delay_asymmetry_s"] = e.delay_asymmetry_s;
        links.push_back(std::move(je));
    }
    return json{{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

inline topology::Topology topology_from_json(const json& j) {
    topology::Topology t;
    for (const auto& jn : j.at("nodes")) {
        topology::DeviceNode n;
        n.id = jn.at("id").get<std::string>();
        n.kind = device_kind_from(jn.at("kind").get<std::string>());
        n.sync_class = sync_class_from(jn.at("sync").get<std::string>());
        if (jn.contains("host")) n.host = jn.at("host").get<std::string>();
        if (jn.contains("power_channel")) n.power_channel = jn.at("power_channel").get<std::string>();
        t.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("links")) {
        topology::LinkEdge e;
        e.node_a = je.at("a").get<std::string>();
        e.node_b = je.at("b").get<std::string>();
        e.medium = link_medium_from(je.at("medium").get<std::string>());
        e.capacity_bps = je.at("capacity_bps").get<double>();
        e.prop_delay_s = je.at("prop_delay_s").get<double>();
        e.delay_asymmetry_s = je.at("delay_asymmetry_s").get<double>();
        t.links.push_back(std::move(e));
    }
    return t;
}

/* ---- sensor rig ---- */

inline const char* to_string(coverage::Modality m) {
    using coverage::Modality;
    switch (m) {
        case Modality::Camera: return "camera";
        case Modality::LidarRotating: return "lidar-rotating";
        case Modality::LidarFmcw: return "lidar-fmcw";
        case Modality::Radar: return "radar";
    }
    return "?";
}

inline coverage::Modality modality_from(const std::string& s) {
    using coverage::Modality;
    return enum_from<Modality>(s,
                               {{"camera", Modality::Camera},
                                {"lidar-rotating", Modality::LidarRotating},
                                {"lidar-fmcw", Modality::LidarFmcw},
                                {"radar", Modality::Radar}},
                               "modality");
}

inline json to_json(const coverage::SensorRig& r) {
    json sensors = json::array();
    for (const auto& s : r.sensors) {
        json js;
        js["id"] = s.id;
        js["modality"] = to_string(s.modality);
        js["pose"] = {{"x_m", s.pose.x_m},
                      {"y_m", s.pose.y_m},
                      {"z_m", s.pose.z_m},
                      {"yaw_deg", s.pose.yaw_deg},
                      {"pitch_deg", s.pose.pitch_deg}};
        js["frustum"] = {{"hfov_deg", s.frustum.hfov_deg},
                         {"vfov_deg", s.frustum.vfov_deg},
                         {"min_range_m", s.frustum.min_range_m},
                         {"max_range_m", s.frustum.max_range_m}};
        js["cols"] = s.cols;
        js["rows"] = s.rows;
        js["rate_hz"] = s.rate_hz;
        js["radial_velocity"] = s.radial_velocity;
        sensors.push_back(std::move(js));
    }
    return json{{"sensors", std::move(sensors)}};
}

inline coverage::SensorRig rig_from_json(const json& j) {
    coverage::SensorRig r;
    for (const auto& js : j.at("sensors")) {
        coverage::SensorSpec s;
        s.id = js.at("id").get<std::string>();
        s.modality = modality_from(js.at("modality").get<std::string>());
        const auto& p = js.at("pose");
        s.pose = {p.at("x_m").get<double>(), p.at("y_m").get<double>(), p.at("z_m").get<double>(),
                  p.at("yaw_deg").get<double>(), p.at("pitch_deg").get<double>()};
        const auto& f = js.at("frustum");
        s.frustum = {f.at("hfov_deg").get<double>(), f.at("vfov_deg").get<double>(),
                     f.at("min_range_m").get<double>(), f.at("max_range_m").get<double>()};
        s.cols = js.at("cols").get<int>();
        s.rows = js.at("rows").get<int>();
        s.rate_hz = js.at("rate_hz").get<double>();
        s.radial_velocity = js.at("radial_velocity").get<bool>();
        r.sensors.push_back(std::move(s));
    }
    return r;
}

/* ---- power tree ---- */

inline const char* to_string(power::Stage s) {
    return s == power::Stage::Cabin ? "cabin" : "rooftop";
}

inline power::Stage stage_from(const std::string& s) {
    return enum_from<power::Stage>(
        s, {{"cabin", power::Stage::Cabin}, {"rooftop", power::Stage::Rooftop}}, "stage");
}

inline const char* to_string(power::Rail r) {
    using power::Rail;
    switch (r) {
        case Rail::Ac230: return "ac-230";
        case Rail::Dc12: return "dc-12";
        case Rail::Dc24: return "dc-24";
    }
    return "?";
}

inline power::Rail rail_from(const std::string& s) {
    using power::Rail;
    return enum_from<Rail>(
        s, {{"ac-230", Rail::Ac230}, {"dc-12", Rail::Dc12}, {"dc-24", Rail::Dc24}}, "rail");
}

inline json to_json(const power::PowerTree& t) {
    json channels = json::array();
    for (const auto& c : t.channels) {
        json loads = json::array();
        for (const auto& l : c.loads) loads.push_back({{"device", l.device}, {"watts", l.watts}});
        channels.push_back({{"id", c.id},
                            {"stage", to_string(c.stage)},
                            {"rail", to_string(c.rail)},
                            {"fuse_a", c.fuse_a},
                            {"on", c.on},
                            {"loads", std::move(loads)}});
    }
    return json{{"battery",
                 {{"capacity_wh", t.battery.capacity_wh},
                  {"soc", t.battery.soc},
                  {"max_charge_a", t.battery.max_charge_a},
                  {"charge_bus_v", t.battery.charge_bus_v}}},
                {"ac_limit_w", t.ac_limit_w},
                {"dc_limit_w", t.dc_limit_w},
                {"efficiency",
                 {{"battery_to_dc", t.eff.battery_to_dc},
                  {"battery_to_ac", t.eff.battery_to_ac},
                  {"step_up_24", t.eff.step_up_24}}},
                {"rooftop_feeder", t.rooftop_feeder_id},
                {"channels", std::move(channels)}};
}

inline power::PowerTree power_tree_from_json(const json& j) {
    power::PowerTree t;
    const auto& b = j.at("battery");
    t.battery = {b.at("capacity_wh").get<double>(), b.at("soc").get<double>(),
                 b.at("max_charge_a").get<double>(), b.at("charge_bus_v").get<double>()};
    t.ac_limit_w = j.at("ac_limit_w").get<double>();
    t.dc_limit_w = j.at("dc_limit_w").get<double>();
    const auto& e = j.at("efficiency");
    t.eff = {e.at("battery_to_dc").get<double>(), e.at("battery_to_ac").get<double>(),
             e.at("step_up_24").get<double>()};
    t.rooftop_feeder_id = j.at("rooftop_feeder").get<std::string>();
    for (const auto& jc : j.at("channels")) {
        power::PowerChannel c;
        c.id = jc.at("id").get<std::string>();
        c.stage = stage_from(jc.at("stage").get<std::string>());
        c.rail = rail_from(jc.at("rail").get<std::string>());
        c.fuse_a = jc.at("fuse_a").get<double>();
        c.on = jc.at("on").get<bool>();
        for (const auto& jl : jc.at("loads"))
            c.loads.push_back({jl.at("device").get<std::string>(), jl.at("watts").get<double>()});
        t.channels.push_back(std::move(c));
    }
    return t;
}

/* ---- sync config ---- */

inline json to_json(const timesync::SyncConfig& c) {
    return json{{"sync_interval_s", c.sync_interval_s},
                {"kp", c.kp},
                {"ki", c.ki},
                {"timestamp_noise_s", c.timestamp_noise_s},
                {"residence_jitter_s", c.residence_jitter_s},
                {"granularity_s", c.granularity_s},
                {"drift_ppm_range", c.drift_ppm_range},
                {"init_offset_s", c.init_offset_s},
                {"ntp_noise_s", c.ntp_noise_s},
                {"ntp_poll_s", c.ntp_poll_s}};
}

inline timesync::SyncConfig sync_config_from_json(const json& j) {
    timesync::SyncConfig c;
    c.sync_interval_s = j.at("sync_interval_s").get<double>();
    c.kp = j.at("kp").get<double>();
    c.ki = j.at("ki").get<double>();
    c.timestamp_noise_s = j.at("timestamp_noise_s").get<double>();
    c.residence_jitter_s = j.at("residence_jitter_s").get<double>();
    c.granularity_s = j.at("granularity_s").get<double>();
    c.drift_ppm_range = j.at("drift_ppm_range").get<double>();
    c.init_offset_s = j.at("init_offset_s").get<double>();
    c.ntp_noise_s = j.at("ntp_noise_s").get<double>();
    c.ntp_poll_s = j.at("ntp_poll_s").get<double>();
    return c;
}

/* ---- datapath configs ---- */

inline const char* to_string(datapath::StampSemantics s) {
    using datapath::StampSemantics;
    switch (s) {
        case StampSemantics::StartOfSweep: return "start-of-sweep";
        case StampSemantics::AtCapture: return "at-capture";
        case StampSemantics::HostAtArrival: return "host-at-arrival";
    }
    return "?";
}

inline datapath::StampSemantics stamp_semantics_from(const std::string& s) {
    using datapath::StampSemantics;
    return enum_from<StampSemantics>(s,
                                     {{"start-of-sweep", StampSemantics::StartOfSweep},
                                      {"at-capture", StampSemantics::AtCapture},
                                      {"host-at-arrival", StampSemantics::HostAtArrival}},
                                     "stamp semantics");
}

inline json to_json(const datapath::LatencyModel& m) {
    return json{{"capture_s", m.capture_s},
                {"driver_s", m.driver_s},
                {"transport_s", m.transport_s},
                {"semantics", to_string(m.semantics)},
                {"rate_override_hz", m.rate_override_hz},
                {"frame_bytes_override", m.frame_bytes_override}};
}

inline datapath::LatencyModel latency_model_from_json(const json& j) {
    datapath::LatencyModel m;
    m.capture_s = j.at("capture_s").get<double>();
    m.driver_s = j.at("driver_s").get<double>();
    m.transport_s = j.at("transport_s").get<double>();
    m.semantics = stamp_semantics_from(j.at("semantics").get<std::string>());
    m.rate_override_hz = j.at("rate_override_hz").get<double>();
    m.frame_bytes_override = j.at("frame_bytes_override").get<std::int64_t>();
    return m;
}

inline json to_json(const datapath::EncodingConfig& e) {
    return json{{"bytes_per_element", e.bytes_per_element},
                {"stream_count", e.stream_count},
                {"compression_ratio", e.compression_ratio},
                {"nominal_rate_bps", e.nominal_rate_bps}};
}

inline datapath::EncodingConfig encoding_from_json(const json& j) {
    datapath::EncodingConfig e;
    e.bytes_per_element = j.at("bytes_per_element").get<double>();
    e.stream_count = j.at("stream_count").get<int>();
    e.compression_ratio = j.at("compression_ratio").get<double>();
    e.nominal_rate_bps = j.at("nominal_rate_bps").get<double>();
    return e;
}

/* ---- coverage grid spec ---- */

inline json to_json(const coverage::GridSpec& g) {
    return json{{"extent_m", g.extent_m},
                {"cell_m", g.cell_m},
                {"height_m", g.height_m},
                {"footprint",
                 {{"x_min_m", g.footprint.x_min_m},
                  {"x_max_m", g.footprint.x_max_m},
                  {"y_min_m", g.footprint.y_min_m},
                  {"y_max_m", g.footprint.y_max_m}}}};
}

inline coverage::GridSpec grid_spec_from_json(const json& j) {
    coverage::GridSpec g;
    g.extent_m = j.at("extent_m").get<double>();
    g.cell_m = j.at("cell_m").get<double>();
    g.height_m = j.at("height_m").get<double>();
    const auto& f = j.at("footprint");
    g.footprint = {f.at("x_min_m").get<double>(), f.at("x_max_m").get<double>(),
                   f.at("y_min_m").get<double>(), f.at("y_max_m").get<double>()};
    return g;
}

/* ---- files ---- */

inline json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("parse error in " + path.string() + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace karlsim::io
