#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "../coverage.hpp"
#include "../datapath.hpp"
#include "../dbw.hpp"
#include "../json_io.hpp"
#include "../power.hpp"
#include "../timesync.hpp"
#include "../topology.hpp"

/* Scenario: the complete, self-contained configuration of one simulation
 * run. A scenario file may inline the topology, rig and power trees or
 * reference them by path (fields topology_ref, rig_ref, power_idle_ref,
 * power_full_ref, resolved relative to the scenario file); after loading,
 * a Scenario always holds the resolved content, and serialization always
 * inlines it. */

namespace karlsim::harness {

struct DbwExperiment {
    double v0_mps = 0;
    double nominal_mps2 = 0;

    friend bool operator==(const DbwExperiment&, const DbwExperiment&) = default;
};

struct DbwScriptEvent {
    double t_s = 0;
    dbw::Event event = dbw::Event::PowerOn;

    friend bool operator==(const DbwScriptEvent&, const DbwScriptEvent&) = default;
};

struct PowerScriptWrite {
    double t_s = 0;
    std::uint16_t reg = 0;
    std::uint16_t value = 0;

    friend bool operator==(const PowerScriptWrite&, const PowerScriptWrite&) = default;
};

struct RingSpec {
    double radius_m = 10;
    double height_m = 1;
    int bins = 360;

    friend bool operator==(const RingSpec&, const RingSpec&) = default;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 7;
    double sync_duration_s = 240;
    double stream_duration_s = 2;

    topology::Topology topology;
    coverage::SensorRig rig;

    timesync::SyncConfig sync;
    std::vector<std::string> sync_monitor;

    std::map<std::string, datapath::LatencyModel> latency_models;  // by sensor id
    std::map<std::string, datapath::EncodingConfig> encodings;     // by modality name
    std::vector<topology::TrafficDemand> demands;

    power::PowerTree power_idle;
    power::PowerTree power_full;

    coverage::GridSpec grid;
    RingSpec ring;

    double actuator_lag_s = 0.15;
    std::vector<DbwExperiment> dbw_experiments;
    std::vector<DbwScriptEvent> dbw_script;
    std::vector<PowerScriptWrite> power_script;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline dbw::Event dbw_event_from(const std::string& s) {
    using dbw::Event;
    for (Event e : {Event::PowerOn, Event::Engage, Event::Disengage, Event::Override, Event::Estop,
                    Event::ClearEstop, Event::KeyInsert, Event::KeyRemove})
        if (s == dbw::to_string(e)) return e;
    throw std::runtime_error("dbw event: unknown value: " + s);
}

inline io::json to_json(const Scenario& s) {
    io::json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["sync_duration_s"] = s.sync_duration_s;
    j["stream_duration_s"] = s.stream_duration_s;
    j["topology"] = io::to_json(s.topology);
    j["rig"] = io::to_json(s.rig);
    j["sync"] = io::to_json(s.sync);
    j["sync_monitor"] = s.sync_monitor;
    io::json lm = io::json::object();
    for (const auto& [id, m] : s.latency_models) lm[id] = io::to_json(m);
    j["latency_models"] = std::move(lm);
    io::json enc = io::json::object();
    for (const auto& [mod, e] : s.encodings) enc[mod] = io::to_json(e);
    j["encodings"] = std::move(enc);
    io::json demands = io::json::array();
    for (const auto& d : s.demands)
        demands.push_back({{"source", d.source}, {"sink", d.sink}, {"rate_bps", d.rate_bps}});
    j["demands"] = std::move(demands);
    j["power_idle"] = io::to_json(s.power_idle);
    j["power_full"] = io::to_json(s.power_full);
    j["grid"] = io::to_json(s.grid);
    j["ring"] = {{"radius_m", s.ring.radius_m}, {"height_m", s.ring.height_m}, {"bins", s.ring.bins}};
    io::json dbw_j;
    dbw_j["actuator_lag_s"] = s.actuator_lag_s;
    io::json exps = io::json::array();
    for (const auto& e : s.dbw_experiments)
        exps.push_back({{"v0_mps", e.v0_mps}, {"nominal_mps2", e.nominal_mps2}});
    dbw_j["experiments"] = std::move(exps);
    io::json script = io::json::array();
    for (const auto& ev : s.dbw_script)
        script.push_back({{"t_s", ev.t_s}, {"event", dbw::to_string(ev.event)}});
    dbw_j["script"] = std::move(script);
    j["dbw"] = std::move(dbw_j);
    io::json pscript = io::json::array();
    for (const auto& w : s.power_script)
        pscript.push_back({{"t_s", w.t_s}, {"register", w.reg}, {"value", w.value}});
    j["power_script"] = std::move(pscript);
    return j;
}

/* Resolve a section that is either inline under `key` or referenced by
 * path under `key_ref`. */
inline io::json resolve_section(const io::json& j, const std::string& key,
                                const std::filesystem::path& base_dir) {
    if (j.contains(key)) return j.at(key);
    const std::string ref_key = key + "_ref";
    if (j.contains(ref_key)) {
        const auto ref = j.at(ref_key).get<std::string>();
        const std::filesystem::path p = base_dir / ref;
        if (!std::filesystem::exists(p))
            throw std::runtime_error("scenario: unresolved " + ref_key + ": " + p.string());
        return io::load_json_file(p);
    }
    throw std::runtime_error("scenario: missing section: " + key);
}

inline Scenario scenario_from_json(const io::json& j, const std::filesystem::path& base_dir) {
    Scenario s;
    s.name = j.at("name").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.sync_duration_s = j.at("sync_duration_s").get<double>();
    s.stream_duration_s = j.at("stream_duration_s").get<double>();
    s.topology = io::topology_from_json(resolve_section(j, "topology", base_dir));
    s.rig = io::rig_from_json(resolve_section(j, "rig", base_dir));
    s.sync = io::sync_config_from_json(j.at("sync"));
    s.sync_monitor = j.at("sync_monitor").get<std::vector<std::string>>();
    for (const auto& [id, m] : j.at("latency_models").items())
        s.latency_models[id] = io::latency_model_from_json(m);
    for (const auto& [mod, e] : j.at("encodings").items())
        s.encodings[mod] = io::encoding_from_json(e);
    for (const auto& d : j.at("demands"))
        s.demands.push_back({d.at("source").get<std::string>(), d.at("sink").get<std::string>(),
                             d.at("rate_bps").get<double>()});
    s.power_idle = io::power_tree_from_json(resolve_section(j, "power_idle", base_dir));
    s.power_full = io::power_tree_from_json(resolve_section(j, "power_full", base_dir));
    s.grid = io::grid_spec_from_json(j.at("grid"));
    const auto& ring = j.at("ring");
    s.ring = {ring.at("radius_m").get<double>(), ring.at("height_m").get<double>(),
              ring.at("bins").get<int>()};
    const auto& dbw_j = j.at("dbw");
    s.actuator_lag_s = dbw_j.at("actuator_lag_s").get<double>();
    for (const auto& e : dbw_j.at("experiments"))
        s.dbw_experiments.push_back(
            {e.at("v0_mps").get<double>(), e.at("nominal_mps2").get<double>()});
    for (const auto& ev : dbw_j.at("script"))
        s.dbw_script.push_back(
            {ev.at("t_s").get<double>(), dbw_event_from(ev.at("event").get<std::string>())});
    for (const auto& w : j.at("power_script"))
        s.power_script.push_back({w.at("t_s").get<double>(), w.at("register").get<std::uint16_t>(),
                                  w.at("value").get<std::uint16_t>()});
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(io::load_json_file(path), path.parent_path());
}

inline void save_scenario(const std::filesystem::path& path, const Scenario& s) {
    io::save_json_file(path, to_json(s));
}

/* The bundled reference scenario: the full vehicle as characterized, with
 * the measured latency models, default encodings, the steady lidar
 * recording demand set, both power profiles, and the three braking step
 * experiments. */
inline Scenario build_reference_scenario() {
    Scenario s;
    s.name = "karl-reference";
    s.seed = 7;
    s.sync_duration_s = 240;
    s.stream_duration_s = 2;
    s.topology = topology::build_reference_topology();
    s.rig = coverage::build_reference_rig();
    s.sync = timesync::SyncConfig{};
    s.sync_monitor = {"hpc", "orin-1", "orin-2"};
    for (const auto& sensor : s.rig.sensors)
        s.latency_models[sensor.id] = datapath::reference_latency_model(sensor.modality);
    for (coverage::Modality m :
         {coverage::Modality::Camera, coverage::Modality::LidarRotating,
          coverage::Modality::LidarFmcw, coverage::Modality::Radar})
        s.encodings[io::to_string(m)] = datapath::default_encoding(m);
    s.demands = topology::reference_demands();
    s.power_idle = power::build_reference_power_tree(power::Profile::Idle);
    s.power_full = power::build_reference_power_tree(power::Profile::FullLoad);
    s.grid = coverage::GridSpec{};
    s.ring = RingSpec{};
    s.actuator_lag_s = 0.15;
    s.dbw_experiments = {{3, -10}, {10, -10}, {20, -10}};
    s.dbw_script = {{0.0, dbw::Event::PowerOn},
                    {0.1, dbw::Event::KeyInsert},
                    {0.2, dbw::Event::Engage},
                    {1.0, dbw::Event::Override},
                    {1.1, dbw::Event::Disengage},
                    {1.2, dbw::Event::Engage}};
    s.power_script = {{0.5, 5, 0}, {1.5, 5, 1}};  // bounce the fmcw channel
    return s;
}

}  // namespace karlsim::harness
