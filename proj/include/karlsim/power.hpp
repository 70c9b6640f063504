#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

/* Two-stage power distribution tree.
 *
 * A battery-backed supply feeds an AC output (inverter) and a DC output.
 * Cabin channels hang directly off those rails. The rooftop stage sits
 * behind one dedicated cabin feeder channel: a distribution unit on the
 * roof with its own fused channels, including a DC-DC step-up for the
 * 24 V sensor rail. Switching the feeder off therefore drops every
 * rooftop channel, whatever its own switch state says.
 *
 * Trees are values; operations return new trees. */

namespace karlsim::power {

enum class Stage { Cabin, Rooftop };
enum class Rail { Ac230, Dc12, Dc24 };

inline double rail_voltage(Rail r) {
    switch (r) {
        case Rail::Ac230: return 230.0;
        case Rail::Dc12: return 12.0;
        case Rail::Dc24: return 24.0;
    }
    throw std::invalid_argument("rail_voltage: bad rail");
}

struct DeviceLoad {
    std::string device;
    double watts = 0;

    friend bool operator==(const DeviceLoad&, const DeviceLoad&) = default;
};

struct PowerChannel {
    std::string id;
    Stage stage = Stage::Cabin;
    Rail rail = Rail::Dc12;
    double fuse_a = 0;
    bool on = true;
    std::vector<DeviceLoad> loads;

    double device_w() const {
        double w = 0;
        for (const auto& l : loads) w += l.watts;
        return w;
    }

    friend bool operator==(const PowerChannel&, const PowerChannel&) = default;
};

struct Battery {
    double capacity_wh = 5000;
    double soc = 1.0;  // 0..1
    double max_charge_a = 90;
    double charge_bus_v = 12;

    double charge_w() const { return max_charge_a * charge_bus_v; }

    friend bool operator==(const Battery&, const Battery&) = default;
};

struct ConversionEfficiency {
    double battery_to_dc = 0.95;
    double battery_to_ac = 0.95;
    double step_up_24 = 0.92;  // rooftop 12 V -> 24 V converter

    friend bool operator==(const ConversionEfficiency&, const ConversionEfficiency&) = default;
};

struct PowerTree {
    Battery battery;
    double ac_limit_w = 3000;
    double dc_limit_w = 2160;
    ConversionEfficiency eff;
    std::string rooftop_feeder_id;
    std::vector<PowerChannel> channels;

    const PowerChannel* find(const std::string& id) const {
        for (const auto& c : channels)
            if (c.id == id) return &c;
        return nullptr;
    }

    friend bool operator==(const PowerTree&, const PowerTree&) = default;
};

struct Violation {
    std::string subject;
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::vector<Violation> validate_tree(const PowerTree& t) {
    std::vector<Violation> out;
    std::map<std::string, int> ids;
    for (const auto& c : t.channels) ++ids[c.id];
    for (const auto& [id, n] : ids)
        if (n > 1) out.push_back({id, "duplicate channel id"});

    bool has_rooftop = false;
    for (const auto& c : t.channels) {
        if (c.stage == Stage::Rooftop) has_rooftop = true;
        if (!(c.fuse_a > 0)) out.push_back({c.id, "fuse rating must be positive"});
        for (const auto& l : c.loads)
            if (l.watts < 0) out.push_back({c.id, "negative load: " + l.device});
    }
    const PowerChannel* feeder = t.find(t.rooftop_feeder_id);
    if (has_rooftop) {
        if (!feeder)
            out.push_back({t.rooftop_feeder_id, "rooftop stage present but feeder channel missing"});
        else if (feeder->stage != Stage::Cabin || feeder->rail != Rail::Dc12)
            out.push_back({feeder->id, "feeder must be a cabin 12 V channel"});
    }
    auto eff_ok = [](double e) { return e > 0 && e <= 1; };
    if (!eff_ok(t.eff.battery_to_dc) || !eff_ok(t.eff.battery_to_ac) || !eff_ok(t.eff.step_up_24))
        out.push_back({"efficiency", "conversion efficiencies must be in (0, 1]"});
    if (!(t.battery.capacity_wh > 0)) out.push_back({"battery", "capacity must be positive"});
    if (t.battery.soc < 0 || t.battery.soc > 1) out.push_back({"battery", "soc outside [0, 1]"});
    return out;
}

inline bool feeder_on(const PowerTree& t) {
    const PowerChannel* f = t.find(t.rooftop_feeder_id);
    return f && f->on;
}

/* A channel delivers power only if its own switch is on and, for rooftop
 * channels, the cabin feeder is on as well. */
inline bool channel_effective(const PowerTree& t, const PowerChannel& c) {
    if (!c.on) return false;
    if (c.stage == Stage::Rooftop && !feeder_on(t)) return false;
    return true;
}

/* Battery-side watts per device watt on this channel. */
inline double path_efficiency(const PowerTree& t, const PowerChannel& c) {
    double e = (c.rail == Rail::Ac230) ? t.eff.battery_to_ac : t.eff.battery_to_dc;
    if (c.rail == Rail::Dc24) e *= t.eff.step_up_24;
    return e;
}

inline PowerTree switch_channel(const PowerTree& t, const std::string& id, bool on) {
    PowerTree out = t;
    for (auto& c : out.channels)
        if (c.id == id) {
            c.on = on;
            return out;
        }
    throw std::invalid_argument("switch_channel: unknown channel: " + id);
}

/* Watts reaching the devices of one channel (0 when switched off or
 * behind an off feeder). */
inline double delivered_power_w(const PowerTree& t, const std::string& id) {
    const PowerChannel* c = t.find(id);
    if (!c) throw std::invalid_argument("delivered_power_w: unknown channel: " + id);
    return channel_effective(t, *c) ? c->device_w() : 0.0;
}

/* Total draw on the battery, conversion losses included. Fuse state is a
 * separate diagnostic (check_fuses); an overloaded channel still draws. */
inline double total_load_w(const PowerTree& t) {
    double w = 0;
    for (const auto& c : t.channels)
        if (channel_effective(t, c)) w += c.device_w() / path_efficiency(t, c);
    return w;
}

/* Load on the AC output, measured at the 230 V rail. */
inline double ac_load_w(const PowerTree& t) {
    double w = 0;
    for (const auto& c : t.channels)
        if (c.rail == Rail::Ac230 && channel_effective(t, c)) w += c.device_w();
    return w;
}

/* Load on the DC output, measured at the 12 V bus. The rooftop 24 V rail
 * appears here through its step-up converter. */
inline double dc_load_w(const PowerTree& t) {
    double w = 0;
    for (const auto& c : t.channels) {
        if (c.rail == Rail::Ac230 || !channel_effective(t, c)) continue;
        double ch_w = c.device_w();
        if (c.rail == Rail::Dc24) ch_w /= t.eff.step_up_24;
        w += ch_w;
    }
    return w;
}

struct OutputLimits {
    double ac_load_w = 0;
    double dc_load_w = 0;
    bool ac_within_limit = true;
    bool dc_within_limit = true;
};

inline OutputLimits check_output_limits(const PowerTree& t) {
    OutputLimits o;
    o.ac_load_w = ac_load_w(t);
    o.dc_load_w = dc_load_w(t);
    o.ac_within_limit = o.ac_load_w <= t.ac_limit_w;
    o.dc_within_limit = o.dc_load_w <= t.dc_limit_w;
    return o;
}

/* Current through the feeder fuse: every effective rooftop channel, taken
 * at the 12 V feeder bus (step-up input for 24 V channels), divided by
 * 12 V. Channels already tripped upstream are excluded by the caller. */
inline double feeder_current_a(const PowerTree& t, const std::vector<std::string>& tripped_rooftop) {
    double w = 0;
    for (const auto& c : t.channels) {
        if (c.stage != Stage::Rooftop || !channel_effective(t, c)) continue;
        bool tripped = false;
        for (const auto& id : tripped_rooftop) tripped = tripped || id == c.id;
        if (tripped) continue;
        double ch_w = c.device_w();
        if (c.rail == Rail::Dc24) ch_w /= t.eff.step_up_24;
        w += ch_w;
    }
    return w / rail_voltage(Rail::Dc12);
}

/* Fuse check, rooftop first so the feeder sees only surviving channels.
 * Returns ids of tripped channels. */
inline std::vector<std::string> check_fuses(const PowerTree& t) {
    std::vector<std::string> tripped;
    for (const auto& c : t.channels) {
        if (c.stage != Stage::Rooftop || !channel_effective(t, c)) continue;
        if (c.device_w() / rail_voltage(c.rail) > c.fuse_a) tripped.push_back(c.id);
    }
    const PowerChannel* feeder = t.find(t.rooftop_feeder_id);
    if (feeder && feeder->on && feeder_current_a(t, tripped) > feeder->fuse_a)
        tripped.push_back(feeder->id);
    for (const auto& c : t.channels) {
        if (c.stage != Stage::Cabin || !c.on || c.id == t.rooftop_feeder_id) continue;
        if (c.device_w() / rail_voltage(c.rail) > c.fuse_a) tripped.push_back(c.id);
    }
    return tripped;
}

struct Endurance {
    double hours = 0;
    bool unbounded = false;  // net draw is zero or negative (charging wins)
};

/* Runtime until the battery is empty at the present load. While charging,
 * the charger feeds the bus at max_charge_a on the charge bus voltage. */
inline Endurance endurance_h(const PowerTree& t, bool charging) {
    const double net_w = total_load_w(t) - (charging ? t.battery.charge_w() : 0.0);
    if (net_w <= 0) return {std::numeric_limits<double>::infinity(), true};
    return {t.battery.capacity_wh * t.battery.soc / net_w, false};
}

/* Advance the battery state by a time interval at constant load. */
inline PowerTree drain(const PowerTree& t, double hours, bool charging) {
    if (hours < 0) throw std::invalid_argument("drain: negative duration");
    PowerTree out = t;
    const double net_w = total_load_w(t) - (charging ? t.battery.charge_w() : 0.0);
    double soc = t.battery.soc - net_w * hours / t.battery.capacity_wh;
    out.battery.soc = std::min(1.0, std::max(0.0, soc));
    return out;
}

enum class Profile { Idle, FullLoad };

/* Reference distribution tree with per-device draws for the two bundled
 * operating points. Idle: recording off, sensors powered but streams cold.
 * FullLoad: full sensor recording and compute. */
inline PowerTree build_reference_power_tree(Profile p) {
    const bool full = p == Profile::FullLoad;
    PowerTree t;
    t.rooftop_feeder_id = "c-dc-roof-feeder";

    auto ch = [&](std::string id, Stage st, Rail r, double fuse, std::vector<DeviceLoad> loads) {
        t.channels.push_back({std::move(id), st, r, fuse, true, std::move(loads)});
    };
    auto w = [&](double full_w, double idle_w) { return full ? full_w : idle_w; };

    ch("c-ac-hpc", Stage::Cabin, Rail::Ac230, 16, {{"hpc", w(548, 316)}});
    ch("c-ac-core-switch", Stage::Cabin, Rail::Ac230, 10, {{"switch-core", w(45, 40)}});
    ch("c-dc-ins", Stage::Cabin, Rail::Dc12, 5, {{"ins", w(10, 8)}});
    ch("c-dc-router", Stage::Cabin, Rail::Dc12, 5, {{"router-5g", w(20, 12)}});
    ch("c-dc-v2x", Stage::Cabin, Rail::Dc12, 5, {{"v2x", w(15, 8)}});
    ch("c-dc-vehicle-if", Stage::Cabin, Rail::Dc12, 7.5, {{"power-cabin", w(30, 10)}});
    ch("c-dc-ae-switch", Stage::Cabin, Rail::Dc12, 5, {{"switch-ae", w(15, 10)}});
    {
        std::vector<DeviceLoad> radars;
        for (const char* id : {"radar-front-center", "radar-front-left", "radar-front-right",
                               "radar-rear-left", "radar-rear-right"})
            radars.push_back({id, w(10, 6)});
        ch("c-dc-radars", Stage::Cabin, Rail::Dc12, 10, std::move(radars));
    }
    ch("c-dc-hmi", Stage::Cabin, Rail::Dc12, 10, {{"hmi", w(40, 25)}});
    ch("c-dc-roof-feeder", Stage::Cabin, Rail::Dc12, 60, {});

    ch("r-dc-orin1", Stage::Rooftop, Rail::Dc12, 10, {{"orin-1", w(55, 22)}});
    ch("r-dc-orin2", Stage::Rooftop, Rail::Dc12, 10, {{"orin-2", w(55, 22)}});
    ch("r-dc-roof-switch", Stage::Rooftop, Rail::Dc12, 5,
       {{"switch-roof", w(16, 12)}, {"power-roof", w(4, 3)}});
    {
        std::vector<DeviceLoad> cams;
        for (const char* id : {"cam-front-center", "cam-front-left", "cam-front-right", "cam-mid-left",
                               "cam-mid-right", "cam-rear-center", "cam-rear-left", "cam-rear-right"})
            cams.push_back({id, w(5, 3)});
        ch("r-dc-cameras", Stage::Rooftop, Rail::Dc12, 10, std::move(cams));
    }
    {
        std::vector<DeviceLoad> lidars;
        for (const char* id : {"lidar-front-left", "lidar-front-right", "lidar-rear-left",
                               "lidar-rear-right"})
            lidars.push_back({id, w(16, 14)});
        ch("r-24-lidars", Stage::Rooftop, Rail::Dc24, 10, std::move(lidars));
    }
    ch("r-24-fmcw", Stage::Rooftop, Rail::Dc24, 5, {{"lidar-fmcw", w(30, 22)}});

    return t;
}

}  // namespace karlsim::power
