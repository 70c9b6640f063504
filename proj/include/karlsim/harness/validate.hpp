#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "run.hpp"

/* Validation suite: re-derives the vehicle's characterized numbers from
 * the reference scenario and checks them against pinned expectations, plus
 * the model-level properties (asymmetry bias, state machine, integrator
 * closure, determinism, network feasibility). Each criterion reports
 * pass/fail with the measured values; nothing here mutates the report. */

namespace karlsim::harness {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationOutcome {
    std::vector<CriterionResult> criteria;
    Report report;

    bool all_pass() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }
};

namespace vdetail {

inline std::string fmt(double v) { return csv::format_double(v); }

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

}  // namespace vdetail

/* Criterion 1: per-modality mean latencies. */
inline CriterionResult check_latency(const Scenario& sc, const Report& r) {
    CriterionResult c{1, "latency-pipeline", true, ""};
    std::ostringstream detail;
    for (const auto& sensor : sc.rig.sensors) {
        auto it = r.mean_latency_s.find(sensor.id);
        if (it == r.mean_latency_s.end()) {
            c.pass = false;
            detail << sensor.id << ": no stream; ";
            continue;
        }
        const double ms = it->second * 1e3;
        bool ok = true;
        switch (sensor.modality) {
            case coverage::Modality::LidarRotating: ok = vdetail::near(ms, 72.0, 0.5); break;
            case coverage::Modality::LidarFmcw: ok = vdetail::near(ms, 220.0, 0.5); break;
            case coverage::Modality::Camera: ok = vdetail::near(ms, 139.0, 0.5); break;
            case coverage::Modality::Radar: ok = ms < 1.0; break;
        }
        if (!ok) {
            c.pass = false;
            detail << sensor.id << "=" << vdetail::fmt(ms) << "ms ";
        }
    }
    if (c.pass) {
        detail << "rotating=72ms fmcw=220ms camera=139ms radar<1ms all within 0.5ms";
    }
    c.detail = detail.str();
    return c;
}

/* Criterion 2: mean absolute offset of the monitored PTP devices. */
inline CriterionResult check_sync(const Scenario& sc, const Report& r) {
    CriterionResult c{2, "sync-accuracy", true, ""};
    std::ostringstream detail;
    for (const auto& dev : sc.sync_monitor) {
        const auto& st = r.sync_stats.at(dev);
        const bool ok = st.mean_abs_s < 200e-9;
        c.pass = c.pass && ok;
        detail << dev << "=" << vdetail::fmt(st.mean_abs_s * 1e9) << "ns ";
    }
    detail << "(limit 200ns over " << (r.sync_stats.empty() ? 0 : r.sync_stats.begin()->second.samples)
           << " probes)";
    c.detail = detail.str();
    return c;
}

/* Criterion 3: power totals and endurance. */
inline CriterionResult check_power(const Report& r) {
    CriterionResult c{3, "power-budget", true, ""};
    const double idle = r.power_idle.total_w;
    const double full = r.power_full.total_w;
    const auto& end = r.power_full.endurance;
    const auto& chg = r.power_full.endurance_charging;
    const bool idle_ok = vdetail::near(idle, 660.0, 1.0);
    const bool full_ok = vdetail::near(full, 1100.0, 1.0);
    const bool end_ok = !end.unbounded && vdetail::near(end.hours, 4.55, 0.05);
    const bool chg_ok = chg.unbounded || chg.hours > 100.0;
    c.pass = idle_ok && full_ok && end_ok && chg_ok;
    std::ostringstream detail;
    detail << "idle=" << vdetail::fmt(idle) << "W full=" << vdetail::fmt(full)
           << "W endurance=" << vdetail::fmt(end.hours) << "h charging="
           << (chg.unbounded ? std::string("unbounded") : vdetail::fmt(chg.hours) + "h");
    c.detail = detail.str();
    return c;
}

/* Criterion 4: braking steps settle on the speed-dependent envelope. */
inline CriterionResult check_dbw_steps(const Report& r) {
    CriterionResult c{4, "dbw-braking-steps", true, ""};
    struct Expect {
        double v0, nominal, settled;
    };
    const Expect table[] = {{3, -10, -5.0}, {10, -10, -4.5}, {20, -10, -3.5}};
    std::ostringstream detail;
    for (const auto& e : table) {
        const dbw::StepReport* found = nullptr;
        for (const auto& st : r.dbw_steps)
            if (st.v0_mps == e.v0 && st.nominal_mps2 == e.nominal) found = &st;
        if (!found) {
            c.pass = false;
            detail << "missing step v0=" << vdetail::fmt(e.v0) << "; ";
            continue;
        }
        const bool ok = vdetail::near(found->settled_mps2, e.settled, 0.05) && found->limit_adherence;
        c.pass = c.pass && ok;
        detail << "v0=" << vdetail::fmt(e.v0) << ":" << vdetail::fmt(found->settled_mps2) << " ";
    }
    detail << "(expect -5/-4.5/-3.5 within 0.05, envelope adherence)";
    c.detail = detail.str();
    return c;
}

/* Criterion 5: ring coverage plus grid-equals-oracle. */
inline CriterionResult check_coverage(const Scenario& sc, const Report& r) {
    CriterionResult c{5, "coverage-ring-and-grid-oracle", true, ""};

    const bool ring_full = r.ring_lidar_and_camera_fraction == 1.0;
    const bool ring_two = r.ring_two_sensor_fraction >= 0.95;

    /* Independent 50x50 re-derivation of the grid pipeline. */
    coverage::GridSpec spec;
    spec.extent_m = 12.5;
    spec.cell_m = 0.5;
    spec.height_m = sc.grid.height_m;
    spec.footprint = sc.grid.footprint;
    const coverage::CoverageGrid g = coverage::compute_coverage(sc.rig, spec);
    bool oracle_ok = g.n == 50;
    for (int iy = 0; oracle_ok && iy < g.n; ++iy)
        for (int ix = 0; oracle_ok && ix < g.n; ++ix) {
            const double x = -spec.extent_m + (ix + 0.5) * spec.cell_m;
            const double y = -spec.extent_m + (iy + 0.5) * spec.cell_m;
            coverage::CellCount expect;
            expect.excluded = spec.footprint.contains(x, y);
            if (!expect.excluded)
                for (const auto& s : sc.rig.sensors)
                    if (coverage::covers(s, x, y, spec.height_m))
                        ++expect.by_modality[static_cast<int>(s.modality)];
            const auto& got = g.at(ix, iy);
            oracle_ok = got.excluded == expect.excluded && got.by_modality == expect.by_modality;
        }

    c.pass = ring_full && ring_two && oracle_ok;
    std::ostringstream detail;
    detail << "ring lidar&camera=" << vdetail::fmt(r.ring_lidar_and_camera_fraction)
           << " two-sensor=" << vdetail::fmt(r.ring_two_sensor_fraction)
           << " grid-oracle=" << (oracle_ok ? "match" : "MISMATCH");
    c.detail = detail.str();
    return c;
}

/* Criterion 6: asymmetry injected on the uplink biases a rooftop device's
 * settled offset by exactly half the asymmetry (noise off). */
inline CriterionResult check_asymmetry_bias(const Scenario& sc) {
    CriterionResult c{6, "ptp-asymmetry-bias", true, ""};
    const std::string uplink = detail::find_uplink_key(sc.topology);
    if (uplink.empty() || !sc.topology.find_node("orin-1")) {
        c.pass = false;
        c.detail = "scenario lacks a unique fiber uplink or an orin-1 device";
        return c;
    }
    timesync::SyncConfig cfg = timesync::SyncConfig::zero_noise();
    cfg.sync_interval_s = sc.sync.sync_interval_s;
    cfg.kp = sc.sync.kp;
    cfg.ki = sc.sync.ki;

    std::ostringstream detail;
    for (double delta : {-10e-6, -1e-6, 1e-6, 10e-6}) {
        topology::Topology topo = sc.topology;
        for (auto& e : topo.links)
            if (topology::link_key(e) == uplink) e.delay_asymmetry_s = delta;
        const auto series = timesync::simulate_sync(topo, cfg, sc.sync_duration_s, sc.seed);
        const double settled = series.by_device.at("orin-1").back().offset_s;
        const double expect = delta / 2.0;
        const bool ok = std::abs(settled - expect) <= 0.01 * std::abs(expect);
        c.pass = c.pass && ok;
        detail << vdetail::fmt(delta * 1e6) << "us->" << vdetail::fmt(settled * 1e6) << "us ";
    }
    detail << "(expect delta/2 within 1%)";
    c.detail = detail.str();
    return c;
}

/* Criterion 7: exhaustive state-machine soundness. */
inline CriterionResult check_machine(const Report& r) {
    CriterionResult c{7, "dbw-state-machine", r.dbw_machine_ok, ""};
    const auto states = dbw::enumerate_valid_states();
    c.detail = std::to_string(states.size()) + " valid states x 8 events" +
               (r.dbw_machine_ok ? ", all transitions valid" : ": INVARIANT VIOLATIONS");
    return c;
}

/* Criterion 8: kinematic circle closure. */
inline CriterionResult check_circle(const Report& r) {
    CriterionResult c{8, "kinematics-circle-closure", r.circle_closure_m < 1e-6, ""};
    c.detail = "closure=" + vdetail::fmt(r.circle_closure_m) + "m (limit 1e-6)";
    return c;
}

/* Criterion 9: byte-identical reports for the same seed; a different seed
 * moves only the noise-bearing sync metrics. */
inline CriterionResult check_determinism(const Scenario& sc, const Report& r,
                                         const std::filesystem::path& scratch) {
    CriterionResult c{9, "determinism", true, ""};
    const Report r2 = run(sc);

    const std::filesystem::path dir_a = scratch / "determinism-a";
    const std::filesystem::path dir_b = scratch / "determinism-b";
    emit(r, dir_a, "csv");
    emit(r2, dir_b, "csv");
    bool identical = true;
    for (const char* f :
         {"report.json", "offsets.csv", "latency.csv", "coverage.csv", "power.csv", "dbw_step.csv"})
        identical = identical && vdetail::read_bytes(dir_a / f) == vdetail::read_bytes(dir_b / f);

    Scenario other = sc;
    other.seed = sc.seed + 1;
    const Report r3 = run(other);
    const io::json j1 = to_json(r);
    const io::json j3 = to_json(r3);
    bool structural = true;
    for (const char* section : {"latency", "data_rate_bps", "network", "coverage", "power", "dbw",
                                "rooftop_registers", "feeder_register", "script_log"})
        structural = structural && j1.at(section) == j3.at(section);
    const bool sync_moved = j1.at("sync") != j3.at("sync");

    c.pass = identical && structural && sync_moved;
    std::ostringstream detail;
    detail << "same-seed bytes " << (identical ? "identical" : "DIFFER") << "; other seed: structural "
           << (structural ? "unchanged" : "CHANGED") << ", sync "
           << (sync_moved ? "perturbed" : "UNCHANGED");
    c.detail = detail.str();
    return c;
}

/* Criterion 10: uplink utilization of the demand set, and infeasibility of
 * the uncompressed-camera counterfactual. */
inline CriterionResult check_uplink(const Report& r) {
    CriterionResult c{10, "uplink-utilization", true, ""};
    const bool util_ok = vdetail::near(r.uplink_utilization, 0.10, 0.01);
    const bool counterfactual = !r.uncompressed_camera_utilization.oversubscribed.empty();
    c.pass = util_ok && counterfactual;
    std::ostringstream detail;
    detail << "uplink=" << vdetail::fmt(r.uplink_utilization) << " (expect 0.10 within 0.01); "
           << "uncompressed cameras "
           << (counterfactual ? "oversubscribed as expected" : "NOT oversubscribed");
    c.detail = detail.str();
    return c;
}

inline ValidationOutcome validate(const Scenario& sc, const std::filesystem::path& scratch) {
    ValidationOutcome out;
    out.report = run(sc);
    const Report& r = out.report;
    out.criteria.push_back(check_latency(sc, r));
    out.criteria.push_back(check_sync(sc, r));
    out.criteria.push_back(check_power(r));
    out.criteria.push_back(check_dbw_steps(r));
    out.criteria.push_back(check_coverage(sc, r));
    out.criteria.push_back(check_asymmetry_bias(sc));
    out.criteria.push_back(check_machine(r));
    out.criteria.push_back(check_circle(r));
    out.criteria.push_back(check_determinism(sc, r, scratch));
    out.criteria.push_back(check_uplink(r));
    return out;
}

inline io::json to_json(const ValidationOutcome& out) {
    io::json arr = io::json::array();
    for (const auto& c : out.criteria)
        arr.push_back(
            {{"index", c.index}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return io::json{{"criteria", std::move(arr)}, {"all_pass", out.all_pass()}};
}

}  // namespace karlsim::harness
