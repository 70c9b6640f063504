#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

/* Drive-by-wire interface model: operation-mode state machine, safety
 * envelope on control requests, and a longitudinal/lateral vehicle
 * response for step experiments. */

namespace karlsim::dbw {

enum class OperationMode { Stock, Shadow, Automated };

enum class Event {
    PowerOn,
    Engage,
    Disengage,
    Override,
    Estop,
    ClearEstop,
    KeyInsert,
    KeyRemove,
};

inline const char* to_string(OperationMode m) {
    switch (m) {
        case OperationMode::Stock: return "stock";
        case OperationMode::Shadow: return "shadow";
        case OperationMode::Automated: return "automated";
    }
    return "?";
}

inline const char* to_string(Event e) {
    switch (e) {
        case Event::PowerOn: return "power_on";
        case Event::Engage: return "engage";
        case Event::Disengage: return "disengage";
        case Event::Override: return "override";
        case Event::Estop: return "estop";
        case Event::ClearEstop: return "clear_estop";
        case Event::KeyInsert: return "key_insert";
        case Event::KeyRemove: return "key_remove";
    }
    return "?";
}

struct DbwState {
    OperationMode mode = OperationMode::Stock;
    bool engaged = false;
    bool estop = false;
    bool driver_override = false;
    bool key_access = false;  // software key present

    friend bool operator==(const DbwState&, const DbwState&) = default;
};

/* Engagement requires the full guard; nothing else may hold while engaged. */
inline bool state_invariant_holds(const DbwState& s) {
    if (!s.engaged) return true;
    return s.mode == OperationMode::Automated && s.key_access && !s.estop && !s.driver_override;
}

/* Total transition function. Events that do not apply in the current state
 * are no-ops; dedicated guards keep the engagement invariant. A driver
 * override latches until an explicit disengage acknowledges it. */
inline DbwState transition(const DbwState& s, Event e) {
    DbwState n = s;
    switch (e) {
        case Event::PowerOn:
            if (n.mode == OperationMode::Stock) n.mode = OperationMode::Shadow;
            break;
        case Event::KeyInsert:
            n.key_access = true;
            if (n.mode == OperationMode::Shadow) n.mode = OperationMode::Automated;
            break;
        case Event::KeyRemove:
            n.key_access = false;
            n.engaged = false;
            if (n.mode == OperationMode::Automated) n.mode = OperationMode::Shadow;
            break;
        case Event::Engage:
            if (n.mode == OperationMode::Automated && n.key_access && !n.estop && !n.driver_override)
                n.engaged = true;
            break;
        case Event::Disengage:
            n.engaged = false;
            n.driver_override = false;
            break;
        case Event::Override:
            n.driver_override = true;
            n.engaged = false;
            break;
        case Event::Estop:
            n.estop = true;
            n.engaged = false;
            break;
        case Event::ClearEstop:
            n.estop = false;
            break;
    }
    return n;
}

inline std::vector<DbwState> enumerate_valid_states() {
    std::vector<DbwState> out;
    for (OperationMode m : {OperationMode::Stock, OperationMode::Shadow, OperationMode::Automated})
        for (bool engaged : {false, true})
            for (bool estop : {false, true})
                for (bool override_ : {false, true})
                    for (bool key : {false, true}) {
                        DbwState s{m, engaged, estop, override_, key};
                        if (state_invariant_holds(s)) out.push_back(s);
                    }
    return out;
}

struct MachineViolation {
    DbwState from;
    Event event = Event::PowerOn;
    DbwState to;
};

/* Exhaustive check: every event applied to every valid state lands in a
 * valid state. */
inline std::vector<MachineViolation> check_machine() {
    std::vector<MachineViolation> bad;
    for (const auto& s : enumerate_valid_states())
        for (Event e : {Event::PowerOn, Event::Engage, Event::Disengage, Event::Override, Event::Estop,
                        Event::ClearEstop, Event::KeyInsert, Event::KeyRemove}) {
            DbwState t = transition(s, e);
            if (!state_invariant_holds(t)) bad.push_back({s, e, t});
        }
    return bad;
}

enum class TurnSignal { None, Left, Right };

struct ControlRequest {
    double accel_mps2 = 0;
    double curvature_1pm = 0;
    TurnSignal turn_signal = TurnSignal::None;
};

/* Deceleration and curvature limits as a function of speed. The braking
 * bound eases from its low-speed to its high-speed value over a linear
 * ramp; curvature is capped by both a geometric bound and a lateral
 * acceleration budget, and its rate tightens with speed. */
struct SafetyEnvelope {
    double decel_low_mps2 = 5.0;   // full authority below v_low
    double decel_high_mps2 = 3.5;  // authority at and above v_high
    double v_low_mps = 5.0;
    double v_high_mps = 20.0;
    double accel_cap_mps2 = 2.5;
    double kappa_cap_1pm = 0.2;
    double lat_accel_cap_mps2 = 3.0;
    double kappa_rate_ref_1pms = 0.1;  // allowed curvature rate at and below v_low

    double decel_limit_mps2(double v_mps) const {
        if (v_mps < v_low_mps) return decel_low_mps2;
        if (v_mps >= v_high_mps) return decel_high_mps2;
        const double f = (v_mps - v_low_mps) / (v_high_mps - v_low_mps);
        return decel_low_mps2 + f * (decel_high_mps2 - decel_low_mps2);
    }

    double accel_limit_mps2(double) const { return accel_cap_mps2; }

    double kappa_max_1pm(double v_mps) const {
        if (v_mps <= 0) return kappa_cap_1pm;
        return std::min(kappa_cap_1pm, lat_accel_cap_mps2 / (v_mps * v_mps));
    }

    double kappa_rate_max_1pms(double v_mps) const {
        return kappa_rate_ref_1pms * (v_low_mps / std::max(v_mps, v_low_mps));
    }
};

/* Clamp a request against the envelope at the given speed. Curvature is
 * magnitude-capped and then rate-limited against the previous commanded
 * curvature. Non-finite requests are rejected. */
inline ControlRequest clamp_request(const ControlRequest& req, double v_mps, double prev_kappa_1pm,
                                    double dt_s, const SafetyEnvelope& env) {
    if (!std::isfinite(req.accel_mps2) || !std::isfinite(req.curvature_1pm))
        throw std::invalid_argument("clamp_request: non-finite request");
    if (!(dt_s > 0)) throw std::invalid_argument("clamp_request: dt must be positive");

    ControlRequest out = req;
    out.accel_mps2 = std::clamp(req.accel_mps2, -env.decel_limit_mps2(v_mps), env.accel_limit_mps2(v_mps));
    const double k_cap = env.kappa_max_1pm(v_mps);
    const double target = std::clamp(req.curvature_1pm, -k_cap, k_cap);
    const double max_step = env.kappa_rate_max_1pms(v_mps) * dt_s;
    out.curvature_1pm = prev_kappa_1pm + std::clamp(target - prev_kappa_1pm, -max_step, max_step);
    return out;
}

/* Planar single-track kinematics. Heading integrates v * kappa; the
 * realized acceleration tracks the command through a first-order lag
 * (tau = 0 means direct). Speed never goes negative: braking holds the
 * vehicle at rest. */
struct VehicleState {
    double x_m = 0;
    double y_m = 0;
    double heading_rad = 0;
    double v_mps = 0;
    double a_mps2 = 0;      // realized acceleration (actuator output)
    double kappa_1pm = 0;   // realized curvature
    double wheelbase_m = 3.124;
};

inline VehicleState step_vehicle(const VehicleState& s, const ControlRequest& cmd, double dt_s,
                                 double actuator_lag_s) {
    if (!(dt_s > 0)) throw std::invalid_argument("step_vehicle: dt must be positive");
    VehicleState n = s;
    if (actuator_lag_s > 0) {
        const double alpha = dt_s / actuator_lag_s;
        n.a_mps2 = s.a_mps2 + alpha * (cmd.accel_mps2 - s.a_mps2);
    } else {
        n.a_mps2 = cmd.accel_mps2;
    }
    n.kappa_1pm = cmd.curvature_1pm;
    n.x_m = s.x_m + dt_s * s.v_mps * std::cos(s.heading_rad);
    n.y_m = s.y_m + dt_s * s.v_mps * std::sin(s.heading_rad);
    n.heading_rad = s.heading_rad + dt_s * s.v_mps * n.kappa_1pm;
    n.v_mps = std::max(0.0, s.v_mps + dt_s * n.a_mps2);
    return n;
}

/* Centered moving average with symmetric edge shrink: sample i averages
 * indices [i-h, i+h] with h = min(half_window, i, n-1-i). With an
 * 11-sample window at 50 Hz this is a 200 ms centered rolling mean. */
inline std::vector<double> measure_response(const std::vector<double>& trace, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("measure_response: window must be odd and positive");
    const int n = static_cast<int>(trace.size());
    if (n < window) throw std::invalid_argument("measure_response: trace shorter than window");
    const int half = window / 2;
    std::vector<double> out(trace.size());
    for (int i = 0; i < n; ++i) {
        const int h = std::min({half, i, n - 1 - i});
        double sum = 0;
        for (int j = i - h; j <= i + h; ++j) sum += trace[j];
        out[i] = sum / (2 * h + 1);
    }
    return out;
}

struct StepSample {
    double t_s = 0;
    double v_mps = 0;
    double a_nominal_mps2 = 0;
    double a_clamped_mps2 = 0;
    double a_measured_mps2 = 0;  // filtered realized acceleration
};

struct StepReport {
    double v0_mps = 0;
    double nominal_mps2 = 0;
    double settled_mps2 = 0;   // filtered value at the end of the run
    double decel_limit_mps2 = 0;
    bool limit_adherence = true;
    std::vector<StepSample> series;  // resampled at log_rate_hz
};

/* Commanded-step experiment: hold a nominal acceleration request from an
 * initial speed and record how the envelope clamps it and how the vehicle
 * responds. The envelope is evaluated at the experiment's entry speed (the
 * authority granted for the maneuver); integration runs at 1 ms, the log
 * at 50 Hz, and the measured channel is the 200 ms centered average of the
 * realized acceleration. */
inline StepReport run_step_experiment(double nominal_mps2, double v0_mps, const SafetyEnvelope& env,
                                      double actuator_lag_s, double duration_s = 4.0,
                                      double log_rate_hz = 50.0) {
    constexpr double dt = 1e-3;
    const int steps = static_cast<int>(std::lround(duration_s / dt));
    const int log_every = static_cast<int>(std::lround(1.0 / (log_rate_hz * dt)));
    if (log_every < 1) throw std::invalid_argument("run_step_experiment: log rate too high");

    StepReport r;
    r.v0_mps = v0_mps;
    r.nominal_mps2 = nominal_mps2;
    r.decel_limit_mps2 = env.decel_limit_mps2(v0_mps);

    VehicleState veh;
    veh.v_mps = v0_mps;
    std::vector<double> a_trace;
    std::vector<StepSample> samples;
    for (int k = 0; k <= steps; ++k) {
        const ControlRequest clamped =
            clamp_request({nominal_mps2, 0, TurnSignal::None}, v0_mps, 0, dt, env);
        if (k % log_every == 0) {
            samples.push_back({k * dt, veh.v_mps, nominal_mps2, clamped.accel_mps2, 0});
            a_trace.push_back(veh.a_mps2);
        }
        veh = step_vehicle(veh, clamped, dt, actuator_lag_s);
    }

    const std::vector<double> filtered = measure_response(a_trace, 11);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i].a_measured_mps2 = filtered[i];
    r.series = std::move(samples);
    r.settled_mps2 = filtered.back();
    bool ok = true;
    for (double a : filtered)
        ok = ok && a >= -r.decel_limit_mps2 - 1e-9 && a <= env.accel_cap_mps2 + 1e-9;
    r.limit_adherence = ok;
    return r;
}

}  // namespace karlsim::dbw
