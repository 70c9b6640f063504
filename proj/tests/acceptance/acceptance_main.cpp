#include <cmath>
#include <cstdio>
#include <filesystem>

#include <karlsim/harness/validate.hpp>

/* Acceptance gate. Runs the validation suite on the reference scenario and
 * prints one pass/fail line per criterion, then cross-checks a handful of
 * the headline numbers against constants computed here by hand, so a bug
 * that shifted both the simulator and its expectations together would
 * still surface. Exit 0 only if every line passes. */

namespace {

int failures = 0;

void line(bool pass, const std::string& tag, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", tag.c_str(), detail.c_str());
    if (!pass) ++failures;
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

}  // namespace

int main() {
    using namespace karlsim;
    const harness::Scenario sc = harness::build_reference_scenario();
    const std::filesystem::path scratch =
        std::filesystem::temp_directory_path() / "karlsim-acceptance";
    std::filesystem::remove_all(scratch);

    harness::ValidationOutcome out;
    try {
        out = harness::validate(sc, scratch);
    } catch (const std::exception& e) {
        std::printf("[FAIL] validate: threw: %s\n", e.what());
        return 1;
    }

    for (const auto& c : out.criteria)
        line(c.pass, std::to_string(c.index) + " " + c.name, c.detail);

    /* Independent cross-checks, constants derived outside the library. */
    const harness::Report& r = out.report;

    // battery draw, rail by rail: ac/0.95 + dc/0.95 + 24v/(0.95*0.92)
    const double idle_w = (356.0 + 103.0 + 83.0) / 0.95 + 78.0 / (0.95 * 0.92);
    const double full_w = (593.0 + 180.0 + 170.0) / 0.95 + 94.0 / (0.95 * 0.92);
    line(near(r.power_idle.total_w, idle_w, 1e-9) && near(r.power_full.total_w, full_w, 1e-9),
         "oracle power-totals",
         "idle=" + std::to_string(r.power_idle.total_w) + "W full=" +
             std::to_string(r.power_full.total_w) + "W");

    // endurance = usable energy / full draw
    line(!r.power_full.endurance.unbounded &&
             near(r.power_full.endurance.hours, 5000.0 / full_w, 1e-9),
         "oracle endurance", std::to_string(r.power_full.endurance.hours) + "h");

    // four rotating lidars at 0.24 Gbit/s each, compressed 10:1 camera
    // streams staying off the trunk: 4*251658240 / 10 Gbit/s
    line(near(r.uplink_utilization, 4.0 * 251658240.0 / 1e10, 1e-12), "oracle uplink-utilization",
         std::to_string(r.uplink_utilization));

    // pipeline latency table, milliseconds
    const bool lat_ok = near(r.mean_latency_s.at("lidar-front-left"), 0.072, 1e-9) &&
                        near(r.mean_latency_s.at("lidar-fmcw"), 0.220, 1e-9) &&
                        near(r.mean_latency_s.at("cam-front-center"), 0.139, 1e-9) &&
                        near(r.mean_latency_s.at("radar-front-center"), 0.0005, 1e-9);
    line(lat_ok, "oracle latency-table", "rotating/fmcw/camera/radar = 72/220/139/0.5 ms");

    int passed = 0;
    for (const auto& c : out.criteria) passed += c.pass ? 1 : 0;
    std::printf("%s: %d/%d criteria, 4 cross-checks\n", failures == 0 ? "ACCEPTED" : "REJECTED",
                passed, static_cast<int>(out.criteria.size()));
    return failures == 0 ? 0 : 1;
}
