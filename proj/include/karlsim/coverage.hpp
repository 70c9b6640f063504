#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/* Sensor field-of-view coverage on a ground-plane grid.
 *
 * Conventions: vehicle frame with x forward, y left, z up, origin at the
 * rear axle center on the ground. Yaw is measured from +x toward +y
 * (counterclockwise from above). Pitch is positive downward, so a sensor
 * with pitch 20 looks 20 degrees below the horizon and its elevation band
 * is centered at -20. Angles are degrees throughout. */

namespace karlsim::coverage {

enum class Modality { Camera, LidarRotating, LidarFmcw, Radar };

/* Reporting collapses the two lidar kinds into one family. */
enum class Family { Camera, Lidar, Radar };

inline Family family_of(Modality m) {
    switch (m) {
        case Modality::Camera: return Family::Camera;
        case Modality::LidarRotating:
        case Modality::LidarFmcw: return Family::Lidar;
        case Modality::Radar: return Family::Radar;
    }
    throw std::invalid_argument("family_of: bad modality");
}

struct SensorPose {
    double x_m = 0, y_m = 0, z_m = 0;
    double yaw_deg = 0;
    double pitch_deg = 0;  // positive = down

    friend bool operator==(const SensorPose&, const SensorPose&) = default;
};

struct Frustum {
    double hfov_deg = 0;
    double vfov_deg = 0;
    double min_range_m = 0;
    double max_range_m = 0;

    friend bool operator==(const Frustum&, const Frustum&) = default;
};

struct SensorSpec {
    std::string id;
    Modality modality = Modality::Camera;
    SensorPose pose;
    Frustum frustum;
    int cols = 0;  // 0 when the sensor has no grid resolution (radar)
    int rows = 0;
    double rate_hz = 0;
    bool radial_velocity = false;

    friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct SensorRig {
    std::vector<SensorSpec> sensors;

    const SensorSpec* find(const std::string& id) const {
        for (const auto& s : sensors)
            if (s.id == id) return &s;
        return nullptr;
    }

    friend bool operator==(const SensorRig&, const SensorRig&) = default;
};

constexpr double kDegPerRad = 57.29577951308232;

/* Wrap an angle difference into [-180, 180]. */
inline double wrap_deg(double a) {
    a = std::fmod(a, 360.0);
    if (a > 180.0) a -= 360.0;
    if (a < -180.0) a += 360.0;
    return a;
}

/* Frustum membership test for a point in the vehicle frame. Rotating
 * lidars sweep the full circle, so only range and elevation apply. */
inline bool covers(const SensorSpec& s, double x, double y, double z) {
    const double dx = x - s.pose.x_m;
    const double dy = y - s.pose.y_m;
    const double dz = z - s.pose.z_m;
    const double horiz = std::hypot(dx, dy);
    const double range = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (range < s.frustum.min_range_m || range > s.frustum.max_range_m) return false;

    const double elev_deg = std::atan2(dz, horiz) * kDegPerRad;
    if (std::abs(elev_deg - (-s.pose.pitch_deg)) > 0.5 * s.frustum.vfov_deg) return false;

    const bool full_circle = s.modality == Modality::LidarRotating || s.frustum.hfov_deg >= 360.0;
    if (!full_circle) {
        const double az_deg = std::atan2(dy, dx) * kDegPerRad;
        if (std::abs(wrap_deg(az_deg - s.pose.yaw_deg)) > 0.5 * s.frustum.hfov_deg) return false;
    }
    return true;
}

/* Axis-aligned vehicle outline on the ground; grid cells inside it are
 * excluded from coverage statistics. */
struct Footprint {
    double x_min_m = -1.0;
    double x_max_m = 4.2;
    double y_min_m = -0.97;
    double y_max_m = 0.97;

    bool contains(double x, double y) const {
        return x >= x_min_m && x <= x_max_m && y >= y_min_m && y <= y_max_m;
    }

    friend bool operator==(const Footprint&, const Footprint&) = default;
};

/* Square grid centered on the origin spanning [-extent, extent] in x and y,
 * evaluated at a fixed height above ground. */
struct GridSpec {
    double extent_m = 30.0;
    double cell_m = 0.5;
    double height_m = 1.0;
    Footprint footprint;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CellCount {
    std::array<int, 4> by_modality{};  // indexed by Modality
    bool excluded = false;

    int total() const { return by_modality[0] + by_modality[1] + by_modality[2] + by_modality[3]; }
    int family_count(Family f) const {
        switch (f) {
            case Family::Camera: return by_modality[0];
            case Family::Lidar: return by_modality[1] + by_modality[2];
            case Family::Radar: return by_modality[3];
        }
        return 0;
    }
};

struct CoverageGrid {
    GridSpec spec;
    int n = 0;  // cells per axis
    std::vector<CellCount> cells;

    const CellCount& at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * n + ix]; }
    double x_of(int ix) const { return -spec.extent_m + (ix + 0.5) * spec.cell_m; }
    double y_of(int iy) const { return -spec.extent_m + (iy + 0.5) * spec.cell_m; }
};

inline CoverageGrid compute_coverage(const SensorRig& rig, const GridSpec& spec) {
    if (!(spec.extent_m > 0) || !(spec.cell_m > 0))
        throw std::invalid_argument("compute_coverage: extent and cell size must be positive");
    CoverageGrid g;
    g.spec = spec;
    g.n = static_cast<int>(std::round(2.0 * spec.extent_m / spec.cell_m));
    if (g.n < 1) throw std::invalid_argument("compute_coverage: grid has no cells");
    g.cells.resize(static_cast<std::size_t>(g.n) * g.n);
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            CellCount& c = g.cells[static_cast<std::size_t>(iy) * g.n + ix];
            const double x = g.x_of(ix);
            const double y = g.y_of(iy);
            if (spec.footprint.contains(x, y)) {
                c.excluded = true;
                continue;
            }
            for (const auto& s : rig.sensors)
                if (covers(s, x, y, spec.height_m)) ++c.by_modality[static_cast<int>(s.modality)];
        }
    }
    return g;
}

/* Area (m^2) of non-excluded cells seen by no sensor of the family. */
inline double blind_spot_area_m2(const CoverageGrid& g, Family f) {
    long blind = 0;
    for (const auto& c : g.cells)
        if (!c.excluded && c.family_count(f) == 0) ++blind;
    return static_cast<double>(blind) * g.spec.cell_m * g.spec.cell_m;
}

/* Cells by total covering-sensor count, excluded cells left out. */
inline std::map<int, long> redundancy_histogram(const CoverageGrid& g) {
    std::map<int, long> h;
    for (const auto& c : g.cells)
        if (!c.excluded) ++h[c.total()];
    return h;
}

struct RingBin {
    double azimuth_deg = 0;
    std::array<int, 4> by_modality{};

    int family_count(Family f) const {
        CellCount c{by_modality, false};
        return c.family_count(f);
    }
    int total() const { return by_modality[0] + by_modality[1] + by_modality[2] + by_modality[3]; }
};

/* Coverage sampled on a circle of given radius around the origin. */
inline std::vector<RingBin> ring_coverage(const SensorRig& rig, double radius_m, double height_m,
                                          int bins) {
    if (bins < 1) throw std::invalid_argument("ring_coverage: need at least one bin");
    std::vector<RingBin> out(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) {
        const double az = -180.0 + (k + 0.5) * 360.0 / bins;
        out[k].azimuth_deg = az;
        const double x = radius_m * std::cos(az / kDegPerRad);
        const double y = radius_m * std::sin(az / kDegPerRad);
        for (const auto& s : rig.sensors)
            if (covers(s, x, y, height_m)) ++out[k].by_modality[static_cast<int>(s.modality)];
    }
    return out;
}

/* Reference rig: 8 cameras, 4 rotating lidars, 1 fmcw lidar on the roof
 * rack (z = 2.0 m, rack corners x in {0.85, 2.75}, y in {-0.5, 0.5}),
 * 5 radars low in the bumpers and grill. Orientations, fields of view,
 * resolutions and rates follow the vehicle's sensor sheet. */
inline SensorRig build_reference_rig() {
    SensorRig r;
    auto add = [&](std::string id, Modality m, SensorPose pose, Frustum f, int cols, int rows,
                   double rate, bool rv) {
        r.sensors.push_back({std::move(id), m, pose, f, cols, rows, rate, rv});
    };

    const Frustum cam_narrow{80, 52, 0.2, 120};
    const Frustum cam_wide{110, 80, 0.2, 60};
    add("cam-front-center", Modality::Camera, {2.75, 0.0, 2.0, 0, 5}, cam_narrow, 1920, 1200, 60, false);
    add("cam-front-left", Modality::Camera, {2.75, 0.5, 2.0, 45, 5}, cam_narrow, 1920, 1200, 60, false);
    add("cam-front-right", Modality::Camera, {2.75, -0.5, 2.0, -45, 5}, cam_narrow, 1920, 1200, 60, false);
    add("cam-mid-left", Modality::Camera, {1.8, 0.5, 2.0, 90, 20}, cam_wide, 1920, 1200, 60, false);
    add("cam-mid-right", Modality::Camera, {1.8, -0.5, 2.0, -90, 20}, cam_wide, 1920, 1200, 60, false);
    add("cam-rear-center", Modality::Camera, {0.85, 0.0, 2.0, 180, 0}, cam_wide, 1920, 1200, 60, false);
    add("cam-rear-left", Modality::Camera, {0.85, 0.5, 2.0, 135, 20}, cam_wide, 1920, 1200, 60, false);
    add("cam-rear-right", Modality::Camera, {0.85, -0.5, 2.0, -135, 20}, cam_wide, 1920, 1200, 60, false);

    const Frustum lidar_spin{360, 42, 0.3, 120};
    add("lidar-front-left", Modality::LidarRotating, {2.75, 0.5, 2.0, 45, 20}, lidar_spin, 1024, 128, 20, false);
    add("lidar-front-right", Modality::LidarRotating, {2.75, -0.5, 2.0, -45, 20}, lidar_spin, 1024, 128, 20, false);
    add("lidar-rear-left", Modality::LidarRotating, {0.85, 0.5, 2.0, 135, 20}, lidar_spin, 1024, 128, 20, false);
    add("lidar-rear-right", Modality::LidarRotating, {0.85, -0.5, 2.0, -135, 20}, lidar_spin, 1024, 128, 20, false);
    add("lidar-fmcw", Modality::LidarFmcw, {2.75, 0.0, 2.0, 0, 20}, {120, 29, 0.3, 200}, 2000, 64, 20, true);

    add("radar-front-center", Modality::Radar, {4.0, 0.0, 0.5, 0, 0}, {110, 23, 0.5, 250}, 0, 0, 15, true);
    add("radar-front-left", Modality::Radar, {3.9, 0.7, 0.5, 90, 0}, {130, 14, 0.5, 130}, 0, 0, 15, true);
    add("radar-front-right", Modality::Radar, {3.9, -0.7, 0.5, -90, 0}, {130, 14, 0.5, 130}, 0, 0, 15, true);
    add("radar-rear-left", Modality::Radar, {-0.9, 0.7, 0.5, 143, 0}, {100, 20, 0.5, 100}, 0, 0, 15, true);
    add("radar-rear-right", Modality::Radar, {-0.9, -0.7, 0.5, -143, 0}, {100, 20, 0.5, 100}, 0, 0, 15, true);

    return r;
}

}  // namespace karlsim::coverage
