#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <karlsim/coverage.hpp>
#include <karlsim/rng.hpp>

using namespace karlsim;
using namespace karlsim::coverage;
using Catch::Matchers::WithinAbs;

namespace {

/* Independent frustum predicate for cross-checking covers(): elevation via
 * asin of the height ratio, azimuth via the planar dot product against the
 * boresight instead of wrapped angle differences. */
bool oracle_covers(const SensorSpec& s, double x, double y, double z) {
    const double dx = x - s.pose.x_m;
    const double dy = y - s.pose.y_m;
    const double dz = z - s.pose.z_m;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r < s.frustum.min_range_m || r > s.frustum.max_range_m) return false;

    const double elev = std::asin(dz / r) * kDegPerRad;
    if (std::abs(elev + s.pose.pitch_deg) > 0.5 * s.frustum.vfov_deg) return false;

    if (s.modality == Modality::LidarRotating || s.frustum.hfov_deg >= 360.0) return true;
    const double horiz = std::hypot(dx, dy);
    if (horiz == 0.0) return std::abs(wrap_deg(-s.pose.yaw_deg)) <= 0.5 * s.frustum.hfov_deg;
    const double yaw = s.pose.yaw_deg / kDegPerRad;
    const double cos_off = (dx * std::cos(yaw) + dy * std::sin(yaw)) / horiz;
    return cos_off >= std::cos(0.5 * s.frustum.hfov_deg / kDegPerRad);
}

SensorSpec random_sensor(rng::Rng& r, int i) {
    SensorSpec s;
    s.id = "s" + std::to_string(i);
    s.modality = static_cast<Modality>(r.next_u64() % 4);
    s.pose = {r.uniform(-5, 5), r.uniform(-5, 5), r.uniform(0.3, 2.5),
              r.uniform(-180, 180), r.uniform(-10, 45)};
    s.frustum = {r.uniform(30, 360), r.uniform(10, 90), 0.2, r.uniform(5, 60)};
    return s;
}

int nearest_bin(const std::vector<RingBin>& bins, double az_deg) {
    int best = 0;
    for (int k = 0; k < static_cast<int>(bins.size()); ++k)
        if (std::abs(wrap_deg(bins[k].azimuth_deg - az_deg)) <
            std::abs(wrap_deg(bins[best].azimuth_deg - az_deg)))
            best = k;
    return best;
}

}  // namespace

TEST_CASE("wrap_deg folds into [-180, 180]") {
    CHECK(wrap_deg(190) == -170.0);
    CHECK(wrap_deg(-190) == 170.0);
    CHECK(wrap_deg(730) == 10.0);
    CHECK(wrap_deg(180) == 180.0);
    CHECK(wrap_deg(0) == 0.0);
}

TEST_CASE("frustum membership: worked examples off the front camera") {
    const auto rig = build_reference_rig();
    const SensorSpec& cam = *rig.find("cam-front-center");

    // ground point 10 m ahead of the lens: elevation -11.3 vs band [-31, 21]
    CHECK(covers(cam, 12.75, 0.0, 0.0));
    // directly behind: azimuth off by 180
    CHECK_FALSE(covers(cam, -7.25, 0.0, 0.0));
    // past the range limit
    CHECK_FALSE(covers(cam, 2.75 + 130.0, 0.0, 2.0));
    // inside the minimum range
    CHECK_FALSE(covers(cam, 2.85, 0.0, 2.0));
    // high above the band: 45 degrees up at 10 m
    CHECK_FALSE(covers(cam, 12.75, 0.0, 12.0));
}

TEST_CASE("rotating lidar sweeps all azimuths within its elevation band") {
    const auto rig = build_reference_rig();
    const SensorSpec& lidar = *rig.find("lidar-front-left");
    for (int k = 0; k < 48; ++k) {
        const double az = -180.0 + 360.0 * k / 48.0;
        const double x = lidar.pose.x_m + 10 * std::cos(az / kDegPerRad);
        const double y = lidar.pose.y_m + 10 * std::sin(az / kDegPerRad);
        CHECK(covers(lidar, x, y, 1.0));
    }
    // band is [-41, +1]: a point slightly above the sensor plane fails
    CHECK_FALSE(covers(lidar, lidar.pose.x_m + 10, lidar.pose.y_m, lidar.pose.z_m + 1.0));
    // and beyond max range fails even on the sweep plane
    CHECK_FALSE(covers(lidar, lidar.pose.x_m + 150, lidar.pose.y_m, 1.0));
}

TEST_CASE("azimuth test wraps across the rear seam") {
    const auto rig = build_reference_rig();
    const SensorSpec& rear = *rig.find("cam-rear-center");
    // dead astern (azimuth 180 from the sensor)
    CHECK(covers(rear, rear.pose.x_m - 10.0, 0.0, 1.0));
    // 40 degrees to either side of the seam, still inside the 110 deg fov
    const double r = 10.0;
    for (double az : {140.0, -140.0}) {
        const double x = rear.pose.x_m + r * std::cos(az / kDegPerRad);
        const double y = rear.pose.y_m + r * std::sin(az / kDegPerRad);
        CHECK(covers(rear, x, y, 1.0));
    }
}

TEST_CASE("covers is invariant under rotation about the origin") {
    rng::Rng r(31);
    for (int trial = 0; trial < 300; ++trial) {
        SensorSpec s = random_sensor(r, trial);
        const double px = r.uniform(-8, 8), py = r.uniform(-8, 8), pz = r.uniform(0, 3);
        const double th = r.uniform(-180, 180) / kDegPerRad;
        const double c = std::cos(th), sn = std::sin(th);

        SensorSpec rot = s;
        rot.pose.x_m = c * s.pose.x_m - sn * s.pose.y_m;
        rot.pose.y_m = sn * s.pose.x_m + c * s.pose.y_m;
        rot.pose.yaw_deg = s.pose.yaw_deg + th * kDegPerRad;

        CHECK(covers(s, px, py, pz) ==
              covers(rot, c * px - sn * py, sn * px + c * py, pz));
    }
}

TEST_CASE("covers grows monotonically with the frustum") {
    rng::Rng r(17);
    for (int trial = 0; trial < 300; ++trial) {
        SensorSpec s = random_sensor(r, trial);
        const double px = r.uniform(-8, 8), py = r.uniform(-8, 8), pz = r.uniform(0, 3);
        if (!covers(s, px, py, pz)) continue;
        SensorSpec wide = s;
        wide.frustum.hfov_deg = std::min(360.0, s.frustum.hfov_deg * 1.5);
        wide.frustum.vfov_deg = s.frustum.vfov_deg * 1.5;
        wide.frustum.max_range_m = s.frustum.max_range_m * 2;
        CHECK(covers(wide, px, py, pz));

        SensorSpec short_range = s;
        short_range.frustum.max_range_m = 0.9 * std::hypot(std::hypot(px - s.pose.x_m, py - s.pose.y_m), pz - s.pose.z_m);
        CHECK_FALSE(covers(short_range, px, py, pz));
    }
}

TEST_CASE("grid coverage matches an independent geometric oracle") {
    // reference rig on a mid-size grid plus randomized rigs on small grids
    const GridSpec ref_spec{12.5, 0.5, 1.0, Footprint{}};
    const auto g = compute_coverage(build_reference_rig(), ref_spec);
    REQUIRE(g.n == 50);
    {
        const auto rig = build_reference_rig();
        for (int iy = 0; iy < g.n; ++iy) {
            for (int ix = 0; ix < g.n; ++ix) {
                const double x = g.x_of(ix), y = g.y_of(iy);
                const CellCount& c = g.at(ix, iy);
                REQUIRE(c.excluded == ref_spec.footprint.contains(x, y));
                if (c.excluded) continue;
                std::array<int, 4> want{};
                for (const auto& s : rig.sensors)
                    if (oracle_covers(s, x, y, ref_spec.height_m)) ++want[static_cast<int>(s.modality)];
                REQUIRE(c.by_modality == want);
            }
        }
    }

    rng::Rng r(5);
    for (int trial = 0; trial < 8; ++trial) {
        SensorRig rig;
        for (int i = 0; i < 6; ++i) rig.sensors.push_back(random_sensor(r, i));
        const GridSpec spec{5.0, 0.5, r.uniform(0.0, 2.0), Footprint{}};
        const auto grid = compute_coverage(rig, spec);
        REQUIRE(grid.n == 20);
        for (int iy = 0; iy < grid.n; ++iy) {
            for (int ix = 0; ix < grid.n; ++ix) {
                if (grid.at(ix, iy).excluded) continue;
                std::array<int, 4> want{};
                for (const auto& s : rig.sensors)
                    if (oracle_covers(s, grid.x_of(ix), grid.y_of(iy), spec.height_m))
                        ++want[static_cast<int>(s.modality)];
                REQUIRE(grid.at(ix, iy).by_modality == want);
            }
        }
    }
}

TEST_CASE("downward pitch shrinks the close-range blind disk") {
    // single spinning lidar 2 m up; ground-level blind disk radius is
    // z / tan(band floor): 2.30 m pitched down 20, 5.21 m level
    auto make = [](double pitch) {
        SensorRig rig;
        rig.sensors.push_back({"l", Modality::LidarRotating, {0, 0, 2.0, 0, pitch},
                               {360, 42, 0.1, 120}, 0, 0, 20, false});
        return rig;
    };
    const Footprint none{1.0, -1.0, 1.0, -1.0};  // empty box excludes nothing
    const GridSpec spec{10.0, 0.25, 0.0, none};

    const double pitched = blind_spot_area_m2(compute_coverage(make(20), spec), Family::Lidar);
    const double level = blind_spot_area_m2(compute_coverage(make(0), spec), Family::Lidar);
    CHECK(pitched < level);

    const double r_pitched = 2.0 / std::tan(41.0 / kDegPerRad);
    const double r_level = 2.0 / std::tan(21.0 / kDegPerRad);
    CHECK_THAT(pitched, WithinAbs(M_PI * r_pitched * r_pitched, 0.15 * M_PI * r_pitched * r_pitched));
    CHECK_THAT(level, WithinAbs(M_PI * r_level * r_level, 0.10 * M_PI * r_level * r_level));
}

TEST_CASE("reference rig leaves no lidar blind spots on the working grid") {
    const auto g = compute_coverage(build_reference_rig(), GridSpec{});
    REQUIRE(g.n == 120);
    CHECK(blind_spot_area_m2(g, Family::Lidar) == 0.0);
    // cameras sit high and pitched: a thin band at the bumpers is theirs alone
    CHECK(blind_spot_area_m2(g, Family::Camera) > 0.0);
    // radars are low with narrow vertical fans: a close-in ring is blind
    CHECK(blind_spot_area_m2(g, Family::Radar) > 0.0);

    long non_excluded = 0;
    for (const auto& c : g.cells)
        if (!c.excluded) ++non_excluded;
    long hist_total = 0;
    for (const auto& [count, cells] : redundancy_histogram(g)) {
        CHECK(count >= 0);
        hist_total += cells;
    }
    CHECK(hist_total == non_excluded);
}

TEST_CASE("footprint cells are excluded and never counted") {
    const auto g = compute_coverage(build_reference_rig(), GridSpec{});
    const Footprint fp;  // default outline
    long excluded = 0;
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const bool inside = fp.contains(g.x_of(ix), g.y_of(iy));
            CHECK(g.at(ix, iy).excluded == inside);
            if (inside) {
                ++excluded;
                CHECK(g.at(ix, iy).total() == 0);
            }
        }
    CHECK(excluded > 0);
}

TEST_CASE("ten-meter ring: dual lidar-camera everywhere, radar on the lobes") {
    const auto rig = build_reference_rig();
    const auto ring = ring_coverage(rig, 10.0, 1.0, 360);
    REQUIRE(ring.size() == 360);

    int dual = 0, two_plus = 0;
    for (const auto& bin : ring) {
        // all four spinning lidars see the whole ring
        CHECK(bin.by_modality[static_cast<int>(Modality::LidarRotating)] == 4);
        if (bin.family_count(Family::Lidar) >= 1 && bin.family_count(Family::Camera) >= 1) ++dual;
        if (bin.total() >= 2) ++two_plus;
    }
    CHECK(dual == 360);
    CHECK(two_plus == 360);

    for (double az : {0.0, 90.0, -90.0, 143.0, -143.0, 180.0})
        CHECK(ring[nearest_bin(ring, az)].family_count(Family::Radar) >= 1);
}

TEST_CASE("family reporting collapses the two lidar kinds") {
    CHECK(family_of(Modality::LidarRotating) == Family::Lidar);
    CHECK(family_of(Modality::LidarFmcw) == Family::Lidar);
    CHECK(family_of(Modality::Camera) == Family::Camera);
    CHECK(family_of(Modality::Radar) == Family::Radar);

    CellCount c{{2, 1, 1, 3}, false};
    CHECK(c.family_count(Family::Camera) == 2);
    CHECK(c.family_count(Family::Lidar) == 2);
    CHECK(c.family_count(Family::Radar) == 3);
    CHECK(c.total() == 7);
}

TEST_CASE("reference rig inventory") {
    const auto rig = build_reference_rig();
    REQUIRE(rig.sensors.size() == 18);
    int by_modality[4] = {0, 0, 0, 0};
    for (const auto& s : rig.sensors) ++by_modality[static_cast<int>(s.modality)];
    CHECK(by_modality[static_cast<int>(Modality::Camera)] == 8);
    CHECK(by_modality[static_cast<int>(Modality::LidarRotating)] == 4);
    CHECK(by_modality[static_cast<int>(Modality::LidarFmcw)] == 1);
    CHECK(by_modality[static_cast<int>(Modality::Radar)] == 5);

    // roof devices share the rack plane, radars sit low
    for (const auto& s : rig.sensors) {
        if (s.modality == Modality::Radar)
            CHECK(s.pose.z_m == 0.5);
        else
            CHECK(s.pose.z_m == 2.0);
    }
    CHECK(rig.find("lidar-fmcw")->radial_velocity);
    CHECK_FALSE(rig.find("cam-front-center")->radial_velocity);
    CHECK(rig.find("does-not-exist") == nullptr);
}

TEST_CASE("grid construction validates its inputs") {
    CHECK_THROWS_AS(compute_coverage({}, GridSpec{0.0, 0.5, 1.0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(compute_coverage({}, GridSpec{10.0, 0.0, 1.0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(ring_coverage({}, 10.0, 1.0, 0), std::invalid_argument);
}
