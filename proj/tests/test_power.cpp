#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include <karlsim/power.hpp>
#include <karlsim/power_registers.hpp>

using namespace karlsim;
using namespace karlsim::power;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

PowerTree with_load(PowerTree t, const std::string& channel, const std::string& device, double watts) {
    for (auto& c : t.channels)
        if (c.id == channel)
            for (auto& l : c.loads)
                if (l.device == device) l.watts = watts;
    return t;
}

}  // namespace

TEST_CASE("battery draw for both operating points, summed rail by rail") {
    // independent tally straight from the per-device numbers:
    //   full: ac 548+45, dc12 cabin 10+20+15+30+15+50+40, dc12 roof
    //   55+55+20+40, dc24 64+30
    const double full_expected = (593.0 + 180.0 + 170.0) / 0.95 + 94.0 / (0.95 * 0.92);
    //   idle: ac 316+40, dc12 cabin 8+12+8+10+10+30+25, dc12 roof
    //   22+22+15+24, dc24 56+22
    const double idle_expected = (356.0 + 103.0 + 83.0) / 0.95 + 78.0 / (0.95 * 0.92);

    const auto full = build_reference_power_tree(Profile::FullLoad);
    const auto idle = build_reference_power_tree(Profile::Idle);
    CHECK(validate_tree(full).empty());
    CHECK(validate_tree(idle).empty());

    CHECK_THAT(total_load_w(full), WithinRel(full_expected, 1e-12));
    CHECK_THAT(total_load_w(idle), WithinRel(idle_expected, 1e-12));
    // and the frozen decimals those sums come out to
    CHECK_THAT(total_load_w(full), WithinAbs(1100.18306636156, 1e-9));
    CHECK_THAT(total_load_w(idle), WithinAbs(659.771167048055, 1e-9));
}

TEST_CASE("output rail loads stay inside the supply limits") {
    const auto full = build_reference_power_tree(Profile::FullLoad);
    const auto lim = check_output_limits(full);
    CHECK_THAT(lim.ac_load_w, WithinRel(593.0, 1e-12));
    CHECK_THAT(lim.dc_load_w, WithinRel(180.0 + 170.0 + 94.0 / 0.92, 1e-12));
    CHECK(lim.ac_within_limit);
    CHECK(lim.dc_within_limit);

    // push the dc rail past 2160 W and the flag flips
    auto hot = with_load(full, "c-dc-hmi", "hmi", 2000.0);
    CHECK_FALSE(check_output_limits(hot).dc_within_limit);
}

TEST_CASE("endurance at full load is about four and a half hours") {
    const auto full = build_reference_power_tree(Profile::FullLoad);
    const auto idle = build_reference_power_tree(Profile::Idle);

    const auto e_full = endurance_h(full, false);
    REQUIRE_FALSE(e_full.unbounded);
    CHECK_THAT(e_full.hours, WithinRel(5000.0 / total_load_w(full), 1e-12));
    CHECK_THAT(e_full.hours, WithinAbs(4.5447, 5e-4));

    const auto e_idle = endurance_h(idle, false);
    CHECK_THAT(e_idle.hours, WithinAbs(7.5784, 5e-4));

    // state of charge scales runtime linearly
    auto half = full;
    half.battery.soc = 0.5;
    CHECK_THAT(endurance_h(half, false).hours, WithinRel(e_full.hours / 2, 1e-12));
}

TEST_CASE("shore charging outruns idle but only dents full load") {
    const auto full = build_reference_power_tree(Profile::FullLoad);
    const auto idle = build_reference_power_tree(Profile::Idle);
    CHECK_THAT(full.battery.charge_w(), WithinRel(1080.0, 1e-12));

    const auto e = endurance_h(full, true);
    REQUIRE_FALSE(e.unbounded);  // full load exceeds the charger: still draining
    CHECK_THAT(e.hours, WithinRel(5000.0 / (total_load_w(full) - 1080.0), 1e-12));
    CHECK(e.hours > 100.0);

    CHECK(endurance_h(idle, true).unbounded);
}

TEST_CASE("drain advances state of charge linearly and clamps at the rails") {
    const auto full = build_reference_power_tree(Profile::FullLoad);

    const auto after_1h = drain(full, 1.0, false);
    CHECK_THAT(after_1h.battery.soc, WithinRel(1.0 - total_load_w(full) / 5000.0, 1e-12));

    // splitting the interval does not change the endpoint
    const auto split = drain(drain(full, 0.4, false), 0.6, false);
    CHECK_THAT(split.battery.soc, WithinAbs(after_1h.battery.soc, 1e-15));

    CHECK(drain(full, 100.0, false).battery.soc == 0.0);
    const auto idle = build_reference_power_tree(Profile::Idle);
    CHECK(drain(idle, 10.0, true).battery.soc == 1.0);  // charging holds at full
    CHECK_THROWS_AS(drain(full, -1.0, false), std::invalid_argument);
}

TEST_CASE("switching the feeder blacks out the whole rooftop stage") {
    const auto full = build_reference_power_tree(Profile::FullLoad);
    const auto dark = switch_channel(full, "c-dc-roof-feeder", false);

    // tree operations are value-semantic: the original is untouched
    CHECK(feeder_on(full));
    CHECK_FALSE(feeder_on(dark));

    for (const char* id : {"r-dc-orin1", "r-dc-orin2", "r-dc-roof-switch", "r-dc-cameras",
                           "r-24-lidars", "r-24-fmcw"}) {
        CHECK(delivered_power_w(full, id) > 0.0);
        CHECK(delivered_power_w(dark, id) == 0.0);
        // the rooftop channels' own switches still read on
        CHECK(dark.find(id)->on);
    }
    // only the cabin remains
    CHECK_THAT(total_load_w(dark), WithinRel((593.0 + 180.0) / 0.95, 1e-12));

    CHECK_THROWS_AS(switch_channel(full, "no-such-channel", false), std::invalid_argument);
}

TEST_CASE("switching one rooftop channel removes exactly its share") {
    const auto full = build_reference_power_tree(Profile::FullLoad);
    const auto off = switch_channel(full, "r-24-fmcw", false);
    CHECK(delivered_power_w(off, "r-24-fmcw") == 0.0);
    CHECK_THAT(total_load_w(full) - total_load_w(off), WithinRel(30.0 / (0.95 * 0.92), 1e-9));
    // neighbours unaffected
    CHECK_THAT(delivered_power_w(off, "r-24-lidars"), WithinRel(64.0, 1e-12));
}

TEST_CASE("no fuse trips at either reference operating point") {
    CHECK(check_fuses(build_reference_power_tree(Profile::FullLoad)).empty());
    CHECK(check_fuses(build_reference_power_tree(Profile::Idle)).empty());
}

TEST_CASE("an overloaded rooftop channel trips alone") {
    auto t = with_load(build_reference_power_tree(Profile::FullLoad), "r-24-fmcw", "lidar-fmcw", 200.0);
    const auto tripped = check_fuses(t);
    REQUIRE(tripped.size() == 1);
    CHECK(tripped[0] == "r-24-fmcw");  // 200 W / 24 V = 8.3 A over a 5 A fuse
}

TEST_CASE("feeder fuse sees only the surviving rooftop channels") {
    // blow up the camera channel: 8 x 150 W is 100 A over its 10 A fuse,
    // and would push the feeder to about 119 A if it were still counted
    auto t = build_reference_power_tree(Profile::FullLoad);
    for (auto& c : t.channels)
        if (c.id == "r-dc-cameras")
            for (auto& l : c.loads) l.watts = 150.0;

    const auto tripped = check_fuses(t);
    CHECK(contains(tripped, "r-dc-cameras"));
    CHECK_FALSE(contains(tripped, "c-dc-roof-feeder"));

    // with the channel fuses out of the picture, the same load does trip
    // the feeder: a 60 A fuse against (170 + 1160 + 102.2 W) / 12 V
    auto big_fuses = t;
    for (auto& c : big_fuses.channels)
        if (c.stage == Stage::Rooftop) c.fuse_a = 1000.0;
    const auto tripped2 = check_fuses(big_fuses);
    CHECK(contains(tripped2, "c-dc-roof-feeder"));
    CHECK_FALSE(contains(tripped2, "r-dc-cameras"));
}

TEST_CASE("cabin channels are fused independently of the feeder") {
    auto t = with_load(build_reference_power_tree(Profile::FullLoad), "c-dc-hmi", "hmi", 150.0);
    const auto tripped = check_fuses(t);
    REQUIRE(tripped.size() == 1);
    CHECK(tripped[0] == "c-dc-hmi");  // 12.5 A over a 10 A fuse

    // a dark rooftop draws nothing, so nothing up there can trip
    auto dark = with_load(build_reference_power_tree(Profile::FullLoad), "r-24-fmcw", "lidar-fmcw", 500.0);
    dark = switch_channel(dark, "c-dc-roof-feeder", false);
    CHECK(check_fuses(dark).empty());
}

TEST_CASE("feeder current accounts for the step-up converter input") {
    const auto full = build_reference_power_tree(Profile::FullLoad);
    CHECK_THAT(feeder_current_a(full, {}), WithinRel((170.0 + 94.0 / 0.92) / 12.0, 1e-12));
    CHECK_THAT(feeder_current_a(full, {"r-24-lidars", "r-24-fmcw"}), WithinRel(170.0 / 12.0, 1e-12));
}

TEST_CASE("validate_tree flags structural faults") {
    auto t = build_reference_power_tree(Profile::FullLoad);
    SECTION("duplicate channel") {
        t.channels.push_back(t.channels.front());
        CHECK_FALSE(validate_tree(t).empty());
    }
    SECTION("rooftop without feeder") {
        t.rooftop_feeder_id = "does-not-exist";
        const auto v = validate_tree(t);
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule.find("feeder") != std::string::npos);
    }
    SECTION("feeder on the wrong rail") {
        t.rooftop_feeder_id = "c-ac-hpc";
        CHECK_FALSE(validate_tree(t).empty());
    }
    SECTION("bad efficiency") {
        t.eff.step_up_24 = 0.0;
        CHECK_FALSE(validate_tree(t).empty());
        t.eff.step_up_24 = 1.2;
        CHECK_FALSE(validate_tree(t).empty());
    }
    SECTION("negative load") {
        t = with_load(t, "c-dc-hmi", "hmi", -5.0);
        CHECK_FALSE(validate_tree(t).empty());
    }
    SECTION("bad battery") {
        t.battery.soc = 1.5;
        CHECK_FALSE(validate_tree(t).empty());
        t.battery.soc = 0.5;
        t.battery.capacity_wh = 0;
        CHECK_FALSE(validate_tree(t).empty());
    }
    SECTION("zero fuse") {
        t.channels[0].fuse_a = 0;
        CHECK_FALSE(validate_tree(t).empty());
    }
}

TEST_CASE("holding registers map rooftop channels in declaration order") {
    RooftopRegisterMap regs(build_reference_power_tree(Profile::FullLoad));
    REQUIRE(regs.rooftop_channel_count() == 6);

    // everything starts on
    for (std::uint16_t a = 0; a < 6; ++a) CHECK(regs.read_holding(a) == 1);
    CHECK(regs.read_holding(RooftopRegisterMap::kFeederRegister) == 1);

    // register 5 is the last-declared rooftop channel: the fmcw supply
    regs.write_holding(5, 0);
    CHECK(regs.read_holding(5) == 0);
    CHECK_FALSE(regs.tree().find("r-24-fmcw")->on);
    CHECK(regs.tree().find("r-24-lidars")->on);

    regs.write_holding(5, 7);  // any nonzero value switches on
    CHECK(regs.read_holding(5) == 1);
    CHECK(regs.tree().find("r-24-fmcw")->on);

    // register 0 is the first-declared one
    regs.write_holding(0, 0);
    CHECK_FALSE(regs.tree().find("r-dc-orin1")->on);
}

TEST_CASE("feeder register blacks out the roof but channel reads keep state") {
    RooftopRegisterMap regs(build_reference_power_tree(Profile::FullLoad));
    regs.write_holding(RooftopRegisterMap::kFeederRegister, 0);
    CHECK(regs.read_holding(RooftopRegisterMap::kFeederRegister) == 0);
    for (std::uint16_t a = 0; a < 6; ++a) CHECK(regs.read_holding(a) == 1);
    CHECK(delivered_power_w(regs.tree(), "r-dc-orin1") == 0.0);
}

TEST_CASE("out-of-range registers answer with an illegal-address error") {
    RooftopRegisterMap regs(build_reference_power_tree(Profile::FullLoad));
    CHECK_THROWS_AS(regs.read_holding(6), std::out_of_range);
    CHECK_THROWS_AS(regs.read_holding(99), std::out_of_range);
    CHECK_THROWS_AS(regs.read_holding(101), std::out_of_range);
    CHECK_THROWS_AS(regs.write_holding(42, 1), std::out_of_range);
    CHECK_THROWS_MATCHES(regs.read_holding(77), std::out_of_range,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("illegal data address")));
}
