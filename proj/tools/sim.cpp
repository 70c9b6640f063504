#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include <karlsim/karlsim.hpp>

/* Simulator CLI.
 *
 *   sim run --scenario <file> --seed <n> --out <dir> [--format json|csv]
 *   sim coverage --rig <file> --grid <extent,cell,height> --out <dir>
 *   sim validate [--out <dir>]
 *   sim topology check --file <f>
 *
 * Exit codes: 0 success, 1 criteria/validation failure, 2 usage or
 * configuration error. SIM_LOG=error|warn|info|debug selects verbosity. */

namespace {

namespace fs = std::filesystem;
using namespace karlsim;

int cmd_run(const std::string& scenario_path, std::uint64_t seed, const std::string& out_dir,
            const std::string& format) {
    harness::Scenario sc = harness::load_scenario(scenario_path);
    sc.seed = seed;
    log::info("scenario " + sc.name + ", seed " + std::to_string(seed));
    const harness::Report report = harness::run(sc);
    harness::emit(report, out_dir, format);
    std::printf("report written to %s (format %s)\n", out_dir.c_str(), format.c_str());
    return 0;
}

int cmd_coverage(const std::string& rig_path, const std::string& grid_arg,
                 const std::string& out_dir) {
    double extent = 0, cell = 0, height = 0;
    if (std::sscanf(grid_arg.c_str(), "%lf,%lf,%lf", &extent, &cell, &height) != 3)
        throw std::runtime_error("--grid expects extent,cell,height: " + grid_arg);

    const coverage::SensorRig rig = io::rig_from_json(io::load_json_file(rig_path));
    coverage::GridSpec spec;
    spec.extent_m = extent;
    spec.cell_m = cell;
    spec.height_m = height;
    const coverage::CoverageGrid grid = coverage::compute_coverage(rig, spec);

    fs::create_directories(out_dir);
    {
        csv::Writer w(fs::path(out_dir) / "coverage.csv", "x,y,camera_n,lidar_n,radar_n");
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                const auto& c = grid.at(ix, iy);
                if (c.excluded) continue;
                w.row(grid.x_of(ix), grid.y_of(iy), c.family_count(coverage::Family::Camera),
                      c.family_count(coverage::Family::Lidar),
                      c.family_count(coverage::Family::Radar));
            }
    }
    io::json summary;
    summary["grid"] = io::to_json(spec);
    summary["blind_spot_m2"] = {
        {"camera", coverage::blind_spot_area_m2(grid, coverage::Family::Camera)},
        {"lidar", coverage::blind_spot_area_m2(grid, coverage::Family::Lidar)},
        {"radar", coverage::blind_spot_area_m2(grid, coverage::Family::Radar)}};
    io::json redundancy = io::json::object();
    for (const auto& [k, n] : coverage::redundancy_histogram(grid))
        redundancy[std::to_string(k)] = n;
    summary["redundancy"] = std::move(redundancy);
    io::save_json_file(fs::path(out_dir) / "coverage_summary.json", summary);
    std::printf("coverage grid (%dx%d) written to %s\n", grid.n, grid.n, out_dir.c_str());
    return 0;
}

int cmd_validate(const std::string& out_dir) {
    const harness::Scenario sc = harness::build_reference_scenario();
    const fs::path out = out_dir.empty()
                             ? fs::temp_directory_path() / "karlsim-validate"
                             : fs::path(out_dir);
    const harness::ValidationOutcome outcome = harness::validate(sc, out / "scratch");
    for (const auto& c : outcome.criteria)
        std::printf("[%s] %2d %-32s %s\n", c.pass ? "PASS" : "FAIL", c.index, c.name.c_str(),
                    c.detail.c_str());
    if (!out_dir.empty()) {
        harness::emit(outcome.report, out, "csv");
        io::save_json_file(out / "criteria.json", to_json(outcome));
    }
    std::fflush(stdout);
    if (outcome.all_pass()) {
        std::printf("all %zu criteria pass\n", outcome.criteria.size());
        return 0;
    }
    std::printf("criteria failed\n");
    return 1;
}

int cmd_topology_check(const std::string& file) {
    const topology::Topology t = io::topology_from_json(io::load_json_file(file));
    const auto violations = topology::validate_topology(t);
    if (violations.empty()) {
        std::printf("topology ok: %zu nodes, %zu links\n", t.nodes.size(), t.links.size());
        return 0;
    }
    for (const auto& v : violations) std::printf("violation: %s: %s\n", v.subject.c_str(), v.rule.c_str());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic digital twin of the research vehicle platform"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, format = "csv";
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run a scenario and emit a report");
    run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--seed", seed, "master seed")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string rig_path, grid_arg, cov_out;
    auto* cov_cmd = app.add_subcommand("coverage", "compute a coverage grid for a sensor rig");
    cov_cmd->add_option("--rig", rig_path, "rig file")->required();
    cov_cmd->add_option("--grid", grid_arg, "extent,cell,height")->required();
    cov_cmd->add_option("--out", cov_out, "output directory")->required();

    std::string val_out;
    auto* val_cmd = app.add_subcommand("validate", "run the acceptance criteria");
    val_cmd->add_option("--out", val_out, "output directory for the report bundle");

    std::string topo_file;
    auto* topo_cmd = app.add_subcommand("topology", "topology tools");
    topo_cmd->require_subcommand(1);
    auto* check_cmd = topo_cmd->add_subcommand("check", "validate a topology file");
    check_cmd->add_option("--file", topo_file, "topology file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message/help
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(scenario_path, seed, out_dir, format);
        if (cov_cmd->parsed()) return cmd_coverage(rig_path, grid_arg, cov_out);
        if (val_cmd->parsed()) return cmd_validate(val_out);
        if (topo_cmd->parsed() && check_cmd->parsed()) return cmd_topology_check(topo_file);
    } catch (const std::exception& e) {
        karlsim::log::error(e.what());
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
