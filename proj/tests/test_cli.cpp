#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qbwg/cli.hpp"
#include "qbwg/errors.hpp"

using namespace qbwg;
using namespace qbwg::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qbwg_test_" + name);
    fs::remove_all(dir);
    return dir;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("sweep spec parsing") {
    const SweepSpec s = parse_sweep_spec("omega0:0.5:3.5:61");
    CHECK(s.axis == SweepAxis::omega0);
    CHECK(s.lo == 0.5);
    CHECK(s.hi == 3.5);
    CHECK(s.n == 61);
    CHECK(parse_sweep_spec("dz:0:2:41").axis == SweepAxis::delta_z);
    CHECK_THROWS_AS(parse_sweep_spec("omega0:0.5:3.5"), ConfigError);
    CHECK_THROWS_AS(parse_sweep_spec("omega0:a:b:5"), ConfigError);
    CHECK_THROWS_AS(parse_sweep_spec("bogus:0:1:5"), ConfigError);
    CHECK_THROWS_AS(parse_sweep_spec("omega0:0:1:1"), ConfigError);
}

TEST_CASE("JSON config overlay") {
    RunConfig cfg;
    apply_json(cfg, json{{"omega0", 1.4},
                         {"gamma11", 0.3},
                         {"dz", 0.25},
                         {"dt", 0.02},
                         {"t_end", 100.0},
                         {"scheme", "predictor_corrector"},
                         {"sweep", "delta_z:0:2:41"},
                         {"workers", 2}});
    CHECK(cfg.params.omega0 == 1.4);
    CHECK(cfg.params.gamma11 == 0.3);
    CHECK(cfg.params.delta_z == 0.25);
    CHECK(cfg.solver.dt == 0.02);
    CHECK(cfg.solver.t_end == 100.0);
    CHECK(cfg.solver.scheme == Scheme::predictor_corrector);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->axis == SweepAxis::delta_z);
    CHECK(cfg.workers == 2);
    CHECK_THROWS_AS(apply_json(cfg, json{{"no_such_key", 1}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, json::array()), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, json{{"scheme", "euler"}}), ConfigError);
}

TEST_CASE("spectrum command writes the bound-state summary") {
    RunConfig cfg;
    cfg.command = "spectrum";
    cfg.params = {.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    cfg.out_dir = fresh_dir("spectrum");
    REQUIRE(run(cfg) == 0);
    const json summary = read_json(cfg.out_dir / "summary.json");
    CHECK(summary["spectrum"]["count"] == 2);
    CHECK(summary["spectrum"]["states"].size() == 2);
    CHECK(summary["config"]["omega0"] == 1.0);
    CHECK(summary["status"] == "ok");
}

TEST_CASE("dynamics command: deep-band emitter leaves the battery empty") {
    RunConfig cfg;
    cfg.command = "dynamics";
    cfg.params = {.omega0 = 3.0, .gamma11 = 0.5, .delta_z = 0.1};
    cfg.solver.dt = 0.01;
    cfg.solver.t_end = 150.0;
    cfg.out_dir = fresh_dir("dynamics");
    REQUIRE(run(cfg) == 0);
    const json summary = read_json(cfg.out_dir / "summary.json");
    CHECK(summary["spectrum"]["count"] == 0);
    CHECK(summary["final"]["energy"].get<double>() < 0.01);
    const std::string csv = read_text(cfg.out_dir / "trajectory.csv");
    CHECK(csv.starts_with("t,re_c1,im_c1,re_c2,im_c2,pop1,pop2,energy,ergotropy\n"));
    CHECK(line_count(csv) == cfg.solver.steps() + 2);  // header + t=0 + steps
}

TEST_CASE("trajectory output is identical across worker counts") {
    auto produce = [&](int workers, const std::string& tag) {
        RunConfig cfg;
        cfg.command = "dynamics";
        cfg.params = {.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
        cfg.solver.dt = 0.01;
        cfg.solver.t_end = 100.0;
        cfg.workers = workers;
        cfg.out_dir = fresh_dir("workers_" + tag);
        REQUIRE(run(cfg) == 0);
        return read_text(cfg.out_dir / "trajectory.csv");
    };
    CHECK(produce(1, "one") == produce(4, "four"));
}

TEST_CASE("sweep command emits one row per point") {
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.params = {.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    cfg.sweep = parse_sweep_spec("omega0:0.5:3.5:7");
    cfg.out_dir = fresh_dir("sweep");
    REQUIRE(run(cfg) == 0);
    const std::string csv = read_text(cfg.out_dir / "sweep.csv");
    CHECK(csv.starts_with("axis_value,M,E_plus,Z_plus,E_minus,Z_minus,degenerate\n"));
    CHECK(line_count(csv) == 8);
    CHECK(read_json(cfg.out_dir / "summary.json")["failed_points"].empty());
}

TEST_CASE("sweep command without a sweep spec is a config error") {
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.out_dir = fresh_dir("sweep_missing");
    CHECK(run(cfg) == 2);
}

TEST_CASE("steady command reports the oscillation envelope") {
    RunConfig cfg;
    cfg.command = "steady";
    cfg.params = {.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    cfg.solver.t_end = 100.0;
    cfg.out_dir = fresh_dir("steady");
    REQUIRE(run(cfg) == 0);
    const json summary = read_json(cfg.out_dir / "summary.json");
    const double emax = summary["steady"]["max_energy"].get<double>();
    const double emin = summary["steady"]["min_energy"].get<double>();
    CHECK(emax == doctest::Approx(0.567).epsilon(0.02));
    CHECK(emin >= 0.0);
    CHECK(emin < emax);
    const std::string csv = read_text(cfg.out_dir / "steady.csv");
    CHECK(csv.starts_with("t,energy,ergotropy\n"));
    CHECK(line_count(csv) == 2002);
}

TEST_CASE("physical command bridges SI geometry to internal units") {
    RunConfig cfg;
    cfg.command = "physical";
    cfg.out_dir = fresh_dir("physical");
    REQUIRE(run(cfg) == 0);
    const json summary = read_json(cfg.out_dir / "summary.json");
    CHECK(summary["physical"]["omega0_over_omega11"].get<double>() ==
          doctest::Approx(1.0).epsilon(0.01));
    CHECK(summary["physical"]["gamma11_over_omega11"].get<double>() > 0.0);
}

TEST_CASE("invalid configurations map to exit code 2") {
    RunConfig cfg;
    cfg.command = "dynamics";
    cfg.params.gamma11 = -1.0;
    cfg.out_dir = fresh_dir("bad_params");
    CHECK(run(cfg) == 2);

    RunConfig coarse;
    coarse.command = "dynamics";
    coarse.solver.dt = 0.5;
    coarse.out_dir = fresh_dir("bad_dt");
    CHECK(run(coarse) == 2);

    RunConfig unknown;
    unknown.command = "meditate";
    unknown.out_dir = fresh_dir("bad_cmd");
    CHECK(run(unknown) == 2);

    RunConfig badfig;
    badfig.command = "figure";
    badfig.figure = "fig9";
    badfig.out_dir = fresh_dir("bad_fig");
    CHECK(run(badfig) == 2);
}

TEST_CASE("separation figure hits the transition grid points exactly") {
    RunConfig cfg;
    cfg.command = "figure";
    cfg.figure = "fig3";
    cfg.params = {.omega0 = 1.4, .gamma11 = 0.5, .delta_z = 0.1};
    cfg.out_dir = fresh_dir("fig3");
    REQUIRE(run(cfg) == 0);
    for (const char* name : {"fig3_spectrum_omega0_1.4.csv", "fig3_spectrum_omega0_1.2.csv",
                             "fig3_spectrum_omega0_1.0.csv", "fig3_extrema.csv", "manifest.txt",
                             "summary.json"})
        CHECK(fs::exists(cfg.out_dir / name));
    const std::string csv = read_text(cfg.out_dir / "fig3_spectrum_omega0_1.4.csv");
    CHECK(line_count(csv) == 42);
    // The 0.05-spaced grid lands on both reference separations.
    bool has_030 = false, has_170 = false;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        const double v = std::stod(line.substr(0, line.find(',')));
        if (std::abs(v - 0.30) < 1e-12) has_030 = true;
        if (std::abs(v - 1.70) < 1e-12) has_170 = true;
    }
    CHECK(has_030);
    CHECK(has_170);
}

TEST_CASE("steady-state helper formulas") {
    const SystemParams p{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    const SpectrumResult r = find_bound_states(p);
    REQUIRE(r.count == 2);
    const double zp = r.plus->residue;
    const double zm = r.minus->residue;
    CHECK(steady_energy_max(r, p) == doctest::Approx((zp + zm) * (zp + zm)).epsilon(1e-12));
    CHECK(steady_energy_min(r, p) == doctest::Approx((zp - zm) * (zp - zm)).epsilon(1e-12));
    CHECK(steady_ergotropy_max(r, p) ==
          doctest::Approx(std::max(0.0, 2.0 * (zp + zm) * (zp + zm) - 1.0)).epsilon(1e-12));

    const SystemParams deep{.omega0 = 3.0, .gamma11 = 0.5, .delta_z = 0.1};
    const SpectrumResult none = find_bound_states(deep);
    CHECK(steady_energy_max(none, deep) == 0.0);
    CHECK(steady_ergotropy_max(none, deep) == 0.0);
}
