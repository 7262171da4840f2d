// Command-line front end: waveguide-mediated charging of a two-level battery.
//
//   qbwg <command> [--config FILE] [flags]
//
// Commands: spectrum, dynamics, sweep, steady, physical, figure. Flags given
// on the command line override values from --config.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qbwg/cli.hpp"
#include "qbwg/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"two-level quantum battery charged through a rectangular waveguide"};
    app.require_subcommand(0, 0);

    std::string command, config_file, sweep_text, scheme, figure, out_dir;
    double omega0 = 0, gamma11 = 0, dz = 0, dt = 0, t_end = 0;
    int workers = 0;

    app.add_option("command", command,
                   "spectrum | dynamics | sweep | steady | physical | figure")
        ->required();
    app.add_option("--config", config_file, "JSON config file (flags override it)");
    auto* o_omega0 = app.add_option("--omega0", omega0, "transition frequency, units of omega11");
    auto* o_gamma = app.add_option("--gamma11", gamma11, "emitter rate, units of omega11");
    auto* o_dz = app.add_option("--dz", dz, "emitter separation, units of lambda11");
    auto* o_dt = app.add_option("--dt", dt, "integrator step, units of 1/omega11");
    auto* o_tend = app.add_option("--t-end", t_end, "integration horizon, units of 1/omega11");
    auto* o_sweep = app.add_option("--sweep", sweep_text, "AXIS:LO:HI:N, axis omega0|delta_z|gamma11");
    auto* o_scheme = app.add_option("--scheme", scheme, "trapezoid_product | predictor_corrector");
    auto* o_figure = app.add_option("--figure", figure, "fig2 | fig3 | fig4");
    auto* o_out = app.add_option("--out", out_dir, "output directory");
    auto* o_workers = app.add_option("--workers", workers, "thread count (0 = runtime default)");

    CLI11_PARSE(app, argc, argv);

    qbwg::cli::RunConfig cfg;
    try {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw qbwg::ConfigError("cannot read config file " + config_file);
            cfg = {};
            qbwg::cli::apply_json(cfg, nlohmann::json::parse(in));
        }
        cfg.command = command;
        if (o_omega0->count()) cfg.params.omega0 = omega0;
        if (o_gamma->count()) cfg.params.gamma11 = gamma11;
        if (o_dz->count()) cfg.params.delta_z = dz;
        if (o_dt->count()) cfg.solver.dt = dt;
        if (o_tend->count()) cfg.solver.t_end = t_end;
        if (o_sweep->count()) cfg.sweep = qbwg::cli::parse_sweep_spec(sweep_text);
        if (o_scheme->count()) {
            nlohmann::json patch{{"scheme", scheme}};
            qbwg::cli::apply_json(cfg, patch);
        }
        if (o_figure->count()) cfg.figure = figure;
        if (o_out->count()) cfg.out_dir = out_dir;
        if (o_workers->count()) cfg.workers = workers;
    } catch (const qbwg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    return qbwg::cli::run(cfg);
}
