#ifndef QBWG_CLI_HPP
#define QBWG_CLI_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "qbwg/dynamics.hpp"
#include "qbwg/model.hpp"
#include "qbwg/observables.hpp"
#include "qbwg/spectrum.hpp"

namespace qbwg::cli {

struct SweepSpec {
    SweepAxis axis = SweepAxis::omega0;
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;
};

// Parses "axis:lo:hi:n", e.g. "omega0:0.5:3.5:61".
SweepSpec parse_sweep_spec(const std::string& text);

struct RunConfig {
    std::string command;  // spectrum | dynamics | sweep | steady | physical | figure
    SystemParams params;
    SolverConfig solver;
    SpectrumOptions spectrum_opts;
    std::optional<SweepSpec> sweep;
    PhysicalWaveguide geometry;
    std::string figure;  // fig2 | fig3 | fig4
    std::filesystem::path out_dir = "qbwg_out";
    int workers = 0;  // 0 = runtime default
};

// Overlays settings from a JSON document onto cfg (flat keys matching the
// CLI flags). Unknown keys are rejected.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

// Fully-resolved config echo embedded in every summary.json.
nlohmann::json config_json(const RunConfig& cfg);

// Executes the configured command, writing CSV/JSON artifacts into
// cfg.out_dir. Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 partial sweep failure.
int run(const RunConfig& cfg);

// Steady-state helpers shared by the steady/figure commands.
double steady_energy_max(const SpectrumResult& spectrum, const SystemParams& params);
double steady_energy_min(const SpectrumResult& spectrum, const SystemParams& params);
double steady_ergotropy_max(const SpectrumResult& spectrum, const SystemParams& params);

}  // namespace qbwg::cli

#endif
