#include "qbwg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include "qbwg/strfmt.hpp"
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qbwg/errors.hpp"
#include "qbwg/kernels.hpp"

namespace qbwg::cli {

namespace {

using nlohmann::json;

// Shortest round-trippable decimal representation.
std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw ConfigError(strfmt("cannot open %s for writing", path.string().c_str()));
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ",";
            out_ << fields[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ConfigError(strfmt("cannot open %s for writing", path.string().c_str()));
    out << doc.dump(2) << "\n";
}

std::string scheme_name(Scheme s) {
    return s == Scheme::trapezoid_product ? "trapezoid_product" : "predictor_corrector";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "trapezoid_product") return Scheme::trapezoid_product;
    if (name == "predictor_corrector") return Scheme::predictor_corrector;
    throw ConfigError(strfmt("unknown scheme '%s'", name.c_str()));
}

json spectrum_json(const SpectrumResult& r) {
    json states = json::array();
    for (const auto* b : {r.plus ? &*r.plus : nullptr, r.minus ? &*r.minus : nullptr}) {
        if (!b) continue;
        states.push_back({{"branch", b->branch == BranchSign::plus ? "+" : "-"},
                          {"energy", b->energy},
                          {"residue", b->residue},
                          {"parity", b->parity}});
    }
    return {{"count", r.count},
            {"band_edge", r.band_edge},
            {"degenerate", r.degenerate},
            {"states", states}};
}

// One sweep CSV row; absent bound states leave their fields empty.
std::vector<std::string> sweep_row(const SweepPoint& pt) {
    std::vector<std::string> f(7);
    f[0] = g17(pt.axis_value);
    if (!pt.result) return f;
    const SpectrumResult& r = *pt.result;
    f[1] = std::to_string(r.count);
    if (r.plus) {
        f[2] = g17(r.plus->energy);
        f[3] = g17(r.plus->residue);
    }
    if (r.minus) {
        f[4] = g17(r.minus->energy);
        f[5] = g17(r.minus->residue);
    }
    f[6] = r.degenerate ? "1" : "0";
    return f;
}

constexpr const char* kSweepHeader =
    "axis_value,M,E_plus,Z_plus,E_minus,Z_minus,degenerate";
constexpr const char* kTrajHeader =
    "t,re_c1,im_c1,re_c2,im_c2,pop1,pop2,energy,ergotropy";

int write_sweep_csv(const std::filesystem::path& path,
                    const std::vector<SweepPoint>& points, json& failures) {
    CsvWriter csv(path, kSweepHeader);
    int failed = 0;
    for (const SweepPoint& pt : points) {
        csv.row(sweep_row(pt));
        if (!pt.error.empty()) {
            ++failed;
            failures.push_back({{"axis_value", pt.axis_value}, {"error", pt.error}});
        }
    }
    return failed;
}

// Trajectory plus observables; an optional extra column carries the
// residue-formula steady energy for overlay plots.
void write_traj_csv(const std::filesystem::path& path, const Trajectory& traj,
                    const ObservableSeries& obs,
                    const std::vector<double>* energy_steady = nullptr) {
    std::string header = kTrajHeader;
    if (energy_steady) header += ",energy_steady";
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<std::string> f{
            g17(traj.times[i]),   g17(traj.c1[i].real()), g17(traj.c1[i].imag()),
            g17(traj.c2[i].real()), g17(traj.c2[i].imag()), g17(obs.pop1[i]),
            g17(obs.pop2[i]),     g17(obs.energy[i]),     g17(obs.ergotropy[i])};
        if (energy_steady) f.push_back(g17((*energy_steady)[i]));
        csv.row(f);
    }
}

Trajectory run_trajectory(const SystemParams& params, const SolverConfig& solver) {
    const KernelGrid grid = kernel_grid(params, solver.dt, solver.steps());
    return solve_volterra(params, solver, grid);
}

// ---- commands --------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, json& summary) {
    const SpectrumResult r = find_bound_states(cfg.params, cfg.spectrum_opts);
    summary["spectrum"] = spectrum_json(r);
    return 0;
}

int cmd_dynamics(const RunConfig& cfg, json& summary) {
    const Trajectory traj = run_trajectory(cfg.params, cfg.solver);
    const ObservableSeries obs = observe(traj);
    write_traj_csv(cfg.out_dir / "trajectory.csv", traj, obs);
    const SpectrumResult spec = find_bound_states(cfg.params, cfg.spectrum_opts);
    const std::size_t last = obs.times.size() - 1;
    summary["spectrum"] = spectrum_json(spec);
    summary["final"] = {{"t", obs.times[last]},
                        {"pop1", obs.pop1[last]},
                        {"pop2", obs.pop2[last]},
                        {"energy", obs.energy[last]},
                        {"ergotropy", obs.ergotropy[last]}};
    const Extrema ex = series_extrema(obs, 0.0, obs.times[last]);
    summary["extrema"] = {{"max_energy", ex.max_energy},
                          {"t_max_energy", ex.t_max_energy},
                          {"max_ergotropy", ex.max_ergotropy},
                          {"t_max_ergotropy", ex.t_max_ergotropy}};
    summary["files"] = {"trajectory.csv"};
    return 0;
}

int cmd_sweep(const RunConfig& cfg, json& summary) {
    if (!cfg.sweep) throw ConfigError("sweep command requires --sweep AXIS:LO:HI:N");
    const SweepSpec& s = *cfg.sweep;
    const std::vector<SweepPoint> pts =
        spectrum_sweep(cfg.params, s.axis, s.lo, s.hi, s.n, cfg.spectrum_opts);
    json failures = json::array();
    const int failed = write_sweep_csv(cfg.out_dir / "sweep.csv", pts, failures);
    summary["points"] = static_cast<int>(pts.size());
    summary["failed_points"] = failures;
    summary["files"] = {"sweep.csv"};
    return failed > 0 ? 4 : 0;
}

int cmd_steady(const RunConfig& cfg, json& summary) {
    const SpectrumResult spec = find_bound_states(cfg.params, cfg.spectrum_opts);
    constexpr int kSamples = 2001;
    CsvWriter csv(cfg.out_dir / "steady.csv", "t,energy,ergotropy");
    for (int i = 0; i < kSamples; ++i) {
        const double t = cfg.solver.t_end * i / (kSamples - 1);
        const auto [c1, c2] = long_time_amplitude(spec, cfg.params, t);
        const QubitState q = reduce_battery(c2);
        csv.row({g17(t), g17(qb_energy(q, cfg.params.omega0)),
                 g17(ergotropy(q, cfg.params.omega0))});
    }
    summary["spectrum"] = spectrum_json(spec);
    summary["steady"] = {{"max_energy", steady_energy_max(spec, cfg.params)},
                         {"min_energy", steady_energy_min(spec, cfg.params)},
                         {"max_ergotropy", steady_ergotropy_max(spec, cfg.params)}};
    summary["files"] = {"steady.csv"};
    return 0;
}

int cmd_physical(const RunConfig& cfg, json& summary) {
    const PhysicalWaveguide& g = cfg.geometry;
    const double w11 = cutoff_frequency(g.a, g.b, 1, 1);
    summary["physical"] = {{"omega11_rad_per_s", w11},
                           {"omega0_over_omega11", omega0_ratio(g)},
                           {"gamma11_over_omega11", gamma11_from_physical(g)}};
    return 0;
}

// ---- figure recipes --------------------------------------------------------

// Trajectory panels share solver settings but override omega0; the steady
// overlay column evaluates the residue formula on the same time grid.
void figure_panel(const RunConfig& cfg, double omega0, const std::filesystem::path& path) {
    SystemParams p = cfg.params;
    p.omega0 = omega0;
    SolverConfig solver = cfg.solver;
    // Halve the step until the carrier-resolution bound admits this panel.
    const double dt_max = 0.05 * std::min(1.0 / p.omega0, 1.0);
    while (solver.dt > dt_max * (1.0 + 1e-12)) solver.dt *= 0.5;
    const Trajectory traj = run_trajectory(p, solver);
    const ObservableSeries obs = observe(traj);
    const SpectrumResult spec = find_bound_states(p, cfg.spectrum_opts);
    std::vector<double> steady(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        steady[i] = steady_energy_formula(spec, p, traj.times[i]);
    write_traj_csv(path, traj, obs, &steady);
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(dir / "manifest.txt");
    for (const auto& [file, desc] : entries) out << file << "\t" << desc << "\n";
}

int cmd_fig2(const RunConfig& cfg, json& summary) {
    json failures = json::array();
    int failed = 0;

    SystemParams base = cfg.params;
    base.delta_z = 0.1;
    const auto pts = spectrum_sweep(base, SweepAxis::omega0, 0.5, 3.5, 61, cfg.spectrum_opts);
    failed += write_sweep_csv(cfg.out_dir / "fig2_spectrum.csv", pts, failures);

    std::vector<std::pair<std::string, std::string>> manifest{
        {"fig2_spectrum.csv", "bound-state energies and residues vs omega0 at delta_z = 0.1"}};
    for (double w : {3.0, 1.2, 1.0}) {
        const std::string name = strfmt("fig2_dynamics_omega0_%.1f.csv", w);
        RunConfig panel = cfg;
        panel.params = base;
        figure_panel(panel, w, cfg.out_dir / name);
        manifest.emplace_back(name,
                              strfmt("trajectory and steady overlay at omega0 = %.1f", w));
    }
    write_manifest(cfg.out_dir, manifest);
    json files = json::array();
    for (const auto& [file, desc] : manifest) files.push_back(file);
    summary["files"] = files;
    summary["failed_points"] = failures;
    return failed > 0 ? 4 : 0;
}

int cmd_fig3(const RunConfig& cfg, json& summary) {
    json failures = json::array();
    int failed = 0;
    std::vector<std::pair<std::string, std::string>> manifest;

    for (double w : {1.4, 1.2, 1.0}) {
        SystemParams base = cfg.params;
        base.omega0 = w;
        const auto pts =
            spectrum_sweep(base, SweepAxis::delta_z, 0.0, 2.0, 41, cfg.spectrum_opts);
        const std::string name = strfmt("fig3_spectrum_omega0_%.1f.csv", w);
        failed += write_sweep_csv(cfg.out_dir / name, pts, failures);
        manifest.emplace_back(
            name, strfmt("bound-state data vs delta_z at omega0 = %.1f", w));

        if (w == 1.4) {
            CsvWriter ext(cfg.out_dir / "fig3_extrema.csv",
                          "delta_z,M,E_inf_max,E_inf_min,degenerate");
            for (const SweepPoint& pt : pts) {
                std::vector<std::string> f(5);
                f[0] = g17(pt.axis_value);
                if (pt.result) {
                    SystemParams p = base;
                    p.delta_z = pt.axis_value;
                    f[1] = std::to_string(pt.result->count);
                    f[2] = g17(steady_energy_max(*pt.result, p));
                    f[3] = g17(steady_energy_min(*pt.result, p));
                    f[4] = pt.result->degenerate ? "1" : "0";
                }
                ext.row(f);
            }
            manifest.emplace_back("fig3_extrema.csv",
                                  "steady-energy oscillation envelope vs delta_z at omega0 = 1.4");
        }
    }
    write_manifest(cfg.out_dir, manifest);
    json files = json::array();
    for (const auto& [file, desc] : manifest) files.push_back(file);
    summary["files"] = files;
    summary["failed_points"] = failures;
    return failed > 0 ? 4 : 0;
}

int cmd_fig4(const RunConfig& cfg, json& summary) {
    json failures = json::array();
    int failed = 0;

    // Bound-state count over the (omega0, delta_z) plane.
    {
        CsvWriter csv(cfg.out_dir / "fig4_count_map.csv", "omega0,delta_z,M,degenerate");
        for (int j = 0; j <= 40; ++j) {
            SystemParams base = cfg.params;
            base.delta_z = 0.05 * j;
            const auto row =
                spectrum_sweep(base, SweepAxis::omega0, 0.5, 3.5, 61, cfg.spectrum_opts);
            for (const SweepPoint& pt : row) {
                std::vector<std::string> f(4);
                f[0] = g17(pt.axis_value);
                f[1] = g17(base.delta_z);
                if (pt.result) {
                    f[2] = std::to_string(pt.result->count);
                    f[3] = pt.result->degenerate ? "1" : "0";
                } else {
                    ++failed;
                    failures.push_back({{"axis_value", pt.axis_value}, {"error", pt.error}});
                }
                csv.row(f);
            }
        }
    }

    // Steady ergotropy vs omega0 at fixed separation, and its optimum over
    // omega0 as a function of separation.
    const auto ergotropy_scan = [&](double dz, double& best_w, double& best_val,
                                    CsvWriter* csv) {
        best_w = 0.0;
        best_val = 0.0;
        for (int i = 0; i <= 90; ++i) {
            const double w = 0.30 + 0.01 * i;
            SystemParams p = cfg.params;
            p.omega0 = w;
            p.delta_z = dz;
            const SpectrumResult r = find_bound_states(p, cfg.spectrum_opts);
            const double val = steady_ergotropy_max(r, p);
            if (csv) csv->row({g17(w), g17(val)});
            if (val > best_val) {
                best_val = val;
                best_w = w;
            }
        }
    };

    double best_w = 0.0, best_val = 0.0;
    {
        CsvWriter csv(cfg.out_dir / "fig4_ergotropy_vs_omega0.csv", "omega0,W_inf_max");
        ergotropy_scan(0.1, best_w, best_val, &csv);
    }
    summary["ergotropy_peak"] = {{"delta_z", 0.1}, {"omega0", best_w}, {"W", best_val}};

    {
        CsvWriter csv(cfg.out_dir / "fig4_max_ergotropy_vs_dz.csv", "delta_z,W_max,omega0_opt");
        for (int j = 1; j <= 40; ++j) {
            const double dz = 0.05 * j;
            double w_opt = 0.0, val = 0.0;
            ergotropy_scan(dz, w_opt, val, nullptr);
            csv.row({g17(dz), g17(val), g17(w_opt)});
        }
    }

    write_manifest(cfg.out_dir,
                   {{"fig4_count_map.csv", "bound-state count over the (omega0, delta_z) plane"},
                    {"fig4_ergotropy_vs_omega0.csv",
                     "steady ergotropy vs omega0 at delta_z = 0.1"},
                    {"fig4_max_ergotropy_vs_dz.csv",
                     "omega0-optimized steady ergotropy vs delta_z"}});
    summary["files"] = {"fig4_count_map.csv", "fig4_ergotropy_vs_omega0.csv",
                        "fig4_max_ergotropy_vs_dz.csv"};
    summary["failed_points"] = failures;
    return failed > 0 ? 4 : 0;
}

int cmd_figure(const RunConfig& cfg, json& summary) {
    if (cfg.figure == "fig2") return cmd_fig2(cfg, summary);
    if (cfg.figure == "fig3") return cmd_fig3(cfg, summary);
    if (cfg.figure == "fig4") return cmd_fig4(cfg, summary);
    throw ConfigError(strfmt("unknown figure '%s' (expected fig2|fig3|fig4)", cfg.figure.c_str()));
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4)
        throw ConfigError(strfmt("bad sweep spec '%s' (expected AXIS:LO:HI:N)", text.c_str()));
    SweepSpec s;
    s.axis = sweep_axis_from_name(parts[0]);
    try {
        s.lo = std::stod(parts[1]);
        s.hi = std::stod(parts[2]);
        s.n = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError(strfmt("bad sweep spec '%s' (non-numeric field)", text.c_str()));
    }
    if (s.n < 2) throw ConfigError("sweep needs at least 2 points");
    return s;
}

void apply_json(RunConfig& cfg, const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "command") cfg.command = value.get<std::string>();
        else if (key == "omega0") cfg.params.omega0 = value.get<double>();
        else if (key == "gamma11") cfg.params.gamma11 = value.get<double>();
        else if (key == "delta_z" || key == "dz") cfg.params.delta_z = value.get<double>();
        else if (key == "dt") cfg.solver.dt = value.get<double>();
        else if (key == "t_end") cfg.solver.t_end = value.get<double>();
        else if (key == "scheme") cfg.solver.scheme = scheme_from_name(value.get<std::string>());
        else if (key == "parallel") cfg.solver.parallel = value.get<bool>();
        else if (key == "sweep") cfg.sweep = parse_sweep_spec(value.get<std::string>());
        else if (key == "out") cfg.out_dir = value.get<std::string>();
        else if (key == "workers") cfg.workers = value.get<int>();
        else if (key == "figure") cfg.figure = value.get<std::string>();
        else if (key == "edge_guard_plus") cfg.spectrum_opts.edge_guard_plus = value.get<double>();
        else if (key == "edge_guard_minus")
            cfg.spectrum_opts.edge_guard_minus = value.get<double>();
        else if (key == "degeneracy_tol") cfg.spectrum_opts.degeneracy_tol = value.get<double>();
        else if (key == "geometry") {
            const json& g = value;
            PhysicalWaveguide& geom = cfg.geometry;
            if (g.contains("a")) geom.a = g["a"].get<double>();
            if (g.contains("b")) geom.b = g["b"].get<double>();
            if (g.contains("x0")) geom.x0 = g["x0"].get<double>();
            if (g.contains("y0")) geom.y0 = g["y0"].get<double>();
            if (g.contains("dipole")) geom.dz_dipole = g["dipole"].get<double>();
            if (g.contains("lambda0")) geom.lambda0 = g["lambda0"].get<double>();
        } else {
            throw ConfigError(strfmt("unknown config key '%s'", key.c_str()));
        }
    }
}

json config_json(const RunConfig& cfg) {
    json doc{{"command", cfg.command},
             {"omega0", cfg.params.omega0},
             {"gamma11", cfg.params.gamma11},
             {"delta_z", cfg.params.delta_z},
             {"dt", cfg.solver.dt},
             {"t_end", cfg.solver.t_end},
             {"scheme", scheme_name(cfg.solver.scheme)},
             {"parallel", cfg.solver.parallel},
             {"out", cfg.out_dir.string()},
             {"workers", cfg.workers},
             {"edge_guard_plus", cfg.spectrum_opts.edge_guard_plus},
             {"edge_guard_minus", cfg.spectrum_opts.edge_guard_minus},
             {"degeneracy_tol", cfg.spectrum_opts.degeneracy_tol}};
    if (cfg.sweep) {
        doc["sweep"] = strfmt("%s:%g:%g:%d", sweep_axis_name(cfg.sweep->axis).c_str(),
                            cfg.sweep->lo, cfg.sweep->hi, cfg.sweep->n);
    }
    if (!cfg.figure.empty()) doc["figure"] = cfg.figure;
    if (cfg.command == "physical") {
        doc["geometry"] = {{"a", cfg.geometry.a},         {"b", cfg.geometry.b},
                           {"x0", cfg.geometry.x0},       {"y0", cfg.geometry.y0},
                           {"dipole", cfg.geometry.dz_dipole},
                           {"lambda0", cfg.geometry.lambda0}};
    }
    return doc;
}

double steady_energy_max(const SpectrumResult& spectrum, const SystemParams& params) {
    const double w0 = params.omega0;
    if (spectrum.count == 0) return 0.0;
    if (spectrum.count == 1) {
        const double z = spectrum.plus->residue;
        return w0 * z * z;
    }
    const double zp = spectrum.plus->residue;
    const double zm = spectrum.minus->residue;
    if (spectrum.degenerate) return w0 * (zp - zm) * (zp - zm);
    return w0 * (zp + zm) * (zp + zm);
}

double steady_energy_min(const SpectrumResult& spectrum, const SystemParams& params) {
    const double w0 = params.omega0;
    if (spectrum.count == 0) return 0.0;
    if (spectrum.count == 1) {
        const double z = spectrum.plus->residue;
        return w0 * z * z;
    }
    const double zp = spectrum.plus->residue;
    const double zm = spectrum.minus->residue;
    return w0 * (zp - zm) * (zp - zm);
}

double steady_ergotropy_max(const SpectrumResult& spectrum, const SystemParams& params) {
    if (spectrum.count == 0) return 0.0;
    double p_max = 0.0;
    if (spectrum.count == 1) {
        const double z = spectrum.plus->residue;
        p_max = z * z;
    } else {
        const double zp = spectrum.plus->residue;
        const double zm = spectrum.minus->residue;
        const double amp = spectrum.degenerate ? (zp - zm) : (zp + zm);
        p_max = amp * amp;
    }
    return params.omega0 * std::max(0.0, 2.0 * p_max - 1.0);
}

int run(const RunConfig& cfg) {
    try {
        if (cfg.workers < 0) throw ConfigError("workers must be non-negative");
#ifdef _OPENMP
        if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
        if (cfg.command != "physical") cfg.params.validate();
        std::filesystem::create_directories(cfg.out_dir);

        json summary{{"config", config_json(cfg)}};
        int rc = 0;
        if (cfg.command == "spectrum") rc = cmd_spectrum(cfg, summary);
        else if (cfg.command == "dynamics") rc = cmd_dynamics(cfg, summary);
        else if (cfg.command == "sweep") rc = cmd_sweep(cfg, summary);
        else if (cfg.command == "steady") rc = cmd_steady(cfg, summary);
        else if (cfg.command == "physical") rc = cmd_physical(cfg, summary);
        else if (cfg.command == "figure") rc = cmd_figure(cfg, summary);
        else
            throw ConfigError(strfmt(
                "unknown command '%s' (expected spectrum|dynamics|sweep|steady|physical|figure)",
                cfg.command.c_str()));
        summary["status"] = rc == 0 ? "ok" : "partial";
        write_json(cfg.out_dir / "summary.json", summary);
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qbwg::cli
