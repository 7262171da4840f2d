// Timing comparison between the chunked OpenMP history convolution and the
// plain serial reference, plus the maximum amplitude difference between them.
//
//   qbwg_bench [t_end] [dt]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "qbwg/dynamics.hpp"
#include "qbwg/kernels.hpp"

namespace {

template <class F>
double time_seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    qbwg::SystemParams params{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    qbwg::SolverConfig cfg;
    cfg.t_end = argc > 1 ? std::atof(argv[1]) : 200.0;
    cfg.dt = argc > 2 ? std::atof(argv[2]) : 0.01;

    std::printf("grid: %zu steps (t_end = %g, dt = %g)\n", cfg.steps(), cfg.t_end, cfg.dt);
    qbwg::KernelGrid grid;
    const double t_grid = time_seconds(
        [&] { grid = qbwg::kernel_grid(params, cfg.dt, cfg.steps()); });
    std::printf("kernel grid:       %8.3f s\n", t_grid);

    qbwg::Trajectory parallel, serial;
    const double t_par = time_seconds([&] { parallel = qbwg::solve_volterra(params, cfg, grid); });
    std::printf("parallel solver:   %8.3f s\n", t_par);
    const double t_ser =
        time_seconds([&] { serial = qbwg::solve_volterra_reference(params, cfg, grid); });
    std::printf("serial reference:  %8.3f s  (speedup %.2fx)\n", t_ser, t_ser / t_par);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < parallel.c1.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(parallel.c1[i] - serial.c1[i]));
        max_diff = std::max(max_diff, std::abs(parallel.c2[i] - serial.c2[i]));
    }
    std::printf("max |parallel - serial| = %.3e\n", max_diff);
    return max_diff < 1e-10 ? 0 : 1;
}
