#ifndef QBWG_DYNAMICS_HPP
#define QBWG_DYNAMICS_HPP

#include <complex>
#include <utility>
#include <vector>

#include "qbwg/kernels.hpp"
#include "qbwg/model.hpp"
#include "qbwg/spectrum.hpp"

namespace qbwg {

enum class Scheme {
    trapezoid_product,    // fixed-point corrector iterated to tolerance
    predictor_corrector,  // explicit predictor, single trapezoid correction
};

struct SolverConfig {
    double dt = 0.01;       // units of 1/omega11
    double t_end = 400.0;
    Scheme scheme = Scheme::trapezoid_product;
    int max_corrector_iters = 25;
    double corrector_tol = 1e-12;
    // Hard guard on |c1|^2 + |c2|^2 <= 1; the allowance grows as dt^2 t to
    // admit the integrator's own discretization drift on nearly unitary
    // channels while still catching instability.
    double norm_tol = 1e-6;
    bool parallel = true;    // OpenMP history convolution

    // dt must resolve the e^{-i omega0 t} carrier and the kernel oscillation.
    void validate(const SystemParams& params) const;
    std::size_t steps() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::complex<double>> c1;
    std::vector<std::complex<double>> c2;
    SystemParams params;
    SolverConfig config;
};

// Symmetric/antisymmetric scalar channels c+- = c1 +- c2, both starting at 1.
struct PmTrajectory {
    std::vector<double> times;
    std::vector<std::complex<double>> cplus;
    std::vector<std::complex<double>> cminus;
};

// Exact non-Markovian amplitudes: product-integration trapezoid on the memory
// convolution (panel-averaged kernel, amplitudes at whole steps). The grid
// must cover steps() panels at config.dt.
Trajectory solve_volterra(const SystemParams& params, const SolverConfig& config,
                          const KernelGrid& grid);

// Plain serial implementation of the same scheme, kept as the reference for
// testing and benchmarking the parallel path.
Trajectory solve_volterra_reference(const SystemParams& params, const SolverConfig& config,
                                    const KernelGrid& grid);

// Decoupled +- channels with kernels f0 +/- f1; independent oracle for the
// coupled solver via c1 = (c+ + c-)/2, c2 = (c+ - c-)/2.
PmTrajectory solve_scalar_pm(const SystemParams& params, const SolverConfig& config,
                             const KernelGrid& grid);

// Markovian closed form c_j = e^{-(i w0 + Y0) t} [e^{-Y1 t} - (-1)^j e^{Y1 t}] / 2.
std::pair<std::complex<double>, std::complex<double>> markovian_solution(
    const SystemParams& params, const MarkovRates& rates, double t);

// Residue-only long-time amplitudes; (0,0) without bound states, a constant
// envelope with one, a two-frequency beat with two, and the coalesced
// (Z+ - Z-) form for a degenerate pair.
std::pair<std::complex<double>, std::complex<double>> long_time_amplitude(
    const SpectrumResult& spectrum, const SystemParams& params, double t);

// Steady battery energy: 0, w0 Z+^2, or the Rabi-like beat
// w0 {Z+^2 + Z-^2 - 2 Z+ Z- cos[(E+ - E-) t]}.
double steady_energy_formula(const SpectrumResult& spectrum, const SystemParams& params,
                             double t);

}  // namespace qbwg

#endif
