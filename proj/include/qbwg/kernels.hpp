#ifndef QBWG_KERNELS_HPP
#define QBWG_KERNELS_HPP

#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "qbwg/model.hpp"

namespace qbwg {

// Symmetric (+) / antisymmetric (-) combination J0 +/- J1 of the spectral
// branches; also labels the corresponding bound-state branch.
enum class BranchSign { plus, minus };

inline double branch_factor(BranchSign s) { return s == BranchSign::plus ? 1.0 : -1.0; }

// Panel averages of the memory kernel: f[k] = (1/dt) int over the k-th step
// [k dt, (k+1) dt]. Averaging (rather than point sampling) keeps the product
// integration second-order accurate through the integrable log singularities
// at t = 0 and at the light cone t = dz/c; sample_time(k) labels the panel
// midpoint.
struct KernelGrid {
    double dt = 0.0;
    std::vector<std::complex<double>> f0;
    std::vector<std::complex<double>> f1;

    std::size_t size() const { return f0.size(); }
    double sample_time(std::size_t k) const { return (k + 0.5) * dt; }
};

// Markovian complex rates Upsilon_p = pi*J_p(omega0) + i*delta_p.
struct MarkovRates {
    std::complex<double> upsilon0;
    std::complex<double> upsilon1;
};

// f_p(t) = int_cutoff^inf J_p(w) e^{-iwt} dw for t > 0, via the closed
// Bessel-function forms (validated against memory_kernel_quadrature):
//   f_0(t)            = -(Gamma/4) [Y_0(t) + i J_0(t)]
//   f_1(t), t > dz/c  = -(Gamma/4) [Y_0(s) + i J_0(s)],  s = sqrt(t^2 - kappa^2)
//   f_1(t), t < dz/c  =  (Gamma/2pi) K_0(sqrt(kappa^2 - t^2))
// The light-cone point t = dz/c carries an integrable log singularity and is
// evaluated at an epsilon offset.
std::complex<double> memory_kernel(SpectralBranch p, double t, const SystemParams& params);

// Independent route to f_p(t): hyperbolic substitution w = cosh(theta), an
// e^{-eps*cosh(theta)} damping factor, and Richardson extrapolation eps -> 0
// over eps in {1e-2, 5e-3, 2.5e-3}. Slow; used as oracle and fallback.
std::complex<double> memory_kernel_quadrature(SpectralBranch p, double t,
                                              const SystemParams& params);

// Same damped quadrature with the conjugate carrier e^{+iwt}; test hook for
// the Hermitian symmetry f_p(-t) = conj(f_p(t)).
std::complex<double> memory_kernel_quadrature_conjugate(SpectralBranch p, double t,
                                                        const SystemParams& params);

// Precompute panel-averaged kernels for k = 0..n-1; panels containing a
// singular point are integrated with geometric grading toward it.
KernelGrid kernel_grid(const SystemParams& params, double dt, std::size_t n);

// Lossless binary cache of a kernel grid.
void save_kernel_grid(const KernelGrid& grid, const std::filesystem::path& path);
KernelGrid load_kernel_grid(const std::filesystem::path& path);

// Lamb shift delta_p = PV int_0^inf J_p(w) / (omega0 - w) dw. Below the
// cutoff the integrand is regular; above it the principal value is computed
// by subtraction over a symmetric window around omega0. Rejects omega0 at
// the cutoff where J_p diverges.
double lamb_shift(SpectralBranch p, double omega0, const SystemParams& params);

MarkovRates markov_rates(const SystemParams& params);

// int_cutoff^inf [J_0(w) +/- J_1(w)] / (w - E)^power dw for E < cutoff and
// power in {1, 2}. The +/- combination is formed inside the integrand so the
// antisymmetric branch stays accurate near the band edge where J_0 and J_1
// individually diverge.
double spectral_moment(BranchSign sign, double E, int power, const SystemParams& params);

}  // namespace qbwg

#endif
