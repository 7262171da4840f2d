#include "qbwg/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include "qbwg/strfmt.hpp"
#include <fstream>
#include <numbers>

#include "qbwg/errors.hpp"
#include "qbwg/quadrature.hpp"

namespace qbwg {

namespace {

using C = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Closed kernel forms
// ---------------------------------------------------------------------------

C hankel2_kernel(double gamma, double arg) {
    // -(Gamma/4) [Y0 + i J0](arg)
    return C(-0.25 * gamma * std::cyl_neumann(0, arg), -0.25 * gamma * std::cyl_bessel_j(0, arg));
}

// ---------------------------------------------------------------------------
// Damped oscillatory quadrature (oracle / fallback path)
// ---------------------------------------------------------------------------

// (Gamma w11 / 2pi) int_0^thmax cos(kappa sinh th) exp(-(eps + i t) cosh th) dth
// with exp(-eps cosh thmax) < 1e-12. Composite Simpson, ~32 points per radian
// of accumulated phase.
C damped_theta_integral(double kappa, double t, double eps, double gamma, double carrier_sign) {
    const double thmax = std::acosh(std::log(1e12) / eps);
    const double phase = std::abs(t) * std::cosh(thmax) + kappa * std::sinh(thmax);
    std::size_t n = static_cast<std::size_t>(std::max(4.0e4, 32.0 * phase));
    if (n % 2 != 0) ++n;
    const double h = thmax / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    const long nn = static_cast<long>(n);
#pragma omp parallel for reduction(+ : re, im) schedule(static)
    for (long i = 0; i <= nn; ++i) {
        const double th = h * static_cast<double>(i);
        const double ch = std::cosh(th);
        const double sh = std::sinh(th);
        const double w = (i == 0 || i == nn) ? 1.0 : ((i % 2 != 0) ? 4.0 : 2.0);
        const double amp = w * std::cos(kappa * sh) * std::exp(-eps * ch);
        re += amp * std::cos(t * ch);
        im += carrier_sign * amp * std::sin(t * ch);
    }
    return gamma / kTwoPi * (h / 3.0) * C(re, im);
}

C damped_kernel_richardson(double kappa, double t, double gamma, double carrier_sign) {
    const std::array<double, 3> eps{1e-2, 5e-3, 2.5e-3};
    std::array<C, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = damped_theta_integral(kappa, t, eps[i], gamma, carrier_sign);
    // Neville extrapolation to eps = 0.
    for (int k = 1; k < 3; ++k)
        for (int i = 0; i < 3 - k; ++i)
            v[i] = v[i] + (v[i] - v[i + 1]) * (eps[i] / (eps[i + k] - eps[i]));
    return v[0];
}

// ---------------------------------------------------------------------------
// Cauchy moments over the band, in the wavenumber variable u = sinh(theta)
// (w = sqrt(1 + u^2)): the edge singularity of J_p is absorbed into the
// measure, leaving
//   int J dw -> (Gamma/2pi) int weight(u) du / sqrt(1 + u^2)
// with weight(u) in {1, cos(kappa u), 1 +/- cos(kappa u)}.
// ---------------------------------------------------------------------------

enum class Weight { one, cosine, one_plus_cos, one_minus_cos };

double weight_eval(Weight wt, double kappa, double u) {
    switch (wt) {
        case Weight::one: return 1.0;
        case Weight::cosine: return std::cos(kappa * u);
        case Weight::one_plus_cos: return 1.0 + std::cos(kappa * u);
        case Weight::one_minus_cos: {
            const double s = std::sin(0.5 * kappa * u);
            return 2.0 * s * s;  // 1 - cos, stable near u = 0
        }
    }
    return 0.0;
}

C pow_int(C z, int power) { return power == 1 ? z : z * z; }

// int_cutoff^inf [weight-combination of J] / (w - E)^power dw, E < cutoff,
// without the Gamma/2pi prefactor.
double cauchy_core(Weight wt, double kappa, double E, int power) {
    const double U1 = 3.0;
    // The integrand peaks at scale u ~ sqrt(2(1-E)) when E approaches the
    // band edge; grade the panels to resolve it.
    const double w0 = std::clamp(0.5 * std::sqrt(2.0 * std::max(1.0 - E, 1e-12)), 1e-6, 0.25);
    const double lmax = std::min(0.5, 6.0 / std::max(kappa, 1.0));
    auto head_f = [&](double u) {
        const double w = std::sqrt(1.0 + u * u);
        const double d = w - E;
        return weight_eval(wt, kappa, u) / (w * (power == 1 ? d : d * d));
    };
    const double head = quad::panels(head_f, quad::graded_edges(0.0, U1, w0, lmax));

    auto g = [&](C u) {
        const C w = std::sqrt(1.0 + u * u);
        return 1.0 / (w * pow_int(w - E, power));
    };
    double tail = 0.0;
    switch (wt) {
        case Weight::one: tail = quad::cosine_tail(0.0, g, U1); break;
        case Weight::cosine: tail = quad::cosine_tail(kappa, g, U1); break;
        case Weight::one_plus_cos:
            tail = quad::cosine_tail(0.0, g, U1) + quad::cosine_tail(kappa, g, U1);
            break;
        case Weight::one_minus_cos:
            tail = quad::cosine_tail(0.0, g, U1) - quad::cosine_tail(kappa, g, U1);
            break;
    }
    return head + tail;
}

}  // namespace

C memory_kernel(SpectralBranch p, double t, const SystemParams& params) {
    if (!(t > 0.0))
        throw NumericalError(strfmt("memory_kernel requires t > 0, got %g", t));
    const double gamma = params.gamma11;
    if (p == SpectralBranch::self) return hankel2_kernel(gamma, t);
    const double kappa = params.kappa();
    if (kappa == 0.0) return hankel2_kernel(gamma, t);
    double s2 = t * t - kappa * kappa;
    if (std::abs(s2) < 1e-20) s2 = 1e-20;  // light-cone point, integrable log
    if (s2 > 0.0) return hankel2_kernel(gamma, std::sqrt(s2));
    return C(gamma / kTwoPi * std::cyl_bessel_k(0, std::sqrt(-s2)), 0.0);
}

C memory_kernel_quadrature(SpectralBranch p, double t, const SystemParams& params) {
    if (!(t > 0.0)) throw NumericalError("memory_kernel_quadrature requires t > 0");
    const double kappa = (p == SpectralBranch::cross) ? params.kappa() : 0.0;
    return damped_kernel_richardson(kappa, t, params.gamma11, -1.0);
}

C memory_kernel_quadrature_conjugate(SpectralBranch p, double t, const SystemParams& params) {
    if (!(t > 0.0)) throw NumericalError("memory_kernel_quadrature requires t > 0");
    const double kappa = (p == SpectralBranch::cross) ? params.kappa() : 0.0;
    return damped_kernel_richardson(kappa, t, params.gamma11, +1.0);
}

namespace {

// Gauss-Legendre panel integral of a complex integrand.
template <class F>
C complex_panel(F&& f, double a, double b) {
    const quad::GaussRule& g = quad::gauss32();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    C acc{};
    for (std::size_t i = 0; i < g.x.size(); ++i) acc += g.w[i] * f(mid + half * g.x[i]);
    return half * acc;
}

// Integral over [a, b] with an integrable (log) singularity at one endpoint:
// geometric panel refinement toward it. The innermost sliver carries
// O(len 2^-48 log) and is dropped.
template <class F>
C graded_panel(F&& f, double a, double b, bool singular_at_left) {
    const double len = b - a;
    C acc{};
    double frac = 0.5;
    for (int j = 0; j < 48; ++j, frac *= 0.5) {
        const double near = singular_at_left ? a + len * frac : b - len * frac;
        const double far = singular_at_left ? a + len * 2.0 * frac : b - len * 2.0 * frac;
        acc += singular_at_left ? complex_panel(f, near, far) : complex_panel(f, far, near);
    }
    return acc;
}

}  // namespace

KernelGrid kernel_grid(const SystemParams& params, double dt, std::size_t n) {
    if (!(dt > 0.0)) throw ConfigError("kernel_grid requires dt > 0");
    if (n < 2) throw ConfigError("kernel_grid requires n >= 2");
    KernelGrid grid;
    grid.dt = dt;
    grid.f0.resize(n);
    grid.f1.resize(n);
    const double kappa = params.kappa();
    const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (long k = 0; k < nn; ++k) {
        const double a = static_cast<double>(k) * dt;
        const double b = a + dt;
        auto f0 = [&](double t) { return memory_kernel(SpectralBranch::self, t, params); };
        auto f1 = [&](double t) { return memory_kernel(SpectralBranch::cross, t, params); };
        // Self branch: log singularity only at t = 0.
        grid.f0[k] = (k == 0 ? graded_panel(f0, a, b, true) : complex_panel(f0, a, b)) / dt;
        // Cross branch: log singularities at t = 0 (kappa = 0) and at the
        // light cone t = kappa; split the containing panel there.
        C v1;
        if (kappa == 0.0) {
            v1 = grid.f0[k] * dt;
        } else if (a < kappa && kappa < b) {
            v1 = graded_panel(f1, a, kappa, false) + graded_panel(f1, kappa, b, true);
        } else if (kappa == a) {
            v1 = graded_panel(f1, a, b, true);
        } else if (kappa == b) {
            v1 = graded_panel(f1, a, b, false);
        } else if (k == 0) {
            v1 = graded_panel(f1, a, b, true);
        } else {
            v1 = complex_panel(f1, a, b);
        }
        grid.f1[k] = v1 / dt;
    }
    return grid;
}

void save_kernel_grid(const KernelGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open kernel cache for writing: " + path.string());
    const char magic[8] = {'Q', 'B', 'W', 'G', 'K', 'G', '1', '\n'};
    out.write(magic, sizeof magic);
    const std::uint64_t n = grid.size();
    out.write(reinterpret_cast<const char*>(&grid.dt), sizeof grid.dt);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(grid.f0.data()), n * sizeof(C));
    out.write(reinterpret_cast<const char*>(grid.f1.data()), n * sizeof(C));
    if (!out) throw ConfigError("failed writing kernel cache: " + path.string());
}

KernelGrid load_kernel_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open kernel cache: " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::string_view(magic, 7) != "QBWGKG1")
        throw ConfigError("bad kernel cache header: " + path.string());
    KernelGrid grid;
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&grid.dt), sizeof grid.dt);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    grid.f0.resize(n);
    grid.f1.resize(n);
    in.read(reinterpret_cast<char*>(grid.f0.data()), n * sizeof(C));
    in.read(reinterpret_cast<char*>(grid.f1.data()), n * sizeof(C));
    if (!in) throw ConfigError("truncated kernel cache: " + path.string());
    return grid;
}

double lamb_shift(SpectralBranch p, double omega0, const SystemParams& params) {
    if (!(omega0 > 0.0)) throw NumericalError("lamb_shift requires omega0 > 0");
    if (std::abs(omega0 - kCutoff) < 1e-9)
        throw NumericalError("lamb_shift undefined at the cutoff where J_p diverges");
    const double kappa = (p == SpectralBranch::cross) ? params.kappa() : 0.0;
    const Weight wt = (p == SpectralBranch::cross) ? Weight::cosine : Weight::one;
    const double pref = params.gamma11 / kTwoPi;

    if (omega0 < kCutoff) {
        // delta = -int J/(w - omega0) dw, integrand regular.
        return -pref * cauchy_core(wt, kappa, omega0, 1);
    }

    // Principal value by subtraction. In the u variable the pole sits at
    // u0 = sqrt(omega0^2 - 1):
    //   delta = (Gamma/2pi) PV int_0^inf psi(u) / (u0 - u) du,
    //   psi(u) = weight(u)/sqrt(1+u^2) * (omega0 + sqrt(1+u^2)) / (u0 + u).
    const double u0 = std::sqrt(omega0 * omega0 - 1.0);
    const double w = 0.5 * std::min(u0, 1.0);
    const double lmax = std::min({0.5, 6.0 / std::max(kappa, 1.0), w});
    auto psi = [&](double u) {
        const double sq = std::sqrt(1.0 + u * u);
        return weight_eval(wt, kappa, u) / sq * (omega0 + sq) / (u0 + u);
    };
    const double psi0 = psi(u0);

    double acc = 0.0;
    if (u0 - w > 0.0) {
        auto f = [&](double u) { return psi(u) / (u0 - u); };
        acc += quad::panels(f, quad::uniform_edges(0.0, u0 - w, lmax));
    }
    {
        // Symmetric window: the PV log term of the subtracted constant is zero.
        auto f = [&](double u) { return (psi(u) - psi0) / (u0 - u); };
        acc += quad::panels(f, quad::uniform_edges(u0 - w, u0 + w, w / 4.0));
    }
    const double U1 = u0 + w + 3.0;
    {
        auto f = [&](double u) { return psi(u) / (u0 - u); };
        acc += quad::panels(f, quad::uniform_edges(u0 + w, U1, lmax));
    }
    {
        auto g = [&](C u) {
            const C sq = std::sqrt(1.0 + u * u);
            return 1.0 / (sq * (omega0 - sq));
        };
        acc += quad::cosine_tail(kappa, g, U1);
    }
    return pref * acc;
}

MarkovRates markov_rates(const SystemParams& params) {
    MarkovRates r;
    const double w0 = params.omega0;
    r.upsilon0 = C(std::numbers::pi * spectral_density(SpectralBranch::self, w0, params),
                   lamb_shift(SpectralBranch::self, w0, params));
    r.upsilon1 = C(std::numbers::pi * spectral_density(SpectralBranch::cross, w0, params),
                   lamb_shift(SpectralBranch::cross, w0, params));
    return r;
}

double spectral_moment(BranchSign sign, double E, int power, const SystemParams& params) {
    if (!(E < kCutoff))
        throw NumericalError(strfmt("spectral_moment requires E < cutoff, got %g", E));
    if (power != 1 && power != 2) throw NumericalError("spectral_moment power must be 1 or 2");
    const Weight wt = (sign == BranchSign::plus) ? Weight::one_plus_cos : Weight::one_minus_cos;
    return params.gamma11 / kTwoPi * cauchy_core(wt, params.kappa(), E, power);
}

}  // namespace qbwg
