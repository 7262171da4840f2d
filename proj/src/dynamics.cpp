#include "qbwg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include "qbwg/strfmt.hpp"
#include <limits>

#include "qbwg/errors.hpp"

namespace qbwg {

namespace {

using C = std::complex<double>;
constexpr C kImag{0.0, 1.0};
constexpr std::size_t kChunk = 2048;

struct Pair2 {
    C a{};
    C b{};
};

// H_j = sum_{m=0}^{n-1} K[n-m] * s[m] with K[k] the 2x2 symmetric kernel
// matrix averaged over the k-th panel and s[m] the panel-midpoint amplitude
// averages. Accumulation runs over fixed-size chunks summed in index order,
// so the result is independent of the thread count.
Pair2 history_coupled(const KernelGrid& g, const std::vector<C>& s1, const std::vector<C>& s2,
                      std::size_t n, bool parallel) {
    const std::size_t nch = (n + kChunk - 1) / kChunk;
    std::vector<Pair2> part(nch);
    const long L = static_cast<long>(nch);
#pragma omp parallel for schedule(static) if (parallel && n >= 4 * kChunk)
    for (long ci = 0; ci < L; ++ci) {
        const std::size_t m0 = static_cast<std::size_t>(ci) * kChunk;
        const std::size_t m1 = std::min(n, m0 + kChunk);
        C a{}, b{};
        for (std::size_t m = m0; m < m1; ++m) {
            const C f0 = g.f0[n - m];
            const C f1 = g.f1[n - m];
            a += f0 * s1[m] + f1 * s2[m];
            b += f1 * s1[m] + f0 * s2[m];
        }
        part[ci] = {a, b};
    }
    Pair2 h;
    for (const Pair2& p : part) {
        h.a += p.a;
        h.b += p.b;
    }
    return h;
}

[[noreturn]] void corrector_failure(std::size_t step, double t) {
    throw NumericalError(
        strfmt("corrector did not converge at step %zu (t = %.6g)", step, t));
}

[[noreturn]] void norm_failure(std::size_t step, double t, double norm) {
    throw NumericalError(strfmt(
        "excitation norm %g exceeds 1 at step %zu (t = %.6g); reduce dt", norm, step, t));
}

// Shared per-step corrector for the coupled system. On entry y_new holds the
// predictor; returns the converged value and its right-hand side.
struct StepResult {
    Pair2 y;
    Pair2 F;
};

template <class Rhs>
StepResult correct_step(const Pair2& y_prev, const Pair2& F_prev, Pair2 y_new, double dt,
                        const SolverConfig& cfg, Rhs&& rhs, std::size_t step, double t) {
    const Pair2 base{y_prev.a + 0.5 * dt * F_prev.a, y_prev.b + 0.5 * dt * F_prev.b};
    double prev_res = std::numeric_limits<double>::infinity();
    bool converged = false;
    Pair2 F{};
    for (int it = 0; it < cfg.max_corrector_iters && !converged; ++it) {
        F = rhs(y_new);
        Pair2 y_next{base.a + 0.5 * dt * F.a, base.b + 0.5 * dt * F.b};
        const double res =
            std::max(std::abs(y_next.a - y_new.a), std::abs(y_next.b - y_new.b));
        if (cfg.scheme == Scheme::predictor_corrector) {
            y_new = y_next;
            converged = true;
            break;
        }
        if (res >= prev_res) {  // damp a non-contracting update
            y_next.a = 0.5 * (y_next.a + y_new.a);
            y_next.b = 0.5 * (y_next.b + y_new.b);
        }
        y_new = y_next;
        converged = res < cfg.corrector_tol;
        prev_res = res;
    }
    if (!converged) corrector_failure(step, t);
    F = rhs(y_new);
    return {y_new, F};
}

Trajectory solve_coupled(const SystemParams& params, const SolverConfig& cfg,
                         const KernelGrid& grid, bool chunked_parallel) {
    params.validate();
    cfg.validate(params);
    const std::size_t N = cfg.steps();
    if (grid.size() < N || grid.dt != cfg.dt)
        throw ConfigError("kernel grid does not cover the requested trajectory");

    const double dt = cfg.dt;
    const double w0 = params.omega0;
    Trajectory traj;
    traj.params = params;
    traj.config = cfg;
    traj.times.resize(N + 1);
    traj.c1.resize(N + 1);
    traj.c2.resize(N + 1);
    traj.c1[0] = 1.0;
    traj.c2[0] = 0.0;

    std::vector<C> s1(N), s2(N);  // midpoint averages of past panels
    Pair2 y{traj.c1[0], traj.c2[0]};
    Pair2 F{-kImag * w0 * y.a, -kImag * w0 * y.b};  // convolution vanishes at t = 0
    const C k00 = grid.f0[0];
    const C k01 = grid.f1[0];

    for (std::size_t n = 0; n < N; ++n) {
        Pair2 h{};
        if (n > 0) {
            if (chunked_parallel) {
                h = history_coupled(grid, s1, s2, n, cfg.parallel);
            } else {
                for (std::size_t m = 0; m < n; ++m) {
                    const C f0 = grid.f0[n - m];
                    const C f1 = grid.f1[n - m];
                    h.a += f0 * s1[m] + f1 * s2[m];
                    h.b += f1 * s1[m] + f0 * s2[m];
                }
            }
        }
        const double t_next = (n + 1) * dt;
        auto rhs = [&](const Pair2& yn) {
            const C m1 = 0.5 * (y.a + yn.a);
            const C m2 = 0.5 * (y.b + yn.b);
            const C conv1 = dt * (h.a + k00 * m1 + k01 * m2);
            const C conv2 = dt * (h.b + k01 * m1 + k00 * m2);
            return Pair2{-kImag * w0 * yn.a - conv1, -kImag * w0 * yn.b - conv2};
        };
        Pair2 predictor = (cfg.scheme == Scheme::predictor_corrector)
                              ? Pair2{y.a + dt * F.a, y.b + dt * F.b}
                              : y;
        const StepResult r = correct_step(y, F, predictor, dt, cfg, rhs, n + 1, t_next);
        s1[n] = 0.5 * (y.a + r.y.a);
        s2[n] = 0.5 * (y.b + r.y.b);
        y = r.y;
        F = r.F;
        const double norm = std::norm(y.a) + std::norm(y.b);
        if (norm > 1.0 + cfg.norm_tol + dt * dt * t_next) norm_failure(n + 1, t_next, norm);
        traj.times[n + 1] = t_next;
        traj.c1[n + 1] = y.a;
        traj.c2[n + 1] = y.b;
    }
    return traj;
}

// Scalar channel with kernel f0 + sgn * f1 and unit initial amplitude.
std::vector<C> solve_scalar(const SystemParams& params, const SolverConfig& cfg,
                            const KernelGrid& grid, double sgn) {
    const std::size_t N = cfg.steps();
    const double dt = cfg.dt;
    const double w0 = params.omega0;
    std::vector<C> c(N + 1);
    c[0] = 1.0;
    std::vector<C> ker(N), s(N);
    for (std::size_t k = 0; k < N; ++k) ker[k] = grid.f0[k] + sgn * grid.f1[k];

    C y = c[0];
    C F = -kImag * w0 * y;
    for (std::size_t n = 0; n < N; ++n) {
        C h{};
        for (std::size_t m = 0; m < n; ++m) h += ker[n - m] * s[m];
        const double t_next = (n + 1) * dt;
        const C base = y + 0.5 * dt * F;
        C y_new = (cfg.scheme == Scheme::predictor_corrector) ? y + dt * F : y;
        double prev_res = std::numeric_limits<double>::infinity();
        bool converged = false;
        C F_new{};
        for (int it = 0; it < cfg.max_corrector_iters && !converged; ++it) {
            const C mid = 0.5 * (y + y_new);
            F_new = -kImag * w0 * y_new - dt * (h + ker[0] * mid);
            C y_next = base + 0.5 * dt * F_new;
            const double res = std::abs(y_next - y_new);
            if (cfg.scheme == Scheme::predictor_corrector) {
                y_new = y_next;
                converged = true;
                break;
            }
            if (res >= prev_res) y_next = 0.5 * (y_next + y_new);
            y_new = y_next;
            converged = res < cfg.corrector_tol;
            prev_res = res;
        }
        if (!converged) corrector_failure(n + 1, t_next);
        const C mid = 0.5 * (y + y_new);
        s[n] = mid;
        F = -kImag * w0 * y_new - dt * (h + ker[0] * mid);
        y = y_new;
        if (std::norm(y) > 1.0 + cfg.norm_tol + dt * dt * t_next)
            norm_failure(n + 1, t_next, std::norm(y));
        c[n + 1] = y;
    }
    return c;
}

}  // namespace

void SolverConfig::validate(const SystemParams& params) const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    const double dt_max = 0.05 * std::min(1.0 / params.omega0, 1.0);
    if (dt > dt_max * (1.0 + 1e-12))
        throw ConfigError(strfmt("dt = %g too coarse; need dt <= %.6g for omega0 = %g",
                             dt, dt_max, params.omega0));
    if (!(t_end >= dt)) throw ConfigError("t_end must be at least one step");
}

std::size_t SolverConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

Trajectory solve_volterra(const SystemParams& params, const SolverConfig& config,
                          const KernelGrid& grid) {
    return solve_coupled(params, config, grid, true);
}

Trajectory solve_volterra_reference(const SystemParams& params, const SolverConfig& config,
                                    const KernelGrid& grid) {
    return solve_coupled(params, config, grid, false);
}

PmTrajectory solve_scalar_pm(const SystemParams& params, const SolverConfig& config,
                             const KernelGrid& grid) {
    params.validate();
    config.validate(params);
    if (grid.size() < config.steps() || grid.dt != config.dt)
        throw ConfigError("kernel grid does not cover the requested trajectory");
    PmTrajectory pm;
    const std::size_t N = config.steps();
    pm.times.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) pm.times[k] = k * config.dt;
    pm.cplus = solve_scalar(params, config, grid, +1.0);
    pm.cminus = solve_scalar(params, config, grid, -1.0);
    return pm;
}

std::pair<C, C> markovian_solution(const SystemParams& params, const MarkovRates& rates,
                                   double t) {
    if (!(t >= 0.0)) throw NumericalError("markovian_solution requires t >= 0");
    const C envelope = std::exp(-(kImag * params.omega0 + rates.upsilon0) * t);
    const C em = std::exp(-rates.upsilon1 * t);
    const C ep = std::exp(rates.upsilon1 * t);
    return {0.5 * envelope * (em + ep), 0.5 * envelope * (em - ep)};
}

std::pair<C, C> long_time_amplitude(const SpectrumResult& spectrum, const SystemParams&,
                                    double t) {
    if (spectrum.count == 0) return {C{}, C{}};
    if (spectrum.count == 1) {
        const BoundState& b = *spectrum.plus;
        const C a = b.residue * std::exp(-kImag * b.energy * t);
        return {a, a};
    }
    const BoundState& p = *spectrum.plus;
    const BoundState& m = *spectrum.minus;
    if (spectrum.degenerate) {
        const double e = 0.5 * (p.energy + m.energy);
        const C phase = std::exp(-kImag * e * t);
        return {(p.residue + m.residue) * phase, (p.residue - m.residue) * phase};
    }
    const C ap = p.residue * std::exp(-kImag * p.energy * t);
    const C am = m.residue * std::exp(-kImag * m.energy * t);
    return {ap + am, ap - am};
}

double steady_energy_formula(const SpectrumResult& spectrum, const SystemParams& params,
                             double t) {
    const double w0 = params.omega0;
    if (spectrum.count == 0) return 0.0;
    if (spectrum.count == 1) {
        const double z = spectrum.plus->residue;
        return w0 * z * z;
    }
    const double zp = spectrum.plus->residue;
    const double zm = spectrum.minus->residue;
    if (spectrum.degenerate) return w0 * (zp - zm) * (zp - zm);
    const double beat = spectrum.plus->energy - spectrum.minus->energy;
    return w0 * (zp * zp + zm * zm - 2.0 * zp * zm * std::cos(beat * t));
}

}  // namespace qbwg
