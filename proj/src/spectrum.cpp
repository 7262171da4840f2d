#include "qbwg/spectrum.hpp"

#include <cmath>
#include "qbwg/strfmt.hpp"

#include "qbwg/errors.hpp"

namespace qbwg {

double y_function(BranchSign branch, double E, const SystemParams& params) {
    return params.omega0 - spectral_moment(branch, E, 1, params);
}

double residue(BranchSign branch, double energy, const SystemParams& params) {
    if (!(energy < kCutoff)) throw NumericalError("residue requires energy below the band edge");
    return 0.5 / (1.0 + spectral_moment(branch, energy, 2, params));
}

namespace {

std::optional<BoundState> solve_branch(BranchSign branch, const SystemParams& params,
                                       double edge_guard, double bisect_tol) {
    const double probe = kCutoff - edge_guard;
    auto f = [&](double E) { return y_function(branch, E, params) - E; };

    // Y is strictly decreasing below the band edge, so f is too: a root
    // below the probe exists iff f(probe) < 0.
    double f_hi = f(probe);
    if (f_hi >= 0.0) return std::nullopt;

    double lo = std::min(params.omega0 - 10.0 * params.gamma11, probe - 0.1);
    lo = std::max(lo, -10.0 * kCutoff);
    double f_lo = f(lo);
    while (f_lo <= 0.0) {
        lo = (lo > 0.0) ? lo - 1.0 : 2.0 * lo;
        if (lo < -1e6)
            throw NumericalError("bound-state bracket expansion failed");
        f_lo = f(lo);
    }

    double hi = probe;
    for (int it = 0; it < 200 && hi - lo > bisect_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (hi - lo > bisect_tol)
        throw NumericalError("bound-state bisection did not converge");

    BoundState bs;
    bs.branch = branch;
    bs.energy = 0.5 * (lo + hi);
    bs.residue = residue(branch, bs.energy, params);
    bs.parity = (branch == BranchSign::plus) ? +1 : -1;
    return bs;
}

}  // namespace

SpectrumResult find_bound_states(const SystemParams& params, const SpectrumOptions& opts) {
    params.validate();
    SpectrumResult res;
    res.plus = solve_branch(BranchSign::plus, params, opts.edge_guard_plus, opts.bisect_tol);
    res.minus = solve_branch(BranchSign::minus, params, opts.edge_guard_minus, opts.bisect_tol);
    res.count = (res.plus ? 1 : 0) + (res.minus ? 1 : 0);
    if (res.plus && res.minus)
        res.degenerate = std::abs(res.plus->energy - res.minus->energy) < opts.degeneracy_tol;
    return res;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "omega0") return SweepAxis::omega0;
    if (name == "delta_z" || name == "dz") return SweepAxis::delta_z;
    if (name == "gamma11") return SweepAxis::gamma11;
    throw ConfigError(strfmt("unknown sweep axis '%s'", name.c_str()));
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::omega0: return "omega0";
        case SweepAxis::delta_z: return "delta_z";
        case SweepAxis::gamma11: return "gamma11";
    }
    return "?";
}

std::vector<SweepPoint> spectrum_sweep(const SystemParams& base, SweepAxis axis, double lo,
                                       double hi, int n, const SpectrumOptions& opts) {
    if (n < 2) throw ConfigError("spectrum_sweep requires at least 2 points");
    std::vector<SweepPoint> points(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const double v = lo + (hi - lo) * i / (n - 1);
        points[i].axis_value = v;
        SystemParams p = base;
        switch (axis) {
            case SweepAxis::omega0: p.omega0 = v; break;
            case SweepAxis::delta_z: p.delta_z = v; break;
            case SweepAxis::gamma11: p.gamma11 = v; break;
        }
        try {
            points[i].result = find_bound_states(p, opts);
        } catch (const std::exception& e) {
            points[i].error = e.what();
        }
    }
    return points;
}

}  // namespace qbwg
