#include "qbwg/observables.hpp"

#include <algorithm>
#include <cmath>
#include "qbwg/strfmt.hpp"

#include "qbwg/errors.hpp"

namespace qbwg {

QubitState reduce_battery(std::complex<double> c2) {
    const double p = std::norm(c2);
    if (p > 1.0 + 1e-6)
        throw NumericalError(strfmt("battery population %g exceeds 1", p));
    return {std::clamp(p, 0.0, 1.0)};
}

double qb_energy(const QubitState& state, double omega0) { return omega0 * state.p_excited; }

double ergotropy(const QubitState& state, double omega0) {
    return omega0 * std::max(0.0, 2.0 * state.p_excited - 1.0);
}

ObservableSeries observe(const Trajectory& traj) {
    ObservableSeries s;
    const std::size_t n = traj.times.size();
    s.times = traj.times;
    s.pop1.resize(n);
    s.pop2.resize(n);
    s.energy.resize(n);
    s.ergotropy.resize(n);
    const double w0 = traj.params.omega0;
    for (std::size_t i = 0; i < n; ++i) {
        s.pop1[i] = std::clamp(std::norm(traj.c1[i]), 0.0, 1.0);
        const QubitState q = reduce_battery(traj.c2[i]);
        s.pop2[i] = q.p_excited;
        s.energy[i] = qb_energy(q, w0);
        s.ergotropy[i] = ergotropy(q, w0);
    }
    return s;
}

Extrema series_extrema(const ObservableSeries& series, double t_a, double t_b) {
    Extrema e;
    bool any = false;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_a || t > t_b) continue;
        if (!any || series.energy[i] > e.max_energy) {
            e.max_energy = series.energy[i];
            e.t_max_energy = t;
        }
        if (!any || series.energy[i] < e.min_energy) {
            e.min_energy = series.energy[i];
            e.t_min_energy = t;
        }
        if (!any || series.ergotropy[i] > e.max_ergotropy) {
            e.max_ergotropy = series.ergotropy[i];
            e.t_max_ergotropy = t;
        }
        any = true;
    }
    if (!any) throw ConfigError("series_extrema: window contains no samples");
    return e;
}

}  // namespace qbwg
