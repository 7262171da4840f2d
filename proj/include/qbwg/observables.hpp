#ifndef QBWG_OBSERVABLES_HPP
#define QBWG_OBSERVABLES_HPP

#include <complex>
#include <vector>

#include "qbwg/dynamics.hpp"

namespace qbwg {

// Reduced battery state. For the single-excitation initial condition the
// reduced density operator is diagonal, so the excited population is the
// whole state.
struct QubitState {
    double p_excited = 0.0;
};

// p = |c2|^2 clamped to [0, 1]; rejects |c2|^2 > 1 + 1e-6.
QubitState reduce_battery(std::complex<double> c2);

// Stored energy omega0 * p.
double qb_energy(const QubitState& state, double omega0);

// Maximal unitarily extractable energy; for a diagonal qubit
// omega0 * max(0, 2p - 1).
double ergotropy(const QubitState& state, double omega0);

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> pop1;       // charger excited population
    std::vector<double> pop2;       // battery excited population
    std::vector<double> energy;     // battery energy, units of omega11
    std::vector<double> ergotropy;  // units of omega11
};

ObservableSeries observe(const Trajectory& traj);

struct Extrema {
    double max_energy = 0.0;
    double min_energy = 0.0;
    double max_ergotropy = 0.0;
    double t_max_energy = 0.0;
    double t_min_energy = 0.0;
    double t_max_ergotropy = 0.0;
};

// Windowed extrema over t in [t_a, t_b]; throws on an empty window.
Extrema series_extrema(const ObservableSeries& series, double t_a, double t_b);

}  // namespace qbwg

#endif
