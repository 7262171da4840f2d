#ifndef QBWG_SPECTRUM_HPP
#define QBWG_SPECTRUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "qbwg/kernels.hpp"
#include "qbwg/model.hpp"

namespace qbwg {

// One isolated root of Y_branch(E) = E below the band edge.
struct BoundState {
    BranchSign branch = BranchSign::plus;
    double energy = 0.0;   // E_b, units of omega11, strictly < cutoff
    double residue = 0.0;  // Z in (0, 1/2]
    int parity = +1;       // amplitude ratio alpha2/alpha1: +1 or -1
};

struct SpectrumResult {
    int count = 0;  // number of bound states, 0..2
    std::optional<BoundState> plus;
    std::optional<BoundState> minus;
    double band_edge = kCutoff;
    bool degenerate = false;
};

// Numerical policy for the bound-state search.
//
// The existence test probes Y at E = cutoff - guard instead of the cutoff.
// The two branches need different guards: the antisymmetric integrand
// (1 - cos) is regular at the band edge, so its probe sits essentially at
// the edge; the symmetric integrand (1 + cos) carries the inverse-sqrt edge
// divergence, which makes Y_+ -> -inf at the edge, and the standoff sets the
// scale below which a near-edge root (whose residue is already dynamically
// negligible) is not counted. 0.03 reproduces the observed disappearance of
// the symmetric bound state.
struct SpectrumOptions {
    double edge_guard_plus = 0.03;
    double edge_guard_minus = 1e-6;
    double degeneracy_tol = 3e-3;  // |E+ - E-| below which the pair counts as degenerate
    double bisect_tol = 1e-10;
};

// Y_branch(E) = omega0 - int [J0 +/- J1] / (w - E) dw for E < cutoff.
double y_function(BranchSign branch, double E, const SystemParams& params);

// Residue Z = 1/2 [1 + int (J0 +/- J1)/(w - E)^2 dw]^{-1} at a root energy.
double residue(BranchSign branch, double energy, const SystemParams& params);

SpectrumResult find_bound_states(const SystemParams& params, const SpectrumOptions& opts = {});

enum class SweepAxis { omega0, delta_z, gamma11 };

SweepAxis sweep_axis_from_name(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

struct SweepPoint {
    double axis_value = 0.0;
    std::optional<SpectrumResult> result;
    std::string error;  // non-empty when this point failed
};

// Spectrum at n points on [lo, hi] of the chosen axis; per-point failures
// are recorded, not thrown. Points are evaluated in parallel.
std::vector<SweepPoint> spectrum_sweep(const SystemParams& base, SweepAxis axis, double lo,
                                       double hi, int n, const SpectrumOptions& opts = {});

}  // namespace qbwg

#endif
