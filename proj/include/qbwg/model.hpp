#ifndef QBWG_MODEL_HPP
#define QBWG_MODEL_HPP

#include <numbers>

namespace qbwg {

// Internal unit system: omega11 = 1, hbar = 1, c = 1. The guide wavelength at
// the cutoff is then lambda11 = 2*pi in internal length units. Distances are
// stored in lambda11 units and frequencies/rates in omega11 units.
inline constexpr double kCutoff = 1.0;                       // omega11
inline constexpr double kLambda11 = 2.0 * std::numbers::pi;  // internal units

// Selects the self (|j-j'| = 0) or cross (|j-j'| = 1) spectral branch.
enum class SpectralBranch { self = 0, cross = 1 };

// Dimensionless problem definition.
struct SystemParams {
    double omega0 = 1.0;   // TLS transition frequency, units of omega11
    double gamma11 = 0.5;  // emitter radiation rate, units of omega11
    double delta_z = 0.1;  // charger-battery separation, units of lambda11

    // omega11 * Delta_z / c in internal units; the retardation wavenumber.
    double kappa() const { return kLambda11 * delta_z; }

    void validate() const;  // throws ConfigError on violated invariants
};

// Waveguide geometry and emitter data in SI units; only used by the
// physical-units bridge, everything else is dimensionless.
struct PhysicalWaveguide {
    double a = 0.45e-6;        // transverse length, m
    double b = 0.45e-6;        // transverse length, m
    double x0 = 0.225e-6;      // transverse emitter position, m
    double y0 = 0.225e-6;      // transverse emitter position, m
    double dz_dipole = 1e-29;  // dipole moment magnitude, C*m
    double lambda0 = 637e-9;   // TLS transition wavelength, m
};

// J_p(omega) in units of omega11. Exactly zero at and below the cutoff; the
// inverse-square-root edge is never evaluated at the cutoff itself.
double spectral_density(SpectralBranch p, double omega, const SystemParams& params);

// Cutoff frequency of the (m,n) transverse mode in rad/s (SI lengths).
double cutoff_frequency(double a, double b, int m, int n);

// Gamma11 / omega11 for a physical geometry. Throws ConfigError when the
// emitter position lies outside the cross-section.
double gamma11_from_physical(const PhysicalWaveguide& geom);

// omega0 / omega11 for a physical geometry (m = n = 1 mode).
double omega0_ratio(const PhysicalWaveguide& geom);

}  // namespace qbwg

#endif
