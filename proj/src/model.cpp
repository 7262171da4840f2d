#include "qbwg/model.hpp"

#include <cmath>
#include "qbwg/strfmt.hpp"

#include "qbwg/errors.hpp"

namespace qbwg {

namespace {
constexpr double kSpeedOfLight = 2.99792458e8;    // m/s
constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
constexpr double kHbar = 1.054571817e-34;         // J*s
}  // namespace

void SystemParams::validate() const {
    if (!(omega0 > 0.0))
        throw ConfigError(strfmt("omega0 must be positive, got %g", omega0));
    if (!(gamma11 > 0.0))
        throw ConfigError(strfmt("gamma11 must be positive, got %g", gamma11));
    if (!(delta_z >= 0.0))
        throw ConfigError(strfmt("delta_z must be non-negative, got %g", delta_z));
}

double spectral_density(SpectralBranch p, double omega, const SystemParams& params) {
    if (omega <= kCutoff) return 0.0;
    const double s = std::sqrt(omega * omega - 1.0);  // = sqrt((w/w11)^2 - 1), c = 1
    const double cosf = (p == SpectralBranch::cross) ? std::cos(params.kappa() * s) : 1.0;
    return params.gamma11 / (2.0 * std::numbers::pi) * cosf / s;
}

double cutoff_frequency(double a, double b, int m, int n) {
    if (m < 1 || n < 1) throw ConfigError("mode indices must be >= 1");
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("transverse lengths must be positive");
    const double pi = std::numbers::pi;
    return kSpeedOfLight * std::hypot(m * pi / a, n * pi / b);
}

double gamma11_from_physical(const PhysicalWaveguide& g) {
    if (!(g.a > 0.0) || !(g.b > 0.0) || !(g.lambda0 > 0.0) || !(g.dz_dipole > 0.0))
        throw ConfigError("waveguide lengths, wavelength and dipole moment must be positive");
    if (!(g.x0 > 0.0 && g.x0 < g.a && g.y0 > 0.0 && g.y0 < g.b))
        throw ConfigError("emitter position must lie inside the cross-section");
    const double pi = std::numbers::pi;
    const double sx = std::sin(pi * g.x0 / g.a);
    const double sy = std::sin(pi * g.y0 / g.b);
    // Gamma11 = 4 w11 d^2 sin^2 sin^2 / (eps0 a b c hbar); returned over w11.
    return 4.0 * g.dz_dipole * g.dz_dipole * sx * sx * sy * sy /
           (kVacuumPermittivity * g.a * g.b * kSpeedOfLight * kHbar);
}

double omega0_ratio(const PhysicalWaveguide& g) {
    const double omega0 = 2.0 * std::numbers::pi * kSpeedOfLight / g.lambda0;
    return omega0 / cutoff_frequency(g.a, g.b, 1, 1);
}

}  // namespace qbwg
