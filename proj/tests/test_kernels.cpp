#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <utility>
#include <vector>

#include "doctest.h"
#include "oracle_quad.hpp"
#include "qbwg/errors.hpp"
#include "qbwg/kernels.hpp"
#include "qbwg/model.hpp"

using namespace qbwg;
using C = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Principal-value frequency integral int J_p(w)/(omega0 - w) dw, evaluated in
// the wavenumber variable u (w = sqrt(1 + u^2)) with symmetric pole excision
// extrapolated to zero width; independent of the library's subtraction +
// contour-rotation route.
double lamb_shift_oracle(SpectralBranch p, double omega0, const SystemParams& prm) {
    const double kappa = (p == SpectralBranch::cross) ? prm.kappa() : 0.0;
    const double pref = prm.gamma11 / (2.0 * kPi);
    auto f = [&](double u) {
        const double sq = std::sqrt(1.0 + u * u);
        return std::cos(kappa * u) / (sq * (omega0 - sq));
    };
    const double U = 30.0;
    const double tail =
        kappa > 0.0 ? oracle::oscillatory_tail(f, U, kappa) : oracle::power_tail(f, U);

    if (omega0 < 1.0) return pref * (oracle::integrate(f, 0.0, U) + tail);

    const double u0 = std::sqrt(omega0 * omega0 - 1.0);
    const std::array<double, 3> eta{4e-3, 2e-3, 1e-3};
    std::array<double, 3> val{};
    for (int i = 0; i < 3; ++i)
        val[i] = oracle::integrate(f, 0.0, u0 - eta[i]) +
                 oracle::integrate(f, u0 + eta[i], U);
    // Lagrange extrapolation of the excised integral to eta = 0.
    double main = 0.0;
    for (int i = 0; i < 3; ++i) {
        double li = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) li *= eta[j] / (eta[j] - eta[i]);
        main += li * val[i];
    }
    return pref * (main + tail);
}

// int [J_0 +/- J_1] / (w - E)^power dw for E below the cutoff, same variable
// change, no pole.
double moment_oracle(BranchSign sign, double E, int power, const SystemParams& prm) {
    const double kappa = prm.kappa();
    const double sgn = branch_factor(sign);
    auto part = [&](double k) {
        auto f = [&](double u) {
            const double sq = std::sqrt(1.0 + u * u);
            const double d = sq - E;
            return std::cos(k * u) / (sq * (power == 1 ? d : d * d));
        };
        const double U = 30.0;
        const double tail =
            k > 0.0 ? oracle::oscillatory_tail(f, U, k) : oracle::power_tail(f, U);
        return oracle::integrate(f, 0.0, U) + tail;
    };
    return prm.gamma11 / (2.0 * kPi) * (part(0.0) + sgn * part(kappa));
}

}  // namespace

TEST_CASE("closed kernel forms match the damped-quadrature oracle") {
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    for (auto p : {SpectralBranch::self, SpectralBranch::cross}) {
        for (double t : {1.0, 2.0, 4.0, 8.0}) {
            const C closed = memory_kernel(p, t, prm);
            const C quad = memory_kernel_quadrature(p, t, prm);
            CAPTURE(static_cast<int>(p));
            CAPTURE(t);
            CHECK(std::abs(closed - quad) < 1e-6);
        }
    }
}

TEST_CASE("cross kernel inside the light cone is the real Macdonald form") {
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.5};  // kappa = pi
    const double t = 1.0;  // t < kappa
    const C closed = memory_kernel(SpectralBranch::cross, t, prm);
    CHECK(closed.imag() == 0.0);
    CHECK(closed.real() ==
          doctest::Approx(prm.gamma11 / (2.0 * kPi) *
                          std::cyl_bessel_k(0, std::sqrt(kPi * kPi - 1.0)))
              .epsilon(1e-13));
    const C quad = memory_kernel_quadrature(SpectralBranch::cross, t, prm);
    CHECK(std::abs(closed - quad) < 1e-6);
}

TEST_CASE("kernel obeys Hermitian symmetry f(-t) = conj(f(t))") {
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.2};
    for (auto p : {SpectralBranch::self, SpectralBranch::cross}) {
        const C fwd = memory_kernel(p, 2.0, prm);
        const C rev = memory_kernel_quadrature_conjugate(p, 2.0, prm);
        CHECK(std::abs(std::conj(fwd) - rev) < 1e-6);
    }
}

TEST_CASE("self kernel has the band-edge t^{-1/2} envelope") {
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.0};
    auto envelope = [&](double t) { return std::abs(memory_kernel(SpectralBranch::self, t, prm)); };
    CHECK(envelope(400.0) ==
          doctest::Approx(0.25 * prm.gamma11 * std::sqrt(2.0 / (kPi * 400.0))).epsilon(1e-3));
    CHECK(envelope(100.0) / envelope(400.0) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("light-cone sample is finite") {
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.25};
    const C v = memory_kernel(SpectralBranch::cross, prm.kappa(), prm);
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
    CHECK_THROWS_AS(memory_kernel(SpectralBranch::self, 0.0, prm), NumericalError);
    CHECK_THROWS_AS(memory_kernel(SpectralBranch::self, -1.0, prm), NumericalError);
}

TEST_CASE("kernel grid holds panel averages, is deterministic, and caches losslessly") {
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    const double dt = 0.02;
    const KernelGrid g = kernel_grid(prm, dt, 500);
    REQUIRE(g.size() == 500);
    // Panel average against adaptive quadrature, split at integrable
    // singularities (t = 0 in panel 0, the light cone in panel 31).
    auto avg = [&](SpectralBranch p, double a, double b) {
        auto re = [&](double t) { return memory_kernel(p, t, prm).real(); };
        auto im = [&](double t) { return memory_kernel(p, t, prm).imag(); };
        const double kap = prm.kappa();
        std::vector<std::pair<double, double>> spans;
        if (a < kap && kap < b) {
            spans = {{a, kap - 1e-13}, {kap + 1e-13, b}};
        } else {
            spans = {{std::max(a, 1e-13), b}};
        }
        C acc{};
        for (const auto& [lo, hi] : spans)
            acc += C(oracle::integrate(re, lo, hi), oracle::integrate(im, lo, hi));
        return acc / dt;
    };
    for (std::size_t k : {std::size_t{0}, std::size_t{17}, std::size_t{31}, std::size_t{499}}) {
        const double a = k * dt;
        CHECK(std::abs(g.f0[k] - avg(SpectralBranch::self, a, a + dt)) < 1e-7);
        CHECK(std::abs(g.f1[k] - avg(SpectralBranch::cross, a, a + dt)) < 1e-7);
    }
    const KernelGrid g2 = kernel_grid(prm, 0.02, 500);
    CHECK(g.f0 == g2.f0);
    CHECK(g.f1 == g2.f1);

    const auto path = std::filesystem::temp_directory_path() / "qbwg_kernel_cache.bin";
    save_kernel_grid(g, path);
    const KernelGrid loaded = load_kernel_grid(path);
    CHECK(loaded.dt == g.dt);
    CHECK(loaded.f0 == g.f0);
    CHECK(loaded.f1 == g.f1);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_kernel_grid(path), ConfigError);
}

TEST_CASE("Lamb shift matches the excision oracle") {
    struct Case {
        SpectralBranch p;
        double omega0;
        double dz;
    };
    for (const Case& c : {Case{SpectralBranch::self, 1.5, 0.1},
                          Case{SpectralBranch::cross, 1.5, 0.1},
                          Case{SpectralBranch::self, 0.5, 0.1},
                          Case{SpectralBranch::cross, 0.5, 0.3},
                          Case{SpectralBranch::cross, 1.2, 0.5}}) {
        SystemParams prm{.omega0 = c.omega0, .gamma11 = 0.5, .delta_z = c.dz};
        CAPTURE(c.omega0);
        CAPTURE(c.dz);
        CAPTURE(static_cast<int>(c.p));
        CHECK(lamb_shift(c.p, c.omega0, prm) ==
              doctest::Approx(lamb_shift_oracle(c.p, c.omega0, prm)).epsilon(1e-5));
    }
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    CHECK_THROWS_AS(lamb_shift(SpectralBranch::self, 1.0, prm), NumericalError);
}

TEST_CASE("Markov rates combine decay and shift") {
    SystemParams prm{.omega0 = 1.5, .gamma11 = 0.5, .delta_z = 0.1};
    const MarkovRates r = markov_rates(prm);
    CHECK(r.upsilon0.real() ==
          doctest::Approx(kPi * spectral_density(SpectralBranch::self, 1.5, prm)).epsilon(1e-13));
    CHECK(r.upsilon1.real() ==
          doctest::Approx(kPi * spectral_density(SpectralBranch::cross, 1.5, prm)).epsilon(1e-13));
    CHECK(r.upsilon0.imag() == lamb_shift(SpectralBranch::self, 1.5, prm));

    SystemParams below{.omega0 = 0.5, .gamma11 = 0.5, .delta_z = 0.1};
    const MarkovRates rb = markov_rates(below);
    CHECK(rb.upsilon0.real() == 0.0);  // no decay below the cutoff
    CHECK(rb.upsilon1.real() == 0.0);
}

TEST_CASE("Cauchy moments match the direct oracle") {
    struct Case {
        BranchSign s;
        double E;
        int power;
        double dz;
    };
    for (const Case& c :
         {Case{BranchSign::plus, 0.5, 1, 0.1}, Case{BranchSign::minus, 0.5, 1, 0.1},
          Case{BranchSign::plus, 0.5, 2, 0.1}, Case{BranchSign::minus, 0.5, 2, 0.1},
          Case{BranchSign::plus, 0.9, 2, 0.3}, Case{BranchSign::minus, 0.99, 1, 0.3},
          Case{BranchSign::plus, -0.5, 1, 0.5}, Case{BranchSign::minus, 0.9, 1, 1.2}}) {
        SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = c.dz};
        CAPTURE(c.E);
        CAPTURE(c.power);
        CAPTURE(c.dz);
        const double lib = spectral_moment(c.s, c.E, c.power, prm);
        const double ora = moment_oracle(c.s, c.E, c.power, prm);
        CHECK(lib == doctest::Approx(ora).epsilon(1e-7));
    }
    SystemParams prm{.omega0 = 1.0, .gamma11 = 0.5, .delta_z = 0.1};
    CHECK_THROWS_AS(spectral_moment(BranchSign::plus, 1.0, 1, prm), NumericalError);
    CHECK_THROWS_AS(spectral_moment(BranchSign::plus, 0.5, 3, prm), NumericalError);
}
