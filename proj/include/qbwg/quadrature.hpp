#ifndef QBWG_QUADRATURE_HPP
#define QBWG_QUADRATURE_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace qbwg::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// 32-point rule, computed once.
const GaussRule& gauss32();

template <class F>
auto panel(F&& f, double a, double b) {
    const GaussRule& r = gauss32();
    const double mid = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    using R = decltype(f(mid));
    R acc{};
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += f(mid + h * r.x[i]) * r.w[i];
    return acc * h;
}

template <class F>
auto panels(F&& f, const std::vector<double>& edges) {
    using R = decltype(f(edges.front()));
    R acc{};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) acc += panel(f, edges[i], edges[i + 1]);
    return acc;
}

// Panel edges on [a, b]: first panel of width w0, widths doubling up to lmax.
// Resolves an integrand feature of scale w0 near a without wasting panels on
// the smooth remainder.
std::vector<double> graded_edges(double a, double b, double w0, double lmax);

// Uniform-ish edges on [a, b] with panel width <= lmax.
std::vector<double> uniform_edges(double a, double b, double lmax);

// Integral of cos(kappa*u) * G(u) over [U, infinity) for G real on the real
// axis, analytic and algebraically decaying (at least 1/u^2) in the closed
// right half-plane above the real axis. For kappa > 0 the tail is evaluated
// on the rotated contour u = U + i*v where the oscillation turns into
// exp(-kappa*v) decay; for kappa = 0 the substitution u = U/s maps the tail
// onto a finite interval.
template <class G>
double cosine_tail(double kappa, G&& g, double U) {
    using C = std::complex<double>;
    if (kappa < 1e-12) {
        auto f = [&](double s) { return std::real(g(C(U / s, 0.0))) * U / (s * s); };
        return panels(f, uniform_edges(0.0, 1.0, 0.125));
    }
    auto f = [&](double v) { return g(C(U, v)) * std::exp(-kappa * v); };
    const double vmax = 60.0 / kappa;
    C integral{};
    double lo = 0.0, width = 1.0 / kappa;
    while (lo < vmax) {
        const double hi = std::min(lo + width, vmax);
        integral += panel(f, lo, hi);
        lo = hi;
        width *= 2.0;
    }
    return std::real(C(0.0, 1.0) * std::exp(C(0.0, kappa * U)) * integral);
}

}  // namespace qbwg::quad

#endif
