#include "qbwg/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace qbwg::quad {

namespace {

GaussRule make_gauss(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev estimate.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GaussRule& gauss32() {
    static const GaussRule rule = make_gauss(32);
    return rule;
}

std::vector<double> graded_edges(double a, double b, double w0, double lmax) {
    std::vector<double> edges{a};
    double width = w0;
    while (edges.back() < b) {
        edges.push_back(std::min(edges.back() + width, b));
        width = std::min(2.0 * width, lmax);
    }
    return edges;
}

std::vector<double> uniform_edges(double a, double b, double lmax) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / lmax)));
    std::vector<double> edges(n + 1);
    for (int i = 0; i <= n; ++i) edges[i] = a + (b - a) * i / n;
    return edges;
}

}  // namespace qbwg::quad
