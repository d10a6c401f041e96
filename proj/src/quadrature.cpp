#include "jumpgeo/quadrature.hpp"

#include <cmath>

namespace jumpgeo {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (x * p0 - p1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

SphereRule sphere_rule(int m, int order) {
    if (m < 1) throw DomainError("sphere_rule: dimension must be >= 1");
    if (order < 1) throw DomainError("sphere_rule: order must be >= 1");
    SphereRule rule;
    if (m == 1) {
        rule.directions = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
        rule.weights = {1.0, 1.0};
        return rule;
    }
    // azimuth: midpoint rule, spectrally accurate for periodic integrands
    const int naz = m == 2 ? order : 2 * order;
    std::vector<double> az(naz);
    for (int j = 0; j < naz; ++j) az[j] = (j + 0.5) * 2.0 * M_PI / naz;
    const double waz = 2.0 * M_PI / naz;
    // Polar angle i carries the weight sin^k(theta), k = m - 2 - i. For odd k the
    // substitution t = cos(theta) leaves a polynomial weight, so Gauss-Legendre in
    // t is exact on it; even k stays in theta.
    const QuadratureRule in_theta = gauss_legendre(order, 0.0, M_PI);
    const QuadratureRule in_t = gauss_legendre(order, -1.0, 1.0);
    const int npolar = m - 2;
    std::vector<std::vector<double>> cos_node(npolar), sin_node(npolar), weight(npolar);
    for (int i = 0; i < npolar; ++i) {
        const int k = m - 2 - i;
        for (int q = 0; q < order; ++q) {
            double c, s, w;
            if (k % 2 == 1) {
                c = -in_t.nodes[q];
                s = std::sqrt(std::max(0.0, 1.0 - c * c));
                w = in_t.weights[q] * std::pow(s, k - 1);
            } else {
                c = std::cos(in_theta.nodes[q]);
                s = std::sin(in_theta.nodes[q]);
                w = in_theta.weights[q] * std::pow(s, k);
            }
            cos_node[i].push_back(c);
            sin_node[i].push_back(s);
            weight[i].push_back(w);
        }
    }

    // enumerate the polar angles as a mixed-radix counter
    std::vector<int> idx(npolar, 0);
    for (;;) {
        double wpolar = 1.0;
        Vector prefix(m);
        double sin_prod = 1.0;
        for (int i = 0; i < npolar; ++i) {
            prefix[i] = sin_prod * cos_node[i][idx[i]];
            wpolar *= weight[i][idx[i]];
            sin_prod *= sin_node[i][idx[i]];
        }
        for (int j = 0; j < naz; ++j) {
            Vector d = prefix;
            d[m - 2] = sin_prod * std::cos(az[j]);
            d[m - 1] = sin_prod * std::sin(az[j]);
            rule.directions.push_back(std::move(d));
            rule.weights.push_back(wpolar * waz);
        }
        int k = npolar - 1;
        while (k >= 0 && ++idx[k] == order) idx[k--] = 0;
        if (k < 0) break;
    }
    return rule;
}

}  // namespace jumpgeo
