#pragma once

// Quadrature on the unit interval and on the reference triangle (0,0), (1,0), (0,1).
//
// Triangle rules are collapsed (Duffy) tensor products of Gauss-Legendre rules, so all
// weights are positive and any exactness degree is reachable.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdg {

inline constexpr int kMaxQuadratureExactness = 40;

template <class Point>
struct QuadRule
{
    std::vector<Point> points;
    std::vector<double> weights;
    int exactness_degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// Edge rules live on t in [0,1]; weights sum to 1.
using EdgeRule = QuadRule<double>;
/// Triangle rules store reference coordinates (xi, eta) = (lambda_1, lambda_2); weights sum to 1/2.
using TriangleRule = QuadRule<Eigen::Vector2d>;

namespace detail {

/// Legendre P_n(x) and P_{n-1}(x), n >= 1.
inline std::pair<double, double> legendre_pair(int n, double x)
{
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

/// n-point Gauss-Legendre rule mapped to [0,1], nodes ascending.
inline EdgeRule gauss_legendre(int n)
{
    EdgeRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.exactness_degree = 2 * n - 1;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            const auto [pn, pm] = legendre_pair(n, x);
            dp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const auto [pn, pm] = legendre_pair(n, x);
        dp = n * (x * pn - pm) / (x * x - 1.0);
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline void check_exactness(int degree)
{
    if (degree < 0 || degree > kMaxQuadratureExactness)
        throw std::invalid_argument("quadrature: unsupported exactness degree " + std::to_string(degree));
}

inline TriangleRule collapsed_triangle(int degree)
{
    // xi = s, eta = r (1 - s); Jacobian (1 - s) raises the degree in s by one.
    const EdgeRule rs = gauss_legendre((degree + 3) / 2);
    const EdgeRule rr = gauss_legendre((degree + 2) / 2);
    TriangleRule rule;
    rule.exactness_degree = degree;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = 0; j < rr.size(); ++j) {
            const double s = rs.points[i];
            const double r = rr.points[j];
            rule.points.emplace_back(s, r * (1.0 - s));
            rule.weights.push_back(rs.weights[i] * rr.weights[j] * (1.0 - s));
        }
    }
    return rule;
}

} // namespace detail

inline const EdgeRule& quad_edge(int exactness_degree)
{
    detail::check_exactness(exactness_degree);
    static const auto table = [] {
        std::array<EdgeRule, kMaxQuadratureExactness + 1> t;
        for (int d = 0; d <= kMaxQuadratureExactness; ++d) {
            t[d] = detail::gauss_legendre(d / 2 + 1);
            t[d].exactness_degree = d;
        }
        return t;
    }();
    return table[exactness_degree];
}

inline const TriangleRule& quad_triangle(int exactness_degree)
{
    detail::check_exactness(exactness_degree);
    static const auto table = [] {
        std::array<TriangleRule, kMaxQuadratureExactness + 1> t;
        for (int d = 0; d <= kMaxQuadratureExactness; ++d)
            t[d] = detail::collapsed_triangle(d);
        return t;
    }();
    return table[exactness_degree];
}

} // namespace hdg
