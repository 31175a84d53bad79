#pragma once

// Scalar polynomial bases on the reference triangle and on the unit interval.
//
// Both bases are orthonormal with respect to the *mean* over the reference element:
// (1/|K|) * integral(phi_i phi_j) = delta_ij.  Hence phi_0 == 1, the mass matrix on a
// physical triangle is area * I and on a face of length |F| it is |F| * I.  Both are
// hierarchical: the first dim(P_j) functions span P_j.

#include "quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdg {

inline constexpr int kMaxBasisDegree = 8;

constexpr int triangle_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }
constexpr int edge_dim(int degree) { return degree + 1; }

class TriangleBasis
{
public:
    TriangleBasis() = default;

    explicit TriangleBasis(int degree) : degree_(degree)
    {
        if (degree < 0 || degree > kMaxBasisDegree)
            throw std::invalid_argument("TriangleBasis: unsupported degree " + std::to_string(degree));
        for (int d = 0; d <= degree; ++d)
            for (int b = 0; b <= d; ++b)
                exponents_.emplace_back(d - b, b);

        // Gram-Schmidt of centred monomials, done as two Cholesky passes so that the
        // result is orthonormal to working precision.
        const int n = dim();
        coefficients_ = Eigen::MatrixXd::Identity(n, n);
        const auto& rule = quad_triangle(2 * degree);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Eigen::VectorXd v = values(rule.points[q]);
                gram.noalias() += (2.0 * rule.weights[q]) * v * v.transpose();
            }
            Eigen::LLT<Eigen::MatrixXd> llt(gram);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error("TriangleBasis: monomial Gram matrix is not positive definite");
            const Eigen::MatrixXd l_inv = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
            coefficients_ = (l_inv * coefficients_).eval();
        }
    }

    int degree() const { return degree_; }
    int dim() const { return triangle_dim(degree_); }

    Eigen::VectorXd values(const Eigen::Vector2d& ref) const
    {
        return coefficients_ * monomials(ref);
    }

    /// Reference gradients, one row per basis function.
    Eigen::MatrixXd gradients(const Eigen::Vector2d& ref) const
    {
        const int n = dim();
        Eigen::MatrixXd dm(n, 2);
        const double x = ref.x() - kCentre, y = ref.y() - kCentre;
        for (int i = 0; i < n; ++i) {
            const auto [a, b] = exponents_[i];
            dm(i, 0) = a == 0 ? 0.0 : a * ipow(x, a - 1) * ipow(y, b);
            dm(i, 1) = b == 0 ? 0.0 : b * ipow(x, a) * ipow(y, b - 1);
        }
        return coefficients_ * dm;
    }

    /// Row i holds the expansion of phi_i in centred monomials (xi-1/3)^a (eta-1/3)^b.
    const Eigen::MatrixXd& monomial_coefficients() const { return coefficients_; }
    const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }

private:
    static constexpr double kCentre = 1.0 / 3.0;

    static double ipow(double x, int p)
    {
        double r = 1.0;
        for (int i = 0; i < p; ++i)
            r *= x;
        return r;
    }

    Eigen::VectorXd monomials(const Eigen::Vector2d& ref) const
    {
        const int n = dim();
        Eigen::VectorXd m(n);
        const double x = ref.x() - kCentre, y = ref.y() - kCentre;
        for (int i = 0; i < n; ++i)
            m(i) = ipow(x, exponents_[i].first) * ipow(y, exponents_[i].second);
        return m;
    }

    int degree_ = 0;
    std::vector<std::pair<int, int>> exponents_;
    Eigen::MatrixXd coefficients_;
};

/// Shared immutable basis of the given degree.
inline const TriangleBasis& triangle_basis(int degree)
{
    if (degree < 0 || degree > kMaxBasisDegree)
        throw std::invalid_argument("triangle_basis: unsupported degree " + std::to_string(degree));
    static const auto table = [] {
        std::array<TriangleBasis, kMaxBasisDegree + 1> t;
        for (int d = 0; d <= kMaxBasisDegree; ++d)
            t[d] = TriangleBasis(d);
        return t;
    }();
    return table[degree];
}

/// Scaled Legendre polynomials sqrt(2j+1) P_j(2t-1) on t in [0,1].
inline Eigen::VectorXd edge_basis(int degree, double t)
{
    Eigen::VectorXd v(degree + 1);
    const double x = 2.0 * t - 1.0;
    double p0 = 1.0, p1 = x;
    v(0) = 1.0;
    if (degree >= 1)
        v(1) = std::sqrt(3.0) * x;
    for (int j = 2; j <= degree; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
        v(j) = std::sqrt(2.0 * j + 1.0) * p2;
    }
    return v;
}

/// Evaluate sum_j c_j psi_j(t).
inline double eval_edge(const Eigen::VectorXd& coefficients, double t)
{
    const int degree = static_cast<int>(coefficients.size()) - 1;
    return degree < 0 ? 0.0 : coefficients.dot(edge_basis(degree, t));
}

} // namespace hdg
