#pragma once

// RT_m(T) = { p + q x : p in [P_m]^2, q in P_m } on a physical triangle.
//
// The raw basis uses scaled coordinates s = (x - centroid) / h_T:
//   (s^a t^b, 0), (0, s^a t^b)   for a + b <= m
//   s * h(s)                     for homogeneous h of degree m.
// Degrees of freedom, mean-normalised so that similar triangles share one DOF matrix:
//   edge:     (1/|F|) <tau . n, psi_j>_F,  psi_j in P_m(F), canonical parameter
//   interior: (1/|T|) (tau, q e_x)_T and (1/|T|) (tau, q e_y)_T,  q in P_{m-1}(T)

#include "basis.hpp"
#include "mesh.hpp"
#include "projection.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdg {

constexpr int rt_dim(int degree) { return (degree + 1) * (degree + 3); }

using VectorValues = Eigen::Matrix<double, 2, Eigen::Dynamic>;

class RTBasis
{
public:
    RTBasis(int degree, const Mesh& mesh, int e) : degree_(degree), geom_(element_geometry(mesh, e))
    {
        if (degree < 1 || degree > kMaxBasisDegree)
            throw std::invalid_argument("RTBasis: unsupported degree " + std::to_string(degree));
        for (int d = 0; d <= degree; ++d)
            for (int b = 0; b <= d; ++b)
                exponents_.emplace_back(d - b, b);
        for (int le = 0; le < 3; ++le)
            signs_[le] = mesh.element_face(e, le).sign;

        const int n = dim();
        dof_matrix_.resize(n, n);
        const auto& edge_rule = quad_edge(2 * degree + 2);
        const auto& tri_rule = quad_triangle(2 * degree + 2);
        for (int col = 0; col < n; ++col) {
            dof_matrix_.col(col) = dofs([&, col](const Point& x) -> Vec2 { return values(x).col(col); },
                                        edge_rule, tri_rule);
        }
        lu_.compute(dof_matrix_);
    }

    int degree() const { return degree_; }
    int dim() const { return rt_dim(degree_); }
    int num_edge_dofs() const { return 3 * edge_dim(degree_); }
    int num_interior_dofs() const { return 2 * triangle_dim(degree_ - 1); }
    const ElementGeometry& geometry() const { return geom_; }

    /// Raw basis values at a physical point, one column per function.
    VectorValues values(const Point& x) const
    {
        const Vec2 s = (x - geom_.centroid) / geom_.diameter;
        const int nm = static_cast<int>(exponents_.size());
        VectorValues v = VectorValues::Zero(2, dim());
        for (int i = 0; i < nm; ++i) {
            const double mono = ipow(s.x(), exponents_[i].first) * ipow(s.y(), exponents_[i].second);
            v(0, i) = mono;
            v(1, nm + i) = mono;
        }
        int col = 2 * nm;
        for (int b = 0; b <= degree_; ++b, ++col) {
            const double h = ipow(s.x(), degree_ - b) * ipow(s.y(), b);
            v(0, col) = s.x() * h;
            v(1, col) = s.y() * h;
        }
        return v;
    }

    /// Divergence of every raw basis function at a physical point.
    Eigen::VectorXd divergence(const Point& x) const
    {
        const Vec2 s = (x - geom_.centroid) / geom_.diameter;
        const double inv_h = 1.0 / geom_.diameter;
        const int nm = static_cast<int>(exponents_.size());
        Eigen::VectorXd d = Eigen::VectorXd::Zero(dim());
        for (int i = 0; i < nm; ++i) {
            const auto [a, b] = exponents_[i];
            d(i) = a == 0 ? 0.0 : a * ipow(s.x(), a - 1) * ipow(s.y(), b) * inv_h;
            d(nm + i) = b == 0 ? 0.0 : b * ipow(s.x(), a) * ipow(s.y(), b - 1) * inv_h;
        }
        int col = 2 * nm;
        for (int b = 0; b <= degree_; ++b, ++col)
            d(col) = (degree_ + 2) * ipow(s.x(), degree_ - b) * ipow(s.y(), b) * inv_h;
        return d;
    }

    Vec2 eval(const Eigen::VectorXd& coefficients, const Point& x) const { return values(x) * coefficients; }
    double eval_divergence(const Eigen::VectorXd& coefficients, const Point& x) const
    {
        return divergence(x).dot(coefficients);
    }

    /// DOF functionals applied to the raw basis; row = functional, column = basis function.
    const Eigen::MatrixXd& dof_matrix() const { return dof_matrix_; }

    /// DOF functionals of an arbitrary vector field (exact for polynomial fields of degree <= m+2).
    template <class Field>
    Eigen::VectorXd dofs(const Field& tau) const
    {
        return dofs(tau, quad_edge(2 * degree_ + 2), quad_triangle(2 * degree_ + 2));
    }

    /// Unique member of RT_m with the given DOF values.
    Eigen::VectorXd coefficients_from_dofs(const Eigen::VectorXd& dof_values) const
    {
        return lu_.solve(dof_values);
    }

    double reciprocal_condition() const { return lu_.rcond(); }

private:
    static double ipow(double x, int p)
    {
        double r = 1.0;
        for (int i = 0; i < p; ++i)
            r *= x;
        return r;
    }

    template <class Field>
    Eigen::VectorXd dofs(const Field& tau, const EdgeRule& edge_rule, const TriangleRule& tri_rule) const
    {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
        const int ne = edge_dim(degree_);
        for (int le = 0; le < 3; ++le) {
            const Vec2& n = geom_.normals[le];
            for (std::size_t q = 0; q < edge_rule.size(); ++q) {
                const double t = edge_rule.points[q];
                const Point x = geom_.to_physical(edge_reference_point(le, signs_[le], t));
                out.segment(le * ne, ne) += (edge_rule.weights[q] * tau(x).dot(n)) * edge_basis(degree_, t);
            }
        }
        const auto& inner = triangle_basis(degree_ - 1);
        const int ni = inner.dim();
        for (std::size_t q = 0; q < tri_rule.size(); ++q) {
            const Vec2& ref = tri_rule.points[q];
            const Vec2 v = tau(geom_.to_physical(ref));
            const Eigen::VectorXd phi = inner.values(ref);
            out.segment(3 * ne, ni) += (2.0 * tri_rule.weights[q] * v.x()) * phi;
            out.segment(3 * ne + ni, ni) += (2.0 * tri_rule.weights[q] * v.y()) * phi;
        }
        return out;
    }

    int degree_;
    ElementGeometry geom_;
    std::array<int, 3> signs_{};
    std::vector<std::pair<int, int>> exponents_;
    Eigen::MatrixXd dof_matrix_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// RT_{k+1}(T) for the HDG degree k.
inline RTBasis rt_basis(int k, const Mesh& mesh, int e) { return RTBasis(k + 1, mesh, e); }

} // namespace hdg
