#pragma once

// Piecewise polynomial fields and L2 projections onto them.

#include "basis.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <functional>

namespace hdg {

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Vec2(const Point&)>;
using MatrixFunction = std::function<Mat2(const Point&)>;

/// Reference coordinates of the point with canonical face parameter t on local edge
/// `local_edge` of an element that traverses the face with orientation `sign`.
inline Vec2 edge_reference_point(int local_edge, int sign, double t)
{
    static const std::array<Vec2, 3> corners{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    const Vec2& p = corners[(local_edge + 1) % 3];
    const Vec2& q = corners[(local_edge + 2) % 3];
    const double s = sign > 0 ? t : 1.0 - t;
    return p + s * (q - p);
}

/// Default exactness for projecting non-polynomial data onto P_m.
inline int projection_exactness(int degree)
{
    return std::min(2 * degree + 8, kMaxQuadratureExactness);
}

/// Element-wise polynomial of fixed degree; column e holds the coefficients on element e.
struct ElementField
{
    int degree = 0;
    Eigen::MatrixXd coefficients;

    ElementField() = default;
    ElementField(int degree_, int num_elements)
        : degree(degree_), coefficients(Eigen::MatrixXd::Zero(triangle_dim(degree_), num_elements))
    {}

    double eval_reference(int e, const Vec2& ref) const
    {
        return coefficients.col(e).dot(triangle_basis(degree).values(ref));
    }
    double eval(const Mesh& mesh, int e, const Point& x) const
    {
        return eval_reference(e, element_geometry(mesh, e).to_reference(x));
    }
};

/// Face-wise polynomial in the canonical parameter; column f holds face f.
struct SkeletonField
{
    int degree = 0;
    Eigen::MatrixXd coefficients;

    SkeletonField() = default;
    SkeletonField(int degree_, int num_faces)
        : degree(degree_), coefficients(Eigen::MatrixXd::Zero(edge_dim(degree_), num_faces))
    {}

    double eval(int f, double t) const { return eval_edge(coefficients.col(f), t); }
};

/// P_T^m f: coefficients with (f - P f, q)_T = 0 for q in P_m(T).
inline Eigen::VectorXd l2_project_element(const ScalarFunction& f, int degree, const ElementGeometry& geom,
                                          int exactness = -1)
{
    const auto& basis = triangle_basis(degree);
    const auto& rule = quad_triangle(exactness < 0 ? projection_exactness(degree) : exactness);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.dim());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& ref = rule.points[q];
        c.noalias() += (2.0 * rule.weights[q] * f(geom.to_physical(ref))) * basis.values(ref);
    }
    return c;
}

/// P_h^m f.
inline ElementField l2_project(const Mesh& mesh, const ScalarFunction& f, int degree, int exactness = -1)
{
    ElementField field(degree, mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e)
        field.coefficients.col(e) = l2_project_element(f, degree, element_geometry(mesh, e), exactness);
    return field;
}

/// L2(F) projection of f onto P_k(F) on face f, in the canonical parameter.
inline Eigen::VectorXd l2_project_face(const ScalarFunction& f, int degree, const Mesh& mesh, int face,
                                       int exactness = -1)
{
    const auto& rule = quad_edge(exactness < 0 ? projection_exactness(degree) : exactness);
    const Point a = mesh.vertex(mesh.face(face)[0]);
    const Point b = mesh.vertex(mesh.face(face)[1]);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(edge_dim(degree));
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q];
        c.noalias() += (rule.weights[q] * f(a + t * (b - a))) * edge_basis(degree, t);
    }
    return c;
}

/// P_T^boundary f: per local edge, the P_k(F) projection of f restricted to that edge.
inline std::array<Eigen::VectorXd, 3> trace_project(const ScalarFunction& f, int degree, const Mesh& mesh,
                                                    int e, int exactness = -1)
{
    std::array<Eigen::VectorXd, 3> out;
    for (int le = 0; le < 3; ++le)
        out[le] = l2_project_face(f, degree, mesh, mesh.element_face(e, le).face, exactness);
    return out;
}

/// P_M f for a function single-valued on the skeleton (all faces).
inline SkeletonField l2_project_skeleton(const Mesh& mesh, const ScalarFunction& f, int degree,
                                         int exactness = -1)
{
    SkeletonField field(degree, mesh.num_faces());
    for (int f_id = 0; f_id < mesh.num_faces(); ++f_id)
        field.coefficients.col(f_id) = l2_project_face(f, degree, mesh, f_id, exactness);
    return field;
}

/// Matrix mapping triangle-basis coefficients (degree m) to the canonical P_k
/// coefficients of their trace on one local edge: entry (j, a) = mean_F(phi_a psi_j).
/// Depends only on (m, k, local edge, orientation), not on the element shape.
inline Eigen::MatrixXd trace_matrix(int element_degree, int trace_degree, int local_edge, int sign)
{
    const auto& basis = triangle_basis(element_degree);
    const auto& rule = quad_edge(element_degree + trace_degree);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(edge_dim(trace_degree), basis.dim());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q];
        p.noalias() += rule.weights[q] * edge_basis(trace_degree, t) *
                       basis.values(edge_reference_point(local_edge, sign, t)).transpose();
    }
    return p;
}

/// Physical gradients of the triangle basis at a reference point, one row per function.
inline Eigen::MatrixXd physical_gradients(const TriangleBasis& basis, const ElementGeometry& geom,
                                          const Vec2& ref)
{
    return basis.gradients(ref) * geom.inverse_jacobian;
}

} // namespace hdg
