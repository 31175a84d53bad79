#pragma once

// Local RT_{k+1} flux correction.  On each element the correction sigma~ in RT_{k+1}(T) has
//   (sigma~, q)_T = 0                                   q in [P_k(T)]^2
//   <sigma~ . n, mu>_F = <alpha (P u_h - lambda_h), mu>_F   mu in P_{k+1}(F), each edge F,
// and sigma* = sigma_h - sigma~ is H(div)-conforming with div sigma* = P^{k+1} div sigma.

#include "hdg_solver.hpp"
#include "mesh.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "raviart_thomas.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace hdg {

struct PostprocessedFlux
{
    int k = 0;
    /// Raw RT_{k+1} coefficients, one column per element.
    Eigen::MatrixXd coefficients;

    int rt_degree() const { return k + 1; }
};

/// Penalty flux alpha_T (P_T u_h - lambda_h) on local edge le of e, as P_k(F) coefficients.
inline Eigen::VectorXd penalty_flux(const Mesh& mesh, int e, int le, const HDGSolution& sol)
{
    const ElementFace& ef = mesh.element_face(e, le);
    const Eigen::MatrixXd p = trace_matrix(sol.k + 1, sol.k, le, ef.sign);
    const double alpha = 1.0 / mesh.diameter(e);
    return alpha * (p * sol.potential.coefficients.col(e) - sol.trace.coefficients.col(ef.face));
}

/// DOF vector of the correction: mean-normalised edge moments, zero interior moments.
inline Eigen::VectorXd correction_dofs(const Mesh& mesh, int e, const HDGSolution& sol)
{
    const int m = sol.k + 1;
    const int ne = edge_dim(m);
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(rt_dim(m));
    for (int le = 0; le < 3; ++le)
        dofs.segment(le * ne, sol.k + 1) = penalty_flux(mesh, e, le, sol);
    return dofs;
}

/// sigma~ on element e in raw RT_{k+1} coefficients.
inline Eigen::VectorXd local_correction(const Mesh& mesh, int e, const HDGSolution& sol)
{
    const RTBasis basis = rt_basis(sol.k, mesh, e);
    if (!(basis.reciprocal_condition() > 1e-14))
        throw NumericalError("local_correction: singular RT DOF matrix on element " + std::to_string(e));
    return basis.coefficients_from_dofs(correction_dofs(mesh, e, sol));
}

/// RT_{k+1} DOF values of sigma_h on element e; since [P_k]^2 is inside RT_{k+1} these
/// determine sigma_h exactly.
inline Eigen::VectorXd flux_dofs(const RTBasis& basis, int e, const HDGSolution& sol)
{
    const ElementGeometry& geom = basis.geometry();
    return basis.dofs([&](const Point& x) { return sol.flux_at(e, geom.to_reference(x)); });
}

inline PostprocessedFlux postprocess_flux(const Mesh& mesh, const HDGSolution& sol)
{
    PostprocessedFlux out;
    out.k = sol.k;
    out.coefficients.resize(rt_dim(sol.k + 1), mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const RTBasis basis = rt_basis(sol.k, mesh, e);
        if (!(basis.reciprocal_condition() > 1e-14))
            throw NumericalError("postprocess_flux: singular RT DOF matrix on element " + std::to_string(e));
        out.coefficients.col(e) =
            basis.coefficients_from_dofs(flux_dofs(basis, e, sol) - correction_dofs(mesh, e, sol));
    }
    return out;
}

/// Largest |sigma*_L . n_L + sigma*_R . n_R| over interior-face quadrature points,
/// divided by (1 + largest |sigma* . n| seen).
inline double max_normal_jump(const Mesh& mesh, const PostprocessedFlux& flux)
{
    const auto& rule = quad_edge(2 * flux.rt_degree() + 2);
    double jump = 0.0, scale = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceNeighbors& nb = mesh.face_neighbors(f);
        if (nb.is_boundary())
            continue;
        const RTBasis left(flux.rt_degree(), mesh, nb.left);
        const RTBasis right(flux.rt_degree(), mesh, nb.right);
        const Vec2& nl = left.geometry().normals[nb.left_edge];
        const Vec2& nr = right.geometry().normals[nb.right_edge];
        const Point a = mesh.vertex(mesh.face(f)[0]);
        const Point b = mesh.vertex(mesh.face(f)[1]);
        for (double t : rule.points) {
            const Point x = a + t * (b - a);
            const double sl = left.eval(flux.coefficients.col(nb.left), x).dot(nl);
            const double sr = right.eval(flux.coefficients.col(nb.right), x).dot(nr);
            jump = std::max(jump, std::abs(sl + sr));
            scale = std::max({scale, std::abs(sl), std::abs(sr)});
        }
    }
    return jump / (1.0 + scale);
}

/// max over T and q in P_{k+1}(T) of |(div sigma* + f, q)_T|, relative to max |(f, q)_T|.
/// (f, q)_T is integrated with the rule the load vector was assembled with (default), so
/// the identity holds to rounding error.
inline double max_divergence_residual(const Mesh& mesh, const PostprocessedFlux& flux, const ScalarFunction& f,
                                      int exactness = -1)
{
    const int m = flux.rt_degree();
    const auto& basis = triangle_basis(m);
    const auto& rule = quad_triangle(exactness < 0 ? HDGConfig{flux.k}.volume_exactness() : exactness);
    double residual = 0.0, scale = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const RTBasis rt(m, mesh, e);
        const ElementGeometry& geom = rt.geometry();
        Eigen::VectorXd r = Eigen::VectorXd::Zero(basis.dim());
        Eigen::VectorXd s = Eigen::VectorXd::Zero(basis.dim());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& ref = rule.points[q];
            const Point x = geom.to_physical(ref);
            const double w = 2.0 * geom.area * rule.weights[q];
            const Eigen::VectorXd phi = basis.values(ref);
            const double fx = f(x);
            r += w * (rt.eval_divergence(flux.coefficients.col(e), x) + fx) * phi;
            s += w * fx * phi;
        }
        residual = std::max(residual, r.cwiseAbs().maxCoeff());
        scale = std::max(scale, s.cwiseAbs().maxCoeff());
    }
    return scale > 0.0 ? residual / scale : residual;
}

} // namespace hdg
