#pragma once

// Error quantities and norms: L2 errors of the discrete fields, the projected error triple
// (e_u, e_lambda, e_sigma), the triple seminorm and the broken H1 seminorm.

#include "basis.hpp"
#include "hdg_solver.hpp"
#include "mesh.hpp"
#include "postprocess.hpp"
#include "problem.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "raviart_thomas.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace hdg {

/// Exactness of the rule used for reported errors.
inline int error_exactness(int k) { return std::min(2 * (k + 2) + 6, kMaxQuadratureExactness); }

// ---------------------------------------------------------------------------------------
// L2 errors against closed-form data

inline double l2_error(const Mesh& mesh, const ElementField& uh, const ScalarFunction& u, int exactness)
{
    const auto& rule = quad_triangle(exactness);
    const auto& basis = triangle_basis(uh.degree);
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry geom = element_geometry(mesh, e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& ref = rule.points[q];
            const double d = u(geom.to_physical(ref)) - uh.coefficients.col(e).dot(basis.values(ref));
            sum += 2.0 * geom.area * rule.weights[q] * d * d;
        }
    }
    return std::sqrt(sum);
}

inline double l2_error(const Mesh& mesh, const std::array<ElementField, 2>& sh, const VectorFunction& sigma,
                       int exactness)
{
    const auto& rule = quad_triangle(exactness);
    const auto& basis = triangle_basis(sh[0].degree);
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry geom = element_geometry(mesh, e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& ref = rule.points[q];
            const Eigen::VectorXd phi = basis.values(ref);
            const Vec2 d = sigma(geom.to_physical(ref)) -
                           Vec2(sh[0].coefficients.col(e).dot(phi), sh[1].coefficients.col(e).dot(phi));
            sum += 2.0 * geom.area * rule.weights[q] * d.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

/// ||sigma - sigma*|| for the RT representation.
inline double l2_error(const Mesh& mesh, const PostprocessedFlux& flux, const VectorFunction& sigma, int exactness)
{
    const auto& rule = quad_triangle(exactness);
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const RTBasis rt(flux.rt_degree(), mesh, e);
        const ElementGeometry& geom = rt.geometry();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = geom.to_physical(rule.points[q]);
            const Vec2 d = sigma(x) - rt.eval(flux.coefficients.col(e), x);
            sum += 2.0 * geom.area * rule.weights[q] * d.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

/// ||div sigma - div sigma*|| with div sigma = -f.
inline double divergence_error(const Mesh& mesh, const PostprocessedFlux& flux, const ScalarFunction& f,
                               int exactness)
{
    const auto& rule = quad_triangle(exactness);
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const RTBasis rt(flux.rt_degree(), mesh, e);
        const ElementGeometry& geom = rt.geometry();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = geom.to_physical(rule.points[q]);
            const double d = f(x) + rt.eval_divergence(flux.coefficients.col(e), x);
            sum += 2.0 * geom.area * rule.weights[q] * d * d;
        }
    }
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------------------
// Error triple and seminorms

struct ErrorTriple
{
    int k = 0;
    ElementField e_u;                   // u_h - P^{k+1} u
    SkeletonField e_lambda;             // lambda_h - P_M u
    std::array<ElementField, 2> e_sigma; // sigma_h - P^k sigma
};

inline ErrorTriple error_triple(const Mesh& mesh, const HDGSolution& sol, const ManufacturedProblem& problem)
{
    const int k = sol.k;
    ErrorTriple err;
    err.k = k;
    err.e_u = sol.potential;
    err.e_u.coefficients -= l2_project(mesh, problem.u, k + 1).coefficients;
    err.e_lambda = sol.trace;
    err.e_lambda.coefficients -= l2_project_skeleton(mesh, problem.u, k).coefficients;
    const ScalarFunction sx = [&](const Point& x) { return problem.sigma(x).x(); };
    const ScalarFunction sy = [&](const Point& x) { return problem.sigma(x).y(); };
    err.e_sigma = sol.flux;
    err.e_sigma[0].coefficients -= l2_project(mesh, sx, k).coefficients;
    err.e_sigma[1].coefficients -= l2_project(mesh, sy, k).coefficients;
    return err;
}

/// (||e_sigma||_c^2 + sum_T alpha_T ||P_T e_u - e_lambda||_{dT}^2)^{1/2}
inline double triple_norm(const ErrorTriple& err, const Mesh& mesh, const ProblemData& problem)
{
    const int k = err.k;
    const auto& basis = triangle_basis(k);
    const auto& rule = quad_triangle(std::min(2 * k + 8, kMaxQuadratureExactness));
    double flux_part = 0.0, jump_part = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry geom = element_geometry(mesh, e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& ref = rule.points[q];
            const Point x = geom.to_physical(ref);
            const Eigen::VectorXd phi = basis.values(ref);
            const Vec2 s(err.e_sigma[0].coefficients.col(e).dot(phi), err.e_sigma[1].coefficients.col(e).dot(phi));
            flux_part += 2.0 * geom.area * rule.weights[q] * s.dot(problem.c(x) * s);
        }
        const double alpha = 1.0 / geom.diameter;
        for (int le = 0; le < 3; ++le) {
            const ElementFace& ef = mesh.element_face(e, le);
            const Eigen::VectorXd d = trace_matrix(k + 1, k, le, ef.sign) * err.e_u.coefficients.col(e) -
                                      err.e_lambda.coefficients.col(ef.face);
            jump_part += alpha * geom.edge_lengths[le] * d.squaredNorm();
        }
    }
    return std::sqrt(flux_part + jump_part);
}

/// (sum_T |w|_{1,T}^2)^{1/2}
inline double broken_h1_seminorm(const ElementField& w, const Mesh& mesh)
{
    const auto& basis = triangle_basis(w.degree);
    const auto& rule = quad_triangle(std::max(2 * w.degree - 2, 0));
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry geom = element_geometry(mesh, e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 g = physical_gradients(basis, geom, rule.points[q]).transpose() * w.coefficients.col(e);
            sum += 2.0 * geom.area * rule.weights[q] * g.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

/// Plain L2 norm of a piecewise polynomial (orthonormal basis: area * |c|^2 per element).
inline double l2_norm(const ElementField& w, const Mesh& mesh)
{
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e)
        sum += 0.5 * std::abs(mesh.signed_area(e)) * 2.0 * w.coefficients.col(e).squaredNorm();
    return std::sqrt(sum);
}

} // namespace hdg
