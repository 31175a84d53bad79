#pragma once

// Invariant suite behind `hdg check`: mesh topology, quadrature, bases, RT unisolvence,
// condensation, exactness on linear data, flux postprocessing and the interpolation
// moment identities.  Every check returns a measured value and its threshold.

#include "basis.hpp"
#include "convergence.hpp"
#include "error_norms.hpp"
#include "hdg_solver.hpp"
#include "interpolation.hpp"
#include "mesh.hpp"
#include "monolithic.hpp"
#include "postprocess.hpp"
#include "problem.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "raviart_thomas.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace hdg {

struct CheckResult
{
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Largest deviation of a mesh from its structural invariants (0 when all hold):
/// Euler relation, positive areas, face incidence counts, opposite normals on interior faces.
inline double mesh_invariant_defect(const Mesh& mesh)
{
    double defect = std::abs(mesh.num_vertices() - mesh.num_faces() + mesh.num_elements() - 1.0);
    for (int e = 0; e < mesh.num_elements(); ++e)
        if (!(mesh.signed_area(e) > 0.0))
            defect = std::max(defect, 1.0);
    std::vector<int> incidence(mesh.num_faces(), 0);
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int le = 0; le < 3; ++le)
            ++incidence[mesh.element_face(e, le).face];
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const int expected = mesh.is_boundary_face(f) ? 1 : 2;
        defect = std::max(defect, std::abs(static_cast<double>(incidence[f] - expected)));
        if (mesh.is_boundary_face(f))
            continue;
        const FaceNeighbors& nb = mesh.face_neighbors(f);
        const Vec2 nl = element_geometry(mesh, nb.left).normals[nb.left_edge];
        const Vec2 nr = element_geometry(mesh, nb.right).normals[nb.right_edge];
        defect = std::max(defect, (nl + nr).norm());
    }
    return defect;
}

/// Largest relative error of the triangle rule on monomials x^a y^b with a + b <= exactness.
inline double triangle_rule_defect(int exactness)
{
    const auto& rule = quad_triangle(exactness);
    double defect = 0.0;
    for (int a = 0; a <= exactness; ++a) {
        for (int b = 0; a + b <= exactness; ++b) {
            // int_T x^a y^b = a! b! / (a + b + 2)!
            const double exact = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
            double sum = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q)
                sum += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
            defect = std::max(defect, std::abs(sum - exact) / exact);
        }
    }
    for (double w : rule.weights)
        if (!(w > 0.0))
            defect = std::max(defect, 1.0);
    return defect;
}

/// max |G - I| for the mean-normalised Gram matrix of the triangle basis.
inline double basis_orthonormality_defect(int degree)
{
    const auto& basis = triangle_basis(degree);
    const auto& rule = quad_triangle(2 * degree);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd v = basis.values(rule.points[q]);
        gram.noalias() += 2.0 * rule.weights[q] * v * v.transpose();
    }
    return (gram - Eigen::MatrixXd::Identity(basis.dim(), basis.dim())).cwiseAbs().maxCoeff();
}

/// Largest moment defect of Pi_h(v, mu), measured by quadrature, relative to the input size:
///   (Pi_h(v,mu) - v, q)_T for q in P_k(T),   <Pi_h(v,mu) - mu, q>_F for q in P_k(F), F in F_T.
inline double pi_h_moment_defect(const ElementField& v, const SkeletonField& mu, int k, const Mesh& mesh)
{
    const ElementField pi = pi_h(v, mu, k, mesh);
    const auto& qk = triangle_basis(k);
    const auto& tri_rule = quad_triangle(std::min(pi.degree + std::max(v.degree, k), kMaxQuadratureExactness));
    const auto& edge_rule = quad_edge(std::min(pi.degree + std::max(mu.degree, k), kMaxQuadratureExactness));
    double defect = 0.0;
    const double scale = 1.0 + std::max(v.coefficients.cwiseAbs().maxCoeff(), mu.coefficients.cwiseAbs().maxCoeff());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(qk.dim());
        for (std::size_t q = 0; q < tri_rule.size(); ++q) {
            const Vec2& ref = tri_rule.points[q];
            r += tri_rule.weights[q] * (pi.eval_reference(e, ref) - v.eval_reference(e, ref)) * qk.values(ref);
        }
        defect = std::max(defect, 2.0 * r.cwiseAbs().maxCoeff());
        for (int le = 0; le < 3; ++le) {
            const ElementFace& ef = mesh.element_face(e, le);
            Eigen::VectorXd s = Eigen::VectorXd::Zero(edge_dim(k));
            for (std::size_t q = 0; q < edge_rule.size(); ++q) {
                const double t = edge_rule.points[q];
                const double d = pi.eval_reference(e, edge_reference_point(le, ef.sign, t)) - mu.eval(ef.face, t);
                s += edge_rule.weights[q] * d * edge_basis(k, t);
            }
            defect = std::max(defect, s.cwiseAbs().maxCoeff());
        }
    }
    return defect / scale;
}

/// Random fields with entries uniform in [-1, 1].
inline ElementField random_element_field(int degree, int num_elements, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ElementField f(degree, num_elements);
    for (Eigen::Index i = 0; i < f.coefficients.size(); ++i)
        f.coefficients.data()[i] = dist(rng);
    return f;
}

inline SkeletonField random_skeleton_field(int degree, int num_faces, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SkeletonField f(degree, num_faces);
    for (Eigen::Index i = 0; i < f.coefficients.size(); ++i)
        f.coefficients.data()[i] = dist(rng);
    return f;
}

/// Largest coefficient difference between the condensed and monolithic solutions.
inline double monolithic_difference(const Mesh& mesh, int k, const ProblemData& problem)
{
    const HDGSolution a = solve_hdg(mesh, HDGConfig{k}, problem);
    const HDGSolution b = solve_monolithic(mesh, HDGConfig{k}, problem);
    double d = (a.trace.coefficients - b.trace.coefficients).cwiseAbs().maxCoeff();
    d = std::max(d, (a.potential.coefficients - b.potential.coefficients).cwiseAbs().maxCoeff());
    for (int c = 0; c < 2; ++c)
        d = std::max(d, (a.flux[c].coefficients - b.flux[c].coefficients).cwiseAbs().maxCoeff());
    return d;
}

/// Run the invariant suite for degree k.  Cheap enough for a command-line check (seconds).
inline std::vector<CheckResult> run_invariant_checks(int k, unsigned seed = 20240601)
{
    HDGConfig{k}.validate();
    std::vector<CheckResult> out;
    auto record = [&out](const std::string& name, const std::function<double()>& measure, double threshold) {
        CheckResult r;
        r.name = name;
        r.threshold = threshold;
        try {
            r.value = measure();
            r.passed = r.value <= threshold;
        } catch (const std::exception& ex) {
            r.value = INFINITY;
            r.detail = ex.what();
        }
        out.push_back(r);
    };

    const std::vector<Mesh> meshes{build_structured_mesh(1), build_structured_mesh(2),
                                   refine_uniform(build_structured_mesh(2)), build_crisscross_mesh(2)};
    const ManufacturedProblem sine = sine_problem();
    const ManufacturedProblem linear = linear_problem();

    record("mesh invariants (Euler, areas, incidence, normals)", [&] {
        double d = 0.0;
        for (const auto& m : meshes)
            d = std::max(d, mesh_invariant_defect(m));
        return d;
    }, 1e-14);

    record("quadrature exactness and positive weights", [&] {
        double d = 0.0;
        for (int ex : {HDGConfig{k}.volume_exactness(), error_exactness(k)})
            d = std::max(d, triangle_rule_defect(ex));
        return d;
    }, 1e-12);

    record("triangle basis orthonormality", [&] { return basis_orthonormality_defect(enriched_degree(k)); }, 1e-12);

    record("RT DOF matrix unisolvence (1/rcond)", [&] {
        double worst = 0.0;
        const Mesh m = build_structured_mesh(4);
        for (int e = 0; e < m.num_elements(); ++e)
            worst = std::max(worst, 1.0 / rt_basis(k, m, e).reciprocal_condition());
        return worst;
    }, 1e12);

    record("Gamma(T) and bubble moment matrices nonsingular (1/rcond)", [&] {
        double worst = 1.0 / Eigen::PartialPivLU<Eigen::MatrixXd>(bubble_moment_matrix(k)).rcond();
        for (const auto& m : meshes)
            for (int e = 0; e < m.num_elements(); ++e) {
                const Eigen::PartialPivLU<Eigen::MatrixXd> lu(gamma_face_moment_matrix(k, face_signs(m, e)));
                worst = std::max(worst, 1.0 / lu.rcond());
            }
        return worst;
    }, 1e12);

    record("local condensation round trip (relative residual)", [&] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const Mesh& m = meshes[1];
        double worst = 0.0;
        for (int e = 0; e < m.num_elements(); ++e) {
            const LocalSystem ls = assemble_local(m, e, HDGConfig{k}, sine);
            const CondensedLocal cl = condense(ls, e);
            Eigen::VectorXd lambda(ls.trace_dofs());
            for (auto& x : lambda)
                x = dist(rng);
            const LocalFields lf = recover_local(cl, lambda);
            Eigen::VectorXd x(ls.flux_dofs() + ls.potential_dofs() + ls.trace_dofs());
            x << lf.flux, lf.potential, lambda;
            const Eigen::VectorXd r = ls.full() * x;
            const int ni = ls.flux_dofs() + ls.potential_dofs();
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
            rhs.tail(ls.potential_dofs()) = ls.F;
            worst = std::max(worst, (r.head(ni) - rhs).norm() / (1.0 + rhs.norm() + x.norm()));
        }
        return worst;
    }, 1e-11);

    record("condensed matrix symmetry (relative)", [&] {
        double d = 0.0;
        for (const auto& m : meshes)
            d = std::max(d, symmetry_defect(discretize(m, HDGConfig{k}, sine).system.matrix));
        return d;
    }, 1e-12);

    record("condensed matrix Cholesky factorisation", [&] {
        for (const auto& m : meshes) {
            const auto sys = discretize(m, HDGConfig{k}, sine).system;
            if (sys.num_dofs() == 0)
                continue;
            Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.matrix);
            if (llt.info() != Eigen::Success)
                return 1.0;
        }
        return 0.0;
    }, 0.0);

    record("condensed solve relative residual", [&] {
        double d = 0.0;
        for (const auto& m : meshes) {
            const auto sys = discretize(m, HDGConfig{k}, sine).system;
            d = std::max(d, relative_residual(sys, solve_condensed(sys)));
        }
        return d;
    }, 1e-12);

    record("condensed vs monolithic solution (max coefficient difference)", [&] {
        double d = 0.0;
        for (const auto& m : meshes)
            if (m.num_elements() <= 32)
                d = std::max(d, monolithic_difference(m, k, sine));
        return d;
    }, 1e-10);

    record("exactness on u = x + y (L2 errors of u, sigma, sigma*)", [&] {
        double d = 0.0;
        for (const auto& m : meshes) {
            const HDGSolution sol = solve_hdg(m, HDGConfig{k}, linear);
            const PostprocessedFlux flux = postprocess_flux(m, sol);
            const ConvergenceRow row = compute_errors(sol, flux, linear, m, k);
            d = std::max({d, row.err_u, row.err_sigma, row.err_sigma_star});
        }
        return d;
    }, 1e-11);

    record("sigma* normal jump across interior faces (relative)", [&] {
        double d = 0.0;
        for (const auto& m : meshes)
            d = std::max(d, max_normal_jump(m, postprocess_flux(m, solve_hdg(m, HDGConfig{k}, sine))));
        return d;
    }, 1e-9);

    record("weak divergence residual (div sigma* + f, q), q in P_{k+1} (relative)", [&] {
        double d = 0.0;
        for (const auto& m : meshes)
            d = std::max(d, max_divergence_residual(m, postprocess_flux(m, solve_hdg(m, HDGConfig{k}, sine)),
                                                    sine.f));
        return d;
    }, 1e-10);

    if (k <= kMaxEnrichedK) {
        record("Pi_h element and face moment identities (random inputs)", [&] {
            std::mt19937_64 rng(seed + 1);
            double d = 0.0;
            for (int i = 0; i < 5; ++i)
                for (int mi : {1, 2}) {
                    const Mesh& m = meshes[mi];
                    const ElementField v = random_element_field(k + 1, m.num_elements(), rng);
                    const SkeletonField mu = random_skeleton_field(k + 1, m.num_faces(), rng);
                    d = std::max(d, pi_h_moment_defect(v, mu, k, m));
                }
            return d;
        }, 1e-12);

        record("Pi0 boundary nodal values exactly zero", [&] {
            std::mt19937_64 rng(seed + 2);
            const Mesh& m = meshes[2];
            const ConformingP1Field p = pi0(random_skeleton_field(k, m.num_faces(), rng), m);
            double d = 0.0;
            for (int v = 0; v < m.num_vertices(); ++v)
                if (m.is_boundary_vertex(v))
                    d = std::max(d, std::abs(p.nodal_values[v]));
            return d;
        }, 0.0);
    }
    return out;
}

inline bool all_passed(const std::vector<CheckResult>& results)
{
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

} // namespace hdg
