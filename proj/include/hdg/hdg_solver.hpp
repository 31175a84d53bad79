#pragma once

// Global HDG solve: condense every element onto its traces, assemble the SPD skeleton
// system over interior faces (boundary traces are lifted to the right-hand side), solve
// it with a sparse Cholesky factorisation and recover sigma, u element by element.

#include "local_system.hpp"
#include "mesh.hpp"
#include "problem.hpp"
#include "projection.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace hdg {

struct HDGSolution
{
    int k = 0;
    SkeletonField trace;             // P_k on every face; boundary faces hold M_h(g)
    ElementField potential;          // P_{k+1}
    std::array<ElementField, 2> flux; // P_k, x and y components

    Vec2 flux_at(int e, const Vec2& ref) const
    {
        const Eigen::VectorXd phi = triangle_basis(k).values(ref);
        return Vec2(flux[0].coefficients.col(e).dot(phi), flux[1].coefficients.col(e).dot(phi));
    }

    /// Stacked [x; y] flux coefficients of element e.
    Eigen::VectorXd local_flux(int e) const
    {
        const int n = triangle_dim(k);
        Eigen::VectorXd v(2 * n);
        v << flux[0].coefficients.col(e), flux[1].coefficients.col(e);
        return v;
    }

    /// Trace coefficients of the three local edges of e, stacked.
    Eigen::VectorXd local_trace(const Mesh& mesh, int e) const
    {
        const int nf = edge_dim(k);
        Eigen::VectorXd v(3 * nf);
        for (int le = 0; le < 3; ++le)
            v.segment(le * nf, nf) = trace.coefficients.col(mesh.element_face(e, le).face);
        return v;
    }
};

/// M_h(g): per boundary face, the L2(F) projection of g onto P_k(F).  Interior columns are zero.
inline SkeletonField apply_dirichlet(const Mesh& mesh, const ScalarFunction& g, int k)
{
    SkeletonField out(k, mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (mesh.is_boundary_face(f))
            out.coefficients.col(f) = l2_project_face(g, k, mesh, f);
    return out;
}

struct CondensedSystem
{
    int k = 0;
    int dofs_per_face = 1;
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    /// First global DOF of each face, or -1 for boundary faces.
    std::vector<int> face_dof;

    int num_dofs() const { return static_cast<int>(rhs.size()); }
};

/// Everything needed to go from skeleton unknowns back to element fields.
struct Discretization
{
    HDGConfig config;
    std::vector<CondensedLocal> locals;
    SkeletonField boundary_trace;
    CondensedSystem system;
};

inline std::vector<int> interior_face_numbering(const Mesh& mesh, int dofs_per_face)
{
    std::vector<int> face_dof(mesh.num_faces(), -1);
    int next = 0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!mesh.is_boundary_face(f)) {
            face_dof[f] = next;
            next += dofs_per_face;
        }
    }
    return face_dof;
}

inline Discretization discretize(const Mesh& mesh, const HDGConfig& config, const ProblemData& problem)
{
    config.validate();
    const int nf = config.face_dofs();

    Discretization d;
    d.config = config;
    d.boundary_trace = apply_dirichlet(mesh, problem.g, config.k);
    d.locals.reserve(mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e)
        d.locals.push_back(condense(assemble_local(mesh, e, config, problem), e));

    auto& sys = d.system;
    sys.k = config.k;
    sys.dofs_per_face = nf;
    sys.face_dof = interior_face_numbering(mesh, nf);
    const int n = mesh.num_interior_faces() * nf;
    sys.rhs = Eigen::VectorXd::Zero(n);

    // serial scatter in element order keeps the assembled matrix bitwise reproducible
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * 9 * nf * nf);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& loc = d.locals[e];
        for (int a = 0; a < 3; ++a) {
            const int fa = mesh.element_face(e, a).face;
            const int ga = sys.face_dof[fa];
            if (ga < 0)
                continue;
            sys.rhs.segment(ga, nf) += loc.load.segment(a * nf, nf);
            for (int b = 0; b < 3; ++b) {
                const int fb = mesh.element_face(e, b).face;
                const int gb = sys.face_dof[fb];
                const auto block = loc.schur.block(a * nf, b * nf, nf, nf);
                if (gb < 0) {
                    sys.rhs.segment(ga, nf) -= block * d.boundary_trace.coefficients.col(fb);
                    continue;
                }
                for (int i = 0; i < nf; ++i)
                    for (int j = 0; j < nf; ++j)
                        triplets.emplace_back(ga + i, gb + j, block(i, j));
            }
        }
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return d;
}

inline double relative_residual(const CondensedSystem& sys, const Eigen::VectorXd& x)
{
    const double b = sys.rhs.norm();
    const double r = (sys.matrix * x - sys.rhs).norm();
    return b > 0.0 ? r / b : r;
}

/// max |K - K^T| / max |K|
inline double symmetry_defect(const Eigen::SparseMatrix<double>& k)
{
    const Eigen::SparseMatrix<double> kt = k.transpose();
    const Eigen::SparseMatrix<double> diff = k - kt;
    double dmax = 0.0, kmax = 0.0;
    for (int c = 0; c < diff.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, c); it; ++it)
            dmax = std::max(dmax, std::abs(it.value()));
    for (int c = 0; c < k.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it)
            kmax = std::max(kmax, std::abs(it.value()));
    return kmax > 0.0 ? dmax / kmax : dmax;
}

/// Interior trace coefficients with relative residual <= 1e-12.
inline Eigen::VectorXd solve_condensed(const CondensedSystem& sys)
{
    const int n = sys.num_dofs();
    if (n == 0 || sys.rhs.norm() == 0.0)
        return Eigen::VectorXd::Zero(n);

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.matrix);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "solve_condensed: Cholesky factorisation failed (" << n << " dofs, min diagonal "
            << sys.matrix.diagonal().minCoeff() << ", symmetry defect " << symmetry_defect(sys.matrix)
            << "); the skeleton matrix is not positive definite";
        throw NumericalError(msg.str());
    }
    Eigen::VectorXd x = llt.solve(sys.rhs);
    for (int step = 0; step < 3 && relative_residual(sys, x) > 1e-13; ++step)
        x += llt.solve(sys.rhs - sys.matrix * x);
    if (!(relative_residual(sys, x) <= 1e-12))
        throw NumericalError("solve_condensed: relative residual " + std::to_string(relative_residual(sys, x)) +
                             " above 1e-12");
    return x;
}

/// Fill in the full trace (interior solution + boundary data) and recover element fields.
inline HDGSolution recover(const Mesh& mesh, const Discretization& d, const Eigen::VectorXd& interior_trace)
{
    const int k = d.config.k;
    const int nf = d.config.face_dofs();
    HDGSolution sol;
    sol.k = k;
    sol.trace = d.boundary_trace;
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (d.system.face_dof[f] >= 0)
            sol.trace.coefficients.col(f) = interior_trace.segment(d.system.face_dof[f], nf);

    sol.potential = ElementField(k + 1, mesh.num_elements());
    sol.flux = {ElementField(k, mesh.num_elements()), ElementField(k, mesh.num_elements())};
    const int nk = triangle_dim(k);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const LocalFields loc = recover_local(d.locals[e], sol.local_trace(mesh, e));
        sol.flux[0].coefficients.col(e) = loc.flux.head(nk);
        sol.flux[1].coefficients.col(e) = loc.flux.tail(nk);
        sol.potential.coefficients.col(e) = loc.potential;
    }
    return sol;
}

inline HDGSolution solve_hdg(const Mesh& mesh, const HDGConfig& config, const ProblemData& problem)
{
    const Discretization d = discretize(mesh, config, problem);
    return recover(mesh, d, solve_condensed(d.system));
}

} // namespace hdg
