#pragma once

// Reference solver that never condenses: all (sigma, u, lambda) unknowns are assembled
// into one indefinite sparse system and solved by sparse LU.  Meant for small meshes,
// as an independent check of static condensation.

#include "hdg_solver.hpp"
#include "local_system.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <vector>

namespace hdg {

inline HDGSolution solve_monolithic(const Mesh& mesh, const HDGConfig& config, const ProblemData& problem)
{
    config.validate();
    const int k = config.k;
    const int ns = config.flux_dofs(), nu = config.potential_dofs(), nf = config.face_dofs();
    const int ne = mesh.num_elements();
    const SkeletonField boundary = apply_dirichlet(mesh, problem.g, k);
    const std::vector<int> face_dof = interior_face_numbering(mesh, nf);

    const int sigma0 = 0;
    const int u0 = ne * ns;
    const int lambda0 = u0 + ne * nu;
    const int n = lambda0 + mesh.num_interior_faces() * nf;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    auto add_block = [&trip](int r0, int c0, const Eigen::MatrixXd& m, double s) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                if (m(i, j) != 0.0)
                    trip.emplace_back(r0 + i, c0 + j, s * m(i, j));
    };

    for (int e = 0; e < ne; ++e) {
        const LocalSystem ls = assemble_local(mesh, e, config, problem);
        const int rs = sigma0 + e * ns, ru = u0 + e * nu;
        add_block(rs, rs, ls.A, 1.0);
        add_block(rs, ru, ls.B, 1.0);
        add_block(ru, rs, ls.B.transpose(), -1.0);
        add_block(ru, ru, ls.E, 1.0);
        rhs.segment(ru, nu) += ls.F;
        for (int a = 0; a < 3; ++a) {
            const int fa = mesh.element_face(e, a).face;
            const Eigen::MatrixXd ca = ls.C.middleCols(a * nf, nf);
            const Eigen::MatrixXd ga = ls.G.middleCols(a * nf, nf);
            if (face_dof[fa] < 0) {
                const Eigen::VectorXd lb = boundary.coefficients.col(fa);
                rhs.segment(rs, ns) += ca * lb;
                rhs.segment(ru, nu) += ga * lb;
                continue;
            }
            const int rl = lambda0 + face_dof[fa];
            add_block(rs, rl, ca, -1.0);
            add_block(ru, rl, ga, -1.0);
            add_block(rl, rs, ca.transpose(), 1.0);
            add_block(rl, ru, ga.transpose(), -1.0);
            // H is block diagonal: only the a == a block couples interior rows
            add_block(rl, rl, ls.H.block(a * nf, a * nf, nf, nf), 1.0);
        }
    }

    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
        throw NumericalError("solve_monolithic: sparse LU failed");
    const Eigen::VectorXd x = lu.solve(rhs);

    HDGSolution sol;
    sol.k = k;
    sol.trace = boundary;
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (face_dof[f] >= 0)
            sol.trace.coefficients.col(f) = x.segment(lambda0 + face_dof[f], nf);
    sol.potential = ElementField(k + 1, ne);
    sol.flux = {ElementField(k, ne), ElementField(k, ne)};
    const int nk = ns / 2;
    for (int e = 0; e < ne; ++e) {
        sol.flux[0].coefficients.col(e) = x.segment(sigma0 + e * ns, nk);
        sol.flux[1].coefficients.col(e) = x.segment(sigma0 + e * ns + nk, nk);
        sol.potential.coefficients.col(e) = x.segment(u0 + e * nu, nu);
    }
    return sol;
}

} // namespace hdg
