#pragma once

// Element-level HDG blocks and their static condensation.
//
// Local unknowns on T: flux sigma in [P_k]^2 (x block then y block), potential u in
// P_{k+1}, trace lambda in P_k(F) on each local edge (edge 0, 1, 2, canonical parameter).
// With these, the element contribution to the scheme reads
//
//   [  A    B   -C ] [sigma ]   [0]
//   [ -B^T  E   -G ] [u     ] = [F]
//   [  C^T -G^T  H ] [lambda]   [.]   (third row summed over elements sharing a face)
//
//   A = (c tau, tau'),  B = (v, div tau),  C = <mu, tau.n>,
//   E = alpha <P u, P v>,  G = alpha <mu, v>,  H = alpha <mu, mu'>,  F = (f, v),
// where P is the L2 projection onto P_k of each edge and alpha = 1/h_T.

#include "basis.hpp"
#include "mesh.hpp"
#include "problem.hpp"
#include "projection.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hdg {

inline constexpr int kMaxHdgDegree = 3;

/// Raised when a local or global solve meets a singular or indefinite matrix.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct HDGConfig
{
    int k = 0;

    void validate() const
    {
        if (k < 0 || k > kMaxHdgDegree)
            throw std::invalid_argument("HDG degree k=" + std::to_string(k) + " outside supported range 0.." +
                                        std::to_string(kMaxHdgDegree));
    }

    int flux_dofs() const { return 2 * triangle_dim(k); }
    int potential_dofs() const { return triangle_dim(k + 1); }
    int face_dofs() const { return edge_dim(k); }
    int trace_dofs() const { return 3 * face_dofs(); }

    /// alpha_T = h_T^{-1}
    static double penalty(const ElementGeometry& geom) { return 1.0 / geom.diameter; }

    int volume_exactness() const { return 2 * (k + 1) + 4; }
    int face_exactness() const { return 2 * k + 2; }
};

struct LocalSystem
{
    int k = 0;
    Eigen::MatrixXd A, B, C, E, G, H;
    Eigen::VectorXd F;

    int flux_dofs() const { return static_cast<int>(A.rows()); }
    int potential_dofs() const { return static_cast<int>(E.rows()); }
    int trace_dofs() const { return static_cast<int>(H.rows()); }

    /// The full 3x3 block matrix of the element.
    Eigen::MatrixXd full() const
    {
        const int ns = flux_dofs(), nu = potential_dofs(), nl = trace_dofs();
        Eigen::MatrixXd m(ns + nu + nl, ns + nu + nl);
        m << A, B, -C, -B.transpose(), E, -G, C.transpose(), -G.transpose(), H;
        return m;
    }
};

inline void check_spd_coefficient(const Mat2& c, const Point& x)
{
    const double scale = c.cwiseAbs().maxCoeff();
    const bool symmetric = std::abs(c(0, 1) - c(1, 0)) <= 1e-12 * scale;
    if (!symmetric || !(c(0, 0) > 0.0) || !(c.determinant() > 0.0))
        throw std::invalid_argument("coefficient c is not symmetric positive definite at (" +
                                    std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
}

inline LocalSystem assemble_local(const Mesh& mesh, int e, const HDGConfig& config, const ProblemData& problem)
{
    config.validate();
    const int k = config.k;
    const ElementGeometry geom = element_geometry(mesh, e);
    const auto& flux_basis = triangle_basis(k);
    const auto& pot_basis = triangle_basis(k + 1);
    const int nk = flux_basis.dim();
    const int nu = pot_basis.dim();
    const int nf = config.face_dofs();
    const double alpha = HDGConfig::penalty(geom);

    LocalSystem ls;
    ls.k = k;
    ls.A = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
    ls.B = Eigen::MatrixXd::Zero(2 * nk, nu);
    ls.C = Eigen::MatrixXd::Zero(2 * nk, 3 * nf);
    ls.E = Eigen::MatrixXd::Zero(nu, nu);
    ls.G = Eigen::MatrixXd::Zero(nu, 3 * nf);
    ls.H = Eigen::MatrixXd::Zero(3 * nf, 3 * nf);
    ls.F = Eigen::VectorXd::Zero(nu);

    const auto& rule = quad_triangle(config.volume_exactness());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& ref = rule.points[q];
        const Point x = geom.to_physical(ref);
        const double w = 2.0 * geom.area * rule.weights[q];
        const Mat2 c = problem.c(x);
        check_spd_coefficient(c, x);
        const Eigen::VectorXd phi = flux_basis.values(ref);
        const Eigen::VectorXd psi = pot_basis.values(ref);
        const Eigen::MatrixXd dphi = physical_gradients(flux_basis, geom, ref);
        const Eigen::MatrixXd mass = w * phi * phi.transpose();
        ls.A.block(0, 0, nk, nk) += c(0, 0) * mass;
        ls.A.block(0, nk, nk, nk) += c(1, 0) * mass;
        ls.A.block(nk, 0, nk, nk) += c(0, 1) * mass;
        ls.A.block(nk, nk, nk, nk) += c(1, 1) * mass;
        ls.B.topRows(nk).noalias() += w * dphi.col(0) * psi.transpose();
        ls.B.bottomRows(nk).noalias() += w * dphi.col(1) * psi.transpose();
        ls.F.noalias() += (w * problem.f(x)) * psi;
    }

    for (int le = 0; le < 3; ++le) {
        const int sign = mesh.element_face(e, le).sign;
        const double len = geom.edge_lengths[le];
        const Vec2& n = geom.normals[le];
        const Eigen::MatrixXd p_flux = trace_matrix(k, k, le, sign);
        const Eigen::MatrixXd p_pot = trace_matrix(k + 1, k, le, sign);
        ls.C.block(0, le * nf, nk, nf) = len * n.x() * p_flux.transpose();
        ls.C.block(nk, le * nf, nk, nf) = len * n.y() * p_flux.transpose();
        ls.E.noalias() += alpha * len * p_pot.transpose() * p_pot;
        ls.G.block(0, le * nf, nu, nf) = alpha * len * p_pot.transpose();
        ls.H.block(le * nf, le * nf, nf, nf) = alpha * len * Eigen::MatrixXd::Identity(nf, nf);
    }
    return ls;
}

/// Result of eliminating (sigma, u) from one element:
///   [sigma; u] = particular + lift * lambda,   schur * lambda = load  (element contribution).
struct CondensedLocal
{
    Eigen::MatrixXd schur;
    Eigen::VectorXd load;
    Eigen::MatrixXd lift;
    Eigen::VectorXd particular;
};

inline CondensedLocal condense(const LocalSystem& ls, int element_id = -1)
{
    const int ns = ls.flux_dofs(), nu = ls.potential_dofs(), nl = ls.trace_dofs();
    Eigen::MatrixXd interior(ns + nu, ns + nu);
    interior << ls.A, ls.B, -ls.B.transpose(), ls.E;
    Eigen::MatrixXd coupling(ns + nu, nl);
    coupling << ls.C, ls.G;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ns + nu);
    rhs.tail(nu) = ls.F;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(interior);
    if (!(lu.rcond() > 1e-14))
        throw NumericalError("condense: singular interior block on element " + std::to_string(element_id) +
                             " (rcond " + std::to_string(lu.rcond()) + ")");

    CondensedLocal out;
    out.lift = lu.solve(coupling);
    out.particular = lu.solve(rhs);
    Eigen::MatrixXd back(nl, ns + nu);
    back << ls.C.transpose(), -ls.G.transpose();
    out.schur = ls.H + back * out.lift;
    out.load = -back * out.particular;
    return out;
}

struct LocalFields
{
    Eigen::VectorXd flux;
    Eigen::VectorXd potential;
};

/// (sigma, u) on one element from its three trace blocks.
inline LocalFields recover_local(const CondensedLocal& local, const Eigen::VectorXd& trace)
{
    const Eigen::VectorXd x = local.particular + local.lift * trace;
    // three faces of k+1 trace coefficients each
    const int k = static_cast<int>(trace.size()) / 3 - 1;
    const int ns = 2 * triangle_dim(k);
    LocalFields out;
    out.flux = x.head(ns);
    out.potential = x.tail(x.size() - ns);
    return out;
}

} // namespace hdg
