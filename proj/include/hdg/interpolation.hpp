#pragma once

// Interpolation operators from the error analysis, as executable oracles.
//
//   m_T(mu)       mean over the three edges of the edge averages of mu
//   Pi0(mu)       continuous P1, interior nodes = patch average of m_T, boundary nodes 0
//   Pi1_T(v, mu)  w1 + w2, w1 in Gamma(T) matching the P_k(F) edge moments of mu,
//                 w2 in b_T P_k(T) matching the P_k(T) moments of v - w1
//   Pi_h(v, mu)   Pi0 mu + Pi1(v - Pi0 mu, mu - Pi0 mu)
//
// Gamma(T) = S_0 + S_1 + S_2 with S_i = (prod_{j != i} l_j) span{ l^a : |a| = k, a_i = 0 }
// and b_T = l_0 l_1 l_2.  Everything here is written on the reference triangle; the only
// element dependence is the orientation of each edge's canonical parameter.

#include "basis.hpp"
#include "local_system.hpp"
#include "mesh.hpp"
#include "projection.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdg {

// ---------------------------------------------------------------------------------------
// m_T and Pi0

/// m_T(mu) for mu given as a function on the boundary of element e.
inline double edge_mean_average(const ScalarFunction& mu, const Mesh& mesh, int e, int exactness = 20)
{
    const auto& rule = quad_edge(exactness);
    double sum = 0.0;
    for (int le = 0; le < 3; ++le) {
        const auto& fv = mesh.face(mesh.element_face(e, le).face);
        const Point a = mesh.vertex(fv[0]), b = mesh.vertex(fv[1]);
        for (std::size_t q = 0; q < rule.size(); ++q)
            sum += rule.weights[q] * mu(a + rule.points[q] * (b - a));
    }
    return sum / 3.0;
}

/// m_T(mu) for skeleton data: psi_0 == 1, so the edge average is the leading coefficient.
inline double edge_mean_average(const SkeletonField& mu, const Mesh& mesh, int e)
{
    double sum = 0.0;
    for (int le = 0; le < 3; ++le)
        sum += mu.coefficients(0, mesh.element_face(e, le).face);
    return sum / 3.0;
}

/// Continuous piecewise linear field vanishing on the boundary, stored by nodal values.
struct ConformingP1Field
{
    std::vector<double> nodal_values;

    double eval_reference(const Mesh& mesh, int e, const Vec2& ref) const
    {
        const auto& t = mesh.triangle(e);
        return (1.0 - ref.x() - ref.y()) * nodal_values[t[0]] + ref.x() * nodal_values[t[1]] +
               ref.y() * nodal_values[t[2]];
    }

    /// Coefficients in the P1 triangle basis on element e.
    Eigen::VectorXd element_coefficients(const Mesh& mesh, int e) const
    {
        const auto& basis = triangle_basis(1);
        const auto& rule = quad_triangle(2);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.dim());
        for (std::size_t q = 0; q < rule.size(); ++q)
            c += (2.0 * rule.weights[q] * eval_reference(mesh, e, rule.points[q])) * basis.values(rule.points[q]);
        return c;
    }

    /// Canonical P1 coefficients of the trace on face f.
    Eigen::VectorXd face_coefficients(const Mesh& mesh, int f) const
    {
        const double a = nodal_values[mesh.face(f)[0]];
        const double b = nodal_values[mesh.face(f)[1]];
        // a (1 - t) + b t = (a + b)/2 + (b - a)/(2 sqrt 3) * sqrt(3) (2t - 1)
        Eigen::VectorXd c(2);
        c << 0.5 * (a + b), (b - a) / (2.0 * std::sqrt(3.0));
        return c;
    }
};

inline ConformingP1Field pi0(const SkeletonField& mu, const Mesh& mesh)
{
    std::vector<double> m(mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e)
        m[e] = edge_mean_average(mu, mesh, e);
    ConformingP1Field out;
    out.nodal_values.assign(mesh.num_vertices(), 0.0);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (mesh.is_boundary_vertex(v))
            continue;
        const auto& patch = mesh.vertex_patch(v);
        double sum = 0.0;
        for (int e : patch)
            sum += m[e];
        out.nodal_values[v] = sum / static_cast<double>(patch.size());
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Gamma(T), bubble space and Pi1

namespace detail {

inline std::array<double, 3> barycentrics(const Vec2& ref)
{
    return {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
}

inline double ipow(double x, int p)
{
    double r = 1.0;
    for (int i = 0; i < p; ++i)
        r *= x;
    return r;
}

} // namespace detail

/// Values of the 3(k+1) spanning functions of Gamma(T), block S_i for i = 0, 1, 2.
inline Eigen::VectorXd gamma_values(int k, const Vec2& ref)
{
    const auto l = detail::barycentrics(ref);
    Eigen::VectorXd v(3 * (k + 1));
    for (int i = 0; i < 3; ++i) {
        const int a = (i + 1) % 3, b = (i + 2) % 3;
        const double bubble = l[a] * l[b];
        for (int p = 0; p <= k; ++p)
            v(i * (k + 1) + p) = bubble * detail::ipow(l[a], p) * detail::ipow(l[b], k - p);
    }
    return v;
}

/// Values of b_T * phi_j, phi_j the P_k triangle basis.
inline Eigen::VectorXd bubble_values(int k, const Vec2& ref)
{
    const auto l = detail::barycentrics(ref);
    return (l[0] * l[1] * l[2]) * triangle_basis(k).values(ref);
}

/// Output degree of Pi1 / Pi_h representations.
constexpr int enriched_degree(int k) { return k + 3; }

/// Face-moment matrix of Gamma(T): entry ((le, j), g) = mean over edge le of gamma_g psi_j.
inline Eigen::MatrixXd gamma_face_moment_matrix(int k, const std::array<int, 3>& signs)
{
    const auto& rule = quad_edge(2 * k + 2);
    const int n = 3 * (k + 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int le = 0; le < 3; ++le)
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double t = rule.points[q];
            m.middleRows(le * (k + 1), k + 1) += rule.weights[q] * edge_basis(k, t) *
                                                  gamma_values(k, edge_reference_point(le, signs[le], t)).transpose();
        }
    return m;
}

/// Interior-moment matrix of the bubble block: entry (q, j) = mean_T(b_T phi_j phi_q).
inline Eigen::MatrixXd bubble_moment_matrix(int k)
{
    const auto& basis = triangle_basis(k);
    const auto& rule = quad_triangle(2 * k + 3);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
    for (std::size_t q = 0; q < rule.size(); ++q)
        m += 2.0 * rule.weights[q] * basis.values(rule.points[q]) * bubble_values(k, rule.points[q]).transpose();
    return m;
}

inline constexpr int kMaxEnrichedK = kMaxBasisDegree - 3;

namespace detail {

inline Eigen::MatrixXd build_enriched_to_polynomial(int k)
{
    const auto& basis = triangle_basis(enriched_degree(k));
    const auto& rule = quad_triangle(2 * enriched_degree(k));
    const int ng = 3 * (k + 1), nb = triangle_dim(k);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.dim(), ng + nb);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& ref = rule.points[q];
        Eigen::VectorXd g(ng + nb);
        g << gamma_values(k, ref), bubble_values(k, ref);
        m += 2.0 * rule.weights[q] * basis.values(ref) * g.transpose();
    }
    return m;
}

} // namespace detail

/// Columns: Gamma(T) spanning set then bubble block, expanded in the degree k+3 triangle basis.
inline const Eigen::MatrixXd& enriched_to_polynomial(int k)
{
    if (k < 0 || k > kMaxEnrichedK)
        throw std::invalid_argument("enriched_to_polynomial: unsupported degree k=" + std::to_string(k));
    static const auto table = [] {
        std::array<Eigen::MatrixXd, kMaxEnrichedK + 1> t;
        for (int j = 0; j <= kMaxEnrichedK; ++j)
            t[j] = detail::build_enriched_to_polynomial(j);
        return t;
    }();
    return table[k];
}

inline std::array<int, 3> face_signs(const Mesh& mesh, int e)
{
    return {mesh.element_face(e, 0).sign, mesh.element_face(e, 1).sign, mesh.element_face(e, 2).sign};
}

/// Local field in Gamma(T) + b_T P_k(T).
struct EnrichedLocalField
{
    int k = 0;
    Eigen::VectorXd gamma;  // 3(k+1) coefficients on the Gamma(T) spanning set
    Eigen::VectorXd bubble; // dim P_k coefficients on b_T phi_j

    /// Expansion in the triangle basis of degree k+3.
    Eigen::VectorXd polynomial() const
    {
        Eigen::VectorXd c(gamma.size() + bubble.size());
        c << gamma, bubble;
        return enriched_to_polynomial(k) * c;
    }
};

namespace detail {

/// First n coefficients of c, zero-padded.
inline Eigen::VectorXd leading(const Eigen::VectorXd& c, int n)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    const int m = std::min<int>(n, static_cast<int>(c.size()));
    out.head(m) = c.head(m);
    return out;
}

} // namespace detail

/// Pi1_T(v, mu).  v: triangle-basis coefficients of any degree on T; mu: canonical edge
/// coefficients (any degree) of each local edge.
inline EnrichedLocalField pi1(const Eigen::VectorXd& v, const std::array<Eigen::VectorXd, 3>& mu, int k,
                              const Mesh& mesh, int e)
{
    if (k < 0 || k > kMaxEnrichedK)
        throw std::invalid_argument("pi1: unsupported degree k=" + std::to_string(k));
    const int nf = k + 1;
    const int nk = triangle_dim(k);

    const Eigen::PartialPivLU<Eigen::MatrixXd> face_lu(gamma_face_moment_matrix(k, face_signs(mesh, e)));
    if (!(face_lu.rcond() > 1e-13))
        throw NumericalError("pi1: singular Gamma(T) face-moment matrix (k=" + std::to_string(k) + ", element " +
                             std::to_string(e) + ")");
    Eigen::VectorXd face_rhs(3 * nf);
    for (int le = 0; le < 3; ++le)
        face_rhs.segment(le * nf, nf) = detail::leading(mu[le], nf);

    EnrichedLocalField out;
    out.k = k;
    out.gamma = face_lu.solve(face_rhs);
    out.bubble = Eigen::VectorXd::Zero(nk);

    const Eigen::PartialPivLU<Eigen::MatrixXd> bubble_lu(bubble_moment_matrix(k));
    if (!(bubble_lu.rcond() > 1e-13))
        throw NumericalError("pi1: singular bubble moment matrix (k=" + std::to_string(k) + ")");
    const Eigen::VectorXd w1 = out.polynomial();
    out.bubble = bubble_lu.solve(detail::leading(v, nk) - w1.head(nk));
    return out;
}

/// Pi_h(v, mu) as a field of degree k+3.
inline ElementField pi_h(const ElementField& v, const SkeletonField& mu, int k, const Mesh& mesh)
{
    const ConformingP1Field base = pi0(mu, mesh);
    const int nd = triangle_dim(enriched_degree(k));
    ElementField out(enriched_degree(k), mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Eigen::VectorXd base_local = base.element_coefficients(mesh, e);
        const int nv = std::max<int>(static_cast<int>(v.coefficients.rows()), 3);
        Eigen::VectorXd v_local = detail::leading(v.coefficients.col(e), nv);
        v_local.head(3) -= base_local;

        std::array<Eigen::VectorXd, 3> mu_local;
        for (int le = 0; le < 3; ++le) {
            const int f = mesh.element_face(e, le).face;
            const int nm = std::max<int>(static_cast<int>(mu.coefficients.rows()), 2);
            mu_local[le] = detail::leading(mu.coefficients.col(f), nm);
            mu_local[le].head(2) -= base.face_coefficients(mesh, f);
        }
        Eigen::VectorXd local = pi1(v_local, mu_local, k, mesh, e).polynomial();
        local.head(3) += base_local;
        out.coefficients.col(e) = detail::leading(local, nd);
    }
    return out;
}

} // namespace hdg
