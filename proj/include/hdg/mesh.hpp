#pragma once

// Conforming triangulations of the unit square with full edge topology.
//
// Local edge e of a triangle (v0, v1, v2) is the edge opposite vertex e, traversed
// from v[(e+1)%3] to v[(e+2)%3].  Faces are stored with the smaller vertex index
// first; that direction is the canonical parameterization t in [0,1] used by every
// face-supported polynomial in the library.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdg {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Triangle = std::array<int, 3>;

inline constexpr int kBoundary = -1;

struct FaceNeighbors
{
    int left = kBoundary;
    int left_edge = -1;
    int right = kBoundary;
    int right_edge = -1;

    bool is_boundary() const { return right == kBoundary; }
};

/// Face seen from one element.  `sign` is +1 when the element traverses the face in
/// canonical direction, which is also the sign of the outward normal relative to the
/// canonical normal (tangent rotated clockwise).
struct ElementFace
{
    int face = -1;
    int sign = 1;
};

class Mesh
{
public:
    Mesh() = default;

    Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
        : vertices_(std::move(vertices)), triangles_(std::move(triangles))
    {
        build_topology();
    }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(triangles_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_interior_faces() const { return num_interior_faces_; }
    int num_boundary_faces() const { return num_faces() - num_interior_faces_; }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }

    const Point& vertex(int v) const { return vertices_.at(v); }
    const Triangle& triangle(int e) const { return triangles_.at(e); }
    const std::array<int, 2>& face(int f) const { return faces_.at(f); }
    const FaceNeighbors& face_neighbors(int f) const { return face_neighbors_.at(f); }
    const ElementFace& element_face(int e, int local_edge) const
    {
        return element_faces_.at(e).at(local_edge);
    }

    bool is_boundary_face(int f) const { return face_neighbors(f).is_boundary(); }
    bool is_boundary_vertex(int v) const { return boundary_vertex_.at(v); }

    /// Elements sharing vertex v, in increasing element order.
    const std::vector<int>& vertex_patch(int v) const { return vertex_patch_.at(v); }

    double face_length(int f) const
    {
        return (vertices_[faces_[f][1]] - vertices_[faces_[f][0]]).norm();
    }

    /// Unit normal of the canonical orientation: tangent (b - a) rotated clockwise.
    Vec2 canonical_normal(int f) const
    {
        const Vec2 t = vertices_[faces_[f][1]] - vertices_[faces_[f][0]];
        return Vec2(t.y(), -t.x()).normalized();
    }

    double diameter(int e) const
    {
        const auto& t = triangles_.at(e);
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            d = std::max(d, (vertices_[t[(i + 1) % 3]] - vertices_[t[(i + 2) % 3]]).norm());
        return d;
    }

    /// h = max over elements of the diameter.
    double mesh_size() const
    {
        double h = 0.0;
        for (int e = 0; e < num_elements(); ++e)
            h = std::max(h, diameter(e));
        return h;
    }

    double signed_area(int e) const
    {
        const auto& t = triangles_.at(e);
        const Vec2 a = vertices_[t[1]] - vertices_[t[0]];
        const Vec2 b = vertices_[t[2]] - vertices_[t[0]];
        return 0.5 * (a.x() * b.y() - a.y() * b.x());
    }

private:
    void build_topology()
    {
        const int nv = num_vertices();
        for (int e = 0; e < num_elements(); ++e) {
            for (int v : triangles_[e])
                if (v < 0 || v >= nv)
                    throw std::invalid_argument("Mesh: triangle " + std::to_string(e) +
                                                " references vertex " + std::to_string(v));
            if (!(signed_area(e) > 0.0))
                throw std::invalid_argument("Mesh: triangle " + std::to_string(e) +
                                            " is degenerate or clockwise");
        }

        std::map<std::pair<int, int>, int> lookup;
        element_faces_.assign(triangles_.size(), {});
        for (int e = 0; e < num_elements(); ++e) {
            const auto& t = triangles_[e];
            for (int le = 0; le < 3; ++le) {
                const int a = t[(le + 1) % 3];
                const int b = t[(le + 2) % 3];
                const auto key = std::minmax(a, b);
                const int sign = (a < b) ? 1 : -1;
                auto [it, inserted] = lookup.try_emplace(key, num_faces());
                if (inserted) {
                    faces_.push_back({key.first, key.second});
                    face_neighbors_.push_back({e, le, kBoundary, -1});
                } else {
                    auto& nb = face_neighbors_[it->second];
                    if (!nb.is_boundary())
                        throw std::invalid_argument("Mesh: edge (" + std::to_string(a) + "," +
                                                    std::to_string(b) +
                                                    ") shared by more than two triangles");
                    if (element_faces_[nb.left][nb.left_edge].sign == sign)
                        throw std::invalid_argument("Mesh: inconsistent orientation across edge (" +
                                                    std::to_string(a) + "," + std::to_string(b) + ")");
                    nb.right = e;
                    nb.right_edge = le;
                }
                element_faces_[e][le] = {it->second, sign};
            }
        }

        num_interior_faces_ = 0;
        boundary_vertex_.assign(vertices_.size(), false);
        for (int f = 0; f < num_faces(); ++f) {
            if (face_neighbors_[f].is_boundary()) {
                boundary_vertex_[faces_[f][0]] = true;
                boundary_vertex_[faces_[f][1]] = true;
            } else {
                ++num_interior_faces_;
            }
        }

        vertex_patch_.assign(vertices_.size(), {});
        for (int e = 0; e < num_elements(); ++e)
            for (int v : triangles_[e])
                vertex_patch_[v].push_back(e);
    }

    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<std::array<int, 2>> faces_;
    std::vector<FaceNeighbors> face_neighbors_;
    std::vector<std::array<ElementFace, 3>> element_faces_;
    std::vector<bool> boundary_vertex_;
    std::vector<std::vector<int>> vertex_patch_;
    int num_interior_faces_ = 0;
};

/// Affine data of one triangle.  Reference triangle is (0,0), (1,0), (0,1) and the
/// reference coordinates (xi, eta) are the barycentrics (lambda_1, lambda_2).
struct ElementGeometry
{
    std::array<Point, 3> vertices;
    Mat2 jacobian;
    Mat2 inverse_jacobian;
    double det = 0.0;
    double area = 0.0;
    double diameter = 0.0;
    std::array<double, 3> edge_lengths{};
    std::array<Vec2, 3> normals;
    Point centroid;

    Point to_physical(const Vec2& ref) const { return vertices[0] + jacobian * ref; }
    Vec2 to_reference(const Point& x) const { return inverse_jacobian * (x - vertices[0]); }
};

inline ElementGeometry element_geometry(const Mesh& mesh, int e)
{
    if (e < 0 || e >= mesh.num_elements())
        throw std::out_of_range("element_geometry: element id " + std::to_string(e) + " out of range");

    ElementGeometry g;
    const auto& t = mesh.triangle(e);
    for (int i = 0; i < 3; ++i)
        g.vertices[i] = mesh.vertex(t[i]);
    g.jacobian.col(0) = g.vertices[1] - g.vertices[0];
    g.jacobian.col(1) = g.vertices[2] - g.vertices[0];
    g.det = g.jacobian.determinant();
    g.inverse_jacobian = g.jacobian.inverse();
    g.area = 0.5 * std::abs(g.det);
    g.centroid = (g.vertices[0] + g.vertices[1] + g.vertices[2]) / 3.0;
    for (int le = 0; le < 3; ++le) {
        const Vec2 tangent = g.vertices[(le + 2) % 3] - g.vertices[(le + 1) % 3];
        g.edge_lengths[le] = tangent.norm();
        // counter-clockwise triangle: outward normal is the tangent rotated clockwise
        g.normals[le] = Vec2(tangent.y(), -tangent.x()) / g.edge_lengths[le];
        g.diameter = std::max(g.diameter, g.edge_lengths[le]);
    }
    return g;
}

/// n x n squares, each split by the diagonal (i/n, j/n) -- ((i+1)/n, (j+1)/n).
inline Mesh build_structured_mesh(int n)
{
    if (n < 1)
        throw std::invalid_argument("build_structured_mesh: n must be positive, got " + std::to_string(n));

    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            triangles.push_back({a, b, c});
            triangles.push_back({a, c, d});
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

/// n x n squares, each split into four triangles through its centre.  Grid vertex (i, j)
/// has id j(n+1)+i; square centres follow in row-major order.  Two newest-vertex bisection
/// steps (refinement edge opposite the centre) map build_crisscross_mesh(n) onto
/// build_crisscross_mesh(2n).
inline Mesh build_crisscross_mesh(int n)
{
    if (n < 1)
        throw std::invalid_argument("build_crisscross_mesh: n must be positive, got " + std::to_string(n));

    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1) + n * n));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(4 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int m = static_cast<int>(vertices.size());
            vertices.emplace_back((i + 0.5) / n, (j + 0.5) / n);
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            triangles.push_back({a, b, m});
            triangles.push_back({b, c, m});
            triangles.push_back({c, d, m});
            triangles.push_back({d, a, m});
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

enum class MeshFamily { Diagonal, CrissCross };

inline const char* to_string(MeshFamily family)
{
    return family == MeshFamily::Diagonal ? "diagonal" : "crisscross";
}

inline MeshFamily mesh_family_by_name(const std::string& name)
{
    if (name == "diagonal")
        return MeshFamily::Diagonal;
    if (name == "crisscross")
        return MeshFamily::CrissCross;
    throw std::invalid_argument("unknown mesh family '" + name + "' (expected diagonal|crisscross)");
}

/// Mesh of the family with n squares per side (h^{-1} = n in the table labelling).
inline Mesh build_mesh(MeshFamily family, int n)
{
    return family == MeshFamily::Diagonal ? build_structured_mesh(n) : build_crisscross_mesh(n);
}

/// Red refinement: every triangle is split into four similar children through its
/// edge midpoints.  Midpoint vertices are appended in face order.
inline Mesh refine_uniform(const Mesh& mesh)
{
    std::vector<Point> vertices = mesh.vertices();
    std::vector<int> midpoint(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fv = mesh.face(f);
        midpoint[f] = static_cast<int>(vertices.size());
        vertices.push_back(0.5 * (mesh.vertex(fv[0]) + mesh.vertex(fv[1])));
    }

    std::vector<Triangle> triangles;
    triangles.reserve(4 * static_cast<std::size_t>(mesh.num_elements()));
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.triangle(e);
        const int m0 = midpoint[mesh.element_face(e, 0).face];
        const int m1 = midpoint[mesh.element_face(e, 1).face];
        const int m2 = midpoint[mesh.element_face(e, 2).face];
        triangles.push_back({t[0], m2, m1});
        triangles.push_back({m2, t[1], m0});
        triangles.push_back({m1, m0, t[2]});
        triangles.push_back({m0, m1, m2});
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

/// Plain-text export: `vertices V triangles T`, V lines `x y`, T lines of 0-based indices.
inline void write_mesh(std::ostream& os, const Mesh& mesh)
{
    os << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_elements() << '\n';
    const auto old_precision = os.precision(17);
    for (const auto& p : mesh.vertices())
        os << p.x() << ' ' << p.y() << '\n';
    for (const auto& t : mesh.triangles())
        os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os.precision(old_precision);
}

} // namespace hdg
