#include <hdg/checks.hpp>
#include <hdg/mesh.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

using namespace hdg;

namespace {

double total_area(const Mesh& m)
{
    double a = 0.0;
    for (int e = 0; e < m.num_elements(); ++e)
        a += m.signed_area(e);
    return a;
}

std::set<std::pair<long, long>> vertex_set(const Mesh& m)
{
    std::set<std::pair<long, long>> s;
    for (const auto& p : m.vertices())
        s.emplace(std::lround(p.x() * 1e9), std::lround(p.y() * 1e9));
    return s;
}

} // namespace

TEST(StructuredMesh, TwoByTwoCounts)
{
    const Mesh m = build_structured_mesh(2);
    EXPECT_EQ(m.num_vertices(), 9);
    EXPECT_EQ(m.num_elements(), 8);
    EXPECT_EQ(m.num_faces(), 16);
    EXPECT_EQ(m.num_interior_faces(), 8);
    EXPECT_EQ(m.num_boundary_faces(), 8);
    EXPECT_EQ(m.num_vertices() - m.num_faces() + m.num_elements(), 1);
}

TEST(StructuredMesh, TwoByTwoDiameters)
{
    const Mesh m = build_structured_mesh(2);
    for (int e = 0; e < m.num_elements(); ++e)
        EXPECT_NEAR(element_geometry(m, e).diameter, std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(m.mesh_size(), std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(StructuredMesh, SingleSquare)
{
    const Mesh m = build_structured_mesh(1);
    EXPECT_EQ(m.num_vertices(), 4);
    EXPECT_EQ(m.num_elements(), 2);
    EXPECT_EQ(m.num_faces(), 5);
    EXPECT_EQ(m.num_interior_faces(), 1);
}

TEST(StructuredMesh, DiagonalDirection)
{
    // every square's diagonal runs from (i/n, j/n) to ((i+1)/n, (j+1)/n)
    const Mesh m = build_structured_mesh(3);
    for (int f = 0; f < m.num_faces(); ++f) {
        const Vec2 d = m.vertex(m.face(f)[1]) - m.vertex(m.face(f)[0]);
        if (std::abs(d.x()) > 1e-14 && std::abs(d.y()) > 1e-14) {
            EXPECT_NEAR(d.x(), d.y(), 1e-14);
        }
    }
}

TEST(StructuredMesh, RejectsNonPositiveSize)
{
    EXPECT_THROW(build_structured_mesh(0), std::invalid_argument);
    EXPECT_THROW(build_structured_mesh(-3), std::invalid_argument);
    EXPECT_THROW(build_crisscross_mesh(0), std::invalid_argument);
}

TEST(StructuredMesh, InvariantsAcrossFamily)
{
    for (int n : {1, 2, 3, 5, 8}) {
        const Mesh m = build_structured_mesh(n);
        EXPECT_EQ(mesh_invariant_defect(m), 0.0) << "n=" << n;
        EXPECT_NEAR(total_area(m), 1.0, 1e-14);
        EXPECT_NEAR(m.mesh_size(), std::sqrt(2.0) / n, 1e-15);
    }
}

TEST(StructuredMesh, AllElementsSimilar)
{
    const Mesh m = build_structured_mesh(4);
    const ElementGeometry g0 = element_geometry(m, 0);
    const double ratio0 = g0.diameter * g0.diameter / g0.area;
    for (int e = 1; e < m.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(m, e);
        EXPECT_NEAR(g.diameter * g.diameter / g.area, ratio0, 1e-12);
    }
}

TEST(CrissCrossMesh, CountsAndInvariants)
{
    for (int n : {1, 2, 4}) {
        const Mesh m = build_crisscross_mesh(n);
        EXPECT_EQ(m.num_elements(), 4 * n * n);
        EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1) + n * n);
        EXPECT_EQ(mesh_invariant_defect(m), 0.0);
        EXPECT_NEAR(total_area(m), 1.0, 1e-14);
        EXPECT_NEAR(m.mesh_size(), 1.0 / n, 1e-15);
    }
}

TEST(MeshFamily, NamesRoundTrip)
{
    EXPECT_EQ(mesh_family_by_name("diagonal"), MeshFamily::Diagonal);
    EXPECT_EQ(mesh_family_by_name(to_string(MeshFamily::CrissCross)), MeshFamily::CrissCross);
    EXPECT_THROW(mesh_family_by_name("quad"), std::invalid_argument);
    EXPECT_EQ(build_mesh(MeshFamily::CrissCross, 2).num_elements(), 16);
}

TEST(RefineUniform, QuadruplesElements)
{
    const Mesh fine = refine_uniform(build_structured_mesh(2));
    EXPECT_EQ(fine.num_elements(), 32);
    EXPECT_EQ(mesh_invariant_defect(fine), 0.0);
    EXPECT_NEAR(total_area(fine), 1.0, 1e-14);
}

TEST(RefineUniform, HalvesDiameters)
{
    const Mesh coarse = build_structured_mesh(2);
    const Mesh fine = refine_uniform(coarse);
    for (int e = 0; e < coarse.num_elements(); ++e)
        for (int c = 0; c < 4; ++c)
            EXPECT_NEAR(fine.diameter(4 * e + c), 0.5 * coarse.diameter(e), 1e-15);
}

TEST(RefineUniform, MatchesFinerStructuredMesh)
{
    for (int n : {1, 2, 3}) {
        const Mesh refined = refine_uniform(build_structured_mesh(n));
        const Mesh direct = build_structured_mesh(2 * n);
        EXPECT_EQ(vertex_set(refined), vertex_set(direct)) << "n=" << n;
        // same set of triangles, compared as sets of vertex-coordinate triples
        auto triangle_set = [](const Mesh& m) {
            std::set<std::vector<std::pair<long, long>>> s;
            for (const auto& t : m.triangles()) {
                std::vector<std::pair<long, long>> key;
                for (int v : t)
                    key.emplace_back(std::lround(m.vertex(v).x() * 1e9), std::lround(m.vertex(v).y() * 1e9));
                std::sort(key.begin(), key.end());
                s.insert(key);
            }
            return s;
        };
        EXPECT_EQ(triangle_set(refined), triangle_set(direct)) << "n=" << n;
    }
}

TEST(ElementGeometry, ScaledReferenceTriangle)
{
    const Mesh m({Point(0, 0), Point(0.5, 0), Point(0, 0.5)}, {Triangle{0, 1, 2}});
    const ElementGeometry g = element_geometry(m, 0);
    EXPECT_NEAR(g.area, 0.125, 1e-15);
    EXPECT_NEAR(g.diameter, std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(std::abs(g.det), 2.0 * g.area, 1e-15);
}

TEST(ElementGeometry, NormalsUnitOutwardAndClosed)
{
    for (const Mesh& m : {build_structured_mesh(3), build_crisscross_mesh(2)}) {
        for (int e = 0; e < m.num_elements(); ++e) {
            const ElementGeometry g = element_geometry(m, e);
            Vec2 sum = Vec2::Zero();
            for (int le = 0; le < 3; ++le) {
                const Vec2& n = g.normals[le];
                EXPECT_NEAR(n.norm(), 1.0, 1e-15);
                const Point a = g.vertices[(le + 1) % 3], b = g.vertices[(le + 2) % 3];
                EXPECT_NEAR(n.dot(b - a), 0.0, 1e-15);
                EXPECT_GT(n.dot(0.5 * (a + b) - g.centroid), 0.0);
                sum += g.edge_lengths[le] * n;
            }
            EXPECT_LT(sum.norm(), 1e-14);
        }
    }
}

TEST(ElementGeometry, InteriorFaceNormalsOpposite)
{
    const Mesh m = build_structured_mesh(2);
    for (int f = 0; f < m.num_faces(); ++f) {
        const FaceNeighbors& nb = m.face_neighbors(f);
        if (nb.is_boundary())
            continue;
        const Vec2 nl = element_geometry(m, nb.left).normals[nb.left_edge];
        const Vec2 nr = element_geometry(m, nb.right).normals[nb.right_edge];
        EXPECT_LT((nl + nr).norm(), 1e-14);
        // signs agree with the canonical normal
        EXPECT_LT((nl - m.element_face(nb.left, nb.left_edge).sign * m.canonical_normal(f)).norm(), 1e-14);
        EXPECT_EQ(m.element_face(nb.left, nb.left_edge).sign, -m.element_face(nb.right, nb.right_edge).sign);
    }
}

TEST(ElementGeometry, ReferenceMapRoundTrip)
{
    const Mesh m = build_crisscross_mesh(3);
    const Vec2 ref(0.2, 0.3);
    for (int e = 0; e < m.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(m, e);
        EXPECT_LT((g.to_reference(g.to_physical(ref)) - ref).norm(), 1e-14);
        EXPECT_LT((g.to_physical(Vec2(1, 0)) - g.vertices[1]).norm(), 1e-15);
    }
}

TEST(ElementGeometry, RejectsOutOfRange)
{
    const Mesh m = build_structured_mesh(1);
    EXPECT_THROW(element_geometry(m, 2), std::out_of_range);
    EXPECT_THROW(element_geometry(m, -1), std::out_of_range);
}

TEST(MeshValidation, RejectsBadInput)
{
    const std::vector<Point> pts{Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1)};
    EXPECT_THROW(Mesh(pts, {Triangle{0, 1, 7}}), std::invalid_argument);
    EXPECT_THROW(Mesh(pts, {Triangle{0, 2, 1}}), std::invalid_argument); // clockwise
    EXPECT_THROW(Mesh(pts, {Triangle{0, 1, 1}}), std::invalid_argument); // degenerate
    // the same edge traversed in the same direction by two triangles
    EXPECT_THROW(Mesh(pts, {Triangle{0, 1, 2}, Triangle{0, 1, 3}}), std::invalid_argument);
}

TEST(MeshTopology, VertexPatchesAndBoundaryFlags)
{
    const Mesh m = build_structured_mesh(2);
    int interior = 0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        const Point& p = m.vertex(v);
        const bool on_boundary = p.x() == 0.0 || p.x() == 1.0 || p.y() == 0.0 || p.y() == 1.0;
        EXPECT_EQ(m.is_boundary_vertex(v), on_boundary);
        if (!on_boundary) {
            ++interior;
            EXPECT_EQ(m.vertex_patch(v).size(), 6u); // centre vertex of the 2x2 diagonal mesh
        }
        for (int e : m.vertex_patch(v)) {
            const auto& t = m.triangle(e);
            EXPECT_TRUE(std::find(t.begin(), t.end(), v) != t.end());
        }
    }
    EXPECT_EQ(interior, 1);
}

TEST(MeshExport, PlainTextFormat)
{
    std::ostringstream os;
    write_mesh(os, build_structured_mesh(1));
    std::istringstream is(os.str());
    std::string w1, w2;
    int nv = 0, nt = 0;
    is >> w1 >> nv >> w2 >> nt;
    EXPECT_EQ(w1, "vertices");
    EXPECT_EQ(w2, "triangles");
    EXPECT_EQ(nv, 4);
    EXPECT_EQ(nt, 2);
    double x, y;
    for (int i = 0; i < nv; ++i)
        is >> x >> y;
    int a, b, c;
    is >> a >> b >> c;
    EXPECT_EQ((Triangle{a, b, c}), build_structured_mesh(1).triangle(0));
}
