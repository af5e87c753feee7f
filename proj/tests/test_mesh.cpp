#include "fem/error.hpp"
#include "fem/mesh.hpp"
#include "fem/selector.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace fem;

TEST(SquareMesh, CountsForHalfSpacing)
{
    const Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.5);
    EXPECT_EQ(m.num_nodes(), 9);
    EXPECT_EQ(m.num_elems(), 8);
    EXPECT_EQ(build_topology(m).num_edges(), 16);
}

TEST(SquareMesh, TrianglesAreCounterclockwiseAndTileTheBox)
{
    const Mesh2d m = square_mesh({-1.0, 2.0, 0.0, 1.5}, 0.25);
    double total = 0.0;
    for (const auto& t : m.elem) {
        const double a = signed_area(m.node[t[0]], m.node[t[1]], m.node[t[2]]);
        EXPECT_GT(a, 0.0);
        total += a;
    }
    EXPECT_NEAR(total, 3.0 * 1.5, 1e-12);
    EXPECT_NO_THROW(m.validate());
}

TEST(Topology, EdgesSortedLexicographicAndUnique)
{
    const Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.125);
    const MeshTopology topo = build_topology(m);
    for (const auto& e : topo.edge) EXPECT_LT(e[0], e[1]);
    EXPECT_TRUE(std::is_sorted(topo.edge.begin(), topo.edge.end()));
    EXPECT_EQ(std::adjacent_find(topo.edge.begin(), topo.edge.end()), topo.edge.end());
    // simply connected domain: V - E + F = 1
    EXPECT_EQ(topo.num_edges(), m.num_nodes() + m.num_elems() - 1);
}

TEST(Topology, LocalEdgeIsOppositeLocalVertex)
{
    const Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.25);
    const MeshTopology topo = build_topology(m);
    for (int e = 0; e < m.num_elems(); ++e) {
        const auto& t = m.elem[e];
        for (int i = 0; i < 3; ++i) {
            const EdgePair& g = topo.edge[topo.elem2edge[e][i]];
            const int a = std::min(t[(i + 1) % 3], t[(i + 2) % 3]);
            const int b = std::max(t[(i + 1) % 3], t[(i + 2) % 3]);
            EXPECT_EQ(g[0], a);
            EXPECT_EQ(g[1], b);
        }
    }
}

TEST(Topology, EdgeAdjacencyIsConsistent)
{
    const Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.25);
    const MeshTopology topo = build_topology(m);
    int boundary = 0;
    for (int k = 0; k < topo.num_edges(); ++k) {
        for (int s = 0; s < 2; ++s) {
            const int e = topo.edge2elem[k][s];
            if (e < 0) continue;
            EXPECT_EQ(topo.elem2edge[e][topo.edge2local[k][s]], k);
        }
        if (topo.is_boundary(k)) ++boundary;
    }
    EXPECT_EQ(boundary, 16);
    EXPECT_EQ(static_cast<int>(topo.bdEdge.size()), 16);
}

TEST(Topology, BoundaryEdgesCounterclockwise)
{
    const FeMesh th = test::unit_square(0.25);
    const auto& topo = th.topo;
    for (std::size_t r = 0; r < topo.bdEdge.size(); ++r) {
        const int k = topo.bdEdgeIdx[r];
        const int e = topo.edge2elem[k][0];
        const auto [a, b] = topo.bdEdge[r];
        int c = -1;
        for (int v : th.mesh.elem[e]) {
            if (v != a && v != b) c = v;
        }
        ASSERT_GE(c, 0);
        EXPECT_GT(signed_area(th.mesh.node[a], th.mesh.node[b], th.mesh.node[c]), 0.0);
    }
}

TEST(Topology, OutwardNormalsPointAway)
{
    const FeMesh th = test::unit_square(0.25);
    for (int k : th.topo.bdEdgeIdx) {
        const Point2 n = outward_normal(th, k);
        EXPECT_NEAR(std::hypot(n[0], n[1]), 1.0, 1e-14);
        const auto [a, b] = th.topo.edge[k];
        const double mx = 0.5 * (th.mesh.node[a][0] + th.mesh.node[b][0]);
        const double my = 0.5 * (th.mesh.node[a][1] + th.mesh.node[b][1]);
        // unit square: outward means away from the centre
        EXPECT_GT(n[0] * (mx - 0.5) + n[1] * (my - 0.5), 0.0);
    }
}

TEST(Topology, AreasAndLengths)
{
    const FeMesh th = test::unit_square(0.5);
    for (double a : th.topo.area) EXPECT_NEAR(a, 0.125, 1e-15);
    double perimeter = 0.0;
    for (int k : th.topo.bdEdgeIdx) perimeter += th.topo.edgeLength[k];
    EXPECT_NEAR(perimeter, 4.0, 1e-14);
}

TEST(Refine, CountsAndAreaPreserved)
{
    const Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.5);
    const int ne = build_topology(m).num_edges();
    const Mesh2d f = uniform_refine(m);
    EXPECT_EQ(f.num_nodes(), m.num_nodes() + ne);
    EXPECT_EQ(f.num_elems(), 4 * m.num_elems());
    EXPECT_NO_THROW(f.validate());
    double total = 0.0;
    for (const auto& t : f.elem) total += signed_area(f.node[t[0]], f.node[t[1]], f.node[t[2]]);
    EXPECT_NEAR(total, 1.0, 1e-14);
    EXPECT_NEAR(spacing_from_node_count(f.num_nodes()), 0.25, 1e-14);
}

TEST(Refine, KeepsCoarseVerticesInPlace)
{
    const Mesh2d m = square_mesh({0.0, 2.0, 0.0, 1.0}, 0.5);
    const Mesh2d f = uniform_refine(m);
    for (int i = 0; i < m.num_nodes(); ++i) {
        EXPECT_EQ(f.node[i], m.node[i]);
    }
}

TEST(Validate, RejectsClockwiseAndOutOfRange)
{
    Mesh2d m;
    m.node = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
    m.elem = {{0, 1, 2}};
    EXPECT_THROW(m.validate(), MeshError);
    m.elem = {{0, 2, 3}};
    EXPECT_THROW(m.validate(), MeshError);
    m.elem = {{0, 2, 1}};
    EXPECT_NO_THROW(m.validate());
}

TEST(Selector, EvaluatesMatlabStyleExpressions)
{
    EXPECT_TRUE(Selector("x==1")(1.0, 0.3));
    EXPECT_FALSE(Selector("x==1")(0.9, 0.3));
    EXPECT_TRUE(Selector("y<0 & x>-sin(pi/3)")(0.0, -0.5));
    EXPECT_FALSE(Selector("y<0 & x>-sin(pi/3)")(-0.9, -0.5));
    EXPECT_TRUE(Selector("x.^2 + y.^2 > 3.8^2")(4.0, 0.0));
    EXPECT_FALSE(Selector("x.^2 + y.^2 > 3.8^2")(3.0, 0.0));
    EXPECT_TRUE(Selector("x==0 | y==0")(0.3, 0.0));
}

TEST(Selector, MalformedInputThrows)
{
    EXPECT_THROW(Selector("x=="), ParseError);
    EXPECT_THROW(Selector("(x==1"), ParseError);
    EXPECT_THROW(Selector("z==1"), ParseError);
}

TEST(Boundary, SelectorRegionsThenRest)
{
    const FeMesh th = test::unit_square(0.5, {"x==0", "y==0"});
    const auto& p = th.partition;
    ASSERT_EQ(p.num_regions(), 3);
    EXPECT_EQ(p.bdEdgeIdxType[0].size(), 2u);
    EXPECT_EQ(p.bdEdgeIdxType[1].size(), 2u);
    EXPECT_EQ(p.bdEdgeIdxType[2].size(), 4u);
    for (const auto& [a, b] : p.bdEdgeType[0]) {
        EXPECT_EQ(th.mesh.node[a][0], 0.0);
        EXPECT_EQ(th.mesh.node[b][0], 0.0);
    }
    std::set<int> nodes0(p.bdNodeIdxType[0].begin(), p.bdNodeIdxType[0].end());
    EXPECT_EQ(nodes0.size(), 3u);
}

TEST(Boundary, FirstMatchingSelectorWins)
{
    const FeMesh th = test::unit_square(0.5, {"x==0", "x<0.5"});
    const auto& p = th.partition;
    ASSERT_EQ(p.num_regions(), 3);
    EXPECT_EQ(p.bdEdgeIdxType[0].size(), 2u);
    for (int k : p.bdEdgeIdxType[1]) {
        const auto [a, b] = th.topo.edge[k];
        const double mx = 0.5 * (th.mesh.node[a][0] + th.mesh.node[b][0]);
        EXPECT_LT(mx, 0.5);
        EXPECT_GT(mx, 0.0);
    }
    std::size_t total = 0;
    for (int r = 0; r < p.num_regions(); ++r) total += p.bdEdgeIdxType[r].size();
    EXPECT_EQ(total, th.topo.bdEdgeIdx.size());
}

TEST(Boundary, NoSelectorsGivesOneRegion)
{
    const FeMesh th = test::unit_square(0.25);
    ASSERT_EQ(th.partition.num_regions(), 1);
    EXPECT_EQ(th.region_edges(0).size(), 16u);
}

TEST(Boundary, LabelPartitionAscending)
{
    const Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.5);
    const MeshTopology topo = build_topology(m);
    std::vector<EdgePair> edges;
    std::vector<int> labels;
    for (const auto& e : topo.bdEdge) {
        edges.push_back(e);
        labels.push_back(m.node[e[0]][1] == 1.0 && m.node[e[1]][1] == 1.0 ? 7 : 3);
    }
    const BoundaryPartition p = classify_boundary_by_labels(m, topo, edges, labels);
    ASSERT_GE(p.num_regions(), 2);
    EXPECT_EQ(p.bdEdgeIdxType[0].size(), 6u);
    EXPECT_EQ(p.bdEdgeIdxType[1].size(), 2u);
}
