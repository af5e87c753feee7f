#include "fem/error.hpp"
#include "fem/fespace.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fem;

namespace {

const std::array<std::array<double, 3>, 4> kSamples{{
    {0.2, 0.3, 0.5},
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
    {0.7, 0.1, 0.2},
    {0.05, 0.9, 0.05},
}};

} // namespace

class Degree : public ::testing::TestWithParam<int> {};

TEST_P(Degree, PartitionOfUnity)
{
    const FeSpace V(GetParam());
    std::vector<double> phi(static_cast<std::size_t>(V.local_dofs()));
    std::vector<double> dphi(static_cast<std::size_t>(3 * V.local_dofs()));
    for (const auto& forward : {std::array{true, true, true}, std::array{false, true, false}}) {
        for (const auto& l : kSamples) {
            eval_basis(V, l, forward, phi);
            double s = 0.0;
            for (double v : phi) s += v;
            EXPECT_NEAR(s, 1.0, 1e-14);
            eval_basis_dlambda(V, l, forward, dphi);
            // sum_i phi_i is constant on the plane sum(lambda) = 1, so its
            // lambda-partials agree and tangential derivatives vanish
            std::array<double, 3> d{0.0, 0.0, 0.0};
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < V.local_dofs(); ++i) d[j] += dphi[static_cast<std::size_t>(3 * i + j)];
            }
            EXPECT_NEAR(d[1] - d[0], 0.0, 1e-12);
            EXPECT_NEAR(d[2] - d[0], 0.0, 1e-12);
        }
    }
}

TEST_P(Degree, PhysicalGradientsSumToZero)
{
    const FeSpace V(GetParam());
    const FeMesh th = test::unit_square(0.5);
    const auto [dx, dy] = tabulate_gradient(th.mesh, V, triangle_rule(5));
    Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(dx[0].rows(), dx[0].cols());
    Eigen::MatrixXd sy = sx;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        sx += dx[i];
        sy += dy[i];
    }
    EXPECT_LT(test::max_abs(sx), 1e-12);
    EXPECT_LT(test::max_abs(sy), 1e-12);
}

TEST_P(Degree, KroneckerAtDofPoints)
{
    const FeSpace V(GetParam());
    const FeMesh th = test::unit_square(0.5);
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    std::vector<double> phi(static_cast<std::size_t>(V.local_dofs()));
    for (int e = 0; e < th.num_elems(); ++e) {
        const auto dofs = dm.dofs(e);
        const auto forward = edge_orientation(th.mesh.elem[e]);
        for (int i = 0; i < V.local_dofs(); ++i) {
            const Point2 p = dm.dofPoint[dofs[i]];
            eval_basis(V, test::barycentric(th.mesh, e, p[0], p[1]), forward, phi);
            for (int j = 0; j < V.local_dofs(); ++j) {
                EXPECT_NEAR(phi[j], i == j ? 1.0 : 0.0, 1e-12) << "elem " << e << " dof " << i << "," << j;
            }
        }
    }
}

TEST_P(Degree, DofCounts)
{
    const int k = GetParam();
    const FeMesh th = test::unit_square(0.25);
    const DofMap dm = build_dof_map(th.mesh, th.topo, FeSpace(k));
    const int expected = th.num_nodes() + (k - 1) * th.num_edges() + (k == 3 ? th.num_elems() : 0);
    EXPECT_EQ(dm.NNdof, expected);
    EXPECT_EQ(static_cast<int>(dm.dofPoint.size()), expected);
    std::vector<int> seen(static_cast<std::size_t>(expected), 0);
    for (int d : dm.elem2dof) ++seen[static_cast<std::size_t>(d)];
    for (int s : seen) EXPECT_GT(s, 0);
}

TEST_P(Degree, ContinuousAcrossInteriorEdges)
{
    const FeSpace V(GetParam());
    const FeMesh th = test::unit_square(0.25);
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    const Eigen::VectorXd u = test::random_vector(dm.NNdof, 7);
    for (int k = 0; k < th.num_edges(); ++k) {
        if (th.topo.is_boundary(k)) continue;
        const auto [a, b] = th.topo.edge[k];
        for (double s : {0.13, 0.5, 0.71}) {
            const double x = (1 - s) * th.mesh.node[a][0] + s * th.mesh.node[b][0];
            const double y = (1 - s) * th.mesh.node[a][1] + s * th.mesh.node[b][1];
            const int e0 = th.topo.edge2elem[k][0];
            const int e1 = th.topo.edge2elem[k][1];
            const double v0 = evaluate_in_element(u, th, dm, e0, test::barycentric(th.mesh, e0, x, y)).value;
            const double v1 = evaluate_in_element(u, th, dm, e1, test::barycentric(th.mesh, e1, x, y)).value;
            EXPECT_NEAR(v0, v1, 1e-12);
        }
    }
}

TEST_P(Degree, GradientMatchesFiniteDifference)
{
    const FeSpace V(GetParam());
    const FeMesh th = test::unit_square(0.5);
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    const Eigen::VectorXd u = test::random_vector(dm.NNdof, 11);
    const double d = 1e-6;
    for (int e = 0; e < th.num_elems(); ++e) {
        const Point2 p = test::element_point(th.mesh, e, {0.3, 0.3, 0.4});
        auto val = [&](double x, double y) {
            return evaluate_in_element(u, th, dm, e, test::barycentric(th.mesh, e, x, y)).value;
        };
        const PointValue pv = evaluate_in_element(u, th, dm, e, {0.3, 0.3, 0.4});
        EXPECT_NEAR(pv.dx, (val(p[0] + d, p[1]) - val(p[0] - d, p[1])) / (2 * d), 1e-6);
        EXPECT_NEAR(pv.dy, (val(p[0], p[1] + d) - val(p[0], p[1] - d)) / (2 * d), 1e-6);
    }
}

TEST_P(Degree, InterpolationReproducesPolynomials)
{
    const int k = GetParam();
    const FeSpace V(k);
    const FeMesh th = test::unit_square(0.25);
    auto poly = [k](double x, double y) { return 1.0 + x - 2.0 * y + std::pow(x, k) - 0.5 * std::pow(y, k - 1) * x; };
    const Eigen::VectorXd u = interpolate_nodal(poly, th, V);
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    for (int e = 0; e < th.num_elems(); ++e) {
        for (const auto& l : kSamples) {
            const Point2 p = test::element_point(th.mesh, e, l);
            EXPECT_NEAR(evaluate_in_element(u, th, dm, e, l).value, poly(p[0], p[1]), 1e-12);
        }
    }
}

TEST_P(Degree, TraceMatchesVolumeEvaluation)
{
    const FeSpace V(GetParam());
    const FeMesh th = test::unit_square(0.25);
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    const Eigen::VectorXd u = test::random_vector(dm.NNdof, 3);
    const int q = 6;
    const std::vector<int>& edges = th.topo.bdEdgeIdx;
    const CoefMatrix tr = edge_matrix_from_dofs(u, th, V, edges, q);
    const QuadPoints pts = edge_quadrature_points(th, edges, segment_rule(q));
    ASSERT_EQ(tr.rows(), static_cast<Eigen::Index>(edges.size()));
    for (std::size_t r = 0; r < edges.size(); ++r) {
        const int e = th.topo.edge2elem[edges[r]][0];
        for (Eigen::Index p = 0; p < tr.cols(); ++p) {
            const auto l = test::barycentric(th.mesh, e, pts.x(r, p), pts.y(r, p));
            EXPECT_NEAR(tr(r, p), evaluate_in_element(u, th, dm, e, l).value, 1e-12);
        }
    }
}

TEST_P(Degree, TraceTableDofsLieOnTheEdge)
{
    const FeSpace V(GetParam());
    const FeMesh th = test::unit_square(0.5);
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    const std::vector<int>& edges = th.topo.bdEdgeIdx;
    const TraceTable tt = tabulate_trace(th, dm, Tag::Val, edges, segment_rule(4));
    ASSERT_EQ(static_cast<int>(tt.values.size()), V.trace_dofs());
    for (std::size_t r = 0; r < edges.size(); ++r) {
        const auto [a, b] = th.topo.edge[edges[r]];
        const Point2 A = th.mesh.node[a];
        const Point2 B = th.mesh.node[b];
        for (int d : tt.dofs[r]) {
            const Point2 p = dm.dofPoint[d];
            EXPECT_NEAR((B[0] - A[0]) * (p[1] - A[1]) - (B[1] - A[1]) * (p[0] - A[0]), 0.0, 1e-14);
        }
        for (Eigen::Index p = 0; p < tt.values[0].cols(); ++p) {
            double s = 0.0;
            for (const auto& t : tt.values) s += t(static_cast<Eigen::Index>(r), p);
            EXPECT_NEAR(s, 1.0, 1e-13);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(P1P2P3, Degree, ::testing::Values(1, 2, 3));

TEST(FeSpace, NamesAndRejection)
{
    EXPECT_EQ(FeSpace::from_name("P2").degree(), 2);
    EXPECT_EQ(FeSpace(3).local_dofs(), 10);
    EXPECT_EQ(FeSpace(3).trace_dofs(), 4);
    EXPECT_THROW((void)FeSpace(4), Error);
    EXPECT_THROW((void)FeSpace::from_name("Q1"), Error);
}

TEST(FeSpace, P3EdgeDofsRunFromSmallerVertex)
{
    const FeMesh th = test::unit_square(0.5);
    const DofMap dm = build_dof_map(th.mesh, th.topo, FeSpace(3));
    const int N = th.num_nodes();
    for (int k = 0; k < th.num_edges(); ++k) {
        const auto [a, b] = th.topo.edge[k];
        const Point2 first = dm.dofPoint[N + 2 * k];
        const Point2 second = dm.dofPoint[N + 2 * k + 1];
        const Point2 A = th.mesh.node[a];
        const Point2 B = th.mesh.node[b];
        EXPECT_NEAR(first[0], (2 * A[0] + B[0]) / 3, 1e-14);
        EXPECT_NEAR(first[1], (2 * A[1] + B[1]) / 3, 1e-14);
        EXPECT_NEAR(second[0], (A[0] + 2 * B[0]) / 3, 1e-14);
        EXPECT_NEAR(second[1], (A[1] + 2 * B[1]) / 3, 1e-14);
    }
}

TEST(FeSpace, IntegrateAndPointEvaluation)
{
    const FeMesh th = test::unit_square(0.25);
    const Eigen::VectorXd u = interpolate_nodal([](double x, double y) { return x * y; }, th, FeSpace(2));
    EXPECT_NEAR(integrate_fe(u, th, FeSpace(2), 4), 0.25, 1e-14);
    const std::vector<Point2> pts{{0.3, 0.7}, {2.0, 2.0}};
    const auto v = evaluate_at_points(u, th, FeSpace(2), pts);
    EXPECT_NEAR(v[0], 0.21, 1e-14);
    EXPECT_TRUE(std::isnan(v[1]));
}
