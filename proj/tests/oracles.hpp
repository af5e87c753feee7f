#pragma once

#include "fem/assembly.hpp"
#include "fem/fespace.hpp"
#include "fem/quadrature.hpp"
#include "fem/vform.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fem::test {

// Bilinear forms checked against pointwise evaluation of FE functions.
enum class FormKind { Mass, Stiffness, MixedDx, BoundaryMass };

inline std::string to_string(FormKind k)
{
    switch (k) {
    case FormKind::Mass: return "mass";
    case FormKind::Stiffness: return "stiffness";
    case FormKind::MixedDx: return "mixed v_x u";
    case FormKind::BoundaryMass: return "boundary mass";
    }
    return "?";
}

inline SparseMatrix assemble_kind(const FeMesh& th, FormKind k, FeSpace V, int q)
{
    switch (k) {
    case FormKind::Mass:
        return compress(assemble_scalar_2d(th, VarForm::bilinear({1.0}, {"v.val"}, {"u.val"}), V, V, q));
    case FormKind::Stiffness:
        return compress(assemble_scalar_2d(th, VarForm::bilinear({1.0}, {"v.grad"}, {"u.grad"}), V, V, q));
    case FormKind::MixedDx:
        return compress(assemble_scalar_2d(th, VarForm::bilinear({1.0}, {"v.dx"}, {"u.val"}), V, V, q));
    case FormKind::BoundaryMass:
        return compress(
            assemble_scalar_1d(th, th.topo.bdEdgeIdx, VarForm::bilinear({1.0}, {"v.val"}, {"u.val"}), V, V, q));
    }
    return {};
}

// a(v,u) by direct quadrature of the FE functions, highest-order rules.
inline double direct_form(const FeMesh& th, FormKind k, FeSpace V, const Eigen::VectorXd& v, const Eigen::VectorXd& u)
{
    const DofMap dm = build_dof_map(th.mesh, th.topo, V);
    double s = 0.0;
    if (k == FormKind::BoundaryMass) {
        const QuadRule1d& r = segment_rule(kMaxSegmentOrder);
        for (int edge : th.topo.bdEdgeIdx) {
            for (int p = 0; p < r.size(); ++p) {
                const EdgePoint ep = point_on_edge(th, edge, r.points[p]);
                const double vv = evaluate_in_element(v, th, dm, ep.elem, ep.lambda).value;
                const double uu = evaluate_in_element(u, th, dm, ep.elem, ep.lambda).value;
                s += th.topo.edgeLength[edge] * r.weight[p] * vv * uu;
            }
        }
        return s;
    }
    const QuadRule2d& r = triangle_rule(kMaxTriangleOrder);
    for (int e = 0; e < th.num_elems(); ++e) {
        for (int p = 0; p < r.size(); ++p) {
            const PointValue pv = evaluate_in_element(v, th, dm, e, r.lambda[p]);
            const PointValue pu = evaluate_in_element(u, th, dm, e, r.lambda[p]);
            double f = 0.0;
            switch (k) {
            case FormKind::Mass: f = pv.value * pu.value; break;
            case FormKind::Stiffness: f = pv.dx * pu.dx + pv.dy * pu.dy; break;
            case FormKind::MixedDx: f = pv.dx * pu.value; break;
            case FormKind::BoundaryMass: break;
            }
            s += th.topo.area[e] * r.weight[p] * f;
        }
    }
    return s;
}

// Unit square h=1/4 with interior vertices moved by a smooth map: 32 affine
// triangles of varying shape.
inline FeMesh distorted_square()
{
    Mesh2d m = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.25);
    for (auto& p : m.node) {
        const double x = p[0];
        const double y = p[1];
        p[0] = x + 0.08 * std::sin(std::numbers::pi * x) * std::sin(2.0 * y);
        p[1] = y + 0.06 * std::sin(std::numbers::pi * y) * std::cos(1.5 * x);
    }
    return FeMesh(std::move(m));
}

// Worst relative mismatch of v'Au against direct quadrature over `pairs` random pairs.
inline double worst_oracle_mismatch(const FeMesh& th, FormKind k, FeSpace V, int pairs, unsigned seed)
{
    const int q = std::min(2 * V.degree() + 2, kMaxTriangleOrder);
    const SparseMatrix A = assemble_kind(th, k, V, q);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const Eigen::VectorXd v = random_vector(static_cast<int>(A.rows()), seed + 2 * i);
        const Eigen::VectorXd u = random_vector(static_cast<int>(A.cols()), seed + 2 * i + 1);
        const double lhs = v.dot(A * u);
        const double rhs = direct_form(th, k, V, v, u);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }
    return worst;
}

} // namespace fem::test
