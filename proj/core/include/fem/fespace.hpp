#pragma once

#include "fem/field.hpp"
#include "fem/mesh.hpp"
#include "fem/quadrature.hpp"
#include "fem/term.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fem {

/// Continuous Lagrange space of degree 1, 2 or 3 on triangles.
class FeSpace {
public:
    constexpr FeSpace() = default;
    explicit FeSpace(int degree);

    /// Accepts "P1", "P2", "P3".
    [[nodiscard]] static FeSpace from_name(std::string_view name);

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] std::string name() const { return "P" + std::to_string(degree_); }
    [[nodiscard]] int local_dofs() const { return (degree_ + 1) * (degree_ + 2) / 2; }
    /// Dofs of one element lying on a single edge (k+1).
    [[nodiscard]] int trace_dofs() const { return degree_ + 1; }

    friend bool operator==(const FeSpace&, const FeSpace&) = default;

private:
    int degree_ = 1;
};

/// Global numbering: vertices, then edge dofs by global edge index (two per edge
/// for P3, ordered from the smaller to the larger endpoint index), then one
/// interior dof per triangle (P3).
struct DofMap {
    FeSpace space;
    int ndofLocal = 0;
    int NNdof = 0;
    std::vector<int> elem2dof; // row-major NT x ndofLocal
    std::vector<Point2> dofPoint;

    [[nodiscard]] std::span<const int> dofs(int e) const
    {
        return {elem2dof.data() + static_cast<std::size_t>(e) * ndofLocal, static_cast<std::size_t>(ndofLocal)};
    }
};

[[nodiscard]] DofMap build_dof_map(const Mesh2d& mesh, const MeshTopology& topo, FeSpace space);

/// Value of every derivative-free local basis function (barycentric form).
/// `forward[i]` tells whether local edge i runs from the smaller to the larger
/// global vertex index; it fixes the P3 edge-dof order.
void eval_basis(FeSpace space, const std::array<double, 3>& lambda, const std::array<bool, 3>& forward,
                std::span<double> out);

/// Partial derivatives d(phi_i)/d(lambda_j), written to out[3*i + j].
void eval_basis_dlambda(FeSpace space, const std::array<double, 3>& lambda, const std::array<bool, 3>& forward,
                        std::span<double> out);

[[nodiscard]] std::array<bool, 3> edge_orientation(const Triangle& t);

/// Gradients of the barycentric coordinates of a triangle (constant per element).
[[nodiscard]] std::array<Point2, 3> barycentric_gradients(const Mesh2d& mesh, int e);

/// NT x ng table of values. Used both for basis tables and coefficient matrices.
using CoefMatrix = Eigen::MatrixXd;
using BasisTable = Eigen::MatrixXd;

/// x and y coordinates of every quadrature point of every element (NT x ng each).
struct QuadPoints {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
};

[[nodiscard]] QuadPoints quadrature_points(const Mesh2d& mesh, const QuadRule2d& rule);

/// Points of a segment rule on each listed edge. Edges are traversed
/// counterclockwise with respect to their first adjacent triangle.
[[nodiscard]] QuadPoints edge_quadrature_points(const FeMesh& th, std::span<const int> edges,
                                                const QuadRule1d& rule);

/// One table per local basis function for tag val, dx or dy. Tag::Grad throws;
/// use tabulate_gradient.
[[nodiscard]] std::vector<BasisTable> tabulate_basis(const Mesh2d& mesh, FeSpace space, Tag tag,
                                                     const QuadRule2d& rule);

/// The (dx, dy) pair of tables.
[[nodiscard]] std::pair<std::vector<BasisTable>, std::vector<BasisTable>>
tabulate_gradient(const Mesh2d& mesh, FeSpace space, const QuadRule2d& rule);

/// Restriction of the 2D basis to boundary edges: the k+1 trace functions of
/// each edge evaluated at segment quadrature points, and their global dofs.
struct TraceTable {
    std::vector<BasisTable> values;          // trace_dofs() tables, NBE x ng
    std::vector<std::vector<int>> dofs;      // per edge, trace_dofs() global indices
};

[[nodiscard]] TraceTable tabulate_trace(const FeMesh& th, const DofMap& dofmap, Tag tag, std::span<const int> edges,
                                        const QuadRule1d& rule);

/// Entries f(dofPoint).
[[nodiscard]] Eigen::VectorXd interpolate_nodal(const ScalarField& f, const FeMesh& th, FeSpace space);

/// Entry (e,p) is the FE function's requested derivative at quadrature point p of element e.
[[nodiscard]] CoefMatrix coef_matrix_from_dofs(const Eigen::VectorXd& dofs, Tag tag, const FeMesh& th, FeSpace space,
                                               int quad_order);
/// Same, with the derivative given as a term string such as "u1.dx".
[[nodiscard]] CoefMatrix coef_matrix_from_dofs(const Eigen::VectorXd& dofs, std::string_view term, const FeMesh& th,
                                               FeSpace space, int quad_order);

/// FE function restricted to edges, evaluated at segment quadrature points.
[[nodiscard]] CoefMatrix edge_matrix_from_dofs(const Eigen::VectorXd& dofs, const FeMesh& th, FeSpace space,
                                               std::span<const int> edges, int quad_order);

/// Scalar data sampled at edge quadrature points.
[[nodiscard]] CoefMatrix coef_matrix_on_edges(const ScalarField& f, const FeMesh& th, std::span<const int> edges,
                                              int quad_order);
/// Vector data contracted with the outward unit normal: f1*n1 + f2*n2.
[[nodiscard]] CoefMatrix coef_matrix_on_edges(const VectorField& f, const FeMesh& th, std::span<const int> edges,
                                              int quad_order);

/// Outward unit normal of a boundary edge (global index).
[[nodiscard]] Point2 outward_normal(const FeMesh& th, int edge);

/// Integral of the FE function over the mesh.
[[nodiscard]] double integrate_fe(const Eigen::VectorXd& dofs, const FeMesh& th, FeSpace space, int quad_order);

/// Value of the FE function at arbitrary points; NaN for points outside the mesh.
[[nodiscard]] std::vector<double> evaluate_at_points(const Eigen::VectorXd& dofs, const FeMesh& th, FeSpace space,
                                                     std::span<const Point2> points);

/// Value and gradient of the FE function inside element e at barycentric point lambda.
struct PointValue {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};
[[nodiscard]] PointValue evaluate_in_element(const Eigen::VectorXd& dofs, const FeMesh& th, const DofMap& dofmap,
                                             int e, const std::array<double, 3>& lambda);

} // namespace fem
