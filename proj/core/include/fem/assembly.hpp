#pragma once

#include "fem/fespace.hpp"
#include "fem/mesh.hpp"
#include "fem/vform.hpp"

#include <Eigen/Sparse>

#include <span>
#include <vector>

namespace fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uncompressed sparse index (ii, jj, ss); duplicates add up on compression.
struct SparseTriples {
    std::vector<int> ii;
    std::vector<int> jj;
    std::vector<double> ss;
    int nrows = 0;
    int ncols = 0;

    SparseTriples() = default;
    SparseTriples(int rows, int cols) : nrows(rows), ncols(cols) {}

    [[nodiscard]] std::size_t size() const { return ss.size(); }
    void push(int i, int j, double s)
    {
        ii.push_back(i);
        jj.push_back(j);
        ss.push_back(s);
    }
    /// Appends `other` shifted by the given offsets; the shape is left unchanged.
    void append(const SparseTriples& other, int row_offset = 0, int col_offset = 0);
    /// Appends a contribution of the same shape.
    SparseTriples& operator+=(const SparseTriples& other);
    /// Scales every value.
    SparseTriples& operator*=(double s);
};

/// Sums duplicates; entries are stored in a fixed column-major order.
[[nodiscard]] SparseMatrix compress(const SparseTriples& t);

/// Scalar bilinear form on the area; test and trial may live in different
/// spaces. Symbols are ignored: every entry couples the test to the trial function.
[[nodiscard]] SparseTriples assemble_scalar_2d(const FeMesh& th, const VarForm& form, FeSpace test, FeSpace trial,
                                               int quad_order);
[[nodiscard]] Eigen::VectorXd assemble_scalar_linear_2d(const FeMesh& th, const VarForm& form, FeSpace test,
                                                        int quad_order);

/// Same kernel over the listed boundary edges (global edge indices), with edge
/// length as measure and trace basis tables. An empty edge list gives zero.
[[nodiscard]] SparseTriples assemble_scalar_1d(const FeMesh& th, std::span<const int> edges, const VarForm& form,
                                               FeSpace test, FeSpace trial, int quad_order);
[[nodiscard]] Eigen::VectorXd assemble_scalar_linear_1d(const FeMesh& th, std::span<const int> edges,
                                                        const VarForm& form, FeSpace test, int quad_order);

/// Multi-component bilinear form. Symbols must be standard (v1.., u1..; plain
/// v/u for one component). Block (i,j) collects every entry pairing v_i with
/// u_j and is shifted by the dof counts of the preceding components.
struct SystemMatrix {
    SparseTriples triples;
    std::vector<int> NNdofu;
};

[[nodiscard]] std::vector<int> component_dofs(const FeMesh& th, std::span<const FeSpace> spaces);

[[nodiscard]] SystemMatrix assemble_matrix(const FeMesh& th, const VarForm& form, std::span<const FeSpace> spaces,
                                           int quad_order);
[[nodiscard]] SystemMatrix assemble_boundary_matrix(const FeMesh& th, std::span<const int> edges, const VarForm& form,
                                                    std::span<const FeSpace> spaces, int quad_order);

/// Multi-component linear form; component vectors are concatenated. Test
/// 'v.val' with a vector coefficient expands to one entry per component.
[[nodiscard]] Eigen::VectorXd assemble_vector(const FeMesh& th, const VarForm& form, std::span<const FeSpace> spaces,
                                              int quad_order);
[[nodiscard]] Eigen::VectorXd assemble_boundary_vector(const FeMesh& th, std::span<const int> edges,
                                                       const VarForm& form, std::span<const FeSpace> spaces,
                                                       int quad_order);

/// Sparse matrix, right-hand side and per-component dof counts.
struct AssembledSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> NNdofu;
    std::vector<FeSpace> spaces;
};

} // namespace fem
