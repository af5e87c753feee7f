#pragma once

#include "fem/assembly.hpp"
#include "fem/field.hpp"
#include "fem/fespace.hpp"
#include "fem/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fem {

/// Boundary value of one component; empty means the component is free.
using BoundaryValue = std::optional<ScalarField>;

/// Dirichlet data: for each selected boundary region, one optional function
/// per system component. When regions overlap the first listed one decides
/// the value of a shared dof.
struct DirichletSpec {
    std::vector<int> regions;
    std::vector<std::vector<BoundaryValue>> values; // values[r][c]

    /// Same component functions on every listed region.
    [[nodiscard]] static DirichletSpec on(std::vector<int> regions, std::vector<BoundaryValue> components);
    /// Scalar problem, one function per region.
    [[nodiscard]] static DirichletSpec per_region(std::vector<int> regions, std::vector<ScalarField> functions);

    void validate(const BoundaryPartition& partition, std::size_t ncomp) const;
};

/// Global (system) indices of fixed dofs in ascending order, with their values.
struct FixedDofs {
    std::vector<int> index;
    Eigen::VectorXd value;
};

[[nodiscard]] FixedDofs collect_fixed_dofs(const FeMesh& th, std::span<const FeSpace> spaces,
                                           const DirichletSpec& spec);

/// Splits A into free/fixed blocks and factors the free block once, so that
/// several right-hand sides (time steps, Newton updates) reuse it.
class ReducedSolver {
public:
    ReducedSolver(const SparseMatrix& A, std::vector<int> fixed);

    /// Full solution: values at fixed dofs are copied, free dofs solve
    /// A_ff x_f = b_f - A_fc x_c.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b, const Eigen::VectorXd& fixed_values) const;

    [[nodiscard]] int num_free() const { return static_cast<int>(free_.size()); }
    [[nodiscard]] const std::vector<int>& fixed() const { return fixed_; }
    [[nodiscard]] const SparseMatrix& free_block() const { return Aff_; }

private:
    int n_ = 0;
    std::vector<int> fixed_;
    std::vector<int> free_;
    SparseMatrix Aff_;
    SparseMatrix Afc_;
    std::shared_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
};

[[nodiscard]] Eigen::VectorXd apply_dirichlet_and_solve(const SparseMatrix& A, const Eigen::VectorXd& b,
                                                        const FeMesh& th, std::span<const FeSpace> spaces,
                                                        const DirichletSpec& spec);
[[nodiscard]] Eigen::VectorXd apply_dirichlet_and_solve(const AssembledSystem& system, const FeMesh& th,
                                                        const DirichletSpec& spec);

enum class SolverKind { Direct, ConjugateGradient };

/// Sparse LU by default; CG for symmetric positive definite systems.
[[nodiscard]] Eigen::VectorXd solve_sparse(const SparseMatrix& A, const Eigen::VectorXd& b,
                                           SolverKind kind = SolverKind::Direct);

/// ||u - u_h||_{L2}.
[[nodiscard]] double error_L2(const FeMesh& th, FeSpace space, int quad_order, const ScalarField& exact,
                              const Eigen::VectorXd& dofs);
/// |u - u_h|_{H1}.
[[nodiscard]] double error_H1_semi(const FeMesh& th, FeSpace space, int quad_order, const VectorField& exact_grad,
                                   const Eigen::VectorXd& dofs);

/// Least-squares slope of log(err) against log(h).
[[nodiscard]] double fit_rate(std::span<const double> h, std::span<const double> err);

/// Errors per refinement level. `ndof` holds the triangle count of each level.
struct RateReport {
    std::vector<std::string> names;
    std::vector<int> ndof;
    std::vector<double> h;
    std::vector<std::vector<double>> errors; // errors[level][column]

    void add_level(int nt, double hh, std::vector<double> errs);
    [[nodiscard]] std::size_t levels() const { return h.size(); }
    [[nodiscard]] std::vector<double> column(std::size_t c) const;
    /// One fitted slope per error column; needs at least two levels.
    [[nodiscard]] std::vector<double> slopes() const;
};

} // namespace fem
