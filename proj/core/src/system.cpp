#include "fem/system.hpp"

#include "fem/error.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace fem {

DirichletSpec DirichletSpec::on(std::vector<int> regions, std::vector<BoundaryValue> components)
{
    DirichletSpec s;
    s.values.assign(regions.size(), components);
    s.regions = std::move(regions);
    return s;
}

DirichletSpec DirichletSpec::per_region(std::vector<int> regions, std::vector<ScalarField> functions)
{
    if (regions.size() != functions.size()) {
        throw Error("one boundary function per Dirichlet region expected");
    }
    DirichletSpec s;
    s.regions = std::move(regions);
    for (auto& f : functions) s.values.push_back({BoundaryValue(std::move(f))});
    return s;
}

void DirichletSpec::validate(const BoundaryPartition& partition, std::size_t ncomp) const
{
    if (values.size() != regions.size()) {
        throw Error("Dirichlet data lists " + std::to_string(values.size()) + " function sets for " +
                    std::to_string(regions.size()) + " regions");
    }
    for (std::size_t r = 0; r < regions.size(); ++r) {
        if (regions[r] < 0 || regions[r] >= partition.num_regions()) {
            throw Error("Dirichlet region " + std::to_string(regions[r]) + " out of range (mesh has " +
                        std::to_string(partition.num_regions()) + " boundary regions)");
        }
        if (values[r].size() != ncomp) {
            throw Error("Dirichlet data for region " + std::to_string(regions[r]) + " has " +
                        std::to_string(values[r].size()) + " components, system has " + std::to_string(ncomp));
        }
    }
}

FixedDofs collect_fixed_dofs(const FeMesh& th, std::span<const FeSpace> spaces, const DirichletSpec& spec)
{
    spec.validate(th.partition, spaces.size());
    const std::vector<int> nn = component_dofs(th, spaces);
    const int N = th.num_nodes();
    std::map<int, double> fixed;
    std::map<int, DofMap> maps;
    int offset = 0;
    for (std::size_t c = 0; c < spaces.size(); ++c) {
        const FeSpace sp = spaces[c];
        const int k = sp.degree();
        for (std::size_t r = 0; r < spec.regions.size(); ++r) {
            const BoundaryValue& g = spec.values[r][c];
            if (!g) continue;
            auto it = maps.find(k);
            if (it == maps.end()) it = maps.emplace(k, build_dof_map(th.mesh, th.topo, sp)).first;
            const DofMap& map = it->second;
            auto fix = [&](int d) {
                const Point2& p = map.dofPoint[d];
                fixed.try_emplace(offset + d, (*g)(p[0], p[1]));
            };
            const int region = spec.regions[r];
            for (int v : th.partition.bdNodeIdxType[region]) fix(v);
            for (int e : th.partition.bdEdgeIdxType[region]) {
                for (int j = 0; j < k - 1; ++j) fix(N + (k - 1) * e + j);
            }
        }
        offset += nn[c];
    }
    FixedDofs out;
    out.value.resize(static_cast<Eigen::Index>(fixed.size()));
    Eigen::Index i = 0;
    for (const auto& [d, v] : fixed) {
        out.index.push_back(d);
        out.value[i++] = v;
    }
    return out;
}

ReducedSolver::ReducedSolver(const SparseMatrix& A, std::vector<int> fixed) : n_(static_cast<int>(A.rows())),
                                                                            fixed_(std::move(fixed))
{
    if (A.rows() != A.cols()) throw SolverError("system matrix is not square");
    std::vector<int> pos(static_cast<std::size_t>(n_), -1); // >=0 free slot, <=-2 fixed slot
    for (std::size_t i = 0; i < fixed_.size(); ++i) {
        const int d = fixed_[i];
        if (d < 0 || d >= n_) throw SolverError("fixed dof " + std::to_string(d) + " out of range");
        pos[d] = -2 - static_cast<int>(i);
    }
    for (int d = 0; d < n_; ++d) {
        if (pos[d] == -1) {
            pos[d] = static_cast<int>(free_.size());
            free_.push_back(d);
        }
    }
    std::vector<Eigen::Triplet<double>> ff;
    std::vector<Eigen::Triplet<double>> fc;
    for (int col = 0; col < A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
            const int r = pos[it.row()];
            const int c = pos[it.col()];
            if (r < 0) continue;
            if (c >= 0) {
                ff.emplace_back(r, c, it.value());
            } else {
                fc.emplace_back(r, -2 - c, it.value());
            }
        }
    }
    const auto nf = static_cast<Eigen::Index>(free_.size());
    Aff_.resize(nf, nf);
    Aff_.setFromTriplets(ff.begin(), ff.end());
    Afc_.resize(nf, static_cast<Eigen::Index>(fixed_.size()));
    Afc_.setFromTriplets(fc.begin(), fc.end());
    if (nf == 0) return;
    lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
    lu_->analyzePattern(Aff_);
    lu_->factorize(Aff_);
    if (lu_->info() != Eigen::Success) {
        std::string msg = "free block of the system is singular (" + lu_->lastErrorMessage() + ")";
        if (fixed_.empty()) {
            msg += "; no Dirichlet dof is fixed, so an elliptic problem keeps its constant null space";
        }
        throw SolverError(msg);
    }
}

Eigen::VectorXd ReducedSolver::solve(const Eigen::VectorXd& b, const Eigen::VectorXd& fixed_values) const
{
    if (b.size() != n_) throw SolverError("right-hand side has wrong length");
    if (fixed_values.size() != static_cast<Eigen::Index>(fixed_.size())) {
        throw SolverError("fixed values have wrong length");
    }
    Eigen::VectorXd x(n_);
    for (std::size_t i = 0; i < fixed_.size(); ++i) x[fixed_[i]] = fixed_values[static_cast<Eigen::Index>(i)];
    if (free_.empty()) return x;
    Eigen::VectorXd bf(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t i = 0; i < free_.size(); ++i) bf[static_cast<Eigen::Index>(i)] = b[free_[i]];
    if (!fixed_.empty()) bf -= Afc_ * fixed_values;
    const Eigen::VectorXd xf = lu_->solve(bf);
    if (lu_->info() != Eigen::Success || !xf.allFinite()) throw SolverError("sparse solve failed");
    for (std::size_t i = 0; i < free_.size(); ++i) x[free_[i]] = xf[static_cast<Eigen::Index>(i)];
    return x;
}

Eigen::VectorXd apply_dirichlet_and_solve(const SparseMatrix& A, const Eigen::VectorXd& b, const FeMesh& th,
                                          std::span<const FeSpace> spaces, const DirichletSpec& spec)
{
    const FixedDofs fixed = collect_fixed_dofs(th, spaces, spec);
    const ReducedSolver solver(A, fixed.index);
    return solver.solve(b, fixed.value);
}

Eigen::VectorXd apply_dirichlet_and_solve(const AssembledSystem& system, const FeMesh& th, const DirichletSpec& spec)
{
    return apply_dirichlet_and_solve(system.matrix, system.rhs, th, system.spaces, spec);
}

Eigen::VectorXd solve_sparse(const SparseMatrix& A, const Eigen::VectorXd& b, SolverKind kind)
{
    if (A.rows() != A.cols() || A.rows() != b.size()) throw SolverError("non-conforming linear system");
    if (kind == SolverKind::ConjugateGradient) {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-13);
        cg.compute(A);
        Eigen::VectorXd x = cg.solve(b);
        if (cg.info() != Eigen::Success) throw SolverError("conjugate gradient did not converge");
        return x;
    }
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SolverError("matrix is numerically singular: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) throw SolverError("matrix is numerically singular");
    return x;
}

namespace {

double integrate_rows(const FeMesh& th, const QuadRule2d& rule, const Eigen::MatrixXd& values)
{
    const Eigen::Map<const Eigen::RowVectorXd> w(rule.weight.data(), rule.size());
    const Eigen::VectorXd per_elem = (values.array().rowwise() * w.array()).rowwise().sum();
    double s = 0.0;
    for (int e = 0; e < th.num_elems(); ++e) s += th.topo.area[e] * per_elem[e];
    return s;
}

} // namespace

double error_L2(const FeMesh& th, FeSpace space, int quad_order, const ScalarField& exact,
                const Eigen::VectorXd& dofs)
{
    const QuadRule2d& rule = triangle_rule(quad_order);
    const QuadPoints qp = quadrature_points(th.mesh, rule);
    const CoefMatrix uh = coef_matrix_from_dofs(dofs, Tag::Val, th, space, quad_order);
    Eigen::MatrixXd d2(uh.rows(), uh.cols());
    for (Eigen::Index e = 0; e < uh.rows(); ++e) {
        for (Eigen::Index p = 0; p < uh.cols(); ++p) {
            const double d = exact(qp.x(e, p), qp.y(e, p)) - uh(e, p);
            d2(e, p) = d * d;
        }
    }
    return std::sqrt(integrate_rows(th, rule, d2));
}

double error_H1_semi(const FeMesh& th, FeSpace space, int quad_order, const VectorField& exact_grad,
                     const Eigen::VectorXd& dofs)
{
    const QuadRule2d& rule = triangle_rule(quad_order);
    const QuadPoints qp = quadrature_points(th.mesh, rule);
    const CoefMatrix ux = coef_matrix_from_dofs(dofs, Tag::Dx, th, space, quad_order);
    const CoefMatrix uy = coef_matrix_from_dofs(dofs, Tag::Dy, th, space, quad_order);
    Eigen::MatrixXd d2(ux.rows(), ux.cols());
    for (Eigen::Index e = 0; e < ux.rows(); ++e) {
        for (Eigen::Index p = 0; p < ux.cols(); ++p) {
            const auto g = exact_grad(qp.x(e, p), qp.y(e, p));
            const double dx = g[0] - ux(e, p);
            const double dy = g[1] - uy(e, p);
            d2(e, p) = dx * dx + dy * dy;
        }
    }
    return std::sqrt(integrate_rows(th, rule, d2));
}

double fit_rate(std::span<const double> h, std::span<const double> err)
{
    if (h.size() != err.size()) throw Error("rate fit needs as many errors as mesh sizes");
    if (h.size() < 2) throw Error("rate fit needs at least two levels");
    const auto n = static_cast<double>(h.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(err[i] > 0.0)) throw Error("rate fit needs positive mesh sizes and errors");
        const double x = std::log(h[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw Error("rate fit needs distinct mesh sizes");
    return (n * sxy - sx * sy) / den;
}

void RateReport::add_level(int nt, double hh, std::vector<double> errs)
{
    if (errs.size() != names.size()) throw Error("error row does not match the report columns");
    ndof.push_back(nt);
    h.push_back(hh);
    errors.push_back(std::move(errs));
}

std::vector<double> RateReport::column(std::size_t c) const
{
    std::vector<double> col;
    for (const auto& row : errors) col.push_back(row.at(c));
    return col;
}

std::vector<double> RateReport::slopes() const
{
    std::vector<double> s;
    for (std::size_t c = 0; c < names.size(); ++c) s.push_back(fit_rate(h, column(c)));
    return s;
}

} // namespace fem
