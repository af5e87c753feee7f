#pragma once

#include "fem/assembly.hpp"
#include "fem/field.hpp"
#include "fem/io.hpp"
#include "fem/mesh.hpp"
#include "fem/system.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fem {

enum class Problem { Poisson, ElasticityDisp, ElasticityTensor, BiharmonicBlock, BiharmonicVector, Stokes, Heat, NsNewton };

[[nodiscard]] Problem parse_problem(std::string_view name);
[[nodiscard]] std::string_view to_string(Problem p);
[[nodiscard]] const std::vector<std::string>& problem_names();

/// quadOrder used when none is given: k+2, 5 for Stokes, 7 for Newton.
[[nodiscard]] int default_quad_order(Problem p, int degree);
/// Pressure penalty used when none is given: 1e-10 for Stokes, 1e-6 for Newton.
[[nodiscard]] double default_penalty(Problem p);

/// Where the meshes come from. The coarsest level is either a square grid
/// or a .msh file; finer levels are uniform refinements. With a .msh file
/// and no selectors the boundary regions follow the file's edge labels.
struct Geometry {
    std::array<double, 4> square{0.0, 1.0, 0.0, 1.0};
    double h = 0.25;
    std::optional<MshData> msh;

    [[nodiscard]] Mesh2d base_mesh() const;
    /// Mesh size of the coarsest level: h for a square grid, longest edge otherwise.
    [[nodiscard]] double base_h() const;
};

/// Level meshes with their boundary partitions.
[[nodiscard]] std::vector<FeMesh> build_levels(const Geometry& g, const std::vector<std::string>& bdstr, int levels);

struct ProblemSpec {
    int degree = 1;
    int quad_order = 0; // 0: default for the problem
    int levels = 5;
    std::vector<std::string> bdstr;
    Geometry geometry;
    // heat
    double t_end = 0.1;
    double dt = 0.0; // 0: h^(k+1) per level
    // Newton
    double nu = 1.0;
    int max_iter = 15;
    double tol = 1e-8;
    double penalty = 0.0; // 0: default for the problem
};

/// Finest-level output of a driver plus the error table over all levels.
struct DriverResult {
    RateReport report;
    FeMesh mesh;
    std::vector<FeSpace> spaces;
    Eigen::VectorXd solution;
    std::vector<int> NNdofu;
    std::vector<double> increments; // Newton only
    int steps = 0;                  // heat only
};

/// Scalar field with its gradient, for manufactured solutions.
struct Exact {
    ScalarField u;
    VectorField grad;
};

// -- Poisson: -div(a grad u) + c u = f, Robin g_R u + a du/dn = g_N on the selector
// regions, Dirichlet on the rest.
struct PoissonData {
    Exact exact;
    ScalarField a;
    ScalarField c;
    ScalarField f;
    ScalarField g_R;
};
[[nodiscard]] PoissonData poisson_default();
[[nodiscard]] DriverResult run_poisson(const ProblemSpec& spec, const PoissonData& data = poisson_default());

// -- Linear elasticity with Lame constants.
struct ElasticityData {
    double lambda = 2.0;
    double mu = 1.0;
    Exact u1;
    Exact u2;
    VectorField f;
};
[[nodiscard]] ElasticityData elasticity_default();
/// Stress components (s11, s22, s12) of the exact solution.
[[nodiscard]] std::array<double, 3> elasticity_stress(const ElasticityData& d, double x, double y);

/// mu*A + (lambda+mu)*B blocks assembled per scalar pair, or the same
/// bilinear form through the vector assembler.
[[nodiscard]] SparseMatrix elasticity_displacement_matrix(const FeMesh& th, FeSpace space, double lambda, double mu,
                                                          int quad_order, bool block_path);
/// 2*mu*eps:eps + lambda*div*div, from the short form with '+' sums or
/// from its fully expanded six-entry equivalent.
[[nodiscard]] SparseMatrix elasticity_tensor_matrix(const FeMesh& th, FeSpace space, double lambda, double mu,
                                                    int quad_order, bool short_form);
[[nodiscard]] DriverResult run_elasticity_displacement(const ProblemSpec& spec,
                                                       const ElasticityData& data = elasticity_default());
[[nodiscard]] DriverResult run_elasticity_tensor(const ProblemSpec& spec,
                                                 const ElasticityData& data = elasticity_default());

// -- Biharmonic in mixed form: w = -Lap u, -Lap w = f, u and du/dn given.
struct BiharmonicData {
    Exact u;
    Exact w;
    ScalarField f;
};
[[nodiscard]] BiharmonicData biharmonic_default();

enum class BiharmonicMode { Block, Vector };
/// Unknown ordering [w; u] in both modes.
[[nodiscard]] AssembledSystem biharmonic_system(const FeMesh& th, FeSpace space, int quad_order, BiharmonicMode mode,
                                                const BiharmonicData& data);
[[nodiscard]] DriverResult run_biharmonic(const ProblemSpec& spec, BiharmonicMode mode,
                                          const BiharmonicData& data = biharmonic_default());

// -- Stokes with Taylor-Hood spaces and a small pressure penalty.
struct FlowData {
    Exact u1;
    Exact u2;
    ScalarField p;
    VectorField grad_p;
    VectorField lap_u; // componentwise Laplacian of the velocity
    VectorField f;
};
[[nodiscard]] FlowData stokes_default();
[[nodiscard]] AssembledSystem stokes_system(const FeMesh& th, int quad_order, double eps, const FlowData& data);
[[nodiscard]] DriverResult run_stokes(const ProblemSpec& spec, const FlowData& data = stokes_default());

// -- Heat equation, backward Euler.
using TimeField = std::function<double(double, double, double)>;
using TimeVectorField = std::function<std::array<double, 2>(double, double, double)>;
struct HeatData {
    TimeField u;
    TimeVectorField grad;
    TimeField f;
};
[[nodiscard]] HeatData heat_default();
[[nodiscard]] DriverResult run_heat(const ProblemSpec& spec, const HeatData& data = heat_default());

// -- Steady Navier-Stokes by Newton's method.
/// Same velocity and pressure with f = -nu Lap u + (u.grad)u + grad p.
[[nodiscard]] FlowData navier_stokes_data(double nu, const FlowData& base = stokes_default());

struct NewtonResult {
    Eigen::VectorXd solution;
    std::vector<double> increments; // max-norm of every update
    bool converged = false;
};
/// Newton iteration from `initial` (whose boundary velocity is overwritten by
/// the exact data). Throws SolverError when the increments blow up.
struct NewtonOptions {
    double nu = 1.0;
    int quad_order = 7;
    int max_iter = 15;
    double tol = 1e-8;
    double eps = 1e-6; // pressure penalty
};
[[nodiscard]] NewtonResult newton_navier_stokes(const FeMesh& th, const FlowData& data, const NewtonOptions& opt,
                                                const Eigen::VectorXd& initial);
[[nodiscard]] DriverResult run_ns_newton(const ProblemSpec& spec, const FlowData& data);
[[nodiscard]] DriverResult run_ns_newton(const ProblemSpec& spec);

/// Runs a problem with its default manufactured data.
[[nodiscard]] DriverResult run_problem(Problem p, const ProblemSpec& spec);

} // namespace fem
