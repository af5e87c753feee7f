#include "fem/assembly.hpp"
#include "fem/fespace.hpp"
#include "fem/mesh.hpp"
#include "fem/problems.hpp"
#include "fem/quadrature.hpp"
#include "fem/system.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

fem::FeMesh mesh_of(double h)
{
    return fem::FeMesh(fem::square_mesh({0.0, 1.0, 0.0, 1.0}, h));
}

// args: degree, 1/h
void BM_StiffnessAssembly(benchmark::State& state)
{
    const fem::FeSpace V(static_cast<int>(state.range(0)));
    const fem::FeMesh th = mesh_of(1.0 / static_cast<double>(state.range(1)));
    const fem::VarForm form = fem::VarForm::bilinear({1.0}, {"v.grad"}, {"u.grad"});
    for (auto _ : state) {
        benchmark::DoNotOptimize(fem::compress(fem::assemble_scalar_2d(th, form, V, V, 2 * V.degree())));
    }
    state.counters["elements"] = th.num_elems();
    state.counters["elem/s"] =
        benchmark::Counter(static_cast<double>(th.num_elems()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_StiffnessAssembly)->ArgsProduct({{1, 2, 3}, {16, 64}})->Unit(benchmark::kMillisecond);

void BM_VariableCoefficientMass(benchmark::State& state)
{
    const fem::FeSpace V(2);
    const fem::FeMesh th = mesh_of(1.0 / static_cast<double>(state.range(0)));
    const fem::VarForm form =
        fem::VarForm::bilinear({fem::Coef([](double x, double y) { return 1.0 + x * x + y * y; })}, {"v.val"}, {"u.val"});
    for (auto _ : state) {
        benchmark::DoNotOptimize(fem::assemble_scalar_2d(th, form, V, V, 4));
    }
}
BENCHMARK(BM_VariableCoefficientMass)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ElasticityTensorAssembly(benchmark::State& state)
{
    const fem::FeMesh th = mesh_of(1.0 / 32.0);
    const bool short_form = state.range(0) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fem::elasticity_tensor_matrix(th, fem::FeSpace(2), 2.0, 1.0, 4, short_form));
    }
}
BENCHMARK(BM_ElasticityTensorAssembly)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BasisTabulation(benchmark::State& state)
{
    const fem::FeSpace V(static_cast<int>(state.range(0)));
    const fem::FeMesh th = mesh_of(1.0 / 64.0);
    const fem::QuadRule2d& rule = fem::triangle_rule(2 * V.degree());
    for (auto _ : state) {
        benchmark::DoNotOptimize(fem::tabulate_gradient(th.mesh, V, rule));
    }
}
BENCHMARK(BM_BasisTabulation)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Topology(benchmark::State& state)
{
    const fem::Mesh2d m = fem::square_mesh({0.0, 1.0, 0.0, 1.0}, 1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fem::build_topology(m));
    }
}
BENCHMARK(BM_Topology)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PoissonSolve(benchmark::State& state)
{
    const fem::FeSpace V(static_cast<int>(state.range(0)));
    const fem::FeMesh th = mesh_of(1.0 / 32.0);
    const std::vector<fem::FeSpace> spaces{V};
    const fem::SparseMatrix K = fem::compress(
        fem::assemble_scalar_2d(th, fem::VarForm::bilinear({1.0}, {"v.grad"}, {"u.grad"}), V, V, 2 * V.degree()));
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(K.rows());
    const auto spec = fem::DirichletSpec::per_region({0}, {[](double, double) { return 0.0; }});
    for (auto _ : state) {
        benchmark::DoNotOptimize(fem::apply_dirichlet_and_solve(K, b, th, spaces, spec));
    }
}
BENCHMARK(BM_PoissonSolve)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
