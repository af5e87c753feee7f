#include "fem/problems.hpp"

#include "fem/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fem {

namespace {

constexpr double pi = std::numbers::pi;

struct NamedProblem {
    Problem id;
    const char* name;
};

constexpr NamedProblem kProblems[] = {
    {Problem::Poisson, "poisson"},
    {Problem::ElasticityDisp, "elasticity-disp"},
    {Problem::ElasticityTensor, "elasticity-tensor"},
    {Problem::BiharmonicBlock, "biharmonic-block"},
    {Problem::BiharmonicVector, "biharmonic-vector"},
    {Problem::Stokes, "stokes"},
    {Problem::Heat, "heat"},
    {Problem::NsNewton, "ns-newton"},
};

int quad_order_of(const ProblemSpec& spec, Problem p)
{
    return spec.quad_order > 0 ? spec.quad_order : default_quad_order(p, spec.degree);
}

double penalty_of(const ProblemSpec& spec, Problem p)
{
    return spec.penalty > 0.0 ? spec.penalty : default_penalty(p);
}

double level_h(const ProblemSpec& spec, std::size_t level)
{
    return spec.geometry.base_h() / std::pow(2.0, static_cast<double>(level));
}

// Regions matched by the selectors carry the natural condition.
std::vector<int> natural_edges(const FeMesh& th, std::size_t nsel)
{
    std::vector<int> edges;
    for (std::size_t r = 0; r < nsel && static_cast<int>(r) < th.partition.num_regions(); ++r) {
        const auto& e = th.region_edges(static_cast<int>(r));
        edges.insert(edges.end(), e.begin(), e.end());
    }
    return edges;
}

// The remaining regions are Dirichlet.
std::vector<int> essential_regions(const FeMesh& th, std::size_t nsel)
{
    std::vector<int> r;
    for (int i = static_cast<int>(nsel); i < th.partition.num_regions(); ++i) r.push_back(i);
    return r;
}

std::vector<int> all_regions(const FeMesh& th) { return essential_regions(th, 0); }

Eigen::VectorXd component(const Eigen::VectorXd& U, const std::vector<int>& nn, std::size_t c)
{
    int off = 0;
    for (std::size_t i = 0; i < c; ++i) off += nn[i];
    return U.segment(off, nn[c]);
}

double hypot_sum(double a, double b) { return std::sqrt(a * a + b * b); }

SparseTriples transposed(const SparseTriples& t)
{
    SparseTriples r(t.ncols, t.nrows);
    r.ii = t.jj;
    r.jj = t.ii;
    r.ss = t.ss;
    return r;
}

SparseTriples scaled(SparseTriples t, double s)
{
    t *= s;
    return t;
}

ScalarField first(const VectorField& f)
{
    return [f](double x, double y) { return f(x, y)[0]; };
}

ScalarField second(const VectorField& f)
{
    return [f](double x, double y) { return f(x, y)[1]; };
}

CoefMatrix times(const CoefMatrix& a, const CoefMatrix& b) { return (a.array() * b.array()).matrix(); }

// Coarse labelled mesh refined once; child edges keep their parent's label.
MshData refine_labelled(const MshData& d)
{
    const MeshTopology topo = build_topology(d.mesh);
    const int N = d.mesh.num_nodes();
    MshData r;
    r.mesh = uniform_refine(d.mesh);
    r.vertexLabel = d.vertexLabel;
    r.vertexLabel.resize(r.mesh.node.size(), 0);
    for (int k = 0; k < 4; ++k) r.elemLabel.insert(r.elemLabel.end(), d.elemLabel.begin(), d.elemLabel.end());
    std::map<std::pair<int, int>, int> index;
    for (int k = 0; k < topo.num_edges(); ++k) index[{topo.edge[k][0], topo.edge[k][1]}] = k;
    for (std::size_t i = 0; i < d.edge.size(); ++i) {
        const auto [a, b] = d.edge[i];
        const auto it = index.find({std::min(a, b), std::max(a, b)});
        if (it == index.end()) throw MeshError("labelled edge is not an edge of the mesh");
        const int m = N + it->second;
        r.vertexLabel[m] = d.edgeLabel[i];
        r.edge.push_back({a, m});
        r.edge.push_back({m, b});
        r.edgeLabel.push_back(d.edgeLabel[i]);
        r.edgeLabel.push_back(d.edgeLabel[i]);
    }
    return r;
}

RateReport make_report(std::vector<std::string> names)
{
    RateReport r;
    r.names = std::move(names);
    return r;
}

} // namespace

Problem parse_problem(std::string_view name)
{
    for (const auto& p : kProblems) {
        if (name == p.name) return p.id;
    }
    throw Error("unknown problem '" + std::string(name) + "'");
}

std::string_view to_string(Problem p)
{
    for (const auto& q : kProblems) {
        if (q.id == p) return q.name;
    }
    return "?";
}

const std::vector<std::string>& problem_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& p : kProblems) n.emplace_back(p.name);
        return n;
    }();
    return names;
}

int default_quad_order(Problem p, int degree)
{
    switch (p) {
    case Problem::Stokes:
        return 5;
    case Problem::NsNewton:
        return 7;
    default:
        return degree + 2;
    }
}

double default_penalty(Problem p) { return p == Problem::NsNewton ? 1e-6 : 1e-10; }

Mesh2d Geometry::base_mesh() const
{
    if (msh) {
        msh->mesh.validate();
        return msh->mesh;
    }
    return square_mesh(square, h);
}

double Geometry::base_h() const
{
    if (!msh) return h;
    const MeshTopology topo = build_topology(msh->mesh);
    return *std::max_element(topo.edgeLength.begin(), topo.edgeLength.end());
}

std::vector<FeMesh> build_levels(const Geometry& g, const std::vector<std::string>& bdstr, int levels)
{
    if (levels < 1) throw Error("at least one mesh level is required");
    std::vector<FeMesh> out;
    if (g.msh && bdstr.empty()) {
        MshData d = *g.msh;
        for (int i = 0; i < levels; ++i) {
            if (i > 0) d = refine_labelled(d);
            out.push_back(fe_mesh_from_msh(d));
        }
        return out;
    }
    Mesh2d m = g.base_mesh();
    for (int i = 0; i < levels; ++i) {
        if (i > 0) m = uniform_refine(m);
        out.emplace_back(m, bdstr);
    }
    return out;
}

// ---------------------------------------------------------------- Poisson

PoissonData poisson_default()
{
    PoissonData d;
    d.exact.u = [](double x, double y) { return std::sin(pi * x) * std::cos(pi * y); };
    d.exact.grad = [](double x, double y) {
        return std::array{pi * std::cos(pi * x) * std::cos(pi * y), -pi * std::sin(pi * x) * std::sin(pi * y)};
    };
    d.a = [](double x, double y) { return 1.0 + x * x + y * y; };
    d.c = [](double, double) { return 1.0; };
    d.f = [](double x, double y) {
        const double u = std::sin(pi * x) * std::cos(pi * y);
        const double ux = pi * std::cos(pi * x) * std::cos(pi * y);
        const double uy = -pi * std::sin(pi * x) * std::sin(pi * y);
        const double a = 1.0 + x * x + y * y;
        return 2.0 * pi * pi * a * u - 2.0 * x * ux - 2.0 * y * uy + u;
    };
    d.g_R = [](double x, double y) { return 1.0 + x + y; };
    return d;
}

DriverResult run_poisson(const ProblemSpec& spec, const PoissonData& data)
{
    const FeSpace Vh(spec.degree);
    const int q = quad_order_of(spec, Problem::Poisson);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    DriverResult res;
    res.report = make_report({"||u-u_h||", "|u-u_h|_1"});
    const std::size_t nsel = spec.bdstr.size();
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FeMesh& th = levels[l];
        SparseTriples kk = assemble_scalar_2d(th, VarForm::bilinear({data.a, data.c}, {"v.grad", "v.val"},
                                                                    {"u.grad", "u.val"}),
                                              Vh, Vh, q);
        Eigen::VectorXd ff = assemble_scalar_linear_2d(th, VarForm::linear({data.f}, {"v.val"}), Vh, q);
        const std::vector<int> robin = natural_edges(th, nsel);
        if (!robin.empty()) {
            kk += assemble_scalar_1d(th, robin, VarForm::bilinear({data.g_R}, {"v.val"}, {"u.val"}), Vh, Vh, q);
            const Exact ex = data.exact;
            const ScalarField gR = data.g_R;
            const ScalarField a = data.a;
            const CoefMatrix Cmat1 =
                coef_matrix_on_edges(ScalarField([=](double x, double y) { return gR(x, y) * ex.u(x, y); }), th,
                                     robin, q);
            const CoefMatrix Cmat2 = coef_matrix_on_edges(VectorField([=](double x, double y) {
                                                              const auto g = ex.grad(x, y);
                                                              const double ax = a(x, y);
                                                              return std::array{ax * g[0], ax * g[1]};
                                                          }),
                                                          th, robin, q);
            ff += assemble_scalar_linear_1d(th, robin, VarForm::linear({CoefMatrix(Cmat1 + Cmat2)}, {"v.val"}), Vh,
                                            q);
        }
        const std::vector<FeSpace> spaces{Vh};
        const DirichletSpec bc = DirichletSpec::on(essential_regions(th, nsel), {data.exact.u});
        const Eigen::VectorXd uh = apply_dirichlet_and_solve(compress(kk), ff, th, spaces, bc);
        res.report.add_level(th.num_elems(), level_h(spec, l),
                             {error_L2(th, Vh, q, data.exact.u, uh), error_H1_semi(th, Vh, q, data.exact.grad, uh)});
        if (l + 1 == levels.size()) {
            res.mesh = th;
            res.spaces = spaces;
            res.solution = uh;
            res.NNdofu = component_dofs(th, spaces);
        }
    }
    return res;
}

// ---------------------------------------------------------------- elasticity

ElasticityData elasticity_default()
{
    ElasticityData d;
    d.u1.u = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    d.u1.grad = [](double x, double y) {
        return std::array{pi * std::cos(pi * x) * std::sin(pi * y), pi * std::sin(pi * x) * std::cos(pi * y)};
    };
    d.u2.u = [](double x, double y) { return std::exp(x) * std::cos(y); };
    d.u2.grad = [](double x, double y) { return std::array{std::exp(x) * std::cos(y), -std::exp(x) * std::sin(y)}; };
    const double lambda = d.lambda;
    const double mu = d.mu;
    d.f = [lambda, mu](double x, double y) {
        const double s = std::sin(pi * x) * std::sin(pi * y);
        const double cc = std::cos(pi * x) * std::cos(pi * y);
        const double f1 = 2.0 * mu * pi * pi * s + (lambda + mu) * (pi * pi * s + std::exp(x) * std::sin(y));
        const double f2 = -(lambda + mu) * (pi * pi * cc - std::exp(x) * std::cos(y));
        return std::array{f1, f2};
    };
    return d;
}

std::array<double, 3> elasticity_stress(const ElasticityData& d, double x, double y)
{
    const auto g1 = d.u1.grad(x, y);
    const auto g2 = d.u2.grad(x, y);
    const double div = g1[0] + g2[1];
    return {2.0 * d.mu * g1[0] + d.lambda * div, 2.0 * d.mu * g2[1] + d.lambda * div, d.mu * (g1[1] + g2[0])};
}

SparseMatrix elasticity_displacement_matrix(const FeMesh& th, FeSpace space, double lambda, double mu, int quad_order,
                                            bool block_path)
{
    if (block_path) {
        auto scalar = [&](const char* test, const char* trial) {
            return assemble_scalar_2d(th, VarForm::bilinear({1.0}, {test}, {trial}), space, space, quad_order);
        };
        const SparseTriples A = scalar("v.grad", "u.grad");
        const SparseTriples B1 = scalar("v.dx", "u.dx");
        const SparseTriples B2 = scalar("v.dx", "u.dy");
        const SparseTriples B3 = scalar("v.dy", "u.dx");
        const SparseTriples B4 = scalar("v.dy", "u.dy");
        const int n = A.nrows;
        SparseTriples kk(2 * n, 2 * n);
        kk.append(scaled(A, mu), 0, 0);
        kk.append(scaled(B1, lambda + mu), 0, 0);
        kk.append(scaled(B2, lambda + mu), 0, n);
        kk.append(scaled(B3, lambda + mu), n, 0);
        kk.append(scaled(A, mu), n, n);
        kk.append(scaled(B4, lambda + mu), n, n);
        return compress(kk);
    }
    const std::vector<FeSpace> spaces{space, space};
    const VarForm form = VarForm::bilinear({mu, mu, lambda + mu}, {"v1.grad", "v2.grad", "v1.dx + v2.dy"},
                                           {"u1.grad", "u2.grad", "u1.dx + u2.dy"});
    return compress(assemble_matrix(th, form, spaces, quad_order).triples);
}

SparseMatrix elasticity_tensor_matrix(const FeMesh& th, FeSpace space, double lambda, double mu, int quad_order,
                                      bool short_form)
{
    const std::vector<FeSpace> spaces{space, space};
    VarForm strain;
    VarForm divdiv;
    if (short_form) {
        strain = VarForm::bilinear({1.0, 1.0, 0.5}, {"v1.dx", "v2.dy", "v1.dy + v2.dx"},
                                   {"u1.dx", "u2.dy", "u1.dy + u2.dx"});
        divdiv = VarForm::bilinear({1.0}, {"v1.dx + v2.dy"}, {"u1.dx + u2.dy"});
    } else {
        strain = VarForm::bilinear({1.0, 1.0, 0.5, 0.5, 0.5, 0.5},
                                   {"v1.dx", "v2.dy", "v1.dy", "v1.dy", "v2.dx", "v2.dx"},
                                   {"u1.dx", "u2.dy", "u1.dy", "u2.dx", "u1.dy", "u2.dx"});
        divdiv = VarForm::bilinear({1.0, 1.0, 1.0, 1.0}, {"v1.dx", "v1.dx", "v2.dy", "v2.dy"},
                                   {"u1.dx", "u2.dy", "u1.dx", "u2.dy"});
    }
    SparseTriples A = assemble_matrix(th, strain, spaces, quad_order).triples;
    A *= 2.0 * mu;
    SparseTriples B = assemble_matrix(th, divdiv, spaces, quad_order).triples;
    B *= lambda;
    A += B;
    return compress(A);
}

namespace {

DriverResult elasticity_errors(const ProblemSpec& spec, const std::vector<FeMesh>& levels, const ElasticityData& data,
                               int q, const std::function<Eigen::VectorXd(const FeMesh&)>& solve)
{
    const FeSpace Vh(spec.degree);
    const std::vector<FeSpace> spaces{Vh, Vh};
    DriverResult res;
    res.report = make_report({"||u-u_h||", "|u-u_h|_1"});
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FeMesh& th = levels[l];
        const Eigen::VectorXd U = solve(th);
        const std::vector<int> nn = component_dofs(th, spaces);
        const Eigen::VectorXd u1 = component(U, nn, 0);
        const Eigen::VectorXd u2 = component(U, nn, 1);
        res.report.add_level(th.num_elems(), level_h(spec, l),
                             {hypot_sum(error_L2(th, Vh, q, data.u1.u, u1), error_L2(th, Vh, q, data.u2.u, u2)),
                              hypot_sum(error_H1_semi(th, Vh, q, data.u1.grad, u1),
                                        error_H1_semi(th, Vh, q, data.u2.grad, u2))});
        if (l + 1 == levels.size()) {
            res.mesh = th;
            res.spaces = spaces;
            res.solution = U;
            res.NNdofu = nn;
        }
    }
    return res;
}

} // namespace

DriverResult run_elasticity_displacement(const ProblemSpec& spec, const ElasticityData& data)
{
    const FeSpace Vh(spec.degree);
    const int q = quad_order_of(spec, Problem::ElasticityDisp);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    return elasticity_errors(spec, levels, data, q, [&](const FeMesh& th) {
        const SparseMatrix kk = elasticity_displacement_matrix(th, Vh, data.lambda, data.mu, q, true);
        const Eigen::VectorXd F1 = assemble_scalar_linear_2d(th, VarForm::linear({first(data.f)}, {"v.val"}), Vh, q);
        const Eigen::VectorXd F2 = assemble_scalar_linear_2d(th, VarForm::linear({second(data.f)}, {"v.val"}), Vh, q);
        Eigen::VectorXd ff(F1.size() + F2.size());
        ff << F1, F2;
        const std::vector<FeSpace> spaces{Vh, Vh};
        const DirichletSpec bc = DirichletSpec::on(all_regions(th), {data.u1.u, data.u2.u});
        return apply_dirichlet_and_solve(kk, ff, th, spaces, bc);
    });
}

DriverResult run_elasticity_tensor(const ProblemSpec& spec, const ElasticityData& data)
{
    const FeSpace Vh(spec.degree);
    const int q = quad_order_of(spec, Problem::ElasticityTensor);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    const std::size_t nsel = spec.bdstr.size();
    return elasticity_errors(spec, levels, data, q, [&](const FeMesh& th) {
        const std::vector<FeSpace> spaces{Vh, Vh};
        const SparseMatrix kk = elasticity_tensor_matrix(th, Vh, data.lambda, data.mu, q, true);
        Eigen::VectorXd ff = assemble_vector(th, VarForm::linear({data.f}, {"v.val"}), spaces, q);
        const std::vector<int> neumann = natural_edges(th, nsel);
        if (!neumann.empty()) {
            const ElasticityData d = data;
            const CoefMatrix Cmat1 = coef_matrix_on_edges(VectorField([d](double x, double y) {
                                                              const auto s = elasticity_stress(d, x, y);
                                                              return std::array{s[0], s[2]};
                                                          }),
                                                          th, neumann, q);
            const CoefMatrix Cmat2 = coef_matrix_on_edges(VectorField([d](double x, double y) {
                                                              const auto s = elasticity_stress(d, x, y);
                                                              return std::array{s[2], s[1]};
                                                          }),
                                                          th, neumann, q);
            ff += assemble_boundary_vector(th, neumann, VarForm::linear({ComponentCoefs{{Cmat1, Cmat2}}}, {"v.val"}),
                                           spaces, q);
        }
        const DirichletSpec bc = DirichletSpec::on(essential_regions(th, nsel), {data.u1.u, data.u2.u});
        return apply_dirichlet_and_solve(kk, ff, th, spaces, bc);
    });
}

// ---------------------------------------------------------------- biharmonic

BiharmonicData biharmonic_default()
{
    BiharmonicData d;
    const double s = pi * pi - 1.0;
    d.u.u = [](double x, double y) { return std::exp(x) * std::sin(pi * y); };
    d.u.grad = [](double x, double y) {
        return std::array{std::exp(x) * std::sin(pi * y), pi * std::exp(x) * std::cos(pi * y)};
    };
    d.w.u = [s](double x, double y) { return s * std::exp(x) * std::sin(pi * y); };
    d.w.grad = [s](double x, double y) {
        return std::array{s * std::exp(x) * std::sin(pi * y), s * pi * std::exp(x) * std::cos(pi * y)};
    };
    d.f = [s](double x, double y) { return s * s * std::exp(x) * std::sin(pi * y); };
    return d;
}

AssembledSystem biharmonic_system(const FeMesh& th, FeSpace space, int quad_order, BiharmonicMode mode,
                                  const BiharmonicData& data)
{
    AssembledSystem sys;
    sys.spaces = {space, space};
    sys.NNdofu = component_dofs(th, sys.spaces);
    const std::vector<int>& bd = th.topo.bdEdgeIdx;
    const CoefMatrix dn = coef_matrix_on_edges(data.u.grad, th, bd, quad_order);
    if (mode == BiharmonicMode::Block) {
        const SparseTriples A = scaled(
            assemble_scalar_2d(th, VarForm::bilinear({1.0}, {"v.val"}, {"u.val"}), space, space, quad_order), -1.0);
        const SparseTriples B =
            assemble_scalar_2d(th, VarForm::bilinear({1.0}, {"v.grad"}, {"u.grad"}), space, space, quad_order);
        const int n = A.nrows;
        SparseTriples kk(2 * n, 2 * n);
        kk.append(A, 0, 0);
        kk.append(B, 0, n);
        kk.append(transposed(B), n, 0);
        sys.matrix = compress(kk);
        const Eigen::VectorXd f = assemble_scalar_linear_2d(th, VarForm::linear({data.f}, {"v.val"}), space, quad_order);
        sys.rhs = Eigen::VectorXd::Zero(2 * n);
        sys.rhs.tail(n) = f;
        sys.rhs.head(n) += assemble_scalar_linear_1d(th, bd, VarForm::linear({dn}, {"v.val"}), space, quad_order);
        return sys;
    }
    const VarForm form = VarForm::bilinear({-1.0, 1.0, 1.0}, {"v1.val", "v1.grad", "v2.grad"},
                                           {"u1.val", "u2.grad", "u1.grad"});
    sys.matrix = compress(assemble_matrix(th, form, sys.spaces, quad_order).triples);
    sys.rhs = assemble_vector(th, VarForm::linear({data.f}, {"v2.val"}), sys.spaces, quad_order);
    sys.rhs += assemble_boundary_vector(th, bd, VarForm::linear({dn}, {"v1.val"}), sys.spaces, quad_order);
    return sys;
}

DriverResult run_biharmonic(const ProblemSpec& spec, BiharmonicMode mode, const BiharmonicData& data)
{
    const FeSpace Vh(spec.degree);
    const Problem id = mode == BiharmonicMode::Block ? Problem::BiharmonicBlock : Problem::BiharmonicVector;
    const int q = quad_order_of(spec, id);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    DriverResult res;
    res.report = make_report({"||u-u_h||", "|u-u_h|_1", "||w-w_h||", "|w-w_h|_1"});
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FeMesh& th = levels[l];
        const AssembledSystem sys = biharmonic_system(th, Vh, q, mode, data);
        const DirichletSpec bc = DirichletSpec::on(all_regions(th), {std::nullopt, data.u.u});
        const Eigen::VectorXd U = apply_dirichlet_and_solve(sys, th, bc);
        const Eigen::VectorXd w = component(U, sys.NNdofu, 0);
        const Eigen::VectorXd u = component(U, sys.NNdofu, 1);
        res.report.add_level(th.num_elems(), level_h(spec, l),
                             {error_L2(th, Vh, q, data.u.u, u), error_H1_semi(th, Vh, q, data.u.grad, u),
                              error_L2(th, Vh, q, data.w.u, w), error_H1_semi(th, Vh, q, data.w.grad, w)});
        if (l + 1 == levels.size()) {
            res.mesh = th;
            res.spaces = sys.spaces;
            res.solution = U;
            res.NNdofu = sys.NNdofu;
        }
    }
    return res;
}

// ---------------------------------------------------------------- Stokes

namespace {

// X = x^2 - 2x^3 + x^4 and its derivatives.
std::array<double, 5> quartic(double t)
{
    return {t * t - 2 * t * t * t + t * t * t * t, 2 * t - 6 * t * t + 4 * t * t * t, 2 - 12 * t + 12 * t * t,
            -12 + 24 * t, 24.0};
}

} // namespace

FlowData stokes_default()
{
    FlowData d;
    constexpr double c = 256.0;
    d.u1.u = [](double x, double y) { return -c * quartic(x)[0] * quartic(y)[1]; };
    d.u1.grad = [](double x, double y) {
        const auto X = quartic(x);
        const auto Y = quartic(y);
        return std::array{-c * X[1] * Y[1], -c * X[0] * Y[2]};
    };
    d.u2.u = [](double x, double y) { return c * quartic(x)[1] * quartic(y)[0]; };
    d.u2.grad = [](double x, double y) {
        const auto X = quartic(x);
        const auto Y = quartic(y);
        return std::array{c * X[2] * Y[0], c * X[1] * Y[1]};
    };
    d.p = [](double x, double y) { return -c * quartic(x)[2] * quartic(y)[0]; };
    d.grad_p = [](double x, double y) {
        const auto X = quartic(x);
        const auto Y = quartic(y);
        return std::array{-c * X[3] * Y[0], -c * X[2] * Y[1]};
    };
    d.lap_u = [](double x, double y) {
        const auto X = quartic(x);
        const auto Y = quartic(y);
        return std::array{-c * (X[2] * Y[1] + X[0] * Y[3]), c * (X[3] * Y[0] + X[1] * Y[2])};
    };
    const VectorField lap = d.lap_u;
    const VectorField gp = d.grad_p;
    d.f = [lap, gp](double x, double y) {
        const auto l = lap(x, y);
        const auto g = gp(x, y);
        return std::array{-l[0] + g[0], -l[1] + g[1]};
    };
    return d;
}

AssembledSystem stokes_system(const FeMesh& th, int quad_order, double eps, const FlowData& data)
{
    AssembledSystem sys;
    sys.spaces = {FeSpace(2), FeSpace(2), FeSpace(1)};
    const std::vector<std::string> vstr{"v1", "v2", "q"};
    const std::vector<std::string> ustr{"u1", "u2", "p"};
    const VarForm form = standardize_symbols(
        vstr, ustr,
        VarForm::bilinear({1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -eps},
                          {"v1.grad", "v2.grad", "v1.dx", "v2.dy", "q.val", "q.val", "q.val"},
                          {"u1.grad", "u2.grad", "p.val", "p.val", "u1.dx", "u2.dy", "p.val"}));
    const SystemMatrix m = assemble_matrix(th, form, sys.spaces, quad_order);
    sys.matrix = compress(m.triples);
    sys.NNdofu = m.NNdofu;
    sys.rhs = assemble_vector(th, VarForm::linear({first(data.f), second(data.f)}, {"v1.val", "v2.val"}), sys.spaces,
                              quad_order);
    return sys;
}

namespace {

std::vector<double> flow_errors(const FeMesh& th, const FlowData& data, const Eigen::VectorXd& U,
                                const std::vector<int>& nn, int q)
{
    const FeSpace P2(2);
    const FeSpace P1(1);
    const Eigen::VectorXd u1 = component(U, nn, 0);
    const Eigen::VectorXd u2 = component(U, nn, 1);
    const Eigen::VectorXd p = component(U, nn, 2);
    return {hypot_sum(error_L2(th, P2, q, data.u1.u, u1), error_L2(th, P2, q, data.u2.u, u2)),
            hypot_sum(error_H1_semi(th, P2, q, data.u1.grad, u1), error_H1_semi(th, P2, q, data.u2.grad, u2)),
            error_L2(th, P1, q, data.p, p)};
}

} // namespace

DriverResult run_stokes(const ProblemSpec& spec, const FlowData& data)
{
    const int q = quad_order_of(spec, Problem::Stokes);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    DriverResult res;
    res.report = make_report({"||u-u_h||", "|u-u_h|_1", "||p-p_h||"});
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FeMesh& th = levels[l];
        const AssembledSystem sys = stokes_system(th, q, penalty_of(spec, Problem::Stokes), data);
        const DirichletSpec bc = DirichletSpec::on(all_regions(th), {data.u1.u, data.u2.u, std::nullopt});
        const Eigen::VectorXd U = apply_dirichlet_and_solve(sys, th, bc);
        res.report.add_level(th.num_elems(), level_h(spec, l), flow_errors(th, data, U, sys.NNdofu, q));
        if (l + 1 == levels.size()) {
            res.mesh = th;
            res.spaces = sys.spaces;
            res.solution = U;
            res.NNdofu = sys.NNdofu;
        }
    }
    return res;
}

// ---------------------------------------------------------------- heat

HeatData heat_default()
{
    HeatData d;
    d.u = [](double x, double y, double t) { return std::sin(pi * x) * std::sin(y) * std::exp(-t); };
    d.grad = [](double x, double y, double t) {
        const double e = std::exp(-t);
        return std::array{pi * std::cos(pi * x) * std::sin(y) * e, std::sin(pi * x) * std::cos(y) * e};
    };
    // u_t - Lap u = (-1 + pi^2 + 1) u
    d.f = [](double x, double y, double t) { return pi * pi * std::sin(pi * x) * std::sin(y) * std::exp(-t); };
    return d;
}

DriverResult run_heat(const ProblemSpec& spec, const HeatData& data)
{
    if (!(spec.t_end > 0.0)) throw Error("final time must be positive");
    const FeSpace Vh(spec.degree);
    const int q = quad_order_of(spec, Problem::Heat);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    const std::size_t nsel = spec.bdstr.size();
    const std::vector<FeSpace> spaces{Vh};
    DriverResult res;
    res.report = make_report({"||u-u_h||", "|u-u_h|_1"});
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FeMesh& th = levels[l];
        const double h = level_h(spec, l);
        const double dt0 = spec.dt > 0.0 ? spec.dt : std::pow(h, spec.degree + 1);
        const int nsteps = std::max(1, static_cast<int>(std::lround(spec.t_end / dt0)));
        const double dt = spec.t_end / nsteps;

        const SparseMatrix kk = compress(assemble_scalar_2d(
            th, VarForm::bilinear({1.0 / dt, 1.0}, {"v.val", "v.grad"}, {"u.val", "u.grad"}), Vh, Vh, q));
        const std::vector<int> dregions = essential_regions(th, nsel);
        const std::vector<int> neumann = natural_edges(th, nsel);
        auto at = [](const TimeField& f, double t) { return ScalarField([f, t](double x, double y) { return f(x, y, t); }); };
        const FixedDofs fixed0 = collect_fixed_dofs(th, spaces, DirichletSpec::on(dregions, {at(data.u, 0.0)}));
        const ReducedSolver solver(kk, fixed0.index);

        Eigen::VectorXd uh0 = interpolate_nodal(at(data.u, 0.0), th, Vh);
        double t = 0.0;
        for (int n = 1; n <= nsteps; ++n) {
            t = n * dt;
            Eigen::VectorXd ff = assemble_scalar_linear_2d(th, VarForm::linear({at(data.f, t)}, {"v.val"}), Vh, q);
            ff += assemble_scalar_linear_2d(th, VarForm::linear({FeFunction{Vh, uh0 / dt}}, {"v.val"}), Vh, q);
            if (!neumann.empty()) {
                const TimeVectorField g = data.grad;
                const CoefMatrix Cmat = coef_matrix_on_edges(
                    VectorField([g, t](double x, double y) { return g(x, y, t); }), th, neumann, q);
                ff += assemble_scalar_linear_1d(th, neumann, VarForm::linear({Cmat}, {"v.val"}), Vh, q);
            }
            const FixedDofs fixed = collect_fixed_dofs(th, spaces, DirichletSpec::on(dregions, {at(data.u, t)}));
            uh0 = solver.solve(ff, fixed.value);
        }
        const TimeVectorField g = data.grad;
        res.report.add_level(
            th.num_elems(), h,
            {error_L2(th, Vh, q, at(data.u, t), uh0),
             error_H1_semi(th, Vh, q, VectorField([g, t](double x, double y) { return g(x, y, t); }), uh0)});
        if (l + 1 == levels.size()) {
            res.mesh = th;
            res.spaces = spaces;
            res.solution = uh0;
            res.NNdofu = component_dofs(th, spaces);
            res.steps = nsteps;
        }
    }
    return res;
}

// ---------------------------------------------------------------- Navier-Stokes

FlowData navier_stokes_data(double nu, const FlowData& base)
{
    FlowData d = base;
    const FlowData b = base;
    d.f = [b, nu](double x, double y) {
        const auto l = b.lap_u(x, y);
        const auto gp = b.grad_p(x, y);
        const double u1 = b.u1.u(x, y);
        const double u2 = b.u2.u(x, y);
        const auto g1 = b.u1.grad(x, y);
        const auto g2 = b.u2.grad(x, y);
        return std::array{-nu * l[0] + u1 * g1[0] + u2 * g1[1] + gp[0], -nu * l[1] + u1 * g2[0] + u2 * g2[1] + gp[1]};
    };
    return d;
}

NewtonResult newton_navier_stokes(const FeMesh& th, const FlowData& data, const NewtonOptions& opt,
                                  const Eigen::VectorXd& initial)
{
    const std::vector<FeSpace> spaces{FeSpace(2), FeSpace(2), FeSpace(1)};
    const std::vector<int> nn = component_dofs(th, spaces);
    const int ntot = nn[0] + nn[1] + nn[2];
    if (initial.size() != ntot) throw Error("initial guess has wrong length");
    const double eps = opt.eps;
    const double nu = opt.nu;
    const int q = opt.quad_order;
    const std::vector<std::string> vstr{"v1", "v2", "q"};
    const std::vector<std::string> ustr{"du1", "du2", "dp"};

    const FixedDofs fixed =
        collect_fixed_dofs(th, spaces, DirichletSpec::on(all_regions(th), {data.u1.u, data.u2.u, std::nullopt}));
    NewtonResult res;
    res.solution = initial;
    for (std::size_t i = 0; i < fixed.index.size(); ++i) {
        res.solution[fixed.index[i]] = fixed.value[static_cast<Eigen::Index>(i)];
    }
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fixed.index.size()));
    const CoefMatrix f1 = coef_to_matrix(Coef(first(data.f)), th, q, Domain::Area);
    const CoefMatrix f2 = coef_to_matrix(Coef(second(data.f)), th, q, Domain::Area);

    for (int it = 0; it < opt.max_iter; ++it) {
        const Eigen::VectorXd uh1 = component(res.solution, nn, 0);
        const Eigen::VectorXd uh2 = component(res.solution, nn, 1);
        const Eigen::VectorXd ph = component(res.solution, nn, 2);
        const CoefMatrix u1c = coef_matrix_from_dofs(uh1, "u1.val", th, spaces[0], q);
        const CoefMatrix u2c = coef_matrix_from_dofs(uh2, "u2.val", th, spaces[1], q);
        const CoefMatrix pc = coef_matrix_from_dofs(ph, "p.val", th, spaces[2], q);
        const CoefMatrix u1xc = coef_matrix_from_dofs(uh1, "u1.dx", th, spaces[0], q);
        const CoefMatrix u1yc = coef_matrix_from_dofs(uh1, "u1.dy", th, spaces[0], q);
        const CoefMatrix u2xc = coef_matrix_from_dofs(uh2, "u2.dx", th, spaces[1], q);
        const CoefMatrix u2yc = coef_matrix_from_dofs(uh2, "u2.dy", th, spaces[1], q);

        const VarForm DF = standardize_symbols(
            vstr, ustr,
            VarForm::bilinear(
                {u1xc, u1yc, u2xc, u2yc, u1c, u2c, u1c, u2c, nu, nu, nu, nu, -1.0, -1.0, -1.0, -1.0, -eps},
                {"v1.val", "v1.val", "v2.val", "v2.val", "v1.val", "v1.val", "v2.val", "v2.val", "v1.dx", "v1.dy",
                 "v2.dx", "v2.dy", "v1.dx", "v2.dy", "q.val", "q.val", "q.val"},
                {"du1.val", "du2.val", "du1.val", "du2.val", "du1.dx", "du1.dy", "du2.dx", "du2.dy", "du1.dx",
                 "du1.dy", "du2.dx", "du2.dy", "dp.val", "dp.val", "du1.dx", "du2.dy", "dp.val"}));
        const VarForm F = standardize_symbols(
            vstr, ustr,
            VarForm::linear({CoefMatrix(times(u1c, u1xc) + times(u2c, u1yc) - f1),
                             CoefMatrix(times(u1c, u2xc) + times(u2c, u2yc) - f2), CoefMatrix(nu * u1xc),
                             CoefMatrix(nu * u1yc), CoefMatrix(nu * u2xc), CoefMatrix(nu * u2yc), CoefMatrix(-pc),
                             CoefMatrix(-pc), CoefMatrix(-(u1xc + u2yc)), CoefMatrix(-eps * pc)},
                            {"v1.val", "v2.val", "v1.dx", "v1.dy", "v2.dx", "v2.dy", "v1.dx", "v2.dy", "q.val",
                             "q.val"}));
        const SparseMatrix kk = compress(assemble_matrix(th, DF, spaces, q).triples);
        const Eigen::VectorXd ff = assemble_vector(th, F, spaces, q);
        const ReducedSolver solver(kk, fixed.index);
        const Eigen::VectorXd delta = solver.solve(ff, zero);
        res.solution -= delta;
        const double inc = delta.lpNorm<Eigen::Infinity>();
        res.increments.push_back(inc);
        if (!std::isfinite(inc) || inc > 1e12) {
            throw SolverError("Newton iteration diverged at iterate " + std::to_string(it + 1));
        }
        if (inc < opt.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

DriverResult run_ns_newton(const ProblemSpec& spec, const FlowData& data)
{
    const int q = quad_order_of(spec, Problem::NsNewton);
    const auto levels = build_levels(spec.geometry, spec.bdstr, spec.levels);
    DriverResult res;
    res.report = make_report({"||u-u_h||", "|u-u_h|_1", "||p-p_h||"});
    const std::vector<FeSpace> spaces{FeSpace(2), FeSpace(2), FeSpace(1)};
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FeMesh& th = levels[l];
        const std::vector<int> nn = component_dofs(th, spaces);
        const NewtonOptions opt{spec.nu, q, spec.max_iter, spec.tol, penalty_of(spec, Problem::NsNewton)};
        const NewtonResult nr = newton_navier_stokes(th, data, opt, Eigen::VectorXd::Zero(nn[0] + nn[1] + nn[2]));
        res.report.add_level(th.num_elems(), level_h(spec, l), flow_errors(th, data, nr.solution, nn, q));
        if (l + 1 == levels.size()) {
            res.mesh = th;
            res.spaces = spaces;
            res.solution = nr.solution;
            res.NNdofu = nn;
            res.increments = nr.increments;
        }
    }
    return res;
}

DriverResult run_ns_newton(const ProblemSpec& spec) { return run_ns_newton(spec, navier_stokes_data(spec.nu)); }

DriverResult run_problem(Problem p, const ProblemSpec& spec)
{
    switch (p) {
    case Problem::Poisson:
        return run_poisson(spec);
    case Problem::ElasticityDisp:
        return run_elasticity_displacement(spec);
    case Problem::ElasticityTensor:
        return run_elasticity_tensor(spec);
    case Problem::BiharmonicBlock:
        return run_biharmonic(spec, BiharmonicMode::Block);
    case Problem::BiharmonicVector:
        return run_biharmonic(spec, BiharmonicMode::Vector);
    case Problem::Stokes:
        return run_stokes(spec);
    case Problem::Heat:
        return run_heat(spec);
    case Problem::NsNewton:
        return run_ns_newton(spec);
    }
    throw Error("unknown problem");
}

} // namespace fem
