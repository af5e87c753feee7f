#include "fem_cli/cli.hpp"

#include "fem/error.hpp"
#include "fem/io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fem::cli {

namespace {

ProblemSpec to_spec(const RunConfig& c)
{
    ProblemSpec s;
    s.degree = c.degree;
    s.quad_order = c.quad_order;
    s.levels = c.refine;
    s.bdstr = c.bdstr;
    if (c.mesh) {
        s.geometry.msh = read_freefem_msh(*c.mesh);
    } else {
        s.geometry.square = parse_square(c.square.value_or("0,1,0,1"));
        s.geometry.h = c.h.value_or(0.25);
    }
    s.dt = c.dt;
    s.t_end = c.t_end;
    s.nu = c.nu;
    s.max_iter = c.max_iter;
    s.tol = c.tol;
    return s;
}

int cmd_run(const RunConfig& c, std::ostream& out)
{
    const Problem p = parse_problem(c.problem);
    const DriverResult r = run_problem(p, to_spec(c));
    out << "Problem: " << c.problem;
    if (p != Problem::Stokes && p != Problem::NsNewton) out << "  P" << c.degree;
    out << "  quadOrder " << c.quad_order << '\n';
    emit_table(r.report, out);
    if (p == Problem::Heat) out << "time steps on the finest mesh: " << r.steps << '\n';
    if (p == Problem::NsNewton) {
        out << "Newton increments on the finest mesh:";
        for (double d : r.increments) out << ' ' << format_real(d);
        out << '\n';
    }
    if (c.out) write_results(*c.out, report_table(r.report));
    return 0;
}

int cmd_mesh(const RunConfig& c, std::ostream& out)
{
    const ProblemSpec s = to_spec(c);
    const std::vector<FeMesh> levels = build_levels(s.geometry, s.bdstr, s.levels);
    const FeMesh& th = levels.back();
    out << "N=" << th.num_nodes() << " NT=" << th.num_elems() << " NE=" << th.num_edges() << '\n';
    if (c.info) {
        out << "boundary edges=" << th.topo.bdEdge.size() << '\n';
        for (int r = 0; r < th.partition.num_regions(); ++r) {
            const std::string sel =
                r < static_cast<int>(th.partition.selectors.size()) ? th.partition.selectors[r] : "(rest)";
            out << "region " << r << " [" << sel << "]: " << th.partition.bdEdgeIdxType[r].size() << " edges, "
                << th.partition.bdNodeIdxType[r].size() << " nodes\n";
        }
    }
    if (c.out) {
        MshData d = msh_from_mesh(th.mesh);
        if (th.partition.num_regions() > 1) {
            d.edge.clear();
            d.edgeLabel.clear();
            for (int r = 0; r < th.partition.num_regions(); ++r) {
                for (const auto& e : th.partition.bdEdgeType[r]) {
                    d.edge.push_back(e);
                    d.edgeLabel.push_back(r + 1);
                }
            }
        }
        write_freefem_msh(*c.out, d);
    }
    return 0;
}

int cmd_convert(const RunConfig& c, std::ostream& out)
{
    const MshData d = read_freefem_msh(*c.mesh);
    ResultTable t;
    t.headers = {"x", "y", "label"};
    t.integer_column = {false, false, true};
    const int N = d.mesh.num_nodes();
    Eigen::VectorXd u;
    if (c.solution) {
        u = read_freefem_solution(*c.solution);
        d.mesh.validate();
        const MeshTopology topo = build_topology(d.mesh);
        bool ok = false;
        for (int k = 1; k <= 3; ++k) {
            const DofMap m = build_dof_map(d.mesh, topo, FeSpace(k));
            ok = ok || u.size() == m.NNdof;
        }
        if (!ok) {
            throw IoError("solution length " + std::to_string(u.size()) +
                          " matches no P1/P2/P3 dof count of the mesh");
        }
        t.headers.push_back("u");
        t.integer_column.push_back(false);
    }
    for (int i = 0; i < N; ++i) {
        std::vector<double> row{d.mesh.node[i][0], d.mesh.node[i][1], static_cast<double>(d.vertexLabel[i])};
        if (c.solution) row.push_back(u[i]);
        t.rows.push_back(std::move(row));
    }
    if (c.out) {
        write_results(*c.out, t);
    } else {
        write_results(out, t);
    }
    return 0;
}

} // namespace

std::array<double, 4> parse_square(const std::string& s)
{
    std::array<double, 4> box{};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t end = i < 3 ? s.find(',', pos) : s.size();
        if (end == std::string::npos) throw UsageError("--square expects x0,x1,y0,y1");
        const std::string item = s.substr(pos, end - pos);
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), box[i]);
        if (ec != std::errc() || p != item.data() + item.size() || item.empty()) {
            throw UsageError("--square: malformed number '" + item + "'");
        }
        pos = end + 1;
    }
    if (!(box[0] < box[1]) || !(box[2] < box[3])) throw UsageError("--square needs x0<x1 and y0<y1");
    return box;
}

RunConfig validate(RunConfig c)
{
    if (c.mesh && (c.square || c.h)) throw UsageError("--mesh cannot be combined with --square/--h");
    if (c.degree < 1 || c.degree > 3) {
        throw UsageError("--degree must be 1, 2 or 3 (got " + std::to_string(c.degree) + ")");
    }
    if (c.refine < 1) throw UsageError("--refine must be at least 1");
    if (c.subcommand == "run") {
        Problem p{};
        try {
            p = parse_problem(c.problem);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        if (p == Problem::Stokes || p == Problem::NsNewton) c.degree = 2;
        if (c.quad_order == 0) c.quad_order = default_quad_order(p, c.degree);
        if (c.dt < 0.0) throw UsageError("--dt must be positive");
        if (!(c.t_end > 0.0)) throw UsageError("--t-end must be positive");
        if (!(c.nu > 0.0)) throw UsageError("--nu must be positive");
        if (c.max_iter < 1) throw UsageError("--max-iter must be at least 1");
        if (!(c.tol > 0.0)) throw UsageError("--tol must be positive");
    }
    if (c.quad_order < 0 || c.quad_order > kMaxTriangleOrder) {
        throw UsageError("--quad-order must be in 1.." + std::to_string(kMaxTriangleOrder));
    }
    if (c.square) (void)parse_square(*c.square);
    if (c.h && !(*c.h > 0.0)) throw UsageError("--h must be positive");
    if (c.subcommand == "convert" && !c.mesh) throw UsageError("convert needs --mesh");
    return c;
}

ResultTable report_table(const RateReport& report)
{
    ResultTable t;
    t.headers = {"#Dof", "h"};
    t.headers.insert(t.headers.end(), report.names.begin(), report.names.end());
    t.integer_column.assign(t.headers.size(), false);
    t.integer_column[0] = true;
    for (std::size_t l = 0; l < report.levels(); ++l) {
        std::vector<double> row{static_cast<double>(report.ndof[l]), report.h[l]};
        row.insert(row.end(), report.errors[l].begin(), report.errors[l].end());
        t.rows.push_back(std::move(row));
    }
    if (report.levels() >= 2) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> row{nan, nan};
        const auto s = report.slopes();
        row.insert(row.end(), s.begin(), s.end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit_table(const RateReport& report, std::ostream& sink)
{
    if (report.levels() == 0) throw Error("empty error report");
    const ResultTable t = report_table(report);
    std::vector<std::size_t> width(t.headers.size());
    for (std::size_t c = 0; c < t.headers.size(); ++c) {
        width[c] = std::max<std::size_t>(t.headers[c].size(), 11);
    }
    sink << "Table: Error\n";
    for (std::size_t c = 0; c < t.headers.size(); ++c) sink << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << t.headers[c];
    sink << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const bool rate = r == report.levels();
        for (std::size_t c = 0; c < t.headers.size(); ++c) {
            std::string cell = format_cell(t, c, t.rows[r][c]);
            if (rate && c == 0) cell = "rate";
            sink << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << cell;
        }
        sink << '\n';
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Finite element assembly engine: problem suite, mesh tools and conversions", "fem"};
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1);
    RunConfig c;

    auto add_mesh_flags = [&](CLI::App* s) {
        s->add_option("--mesh", c.mesh, "FreeFEM .msh file");
        s->add_option("--square", c.square, "x0,x1,y0,y1 of a square grid");
        s->add_option("--h", c.h, "grid spacing of the square (default 0.25)");
        s->add_option("--refine", c.refine, "number of mesh levels");
        s->add_option("--bdstr", c.bdstr, "boundary selector, repeatable")->take_all();
        s->add_option("--out", c.out, "output path");
    };

    CLI::App* run = app.add_subcommand("run", "run a problem over refined meshes");
    add_mesh_flags(run);
    run->add_option("--problem", c.problem, "problem id")->check(CLI::IsMember(problem_names()));
    run->add_option("--degree", c.degree, "Lagrange degree 1..3");
    run->add_option("--quad-order", c.quad_order, "triangle quadrature order (default k+2)");
    run->add_option("--dt", c.dt, "time step (heat; default h^(k+1))");
    run->add_option("--t-end", c.t_end, "final time (heat)");
    run->add_option("--nu", c.nu, "viscosity (ns-newton)");
    run->add_option("--max-iter", c.max_iter, "Newton iterations (ns-newton)");
    run->add_option("--tol", c.tol, "Newton increment tolerance (ns-newton)");

    CLI::App* mesh = app.add_subcommand("mesh", "build, refine and describe a mesh");
    add_mesh_flags(mesh);
    mesh->add_flag("--info", c.info, "print boundary regions");

    CLI::App* convert = app.add_subcommand("convert", "FreeFEM mesh (+ solution) to CSV nodes");
    convert->add_option("--mesh", c.mesh, "FreeFEM .msh file")->required();
    convert->add_option("--solution", c.solution, "FreeFEM solution array");
    convert->add_option("--out", c.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? 0 : 2;
    }
    if (run->parsed()) c.subcommand = "run";
    if (mesh->parsed()) c.subcommand = "mesh";
    if (convert->parsed()) c.subcommand = "convert";
    if (c.subcommand == "mesh" && mesh->count("--refine") == 0) c.refine = 1;

    try {
        c = validate(c);
    } catch (const UsageError& e) {
        err << "fem: " << e.what() << '\n';
        return 2;
    }
    try {
        if (c.subcommand == "run") return cmd_run(c, out);
        if (c.subcommand == "mesh") return cmd_mesh(c, out);
        return cmd_convert(c, out);
    } catch (const std::exception& e) {
        err << "fem: " << e.what() << '\n';
        return 1;
    }
}

} // namespace fem::cli
