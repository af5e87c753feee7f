#include "fem/fespace.hpp"

#include "fem/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fem {

FeSpace::FeSpace(int degree) : degree_(degree)
{
    if (degree < 1 || degree > 3) {
        throw Error("unsupported Lagrange degree " + std::to_string(degree) + " (supported: 1..3)");
    }
}

FeSpace FeSpace::from_name(std::string_view name)
{
    if (name == "P1") return FeSpace(1);
    if (name == "P2") return FeSpace(2);
    if (name == "P3") return FeSpace(3);
    throw Error("unknown finite element space '" + std::string(name) + "' (expected P1, P2 or P3)");
}

DofMap build_dof_map(const Mesh2d& mesh, const MeshTopology& topo, FeSpace space)
{
    const int n = mesh.num_nodes();
    const int ne = topo.num_edges();
    const int nt = mesh.num_elems();
    const int k = space.degree();

    DofMap map;
    map.space = space;
    map.ndofLocal = space.local_dofs();
    map.NNdof = k == 1 ? n : (k == 2 ? n + ne : n + 2 * ne + nt);
    map.elem2dof.resize(static_cast<std::size_t>(nt) * map.ndofLocal);

    for (int e = 0; e < nt; ++e) {
        int* row = map.elem2dof.data() + static_cast<std::size_t>(e) * map.ndofLocal;
        const auto& t = mesh.elem[e];
        row[0] = t[0];
        row[1] = t[1];
        row[2] = t[2];
        if (k == 2) {
            for (int i = 0; i < 3; ++i) {
                row[3 + i] = n + topo.elem2edge[e][i];
            }
        } else if (k == 3) {
            // local pair (3+2i, 4+2i) is always ordered along the global edge direction
            for (int i = 0; i < 3; ++i) {
                const int g = topo.elem2edge[e][i];
                row[3 + 2 * i] = n + 2 * g;
                row[4 + 2 * i] = n + 2 * g + 1;
            }
            row[9] = n + 2 * ne + e;
        }
    }

    map.dofPoint.reserve(static_cast<std::size_t>(map.NNdof));
    map.dofPoint = mesh.node;
    for (const auto& [a, b] : topo.edge) {
        const Point2& p = mesh.node[a];
        const Point2& q = mesh.node[b];
        if (k == 2) {
            map.dofPoint.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])});
        } else if (k == 3) {
            map.dofPoint.push_back({(2.0 * p[0] + q[0]) / 3.0, (2.0 * p[1] + q[1]) / 3.0});
            map.dofPoint.push_back({(p[0] + 2.0 * q[0]) / 3.0, (p[1] + 2.0 * q[1]) / 3.0});
        }
    }
    if (k == 3) {
        for (const auto& t : mesh.elem) {
            const Point2& a = mesh.node[t[0]];
            const Point2& b = mesh.node[t[1]];
            const Point2& c = mesh.node[t[2]];
            map.dofPoint.push_back({(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0});
        }
    }
    return map;
}

std::array<bool, 3> edge_orientation(const Triangle& t)
{
    return {t[1] < t[2], t[2] < t[0], t[0] < t[1]};
}

void eval_basis(FeSpace space, const std::array<double, 3>& l, const std::array<bool, 3>& forward,
                std::span<double> out)
{
    switch (space.degree()) {
    case 1:
        out[0] = l[0];
        out[1] = l[1];
        out[2] = l[2];
        return;
    case 2:
        for (int i = 0; i < 3; ++i) {
            out[i] = l[i] * (2.0 * l[i] - 1.0);
            out[3 + i] = 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
        }
        return;
    default:
        for (int i = 0; i < 3; ++i) {
            out[i] = 0.5 * l[i] * (3.0 * l[i] - 1.0) * (3.0 * l[i] - 2.0);
            int a = (i + 1) % 3;
            int b = (i + 2) % 3;
            if (!forward[i]) std::swap(a, b);
            // first dof of the pair sits next to vertex a
            out[3 + 2 * i] = 4.5 * l[a] * l[b] * (3.0 * l[a] - 1.0);
            out[4 + 2 * i] = 4.5 * l[a] * l[b] * (3.0 * l[b] - 1.0);
        }
        out[9] = 27.0 * l[0] * l[1] * l[2];
        return;
    }
}

void eval_basis_dlambda(FeSpace space, const std::array<double, 3>& l, const std::array<bool, 3>& forward,
                        std::span<double> out)
{
    std::fill(out.begin(), out.begin() + 3 * space.local_dofs(), 0.0);
    auto d = [&](int i, int j) -> double& { return out[static_cast<std::size_t>(3 * i + j)]; };
    switch (space.degree()) {
    case 1:
        d(0, 0) = d(1, 1) = d(2, 2) = 1.0;
        return;
    case 2:
        for (int i = 0; i < 3; ++i) {
            const int a = (i + 1) % 3;
            const int b = (i + 2) % 3;
            d(i, i) = 4.0 * l[i] - 1.0;
            d(3 + i, a) = 4.0 * l[b];
            d(3 + i, b) = 4.0 * l[a];
        }
        return;
    default:
        for (int i = 0; i < 3; ++i) {
            d(i, i) = 0.5 * (27.0 * l[i] * l[i] - 18.0 * l[i] + 2.0);
            int a = (i + 1) % 3;
            int b = (i + 2) % 3;
            if (!forward[i]) std::swap(a, b);
            d(3 + 2 * i, a) = 4.5 * l[b] * (6.0 * l[a] - 1.0);
            d(3 + 2 * i, b) = 4.5 * l[a] * (3.0 * l[a] - 1.0);
            d(4 + 2 * i, b) = 4.5 * l[a] * (6.0 * l[b] - 1.0);
            d(4 + 2 * i, a) = 4.5 * l[b] * (3.0 * l[b] - 1.0);
        }
        d(9, 0) = 27.0 * l[1] * l[2];
        d(9, 1) = 27.0 * l[0] * l[2];
        d(9, 2) = 27.0 * l[0] * l[1];
        return;
    }
}

std::array<Point2, 3> barycentric_gradients(const Mesh2d& mesh, int e)
{
    const auto& t = mesh.elem[e];
    const Point2& z0 = mesh.node[t[0]];
    const Point2& z1 = mesh.node[t[1]];
    const Point2& z2 = mesh.node[t[2]];
    const double twice_area = (z1[0] - z0[0]) * (z2[1] - z0[1]) - (z1[1] - z0[1]) * (z2[0] - z0[0]);
    return {Point2{(z1[1] - z2[1]) / twice_area, (z2[0] - z1[0]) / twice_area},
            Point2{(z2[1] - z0[1]) / twice_area, (z0[0] - z2[0]) / twice_area},
            Point2{(z0[1] - z1[1]) / twice_area, (z1[0] - z0[0]) / twice_area}};
}

QuadPoints quadrature_points(const Mesh2d& mesh, const QuadRule2d& rule)
{
    const int nt = mesh.num_elems();
    const int ng = rule.size();
    QuadPoints pts{Eigen::MatrixXd(nt, ng), Eigen::MatrixXd(nt, ng)};
    for (int e = 0; e < nt; ++e) {
        const auto& t = mesh.elem[e];
        for (int p = 0; p < ng; ++p) {
            const auto& l = rule.lambda[p];
            pts.x(e, p) = l[0] * mesh.node[t[0]][0] + l[1] * mesh.node[t[1]][0] + l[2] * mesh.node[t[2]][0];
            pts.y(e, p) = l[0] * mesh.node[t[0]][1] + l[1] * mesh.node[t[1]][1] + l[2] * mesh.node[t[2]][1];
        }
    }
    return pts;
}

namespace {

struct EdgeFrame {
    int elem;
    int local;
    int a; // local vertex at s = 0
    int b; // local vertex at s = 1
};

EdgeFrame edge_frame(const FeMesh& th, int edge)
{
    if (edge < 0 || edge >= th.num_edges()) {
        throw MeshError("edge index " + std::to_string(edge) + " out of range");
    }
    const int e = th.topo.edge2elem[edge][0];
    const int i = th.topo.edge2local[edge][0];
    return {e, i, (i + 1) % 3, (i + 2) % 3};
}

} // namespace

QuadPoints edge_quadrature_points(const FeMesh& th, std::span<const int> edges, const QuadRule1d& rule)
{
    const int nbe = static_cast<int>(edges.size());
    const int ng = rule.size();
    QuadPoints pts{Eigen::MatrixXd(nbe, ng), Eigen::MatrixXd(nbe, ng)};
    for (int r = 0; r < nbe; ++r) {
        const EdgeFrame f = edge_frame(th, edges[r]);
        const Point2& za = th.mesh.node[th.mesh.elem[f.elem][f.a]];
        const Point2& zb = th.mesh.node[th.mesh.elem[f.elem][f.b]];
        for (int p = 0; p < ng; ++p) {
            const double s = rule.points[p];
            pts.x(r, p) = (1.0 - s) * za[0] + s * zb[0];
            pts.y(r, p) = (1.0 - s) * za[1] + s * zb[1];
        }
    }
    return pts;
}

std::vector<BasisTable> tabulate_basis(const Mesh2d& mesh, FeSpace space, Tag tag, const QuadRule2d& rule)
{
    if (tag == Tag::Grad) {
        throw Error("tabulate_basis: 'grad' yields two tables; use tabulate_gradient");
    }
    const int nt = mesh.num_elems();
    const int ng = rule.size();
    const int nd = space.local_dofs();
    std::vector<BasisTable> tables(static_cast<std::size_t>(nd), BasisTable(nt, ng));
    std::array<double, 30> buf{};
    for (int e = 0; e < nt; ++e) {
        const auto fwd = edge_orientation(mesh.elem[e]);
        if (tag == Tag::Val) {
            for (int p = 0; p < ng; ++p) {
                eval_basis(space, rule.lambda[p], fwd, buf);
                for (int i = 0; i < nd; ++i) tables[i](e, p) = buf[i];
            }
            continue;
        }
        const auto grad = barycentric_gradients(mesh, e);
        const int comp = tag == Tag::Dx ? 0 : 1;
        for (int p = 0; p < ng; ++p) {
            eval_basis_dlambda(space, rule.lambda[p], fwd, buf);
            for (int i = 0; i < nd; ++i) {
                tables[i](e, p) = buf[3 * i] * grad[0][comp] + buf[3 * i + 1] * grad[1][comp] +
                                  buf[3 * i + 2] * grad[2][comp];
            }
        }
    }
    return tables;
}

std::pair<std::vector<BasisTable>, std::vector<BasisTable>>
tabulate_gradient(const Mesh2d& mesh, FeSpace space, const QuadRule2d& rule)
{
    return {tabulate_basis(mesh, space, Tag::Dx, rule), tabulate_basis(mesh, space, Tag::Dy, rule)};
}

namespace {

// Local dofs of element-edge `local` in the order: start vertex, end vertex, edge dofs.
std::vector<int> trace_local_dofs(FeSpace space, int local, int a, int b)
{
    std::vector<int> ids{a, b};
    if (space.degree() == 2) {
        ids.push_back(3 + local);
    } else if (space.degree() == 3) {
        ids.push_back(3 + 2 * local);
        ids.push_back(4 + 2 * local);
    }
    return ids;
}

} // namespace

TraceTable tabulate_trace(const FeMesh& th, const DofMap& dofmap, Tag tag, std::span<const int> edges,
                          const QuadRule1d& rule)
{
    if (tag == Tag::Grad) {
        throw Error("tabulate_trace: 'grad' is not a scalar tag");
    }
    const FeSpace space = dofmap.space;
    const int nbe = static_cast<int>(edges.size());
    const int ng = rule.size();
    const int nt = space.trace_dofs();
    TraceTable out;
    out.values.assign(static_cast<std::size_t>(nt), BasisTable(nbe, ng));
    out.dofs.resize(static_cast<std::size_t>(nbe));
    std::array<double, 30> buf{};
    for (int r = 0; r < nbe; ++r) {
        const EdgeFrame f = edge_frame(th, edges[r]);
        const auto fwd = edge_orientation(th.mesh.elem[f.elem]);
        const auto ids = trace_local_dofs(space, f.local, f.a, f.b);
        const auto eldofs = dofmap.dofs(f.elem);
        for (int j = 0; j < nt; ++j) out.dofs[r].push_back(eldofs[ids[j]]);
        const auto grad = barycentric_gradients(th.mesh, f.elem);
        for (int p = 0; p < ng; ++p) {
            std::array<double, 3> l{};
            l[f.a] = 1.0 - rule.points[p];
            l[f.b] = rule.points[p];
            if (tag == Tag::Val) {
                eval_basis(space, l, fwd, buf);
                for (int j = 0; j < nt; ++j) out.values[j](r, p) = buf[ids[j]];
            } else {
                const int comp = tag == Tag::Dx ? 0 : 1;
                eval_basis_dlambda(space, l, fwd, buf);
                for (int j = 0; j < nt; ++j) {
                    const int i = ids[j];
                    out.values[j](r, p) = buf[3 * i] * grad[0][comp] + buf[3 * i + 1] * grad[1][comp] +
                                          buf[3 * i + 2] * grad[2][comp];
                }
            }
        }
    }
    return out;
}

Eigen::VectorXd interpolate_nodal(const ScalarField& f, const FeMesh& th, FeSpace space)
{
    const DofMap map = build_dof_map(th.mesh, th.topo, space);
    Eigen::VectorXd v(map.NNdof);
    for (int i = 0; i < map.NNdof; ++i) {
        v[i] = f(map.dofPoint[i][0], map.dofPoint[i][1]);
    }
    return v;
}

CoefMatrix coef_matrix_from_dofs(const Eigen::VectorXd& dofs, Tag tag, const FeMesh& th, FeSpace space,
                                 int quad_order)
{
    if (tag == Tag::Grad) {
        throw Error("coef_matrix_from_dofs: 'grad' is not a scalar tag");
    }
    const DofMap map = build_dof_map(th.mesh, th.topo, space);
    if (dofs.size() != map.NNdof) {
        throw Error("coef_matrix_from_dofs: dof vector has length " + std::to_string(dofs.size()) + ", expected " +
                    std::to_string(map.NNdof));
    }
    const QuadRule2d& rule = triangle_rule(quad_order);
    const auto tables = tabulate_basis(th.mesh, space, tag, rule);
    CoefMatrix c = CoefMatrix::Zero(th.num_elems(), rule.size());
    for (int e = 0; e < th.num_elems(); ++e) {
        const auto ed = map.dofs(e);
        for (int i = 0; i < map.ndofLocal; ++i) {
            c.row(e) += dofs[ed[i]] * tables[i].row(e);
        }
    }
    return c;
}

CoefMatrix coef_matrix_from_dofs(const Eigen::VectorXd& dofs, std::string_view term, const FeMesh& th, FeSpace space,
                                 int quad_order)
{
    return coef_matrix_from_dofs(dofs, parse_term(term).tag, th, space, quad_order);
}

CoefMatrix edge_matrix_from_dofs(const Eigen::VectorXd& dofs, const FeMesh& th, FeSpace space,
                                 std::span<const int> edges, int quad_order)
{
    const DofMap map = build_dof_map(th.mesh, th.topo, space);
    if (dofs.size() != map.NNdof) {
        throw Error("edge_matrix_from_dofs: dof vector length mismatch");
    }
    const QuadRule1d& rule = segment_rule(quad_order);
    const TraceTable tr = tabulate_trace(th, map, Tag::Val, edges, rule);
    CoefMatrix c = CoefMatrix::Zero(static_cast<Eigen::Index>(edges.size()), rule.size());
    for (std::size_t r = 0; r < edges.size(); ++r) {
        for (std::size_t j = 0; j < tr.values.size(); ++j) {
            c.row(static_cast<Eigen::Index>(r)) += dofs[tr.dofs[r][j]] * tr.values[j].row(static_cast<Eigen::Index>(r));
        }
    }
    return c;
}

Point2 outward_normal(const FeMesh& th, int edge)
{
    const EdgeFrame f = edge_frame(th, edge);
    const Point2& za = th.mesh.node[th.mesh.elem[f.elem][f.a]];
    const Point2& zb = th.mesh.node[th.mesh.elem[f.elem][f.b]];
    const double tx = zb[0] - za[0];
    const double ty = zb[1] - za[1];
    const double len = std::hypot(tx, ty);
    return {ty / len, -tx / len};
}

CoefMatrix coef_matrix_on_edges(const ScalarField& f, const FeMesh& th, std::span<const int> edges, int quad_order)
{
    const QuadRule1d& rule = segment_rule(quad_order);
    const QuadPoints pts = edge_quadrature_points(th, edges, rule);
    CoefMatrix c(pts.x.rows(), pts.x.cols());
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
        for (Eigen::Index p = 0; p < c.cols(); ++p) {
            c(r, p) = f(pts.x(r, p), pts.y(r, p));
        }
    }
    return c;
}

CoefMatrix coef_matrix_on_edges(const VectorField& f, const FeMesh& th, std::span<const int> edges, int quad_order)
{
    const QuadRule1d& rule = segment_rule(quad_order);
    const QuadPoints pts = edge_quadrature_points(th, edges, rule);
    CoefMatrix c(pts.x.rows(), pts.x.cols());
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
        const Point2 n = outward_normal(th, edges[static_cast<std::size_t>(r)]);
        for (Eigen::Index p = 0; p < c.cols(); ++p) {
            const auto v = f(pts.x(r, p), pts.y(r, p));
            c(r, p) = v[0] * n[0] + v[1] * n[1];
        }
    }
    return c;
}

double integrate_fe(const Eigen::VectorXd& dofs, const FeMesh& th, FeSpace space, int quad_order)
{
    const QuadRule2d& rule = triangle_rule(quad_order);
    const CoefMatrix vals = coef_matrix_from_dofs(dofs, Tag::Val, th, space, quad_order);
    const Eigen::Map<const Eigen::VectorXd> w(rule.weight.data(), rule.size());
    double total = 0.0;
    for (int e = 0; e < th.num_elems(); ++e) {
        total += th.topo.area[e] * vals.row(e).dot(w.transpose());
    }
    return total;
}

PointValue evaluate_in_element(const Eigen::VectorXd& dofs, const FeMesh& th, const DofMap& dofmap, int e,
                               const std::array<double, 3>& lambda)
{
    const FeSpace space = dofmap.space;
    const auto fwd = edge_orientation(th.mesh.elem[e]);
    std::array<double, 10> val{};
    std::array<double, 30> dl{};
    eval_basis(space, lambda, fwd, val);
    eval_basis_dlambda(space, lambda, fwd, dl);
    const auto grad = barycentric_gradients(th.mesh, e);
    const auto ed = dofmap.dofs(e);
    PointValue out;
    for (int i = 0; i < dofmap.ndofLocal; ++i) {
        const double c = dofs[ed[i]];
        out.value += c * val[i];
        for (int j = 0; j < 3; ++j) {
            out.dx += c * dl[3 * i + j] * grad[j][0];
            out.dy += c * dl[3 * i + j] * grad[j][1];
        }
    }
    return out;
}

std::vector<double> evaluate_at_points(const Eigen::VectorXd& dofs, const FeMesh& th, FeSpace space,
                                       std::span<const Point2> points)
{
    const DofMap map = build_dof_map(th.mesh, th.topo, space);
    if (dofs.size() != map.NNdof) {
        throw Error("evaluate_at_points: dof vector length mismatch");
    }
    constexpr double tol = 1e-12;
    std::vector<double> out(points.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto [x, y] = points[k];
        for (int e = 0; e < th.num_elems(); ++e) {
            const auto& t = th.mesh.elem[e];
            const Point2& a = th.mesh.node[t[0]];
            const Point2& b = th.mesh.node[t[1]];
            const Point2& c = th.mesh.node[t[2]];
            if (x < std::min({a[0], b[0], c[0]}) - tol || x > std::max({a[0], b[0], c[0]}) + tol ||
                y < std::min({a[1], b[1], c[1]}) - tol || y > std::max({a[1], b[1], c[1]}) + tol) {
                continue;
            }
            const double twice = 2.0 * th.topo.area[e];
            const std::array<double, 3> l{((b[0] - x) * (c[1] - y) - (b[1] - y) * (c[0] - x)) / twice,
                                          ((c[0] - x) * (a[1] - y) - (c[1] - y) * (a[0] - x)) / twice,
                                          ((a[0] - x) * (b[1] - y) - (a[1] - y) * (b[0] - x)) / twice};
            if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) {
                out[k] = evaluate_in_element(dofs, th, map, e, l).value;
                break;
            }
        }
    }
    return out;
}

} // namespace fem
