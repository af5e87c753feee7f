#include "fem/mesh.hpp"

#include "fem/error.hpp"
#include "fem/selector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace fem {

double signed_area(const Point2& a, const Point2& b, const Point2& c)
{
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

void Mesh2d::validate() const
{
    const int n = num_nodes();
    for (int e = 0; e < num_elems(); ++e) {
        for (int v : elem[e]) {
            if (v < 0 || v >= n) {
                throw MeshError("triangle " + std::to_string(e) + " references vertex " + std::to_string(v) +
                                " outside [0, " + std::to_string(n) + ")");
            }
        }
        const double a = signed_area(node[elem[e][0]], node[elem[e][1]], node[elem[e][2]]);
        if (!(a > 0.0)) {
            throw MeshError("triangle " + std::to_string(e) + " has nonpositive signed area " + std::to_string(a));
        }
    }
}

namespace {

int cell_count(double length, double h, const char* axis)
{
    const double ratio = length / h;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-10 * std::max(1.0, ratio)) {
        throw MeshError(std::string("spacing does not divide the ") + axis + " side length");
    }
    return static_cast<int>(n);
}

} // namespace

Mesh2d square_mesh(const std::array<double, 4>& bbox, double h)
{
    const auto [x0, x1, y0, y1] = bbox;
    if (!(h > 0.0)) {
        throw MeshError("square_mesh: spacing must be positive");
    }
    if (!(x1 > x0) || !(y1 > y0)) {
        throw MeshError("square_mesh: degenerate bounding box");
    }
    const int nx = cell_count(x1 - x0, h, "x");
    const int ny = cell_count(y1 - y0, h, "y");

    Mesh2d mesh;
    mesh.node.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        const double y = y0 + (y1 - y0) * j / ny;
        for (int i = 0; i <= nx; ++i) {
            mesh.node.push_back({x0 + (x1 - x0) * i / nx, y});
        }
    }
    mesh.elem.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int ll = j * (nx + 1) + i;
            const int lr = ll + 1;
            const int ul = ll + nx + 1;
            const int ur = ul + 1;
            mesh.elem.push_back({ll, lr, ur});
            mesh.elem.push_back({ll, ur, ul});
        }
    }
    return mesh;
}

Mesh2d uniform_refine(const Mesh2d& mesh)
{
    const MeshTopology topo = build_topology(mesh);
    const int n = mesh.num_nodes();
    const int nt = mesh.num_elems();

    Mesh2d fine;
    fine.node = mesh.node;
    fine.node.reserve(static_cast<std::size_t>(n + topo.num_edges()));
    for (const auto& [a, b] : topo.edge) {
        fine.node.push_back({0.5 * (mesh.node[a][0] + mesh.node[b][0]), 0.5 * (mesh.node[a][1] + mesh.node[b][1])});
    }

    fine.elem.resize(static_cast<std::size_t>(4 * nt));
    for (int e = 0; e < nt; ++e) {
        const auto [a, b, c] = mesh.elem[e];
        const int m0 = n + topo.elem2edge[e][0];
        const int m1 = n + topo.elem2edge[e][1];
        const int m2 = n + topo.elem2edge[e][2];
        fine.elem[e] = {a, m2, m1};
        fine.elem[nt + e] = {m2, b, m0};
        fine.elem[2 * nt + e] = {m1, m0, c};
        fine.elem[3 * nt + e] = {m0, m1, m2};
    }
    return fine;
}

double spacing_from_node_count(int num_nodes)
{
    return 1.0 / (std::sqrt(static_cast<double>(num_nodes)) - 1.0);
}

MeshTopology build_topology(const Mesh2d& mesh)
{
    mesh.validate();
    const int nt = mesh.num_elems();

    struct LocalEdge {
        int lo, hi, elem, local;
    };
    std::vector<LocalEdge> all;
    all.reserve(static_cast<std::size_t>(3 * nt));
    for (int e = 0; e < nt; ++e) {
        for (int i = 0; i < 3; ++i) {
            const int a = mesh.elem[e][(i + 1) % 3];
            const int b = mesh.elem[e][(i + 2) % 3];
            all.push_back({std::min(a, b), std::max(a, b), e, i});
        }
    }
    std::sort(all.begin(), all.end(), [](const LocalEdge& l, const LocalEdge& r) {
        if (l.lo != r.lo) return l.lo < r.lo;
        if (l.hi != r.hi) return l.hi < r.hi;
        return l.elem < r.elem;
    });

    MeshTopology topo;
    topo.elem2edge.assign(static_cast<std::size_t>(nt), {-1, -1, -1});
    for (std::size_t k = 0; k < all.size();) {
        std::size_t m = k + 1;
        while (m < all.size() && all[m].lo == all[k].lo && all[m].hi == all[k].hi) {
            ++m;
        }
        if (m - k > 2) {
            throw MeshError("edge (" + std::to_string(all[k].lo) + "," + std::to_string(all[k].hi) +
                            ") is shared by more than two triangles");
        }
        const int idx = topo.num_edges();
        topo.edge.push_back({all[k].lo, all[k].hi});
        std::array<int, 2> owners{all[k].elem, -1};
        std::array<int, 2> locals{all[k].local, -1};
        if (m - k == 2) {
            owners[1] = all[k + 1].elem;
            locals[1] = all[k + 1].local;
        }
        topo.edge2elem.push_back(owners);
        topo.edge2local.push_back(locals);
        for (std::size_t s = k; s < m; ++s) {
            topo.elem2edge[all[s].elem][all[s].local] = idx;
        }
        k = m;
    }

    topo.area.resize(static_cast<std::size_t>(nt));
    for (int e = 0; e < nt; ++e) {
        const auto& t = mesh.elem[e];
        topo.area[e] = signed_area(mesh.node[t[0]], mesh.node[t[1]], mesh.node[t[2]]);
    }
    topo.edgeLength.resize(topo.edge.size());
    for (std::size_t k = 0; k < topo.edge.size(); ++k) {
        const auto& p = mesh.node[topo.edge[k][0]];
        const auto& q = mesh.node[topo.edge[k][1]];
        topo.edgeLength[k] = std::hypot(q[0] - p[0], q[1] - p[1]);
    }
    for (int k = 0; k < topo.num_edges(); ++k) {
        if (!topo.is_boundary(k)) continue;
        const int e = topo.edge2elem[k][0];
        const int i = topo.edge2local[k][0];
        topo.bdEdge.push_back({mesh.elem[e][(i + 1) % 3], mesh.elem[e][(i + 2) % 3]});
        topo.bdEdgeIdx.push_back(k);
    }
    return topo;
}

namespace {

void collect_nodes(BoundaryPartition& p)
{
    p.bdNodeIdxType.clear();
    for (const auto& edges : p.bdEdgeType) {
        std::set<int> nodes;
        for (const auto& [a, b] : edges) {
            nodes.insert(a);
            nodes.insert(b);
        }
        p.bdNodeIdxType.emplace_back(nodes.begin(), nodes.end());
    }
}

} // namespace

BoundaryPartition classify_boundary(const Mesh2d& mesh, const MeshTopology& topo,
                                    const std::vector<std::string>& selectors)
{
    std::vector<Selector> preds;
    preds.reserve(selectors.size());
    for (const auto& s : selectors) {
        preds.emplace_back(s);
    }

    BoundaryPartition p;
    p.selectors = selectors;
    const std::size_t regions = selectors.size() + 1;
    p.bdEdgeType.resize(regions);
    p.bdEdgeIdxType.resize(regions);
    for (std::size_t b = 0; b < topo.bdEdge.size(); ++b) {
        const auto& [i, j] = topo.bdEdge[b];
        const double xm = 0.5 * (mesh.node[i][0] + mesh.node[j][0]);
        const double ym = 0.5 * (mesh.node[i][1] + mesh.node[j][1]);
        std::size_t r = 0;
        while (r < preds.size() && !preds[r](xm, ym)) {
            ++r;
        }
        p.bdEdgeType[r].push_back(topo.bdEdge[b]);
        p.bdEdgeIdxType[r].push_back(topo.bdEdgeIdx[b]);
    }
    collect_nodes(p);
    return p;
}

BoundaryPartition classify_boundary_by_labels(const Mesh2d& mesh, const MeshTopology& topo,
                                              const std::vector<EdgePair>& labelled_edges,
                                              const std::vector<int>& labels)
{
    (void)mesh;
    if (labelled_edges.size() != labels.size()) {
        throw MeshError("classify_boundary_by_labels: edge and label lists differ in length");
    }
    std::map<std::pair<int, int>, int> lookup;
    std::set<int> distinct;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const auto [a, b] = labelled_edges[k];
        lookup[{std::min(a, b), std::max(a, b)}] = labels[k];
        distinct.insert(labels[k]);
    }
    std::map<int, std::size_t> slot;
    BoundaryPartition p;
    for (int l : distinct) {
        slot[l] = p.selectors.size();
        p.selectors.push_back("label==" + std::to_string(l));
    }
    p.bdEdgeType.resize(distinct.size() + 1);
    p.bdEdgeIdxType.resize(distinct.size() + 1);
    for (std::size_t b = 0; b < topo.bdEdge.size(); ++b) {
        const auto& e = topo.edge[topo.bdEdgeIdx[b]];
        const auto it = lookup.find({e[0], e[1]});
        const std::size_t r = it == lookup.end() ? distinct.size() : slot[it->second];
        p.bdEdgeType[r].push_back(topo.bdEdge[b]);
        p.bdEdgeIdxType[r].push_back(topo.bdEdgeIdx[b]);
    }
    collect_nodes(p);
    return p;
}

FeMesh::FeMesh(Mesh2d m, const std::vector<std::string>& selectors)
    : mesh(std::move(m)), topo(build_topology(mesh)), partition(classify_boundary(mesh, topo, selectors))
{
}

FeMesh::FeMesh(Mesh2d m, BoundaryPartition p)
    : mesh(std::move(m)), topo(build_topology(mesh)), partition(std::move(p))
{
}

const std::vector<int>& FeMesh::region_edges(int r) const
{
    if (r < 0 || r >= partition.num_regions()) {
        throw MeshError("boundary region " + std::to_string(r) + " out of range [0, " +
                        std::to_string(partition.num_regions()) + ")");
    }
    return partition.bdEdgeIdxType[r];
}

} // namespace fem
