#pragma once

#include <array>
#include <string>
#include <vector>

namespace fem {

using Point2 = std::array<double, 2>;
using Triangle = std::array<int, 3>;
using EdgePair = std::array<int, 2>;

/// Vertex coordinates and counterclockwise vertex-index triples.
struct Mesh2d {
    std::vector<Point2> node;
    std::vector<Triangle> elem;

    [[nodiscard]] int num_nodes() const { return static_cast<int>(node.size()); }
    [[nodiscard]] int num_elems() const { return static_cast<int>(elem.size()); }

    /// Throws MeshError when an index is out of range or a triangle is not
    /// strictly counterclockwise.
    void validate() const;
};

[[nodiscard]] double signed_area(const Point2& a, const Point2& b, const Point2& c);

/// Uniform grid on [x0,x1]x[y0,y1]; each cell is split along its
/// lower-left/upper-right diagonal. Vertices are numbered row by row from (x0,y0).
[[nodiscard]] Mesh2d square_mesh(const std::array<double, 4>& bbox, double h);

/// Red refinement: every triangle split into four through its edge midpoints.
/// New vertices are appended in global edge order.
[[nodiscard]] Mesh2d uniform_refine(const Mesh2d& mesh);

/// Grid spacing recovered from the vertex count of a refined unit square.
[[nodiscard]] double spacing_from_node_count(int num_nodes);

/// Edge-based connectivity. Local edge i of a triangle is the one opposite
/// local vertex i, i.e. the pair (v[(i+1)%3], v[(i+2)%3]).
struct MeshTopology {
    std::vector<EdgePair> edge;                // sorted endpoints, lexicographic order
    std::vector<std::array<int, 3>> elem2edge; // local edge -> global edge
    std::vector<std::array<int, 2>> edge2elem; // adjacent triangles, -1 when absent
    std::vector<std::array<int, 2>> edge2local; // local edge index inside edge2elem
    std::vector<EdgePair> bdEdge;              // oriented counterclockwise w.r.t. the owning triangle
    std::vector<int> bdEdgeIdx;                // global edge index of each bdEdge row
    std::vector<double> area;
    std::vector<double> edgeLength;

    [[nodiscard]] int num_edges() const { return static_cast<int>(edge.size()); }
    [[nodiscard]] bool is_boundary(int e) const { return edge2elem[e][1] < 0; }
};

[[nodiscard]] MeshTopology build_topology(const Mesh2d& mesh);

/// Boundary edges split into regions. Region r < selectors.size() holds the
/// edges whose midpoint first satisfies selectors[r]; the last region holds the rest.
struct BoundaryPartition {
    std::vector<std::vector<EdgePair>> bdEdgeType;
    std::vector<std::vector<int>> bdEdgeIdxType;
    std::vector<std::vector<int>> bdNodeIdxType;
    std::vector<std::string> selectors;

    [[nodiscard]] int num_regions() const { return static_cast<int>(bdEdgeType.size()); }
};

[[nodiscard]] BoundaryPartition classify_boundary(const Mesh2d& mesh, const MeshTopology& topo,
                                                  const std::vector<std::string>& selectors);

/// Partition by integer labels attached to global edges (e.g. from a .msh file).
/// One region per distinct label, in ascending label order; unlabelled
/// boundary edges (label absent from the map) form a trailing region.
[[nodiscard]] BoundaryPartition classify_boundary_by_labels(const Mesh2d& mesh, const MeshTopology& topo,
                                                            const std::vector<EdgePair>& labelled_edges,
                                                            const std::vector<int>& labels);

/// Mesh plus derived data: the structure every assembly routine consumes.
struct FeMesh {
    Mesh2d mesh;
    MeshTopology topo;
    BoundaryPartition partition;

    FeMesh() = default;
    explicit FeMesh(Mesh2d m, const std::vector<std::string>& selectors = {});
    FeMesh(Mesh2d m, BoundaryPartition p);

    [[nodiscard]] int num_nodes() const { return mesh.num_nodes(); }
    [[nodiscard]] int num_elems() const { return mesh.num_elems(); }
    [[nodiscard]] int num_edges() const { return topo.num_edges(); }

    /// Global edge indices of boundary region r.
    [[nodiscard]] const std::vector<int>& region_edges(int r) const;
};

} // namespace fem
