#include "fem/io.hpp"

#include "fem/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace fem {

namespace {

// Whitespace-separated tokens with their line numbers.
class Tokens {
public:
    explicit Tokens(std::istream& in)
    {
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) items_.push_back({tok, n});
        }
        last_line_ = n;
    }

    [[nodiscard]] bool done() const { return pos_ >= items_.size(); }
    [[nodiscard]] int line() const { return done() ? last_line_ : items_[pos_].line; }

    const std::string& next(const std::string& what)
    {
        if (done()) throw IoError("unexpected end of file while reading " + what, last_line_);
        return items_[pos_++].text;
    }

    double real(const std::string& what)
    {
        const int ln = line();
        const std::string& t = next(what);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size()) {
            throw IoError("malformed number '" + t + "' in " + what, ln);
        }
        return v;
    }

    int integer(const std::string& what)
    {
        const int ln = line();
        const std::string& t = next(what);
        int v = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size()) {
            throw IoError("malformed integer '" + t + "' in " + what, ln);
        }
        return v;
    }

private:
    struct Item {
        std::string text;
        int line;
    };
    std::vector<Item> items_;
    std::size_t pos_ = 0;
    int last_line_ = 0;
};

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

MshData parse_freefem_msh(std::istream& in)
{
    Tokens tk(in);
    if (tk.done()) throw IoError("empty mesh file: missing header 'nv nt ne'", 1);
    const int nv = tk.integer("header 'nv nt ne'");
    const int nt = tk.integer("header 'nv nt ne'");
    const int ne = tk.integer("header 'nv nt ne'");
    if (nv < 0 || nt < 0 || ne < 0) throw IoError("negative count in header", 1);

    MshData d;
    d.mesh.node.reserve(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv; ++i) {
        const std::string what = "vertex section (vertex " + std::to_string(i + 1) + " of " + std::to_string(nv) + ")";
        const double x = tk.real(what);
        const double y = tk.real(what);
        d.mesh.node.push_back({x, y});
        d.vertexLabel.push_back(tk.integer(what));
    }
    auto index = [&](const std::string& what) {
        const int ln = tk.line();
        const int v = tk.integer(what);
        if (v < 1 || v > nv) {
            throw IoError("vertex index " + std::to_string(v) + " out of range 1.." + std::to_string(nv) + " in " + what,
                          ln);
        }
        return v - 1;
    };
    for (int i = 0; i < nt; ++i) {
        const std::string what =
            "triangle section (triangle " + std::to_string(i + 1) + " of " + std::to_string(nt) + ")";
        const int ln = tk.line();
        Triangle t{index(what), index(what), index(what)};
        const double a = signed_area(d.mesh.node[t[0]], d.mesh.node[t[1]], d.mesh.node[t[2]]);
        if (a == 0.0) throw IoError("degenerate triangle in " + what, ln);
        if (a < 0.0) std::swap(t[1], t[2]);
        d.mesh.elem.push_back(t);
        d.elemLabel.push_back(tk.integer(what));
    }
    for (int i = 0; i < ne; ++i) {
        const std::string what = "edge section (edge " + std::to_string(i + 1) + " of " + std::to_string(ne) + ")";
        d.edge.push_back({index(what), index(what)});
        d.edgeLabel.push_back(tk.integer(what));
    }
    if (!tk.done()) {
        throw IoError("trailing data after the declared " + std::to_string(ne) + " edges", tk.line());
    }
    return d;
}

MshData read_freefem_msh(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    try {
        return parse_freefem_msh(in);
    } catch (const IoError& e) {
        throw IoError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
    }
}

MshData msh_from_mesh(const Mesh2d& mesh)
{
    MshData d;
    d.mesh = mesh;
    const MeshTopology topo = build_topology(mesh);
    d.vertexLabel.assign(mesh.node.size(), 0);
    d.elemLabel.assign(mesh.elem.size(), 0);
    for (const auto& e : topo.bdEdge) {
        d.vertexLabel[e[0]] = 1;
        d.vertexLabel[e[1]] = 1;
        d.edge.push_back(e);
        d.edgeLabel.push_back(1);
    }
    return d;
}

void write_freefem_msh(const std::filesystem::path& path, const MshData& data)
{
    std::ofstream out = open_out(path);
    out << data.mesh.node.size() << ' ' << data.mesh.elem.size() << ' ' << data.edge.size() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < data.mesh.node.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", data.mesh.node[i][0], data.mesh.node[i][1]);
        out << buf << ' ' << (i < data.vertexLabel.size() ? data.vertexLabel[i] : 0) << '\n';
    }
    for (std::size_t i = 0; i < data.mesh.elem.size(); ++i) {
        const auto& t = data.mesh.elem[i];
        out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' '
            << (i < data.elemLabel.size() ? data.elemLabel[i] : 0) << '\n';
    }
    for (std::size_t i = 0; i < data.edge.size(); ++i) {
        out << data.edge[i][0] + 1 << ' ' << data.edge[i][1] + 1 << ' '
            << (i < data.edgeLabel.size() ? data.edgeLabel[i] : 0) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

FeMesh fe_mesh_from_msh(const MshData& data)
{
    data.mesh.validate();
    const MeshTopology topo = build_topology(data.mesh);
    BoundaryPartition p = classify_boundary_by_labels(data.mesh, topo, data.edge, data.edgeLabel);
    return FeMesh(data.mesh, std::move(p));
}

Eigen::VectorXd parse_freefem_solution(std::istream& in)
{
    Tokens tk(in);
    if (tk.done()) throw IoError("empty solution file: missing length", 1);
    const int n = tk.integer("solution length");
    if (n < 0) throw IoError("negative solution length", 1);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        if (tk.done()) {
            throw IoError("declared length " + std::to_string(n) + " but found " + std::to_string(i) + " values",
                          tk.line());
        }
        v[i] = tk.real("solution values");
    }
    if (!tk.done()) {
        throw IoError("declared length " + std::to_string(n) + " but found more values", tk.line());
    }
    return v;
}

Eigen::VectorXd read_freefem_solution(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    try {
        return parse_freefem_solution(in);
    } catch (const IoError& e) {
        throw IoError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
    }
}

void write_freefem_solution(const std::filesystem::path& path, const Eigen::VectorXd& values)
{
    std::ofstream out = open_out(path);
    out << values.size() << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << '\t' << buf;
        if (i % 5 == 4 || i + 1 == values.size()) out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

std::string format_cell(const ResultTable& t, std::size_t c, double v)
{
    if (std::isnan(v)) return "";
    if (t.is_integer(c)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    return format_real(v);
}

void write_results(std::ostream& out, const ResultTable& table)
{
    for (std::size_t c = 0; c < table.headers.size(); ++c) {
        out << (c ? "," : "") << table.headers[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.headers.size()) throw IoError("table row length differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(table, c, row[c]);
        out << '\n';
    }
}

void write_results(const std::filesystem::path& path, const ResultTable& table)
{
    std::ofstream out = open_out(path);
    write_results(out, table);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ResultTable read_results(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    ResultTable t;
    std::string line;
    int n = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) throw IoError("missing header row in '" + path.string() + "'", 1);
    ++n;
    t.headers = split(line);
    t.integer_column.assign(t.headers.size(), true);
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.headers.size()) throw IoError("row length differs from header", n);
        std::vector<double> row;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0.0;
            const auto [p, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
            if (ec != std::errc() || p != cells[c].data() + cells[c].size()) {
                throw IoError("malformed number '" + cells[c] + "'", n);
            }
            if (cells[c].find_first_of(".eE") != std::string::npos) t.integer_column[c] = false;
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace fem
