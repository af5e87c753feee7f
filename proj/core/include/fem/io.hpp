#pragma once

#include "fem/mesh.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace fem {

/// Contents of a FreeFEM .msh file, 0-based.
struct MshData {
    Mesh2d mesh;
    std::vector<int> vertexLabel;
    std::vector<int> elemLabel;
    std::vector<EdgePair> edge;
    std::vector<int> edgeLabel;
};

/// "nv nt ne", then nv lines "x y label", nt lines "i j k label" and ne lines
/// "i j label" (1-based). Clockwise triangles are reoriented. Any whitespace
/// separates fields. Throws IoError carrying the offending line number.
[[nodiscard]] MshData read_freefem_msh(const std::filesystem::path& path);
[[nodiscard]] MshData parse_freefem_msh(std::istream& in);

/// Fixture writer in the same format; edges default to the boundary edges with label 1.
void write_freefem_msh(const std::filesystem::path& path, const MshData& data);
[[nodiscard]] MshData msh_from_mesh(const Mesh2d& mesh);

/// Mesh whose boundary regions come from the file's edge labels.
[[nodiscard]] FeMesh fe_mesh_from_msh(const MshData& data);

/// FreeFEM array format: length on the first line, values after it.
[[nodiscard]] Eigen::VectorXd read_freefem_solution(const std::filesystem::path& path);
[[nodiscard]] Eigen::VectorXd parse_freefem_solution(std::istream& in);
/// Five values per line, printed with enough digits to round-trip exactly.
void write_freefem_solution(const std::filesystem::path& path, const Eigen::VectorXd& values);

/// Rectangular numeric table. NaN cells are written empty; integer columns
/// are printed without exponent.
struct ResultTable {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> rows;
    std::vector<bool> integer_column;

    [[nodiscard]] bool is_integer(std::size_t c) const { return c < integer_column.size() && integer_column[c]; }
};

/// Reals in scientific notation with 6 significant digits.
[[nodiscard]] std::string format_real(double v);
[[nodiscard]] std::string format_cell(const ResultTable& t, std::size_t c, double v);

void write_results(const std::filesystem::path& path, const ResultTable& table);
void write_results(std::ostream& out, const ResultTable& table);
[[nodiscard]] ResultTable read_results(const std::filesystem::path& path);

} // namespace fem
