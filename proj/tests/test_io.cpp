#include "fem/error.hpp"
#include "fem/io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace fem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path dir = fs::temp_directory_path() / "fem_test_io";
    fs::create_directories(dir);
    return dir / (std::string(info->test_suite_name()) + "_" + info->name() + "_" + name);
}

std::string error_of(const std::string& text)
{
    std::istringstream in(text);
    try {
        (void)parse_freefem_msh(in);
    } catch (const IoError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Msh, FixtureMatchesGeneratedGrid)
{
    const MshData d = read_freefem_msh(FEM_TEST_DATA_DIR "/square_h05.msh");
    const Mesh2d ref = square_mesh({0.0, 1.0, 0.0, 1.0}, 0.5);
    EXPECT_EQ(d.mesh.node, ref.node);
    EXPECT_EQ(d.mesh.elem, ref.elem);
    EXPECT_EQ(d.edge.size(), 8u);
    for (int l : d.edgeLabel) EXPECT_EQ(l, 1);
}

TEST(Msh, RoundTripIsExact)
{
    MshData d = read_freefem_msh(FEM_TEST_DATA_DIR "/square_two_labels.msh");
    // coordinates that need all 17 digits
    d.mesh.node[4] = {0.1 + 0.2, 1.0 / 3.0};
    const fs::path p = scratch("out.msh");
    write_freefem_msh(p, d);
    const MshData e = read_freefem_msh(p);
    EXPECT_EQ(e.mesh.node, d.mesh.node);
    EXPECT_EQ(e.mesh.elem, d.mesh.elem);
    EXPECT_EQ(e.vertexLabel, d.vertexLabel);
    EXPECT_EQ(e.elemLabel, d.elemLabel);
    EXPECT_EQ(e.edge, d.edge);
    EXPECT_EQ(e.edgeLabel, d.edgeLabel);
}

TEST(Msh, ClockwiseTriangleIsReoriented)
{
    const MshData d = read_freefem_msh(FEM_TEST_DATA_DIR "/clockwise_triangle.msh");
    ASSERT_EQ(d.mesh.num_elems(), 1);
    const auto& t = d.mesh.elem[0];
    EXPECT_GT(signed_area(d.mesh.node[t[0]], d.mesh.node[t[1]], d.mesh.node[t[2]]), 0.0);
    EXPECT_NO_THROW(d.mesh.validate());
}

TEST(Msh, LabelsDefineRegions)
{
    const FeMesh th = fe_mesh_from_msh(read_freefem_msh(FEM_TEST_DATA_DIR "/square_two_labels.msh"));
    ASSERT_EQ(th.partition.num_regions(), 3);
    EXPECT_EQ(th.region_edges(0).size(), 2u);
    EXPECT_EQ(th.region_edges(1).size(), 6u);
    EXPECT_TRUE(th.region_edges(2).empty());
    for (const auto& [a, b] : th.partition.bdEdgeType[0]) {
        EXPECT_EQ(th.mesh.node[a][0], 0.0);
        EXPECT_EQ(th.mesh.node[b][0], 0.0);
    }
}

TEST(Msh, TruncatedFileNamesTheSection)
{
    const std::string v = error_of("9 8 8\n0 0 1\n0.5 0 1\n");
    EXPECT_NE(v.find("vertex"), std::string::npos) << v;
    const std::string t = error_of("3 1 0\n0 0 1\n1 0 1\n0 1 1\n1 2\n");
    EXPECT_NE(t.find("triangle"), std::string::npos) << t;
    const std::string h = error_of("3 1");
    EXPECT_FALSE(h.empty());
}

TEST(Msh, RejectsBadContent)
{
    EXPECT_FALSE(error_of("3 1 0\n0 0 1\n1 0 1\n0 1 1\n1 2 4 0\n").empty());
    EXPECT_FALSE(error_of("3 1 0\n0 0 1\n1 0 1\n2 0 1\n1 2 3 0\n").empty()); // degenerate
    EXPECT_FALSE(error_of("3 1 0\n0 0 1\n1 0 1\n0 1 1\n1 2 3 0\n42\n").empty());
    EXPECT_FALSE(error_of("3 1 0\n0 zero 1\n1 0 1\n0 1 1\n1 2 3 0\n").empty());
    EXPECT_THROW((void)read_freefem_msh("/nonexistent/file.msh"), IoError);
}

TEST(Msh, MeshWriterLabelsBoundary)
{
    const Mesh2d m = square_mesh({0.0, 2.0, 0.0, 1.0}, 0.5);
    const MshData d = msh_from_mesh(m);
    EXPECT_EQ(d.edge.size(), 12u);
    EXPECT_EQ(d.mesh.node, m.node);
}

TEST(Solution, RoundTripIsBitExact)
{
    Eigen::VectorXd v = test::random_vector(23, 1);
    v[0] = 1.0 / 3.0;
    v[1] = -1e-300;
    const fs::path p = scratch("u.txt");
    write_freefem_solution(p, v);
    const Eigen::VectorXd w = read_freefem_solution(p);
    ASSERT_EQ(w.size(), v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) EXPECT_EQ(w[i], v[i]);
}

TEST(Solution, DeclaredLengthIsEnforced)
{
    std::istringstream short_in("5\n1 2 3\n");
    EXPECT_THROW((void)parse_freefem_solution(short_in), IoError);
    std::istringstream long_in("2\n1 2 3\n");
    EXPECT_THROW((void)parse_freefem_solution(long_in), IoError);
    std::istringstream neg("-1\n");
    EXPECT_THROW((void)parse_freefem_solution(neg), IoError);
    std::istringstream ok("3\n1\t2\t3\n");
    EXPECT_EQ(parse_freefem_solution(ok).size(), 3);
}

TEST(Results, CsvRoundTrip)
{
    ResultTable t;
    t.headers = {"#Dof", "h", "err"};
    t.integer_column = {true, false, false};
    t.rows = {{32, 0.25, 1.5e-3}, {128, 0.125, 2.0e-4}, {std::numeric_limits<double>::quiet_NaN(),
                                                          std::numeric_limits<double>::quiet_NaN(), 2.9}};
    const fs::path p = scratch("t.csv");
    write_results(p, t);
    const ResultTable r = read_results(p);
    EXPECT_EQ(r.headers, t.headers);
    ASSERT_EQ(r.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t c = 0; c < t.headers.size(); ++c) {
            EXPECT_EQ(format_cell(r, c, r.rows[i][c]), format_cell(t, c, t.rows[i][c]));
        }
    }
    EXPECT_TRUE(r.is_integer(0));
    EXPECT_FALSE(r.is_integer(1));
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "#Dof,h,err");
}

TEST(Results, HeaderOnlyTable)
{
    ResultTable t;
    t.headers = {"a", "b"};
    std::ostringstream out;
    write_results(out, t);
    EXPECT_EQ(out.str(), "a,b\n");
    const fs::path p = scratch("empty.csv");
    write_results(p, t);
    const ResultTable r = read_results(p);
    EXPECT_EQ(r.headers, t.headers);
    EXPECT_TRUE(r.rows.empty());
}

TEST(Results, CellFormatting)
{
    ResultTable t;
    t.integer_column = {true, false};
    EXPECT_EQ(format_cell(t, 0, 8192), "8192");
    EXPECT_EQ(format_cell(t, 1, 1.21537e-03), "1.21537e-03");
    EXPECT_EQ(format_cell(t, 1, std::numeric_limits<double>::quiet_NaN()), "");
    EXPECT_EQ(format_real(0.25), "2.50000e-01");
}
