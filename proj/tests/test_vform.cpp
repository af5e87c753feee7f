#include "fem/error.hpp"
#include "fem/term.hpp"
#include "fem/vform.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace fem;

namespace {

std::vector<std::pair<std::string, std::string>> pairs(const VarForm& f)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : f.entries) out.emplace_back(e.test.str(), e.trial ? e.trial->str() : "");
    return out;
}

} // namespace

TEST(Term, ParsesSymbolAndTag)
{
    const Term t = parse_term("v1.dx");
    EXPECT_EQ(t.symbol, "v1");
    EXPECT_EQ(t.tag, Tag::Dx);
    EXPECT_EQ(parse_term(" u . grad ").tag, Tag::Grad);
    EXPECT_EQ(parse_term("w.val").str(), "w.val");
}

TEST(Term, ParsesSums)
{
    const TermSum s = parse_term_sum("v1.dy + v2.dx");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.terms[0], (Term{"v1", Tag::Dy}));
    EXPECT_EQ(s.terms[1], (Term{"v2", Tag::Dx}));
    EXPECT_EQ(s.str(), "v1.dy + v2.dx");
}

TEST(Term, RejectsMalformedInput)
{
    EXPECT_THROW((void)parse_term("v1.dz"), ParseError);
    EXPECT_THROW((void)parse_term("v1."), ParseError);
    EXPECT_THROW((void)parse_term(".dx"), ParseError);
    EXPECT_THROW((void)parse_term("v1.dx + v2.dy"), ParseError);
    EXPECT_THROW((void)parse_term_sum("v1.dx +"), ParseError);
    EXPECT_THROW((void)parse_term_sum(""), ParseError);
}

TEST(VarForm, ListsMustHaveMatchingLengths)
{
    EXPECT_THROW((void)VarForm::bilinear({1.0, 2.0}, {"v.val"}, {"u.val"}), Error);
    EXPECT_THROW((void)VarForm::linear({1.0}, {"v.val", "v.dx"}), Error);
    EXPECT_TRUE(VarForm::linear({1.0}, {"v.val"}).is_linear());
    EXPECT_FALSE(VarForm::bilinear({1.0}, {"v.val"}, {"u.val"}).is_linear());
}

TEST(VarForm, ConcatenationRequiresSameKind)
{
    VarForm a = VarForm::bilinear({1.0}, {"v.val"}, {"u.val"});
    a += VarForm::bilinear({2.0}, {"v.dx"}, {"u.dx"});
    EXPECT_EQ(a.size(), 2u);
    EXPECT_THROW(a += VarForm::linear({1.0}, {"v.val"}), Error);
}

TEST(Expand, StrainFormGivesSixElementaryPairs)
{
    const VarForm shortf = VarForm::bilinear({1.0, 1.0, 0.5}, {"v1.dx", "v2.dy", "v1.dy + v2.dx"},
                                             {"u1.dx", "u2.dy", "u1.dy + u2.dx"});
    const VarForm ext = expand_extended(shortf);
    const std::vector<std::pair<std::string, std::string>> expected{
        {"v1.dx", "u1.dx"}, {"v2.dy", "u2.dy"}, {"v1.dy", "u1.dy"},
        {"v1.dy", "u2.dx"}, {"v2.dx", "u1.dy"}, {"v2.dx", "u2.dx"},
    };
    EXPECT_EQ(pairs(ext), expected);
    EXPECT_TRUE(is_elementary(ext));
    EXPECT_FALSE(is_elementary(shortf));
    const std::vector<double> coefs{1.0, 1.0, 0.5, 0.5, 0.5, 0.5};
    for (std::size_t i = 0; i < ext.size(); ++i) {
        ASSERT_NE(ext.entries[i].coef.get<double>(), nullptr);
        EXPECT_EQ(*ext.entries[i].coef.get<double>(), coefs[i]);
    }
}

TEST(Expand, GradGradSplitsIntoTwoProducts)
{
    const VarForm ext = expand_extended(VarForm::bilinear({3.0}, {"v.grad"}, {"u.grad"}));
    const std::vector<std::pair<std::string, std::string>> expected{{"v.dx", "u.dx"}, {"v.dy", "u.dy"}};
    EXPECT_EQ(pairs(ext), expected);
}

TEST(Expand, LinearGradWithVectorCoefficient)
{
    const VarForm f = VarForm::linear({Coef([](double x, double y) { return std::array{x, y}; })}, {"v.grad"});
    const VarForm ext = expand_extended(f);
    ASSERT_EQ(ext.size(), 2u);
    EXPECT_EQ(ext.entries[0].test.str(), "v.dx");
    EXPECT_EQ(ext.entries[1].test.str(), "v.dy");
    const FeMesh th = test::unit_square(0.5);
    const CoefMatrix c0 = coef_to_matrix(ext.entries[0].coef, th, 2, Domain::Area);
    const QuadPoints qp = quadrature_points(th.mesh, triangle_rule(2));
    EXPECT_LT(test::max_abs(c0 - qp.x), 1e-15);
}

TEST(Symbols, StandardizeAndComponentIndex)
{
    const VarForm f = VarForm::bilinear({1.0, 1.0}, {"q.val", "ux.dx"}, {"p.val", "vy.dy"});
    const VarForm s = standardize_symbols({"ux", "uy", "q"}, {"vx", "vy", "p"}, f);
    EXPECT_EQ(s.entries[0].test.str(), "v3.val");
    EXPECT_EQ(s.entries[0].trial->str(), "u3.val");
    EXPECT_EQ(s.entries[1].test.str(), "v1.dx");
    EXPECT_EQ(s.entries[1].trial->str(), "u2.dy");
    EXPECT_EQ(component_index("v", 'v'), 0);
    EXPECT_EQ(component_index("v3", 'v'), 2);
    EXPECT_EQ(component_index("u12", 'u'), 11);
    EXPECT_EQ(component_index("w1", 'v'), -1);
    EXPECT_EQ(component_index("vx", 'v'), -1);
    EXPECT_THROW((void)rename_symbols(f, {{"q", "v1"}}, {{"p", "u1"}}), Error);
}

TEST(Coef, VariantsNormalizeToTheSameMatrix)
{
    const FeMesh th = test::unit_square(0.5);
    const int q = 4;
    const QuadPoints qp = quadrature_points(th.mesh, triangle_rule(q));
    auto f = [](double x, double y) { return 1.0 + 2.0 * x - y; };

    const CoefMatrix from_const = coef_to_matrix(Coef(2.5), th, q, Domain::Area);
    EXPECT_EQ(from_const.rows(), th.num_elems());
    EXPECT_EQ(from_const.cols(), triangle_rule(q).size());
    EXPECT_EQ(from_const.minCoeff(), 2.5);
    EXPECT_EQ(from_const.maxCoeff(), 2.5);

    const CoefMatrix from_fn = coef_to_matrix(Coef(f), th, q, Domain::Area);
    const CoefMatrix expect = (1.0 + 2.0 * qp.x.array() - qp.y.array()).matrix();
    EXPECT_LT(test::max_abs(from_fn - expect), 1e-14);

    const FeFunction fe{FeSpace(1), interpolate_nodal(f, th, FeSpace(1))};
    EXPECT_LT(test::max_abs(coef_to_matrix(Coef(fe), th, q, Domain::Area) - expect), 1e-14);

    EXPECT_EQ(test::max_abs(coef_to_matrix(Coef(expect), th, q, Domain::Area) - expect), 0.0);

    const CoefMatrix wrong = CoefMatrix::Zero(3, 3);
    EXPECT_THROW((void)coef_to_matrix(Coef(wrong), th, q, Domain::Area), Error);
}

TEST(Coef, VectorFieldOnEdgesIsNormalContraction)
{
    const FeMesh th = test::unit_square(0.5, {"y==0"});
    const std::vector<int>& edges = th.region_edges(0);
    const CoefMatrix c =
        coef_to_matrix(Coef([](double, double) { return std::array{0.0, 1.0}; }), th, 3, Domain::Boundary, edges);
    EXPECT_NEAR(c.minCoeff(), -1.0, 1e-15);
    EXPECT_NEAR(c.maxCoeff(), -1.0, 1e-15);
}
