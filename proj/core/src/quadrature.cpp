#include "fem/quadrature.hpp"

#include "fem/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fem {

namespace {

// Dunavant's symmetric rules. Orbits: centroid, (a,b,b) with b=(1-a)/2 and
// all permutations of (a,b,c).
struct Builder {
    QuadRule2d rule;

    Builder& centroid(double w)
    {
        rule.lambda.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weight.push_back(w);
        return *this;
    }

    Builder& orbit3(double a, double w)
    {
        const double b = 0.5 * (1.0 - a);
        for (const auto& l : {std::array{a, b, b}, std::array{b, a, b}, std::array{b, b, a}}) {
            rule.lambda.push_back(l);
            rule.weight.push_back(w);
        }
        return *this;
    }

    Builder& orbit6(double a, double b, double w)
    {
        const double c = 1.0 - a - b;
        for (const auto& l : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c}, std::array{b, c, a},
                              std::array{c, a, b}, std::array{c, b, a}}) {
            rule.lambda.push_back(l);
            rule.weight.push_back(w);
        }
        return *this;
    }
};

QuadRule2d degree1()
{
    Builder b;
    b.centroid(1.0);
    b.rule.order = 1;
    return b.rule;
}

QuadRule2d degree2()
{
    Builder b;
    b.orbit3(2.0 / 3.0, 1.0 / 3.0);
    b.rule.order = 2;
    return b.rule;
}

QuadRule2d degree4()
{
    Builder b;
    b.orbit3(0.1081030181680702274, 0.2233815896780114657)
        .orbit3(0.8168475729804585131, 0.1099517436553218676);
    b.rule.order = 4;
    return b.rule;
}

QuadRule2d degree5()
{
    Builder b;
    b.centroid(0.225)
        .orbit3(0.05971587178976982046, 0.1323941527885061807)
        .orbit3(0.7974269853530873224, 0.1259391805448271526);
    b.rule.order = 5;
    return b.rule;
}

QuadRule2d degree6()
{
    Builder b;
    b.orbit3(0.5014265096581791574, 0.1167862757263793660)
        .orbit3(0.8738219710169955433, 0.05084490637020681692)
        .orbit6(0.05314504984481694735, 0.3103524510337844054, 0.08285107561837357519);
    b.rule.order = 6;
    return b.rule;
}

QuadRule2d degree8()
{
    Builder b;
    b.centroid(0.1443156076777871683)
        .orbit3(0.08141482341455368794, 0.09509163426728462479)
        .orbit3(0.6588613844964795868, 0.1032173705347182503)
        .orbit3(0.8989055433659380491, 0.03245849762319808031)
        .orbit6(0.008394777409957605337, 0.2631128296346381134, 0.02723031417443499426);
    b.rule.order = 8;
    return b.rule;
}

// Newton iteration on the Legendre recurrence, mapped to [0,1].
QuadRule1d gauss_legendre(int n, int order)
{
    QuadRule1d rule;
    rule.order = order;
    for (int i = 0; i < n; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.points.push_back(0.5 * (1.0 - t));
        rule.weight.push_back(0.5 * w);
    }
    return rule;
}

} // namespace

const QuadRule2d& triangle_rule(int order)
{
    static const std::array<QuadRule2d, kMaxTriangleOrder> rules = [] {
        const QuadRule2d r4 = degree4();
        const QuadRule2d r8 = degree8();
        return std::array<QuadRule2d, kMaxTriangleOrder>{degree1(), degree2(), r4, r4, degree5(), degree6(), r8, r8};
    }();
    if (order < 1 || order > kMaxTriangleOrder) {
        throw Error("unsupported triangle quadrature order " + std::to_string(order) + " (supported: 1.." +
                    std::to_string(kMaxTriangleOrder) + ")");
    }
    return rules[static_cast<std::size_t>(order - 1)];
}

const QuadRule1d& segment_rule(int order)
{
    static const std::array<QuadRule1d, kMaxSegmentOrder> rules = [] {
        std::array<QuadRule1d, kMaxSegmentOrder> r;
        for (int q = 1; q <= kMaxSegmentOrder; ++q) {
            r[static_cast<std::size_t>(q - 1)] = gauss_legendre((q + 2) / 2, q);
        }
        return r;
    }();
    if (order < 1 || order > kMaxSegmentOrder) {
        throw Error("unsupported segment quadrature order " + std::to_string(order) + " (supported: 1.." +
                    std::to_string(kMaxSegmentOrder) + ")");
    }
    return rules[static_cast<std::size_t>(order - 1)];
}

} // namespace fem
