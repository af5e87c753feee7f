#pragma once

#include <array>
#include <vector>

namespace fem {

/// Symmetric rule on a triangle in barycentric form. Integrals are
/// |K| * sum_p weight[p] * f(sum_i lambda[p][i] * z_i); weights sum to one.
struct QuadRule2d {
    std::vector<std::array<double, 3>> lambda;
    std::vector<double> weight;
    int order = 0;

    [[nodiscard]] int size() const { return static_cast<int>(weight.size()); }
};

/// Gauss-Legendre rule on [0,1]; weights sum to one.
struct QuadRule1d {
    std::vector<double> points;
    std::vector<double> weight;
    int order = 0;

    [[nodiscard]] int size() const { return static_cast<int>(weight.size()); }
};

inline constexpr int kMaxTriangleOrder = 8;
inline constexpr int kMaxSegmentOrder = 9;

/// Rule exact for total degree <= order, 1 <= order <= 8. All weights positive.
[[nodiscard]] const QuadRule2d& triangle_rule(int order);

/// Rule exact for degree <= order, 1 <= order <= 9.
[[nodiscard]] const QuadRule1d& segment_rule(int order);

} // namespace fem
