#pragma once

#include <array>
#include <functional>

namespace fem {

using ScalarField = std::function<double(double x, double y)>;
using VectorField = std::function<std::array<double, 2>(double x, double y)>;

} // namespace fem
