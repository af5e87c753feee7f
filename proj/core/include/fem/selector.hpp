#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace fem {

namespace detail {
struct SelectorNode;
}

/// Compiled boolean expression over (x, y), written with Matlab-style
/// operators, e.g. "x==1", "y<0 & x>-sin(pi/3)", "x.^2 + y.^2 > 3.8^2".
class Selector {
public:
    explicit Selector(std::string_view expr);

    [[nodiscard]] bool operator()(double x, double y) const { return value(x, y) != 0.0; }
    [[nodiscard]] double value(double x, double y) const;
    [[nodiscard]] const std::string& source() const { return source_; }

private:
    std::string source_;
    std::shared_ptr<const detail::SelectorNode> root_;
};

[[nodiscard]] Selector parse_selector(std::string_view expr);

} // namespace fem
