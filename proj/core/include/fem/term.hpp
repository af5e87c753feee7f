#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fem {

/// Which derivative of a basis function a term refers to.
enum class Tag { Val, Dx, Dy, Grad };

[[nodiscard]] std::string_view to_string(Tag tag);

/// One "symbol.tag" item, e.g. v1.dx.
struct Term {
    std::string symbol;
    Tag tag = Tag::Val;

    [[nodiscard]] std::string str() const;
    friend bool operator==(const Term&, const Term&) = default;
};

/// '+'-joined terms such as "v1.dy + v2.dx".
struct TermSum {
    std::vector<Term> terms;

    [[nodiscard]] std::string str() const;
    [[nodiscard]] std::size_t size() const { return terms.size(); }
    friend bool operator==(const TermSum&, const TermSum&) = default;
};

/// Parses `term ('+' term)*` with `term := ident '.' tag`, tag in {val,dx,dy,grad}.
/// Whitespace is ignored. Throws ParseError.
[[nodiscard]] TermSum parse_term_sum(std::string_view s);

/// Parses a single term; throws ParseError if the string holds a sum.
[[nodiscard]] Term parse_term(std::string_view s);

} // namespace fem
