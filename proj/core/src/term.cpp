#include "fem/term.hpp"

#include "fem/error.hpp"

#include <cctype>

namespace fem {

std::string_view to_string(Tag tag)
{
    switch (tag) {
    case Tag::Val: return "val";
    case Tag::Dx: return "dx";
    case Tag::Dy: return "dy";
    case Tag::Grad: return "grad";
    }
    return "?";
}

std::string Term::str() const
{
    return symbol + "." + std::string(to_string(tag));
}

std::string TermSum::str() const
{
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) s += " + ";
        s += terms[i].str();
    }
    return s;
}

namespace {

class TermLexer {
public:
    explicit TermLexer(std::string_view s) : s_(s) {}

    TermSum parse()
    {
        TermSum sum;
        sum.terms.push_back(term());
        for (;;) {
            skip_ws();
            if (pos_ == s_.size()) break;
            if (s_[pos_] != '+') fail("expected '+' between terms");
            ++pos_;
            sum.terms.push_back(term());
        }
        return sum;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("term '" + std::string(s_) + "': " + msg, pos_); }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string_view ident()
    {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        }
        return s_.substr(start, pos_ - start);
    }

    Term term()
    {
        const std::string_view sym = ident();
        if (sym.empty()) fail("expected a symbol");
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected '.' after symbol");
        ++pos_;
        const std::size_t tag_pos = pos_;
        const std::string_view tag = ident();
        Term t{std::string(sym), Tag::Val};
        if (tag == "val") t.tag = Tag::Val;
        else if (tag == "dx") t.tag = Tag::Dx;
        else if (tag == "dy") t.tag = Tag::Dy;
        else if (tag == "grad") t.tag = Tag::Grad;
        else {
            pos_ = tag_pos;
            fail("unknown tag '" + std::string(tag) + "' (expected val, dx, dy or grad)");
        }
        return t;
    }
};

} // namespace

TermSum parse_term_sum(std::string_view s)
{
    return TermLexer(s).parse();
}

Term parse_term(std::string_view s)
{
    TermSum sum = parse_term_sum(s);
    if (sum.size() != 1) {
        throw ParseError("expected a single term in '" + std::string(s) + "'", 0);
    }
    return sum.terms.front();
}

} // namespace fem
