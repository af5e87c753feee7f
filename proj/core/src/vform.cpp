#include "fem/vform.hpp"

#include "fem/error.hpp"

#include <cctype>

namespace fem {

namespace {

std::vector<TermSum> parse_all(const std::vector<std::string>& terms)
{
    std::vector<TermSum> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        out.push_back(parse_term_sum(t));
    }
    return out;
}

} // namespace

VarForm VarForm::bilinear(std::vector<Coef> coef, const std::vector<std::string>& test,
                          const std::vector<std::string>& trial)
{
    if (coef.size() != test.size() || test.size() != trial.size()) {
        throw Error("bilinear form: Coef, Test and Trial lists must have equal length");
    }
    const auto ts = parse_all(test);
    const auto us = parse_all(trial);
    VarForm f;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        f.entries.push_back({std::move(coef[k]), ts[k], us[k]});
    }
    return f;
}

VarForm VarForm::linear(std::vector<Coef> coef, const std::vector<std::string>& test)
{
    if (coef.size() != test.size()) {
        throw Error("linear form: Coef and Test lists must have equal length");
    }
    const auto ts = parse_all(test);
    VarForm f;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        f.entries.push_back({std::move(coef[k]), ts[k], std::nullopt});
    }
    return f;
}

bool VarForm::is_linear() const
{
    return !entries.empty() && !entries.front().trial.has_value();
}

VarForm& VarForm::operator+=(const VarForm& other)
{
    if (!entries.empty() && !other.entries.empty() && is_linear() != other.is_linear()) {
        throw Error("cannot combine a linear and a bilinear form");
    }
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
    return *this;
}

namespace {

Term with_tag(const Term& t, Tag tag)
{
    return {t.symbol, tag};
}

void expand_pair(const Coef& c, const Term& v, const Term& u, std::vector<FormEntry>& out)
{
    const bool vg = v.tag == Tag::Grad;
    const bool ug = u.tag == Tag::Grad;
    if (vg != ug) {
        throw Error("cannot pair '" + v.str() + "' with '" + u.str() + "': 'grad' must meet 'grad'");
    }
    if (vg) {
        out.push_back({c, TermSum{{with_tag(v, Tag::Dx)}}, TermSum{{with_tag(u, Tag::Dx)}}});
        out.push_back({c, TermSum{{with_tag(v, Tag::Dy)}}, TermSum{{with_tag(u, Tag::Dy)}}});
    } else {
        out.push_back({c, TermSum{{v}}, TermSum{{u}}});
    }
}

void expand_linear(const Coef& c, const Term& v, std::vector<FormEntry>& out)
{
    if (v.tag != Tag::Grad) {
        out.push_back({c, TermSum{{v}}, std::nullopt});
        return;
    }
    if (const auto* f = c.get<VectorField>()) {
        const VectorField g = *f;
        out.push_back({Coef(ScalarField([g](double x, double y) { return g(x, y)[0]; })),
                       TermSum{{with_tag(v, Tag::Dx)}}, std::nullopt});
        out.push_back({Coef(ScalarField([g](double x, double y) { return g(x, y)[1]; })),
                       TermSum{{with_tag(v, Tag::Dy)}}, std::nullopt});
        return;
    }
    if (const auto* m = c.get<ComponentCoefs>(); m && m->parts.size() == 2) {
        out.push_back({Coef(m->parts[0]), TermSum{{with_tag(v, Tag::Dx)}}, std::nullopt});
        out.push_back({Coef(m->parts[1]), TermSum{{with_tag(v, Tag::Dy)}}, std::nullopt});
        return;
    }
    throw Error("linear term '" + v.str() + "' needs a two-component coefficient");
}

} // namespace

VarForm expand_extended(const VarForm& form)
{
    VarForm out;
    for (const auto& entry : form.entries) {
        if (entry.trial) {
            for (const auto& v : entry.test.terms) {
                for (const auto& u : entry.trial->terms) {
                    expand_pair(entry.coef, v, u, out.entries);
                }
            }
        } else {
            for (const auto& v : entry.test.terms) {
                expand_linear(entry.coef, v, out.entries);
            }
        }
    }
    return out;
}

bool is_elementary(const VarForm& form)
{
    for (const auto& e : form.entries) {
        if (e.test.size() != 1 || e.test.terms[0].tag == Tag::Grad) return false;
        if (e.trial && (e.trial->size() != 1 || e.trial->terms[0].tag == Tag::Grad)) return false;
    }
    return true;
}

namespace {

TermSum rename(const TermSum& s, const std::map<std::string, std::string>& map, const char* side)
{
    TermSum out = s;
    for (auto& t : out.terms) {
        const auto it = map.find(t.symbol);
        if (it == map.end()) {
            throw Error(std::string(side) + " symbol '" + t.symbol + "' is not in the symbol list");
        }
        t.symbol = it->second;
    }
    return out;
}

} // namespace

VarForm rename_symbols(const VarForm& form, const std::map<std::string, std::string>& test_map,
                       const std::map<std::string, std::string>& trial_map)
{
    VarForm out;
    for (const auto& e : form.entries) {
        FormEntry r{e.coef, rename(e.test, test_map, "test"), std::nullopt};
        if (e.trial) r.trial = rename(*e.trial, trial_map, "trial");
        out.entries.push_back(std::move(r));
    }
    return out;
}

VarForm standardize_symbols(const std::vector<std::string>& vstr, const std::vector<std::string>& ustr,
                            const VarForm& form)
{
    std::map<std::string, std::string> vm;
    std::map<std::string, std::string> um;
    for (std::size_t i = 0; i < vstr.size(); ++i) vm[vstr[i]] = "v" + std::to_string(i + 1);
    for (std::size_t i = 0; i < ustr.size(); ++i) um[ustr[i]] = "u" + std::to_string(i + 1);
    return rename_symbols(form, vm, um);
}

int component_index(const std::string& symbol, char prefix)
{
    if (symbol.empty() || symbol[0] != prefix) return -1;
    if (symbol.size() == 1) return 0;
    int idx = 0;
    for (std::size_t i = 1; i < symbol.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(symbol[i]))) return -1;
        idx = 10 * idx + (symbol[i] - '0');
    }
    return idx >= 1 ? idx - 1 : -1;
}

CoefMatrix coef_to_matrix(const Coef& c, const FeMesh& th, int quad_order, Domain domain, std::span<const int> edges)
{
    const bool area = domain == Domain::Area;
    const Eigen::Index rows = area ? th.num_elems() : static_cast<Eigen::Index>(edges.size());
    const Eigen::Index cols = area ? triangle_rule(quad_order).size() : segment_rule(quad_order).size();

    if (const auto* v = c.get<double>()) {
        return CoefMatrix::Constant(rows, cols, *v);
    }
    if (const auto* f = c.get<ScalarField>()) {
        if (!area) return coef_matrix_on_edges(*f, th, edges, quad_order);
        const QuadPoints pts = quadrature_points(th.mesh, triangle_rule(quad_order));
        CoefMatrix m(rows, cols);
        for (Eigen::Index e = 0; e < rows; ++e) {
            for (Eigen::Index p = 0; p < cols; ++p) m(e, p) = (*f)(pts.x(e, p), pts.y(e, p));
        }
        return m;
    }
    if (const auto* f = c.get<VectorField>()) {
        if (area) {
            throw Error("a vector-valued coefficient needs a component expansion on the area");
        }
        return coef_matrix_on_edges(*f, th, edges, quad_order);
    }
    if (const auto* fn = c.get<FeFunction>()) {
        if (area) return coef_matrix_from_dofs(fn->dofs, Tag::Val, th, fn->space, quad_order);
        return edge_matrix_from_dofs(fn->dofs, th, fn->space, edges, quad_order);
    }
    if (const auto* m = c.get<CoefMatrix>()) {
        if (m->rows() != rows || m->cols() != cols) {
            throw Error("coefficient matrix is " + std::to_string(m->rows()) + "x" + std::to_string(m->cols()) +
                        ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        return *m;
    }
    throw Error("component coefficients need the vector shorthand test 'v.val'");
}

} // namespace fem
