#include "fem/assembly.hpp"

#include "fem/error.hpp"

#include <map>
#include <numeric>

namespace fem {

void SparseTriples::append(const SparseTriples& other, int row_offset, int col_offset)
{
    ii.reserve(ii.size() + other.size());
    jj.reserve(jj.size() + other.size());
    ss.reserve(ss.size() + other.size());
    for (std::size_t k = 0; k < other.size(); ++k) {
        ii.push_back(other.ii[k] + row_offset);
        jj.push_back(other.jj[k] + col_offset);
        ss.push_back(other.ss[k]);
    }
}

SparseTriples& SparseTriples::operator+=(const SparseTriples& other)
{
    if (nrows == 0 && ncols == 0 && size() == 0) {
        nrows = other.nrows;
        ncols = other.ncols;
    }
    if (other.nrows != nrows || other.ncols != ncols) {
        throw Error("cannot add sparse contributions of different shapes");
    }
    append(other);
    return *this;
}

SparseTriples& SparseTriples::operator*=(double s)
{
    for (double& v : ss) v *= s;
    return *this;
}

SparseMatrix compress(const SparseTriples& t)
{
    if (t.ii.size() != t.ss.size() || t.jj.size() != t.ss.size()) {
        throw Error("sparse index lists differ in length");
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t.ii[k] < 0 || t.ii[k] >= t.nrows || t.jj[k] < 0 || t.jj[k] >= t.ncols) {
            throw Error("sparse index (" + std::to_string(t.ii[k]) + "," + std::to_string(t.jj[k]) +
                        ") outside a " + std::to_string(t.nrows) + "x" + std::to_string(t.ncols) + " matrix");
        }
        trip.emplace_back(t.ii[k], t.jj[k], t.ss[k]);
    }
    SparseMatrix m(t.nrows, t.ncols);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

namespace {

struct Elementary {
    CoefMatrix coef;
    Tag test;
    Tag trial;
};

// Integration support shared by the area and boundary kernels: one measure
// per row, quadrature weights, and a source of basis tables with matching rows.
struct Support {
    const FeMesh& th;
    Domain domain;
    std::span<const int> edges;
    int quad_order;
    Eigen::VectorXd measure;
    Eigen::RowVectorXd weight;

    Support(const FeMesh& mesh, Domain d, std::span<const int> e, int order)
        : th(mesh), domain(d), edges(e), quad_order(order)
    {
        if (domain == Domain::Area) {
            const QuadRule2d& rule = triangle_rule(order);
            measure = Eigen::Map<const Eigen::VectorXd>(th.topo.area.data(), th.num_elems());
            weight = Eigen::Map<const Eigen::RowVectorXd>(rule.weight.data(), rule.size());
        } else {
            const QuadRule1d& rule = segment_rule(order);
            measure.resize(static_cast<Eigen::Index>(edges.size()));
            for (std::size_t r = 0; r < edges.size(); ++r) {
                measure[static_cast<Eigen::Index>(r)] = th.topo.edgeLength[edges[r]];
            }
            weight = Eigen::Map<const Eigen::RowVectorXd>(rule.weight.data(), rule.size());
        }
    }

    [[nodiscard]] Eigen::Index rows() const { return measure.size(); }
};

// Basis tables plus the global dof of every (row, local function) pair.
struct Basis {
    std::vector<BasisTable> table;
    std::vector<int> dofs; // rows x n, row-major
    int n = 0;
};

class BasisCache {
public:
    explicit BasisCache(const Support& s) : s_(s) {}

    const Basis& get(FeSpace space, Tag tag)
    {
        const auto key = std::make_pair(space.degree(), static_cast<int>(tag));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const DofMap& map = dofmap(space);
        Basis b;
        if (s_.domain == Domain::Area) {
            b.table = tabulate_basis(s_.th.mesh, space, tag, triangle_rule(s_.quad_order));
            b.n = map.ndofLocal;
            b.dofs = map.elem2dof;
        } else {
            TraceTable tr = tabulate_trace(s_.th, map, tag, s_.edges, segment_rule(s_.quad_order));
            b.table = std::move(tr.values);
            b.n = space.trace_dofs();
            for (const auto& row : tr.dofs) b.dofs.insert(b.dofs.end(), row.begin(), row.end());
        }
        return cache_.emplace(key, std::move(b)).first->second;
    }

    const DofMap& dofmap(FeSpace space)
    {
        auto it = maps_.find(space.degree());
        if (it == maps_.end()) {
            it = maps_.emplace(space.degree(), build_dof_map(s_.th.mesh, s_.th.topo, space)).first;
        }
        return it->second;
    }

private:
    const Support& s_;
    std::map<std::pair<int, int>, Basis> cache_;
    std::map<int, DofMap> maps_;
};

// Local matrices of all rows, column s = i*ndofu + j, accumulated over the
// entries in order; then scattered through the dof maps.
SparseTriples bilinear_kernel(const Support& s, BasisCache& cache, const std::vector<Elementary>& entries,
                              FeSpace test, FeSpace trial)
{
    const int nrow = cache.dofmap(test).NNdof;
    const int ncol = cache.dofmap(trial).NNdof;
    SparseTriples out(nrow, ncol);
    if (entries.empty() || s.rows() == 0) return out;

    const int nv = s.domain == Domain::Area ? test.local_dofs() : test.trace_dofs();
    const int nu = s.domain == Domain::Area ? trial.local_dofs() : trial.trace_dofs();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s.rows(), static_cast<Eigen::Index>(nv) * nu);
    for (const auto& entry : entries) {
        const Basis& vb = cache.get(test, entry.test);
        const Basis& ub = cache.get(trial, entry.trial);
        const Eigen::MatrixXd wc = entry.coef.array().rowwise() * s.weight.array();
        for (int i = 0; i < nv; ++i) {
            const Eigen::ArrayXXd wv = wc.array() * vb.table[i].array();
            for (int j = 0; j < nu; ++j) {
                K.col(i * nu + j).array() += s.measure.array() * (wv * ub.table[j].array()).rowwise().sum();
            }
        }
    }
    const Basis& vb = cache.get(test, entries.front().test);
    const Basis& ub = cache.get(trial, entries.front().trial);
    const Eigen::Index rows = s.rows();
    out.ii.reserve(static_cast<std::size_t>(K.size()));
    out.jj.reserve(static_cast<std::size_t>(K.size()));
    out.ss.reserve(static_cast<std::size_t>(K.size()));
    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nu; ++j) {
            for (Eigen::Index e = 0; e < rows; ++e) {
                out.push(vb.dofs[static_cast<std::size_t>(e) * nv + i], ub.dofs[static_cast<std::size_t>(e) * nu + j],
                         K(e, i * nu + j));
            }
        }
    }
    return out;
}

Eigen::VectorXd linear_kernel(const Support& s, BasisCache& cache, const std::vector<Elementary>& entries,
                              FeSpace test)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(cache.dofmap(test).NNdof);
    if (entries.empty() || s.rows() == 0) return out;
    const int nv = s.domain == Domain::Area ? test.local_dofs() : test.trace_dofs();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(s.rows(), nv);
    for (const auto& entry : entries) {
        const Basis& vb = cache.get(test, entry.test);
        const Eigen::MatrixXd wc = entry.coef.array().rowwise() * s.weight.array();
        for (int i = 0; i < nv; ++i) {
            F.col(i).array() += s.measure.array() * (wc.array() * vb.table[i].array()).rowwise().sum();
        }
    }
    const Basis& vb = cache.get(test, entries.front().test);
    for (int i = 0; i < nv; ++i) {
        for (Eigen::Index e = 0; e < s.rows(); ++e) {
            out[vb.dofs[static_cast<std::size_t>(e) * nv + i]] += F(e, i);
        }
    }
    return out;
}

Elementary to_elementary(const FormEntry& e, const Support& s)
{
    return {coef_to_matrix(e.coef, s.th, s.quad_order, s.domain, s.edges), e.test.terms[0].tag,
            e.trial ? e.trial->terms[0].tag : Tag::Val};
}

void require_kind(const VarForm& form, bool linear)
{
    if (form.entries.empty()) return;
    for (const auto& e : form.entries) {
        if (e.trial.has_value() == linear) {
            throw Error(linear ? "expected a linear form (no trial terms)" : "expected a bilinear form (trial terms)");
        }
    }
}

// Resolves the 'v.val' shorthand for vector coefficients on multi-component systems.
VarForm expand_shorthand(const VarForm& form, int ncomp, Domain domain)
{
    if (ncomp < 2) return form;
    VarForm out;
    for (const auto& e : form.entries) {
        const bool shorthand = !e.trial && e.test.size() == 1 && e.test.terms[0].symbol == "v" &&
                               e.test.terms[0].tag == Tag::Val && e.coef.is_vector_valued();
        if (!shorthand) {
            out.entries.push_back(e);
            continue;
        }
        const Tag tag = e.test.terms[0].tag;
        if (const auto* f = e.coef.get<VectorField>()) {
            if (ncomp != 2 || domain == Domain::Boundary) {
                throw Error("test 'v.val' with a two-component function needs a two-component area form");
            }
            const VectorField g = *f;
            out.entries.push_back({Coef(ScalarField([g](double x, double y) { return g(x, y)[0]; })),
                                   TermSum{{Term{"v1", tag}}}, std::nullopt});
            out.entries.push_back({Coef(ScalarField([g](double x, double y) { return g(x, y)[1]; })),
                                   TermSum{{Term{"v2", tag}}}, std::nullopt});
        } else {
            const auto& parts = e.coef.get<ComponentCoefs>()->parts;
            if (static_cast<int>(parts.size()) != ncomp) {
                throw Error("test 'v.val' expects " + std::to_string(ncomp) + " coefficient components, got " +
                            std::to_string(parts.size()));
            }
            for (int c = 0; c < ncomp; ++c) {
                out.entries.push_back(
                    {Coef(parts[c]), TermSum{{Term{"v" + std::to_string(c + 1), tag}}}, std::nullopt});
            }
        }
    }
    return out;
}

int resolve_component(const std::string& symbol, char prefix, int ncomp)
{
    const int c = component_index(symbol, prefix);
    if (c < 0) {
        throw Error("symbol '" + symbol + "' is not standard; expected " + std::string(1, prefix) +
                    "1.. (use standardize_symbols)");
    }
    if (c >= ncomp) {
        throw Error("symbol '" + symbol + "' refers to component " + std::to_string(c + 1) + " but only " +
                    std::to_string(ncomp) + " spaces are given");
    }
    return c;
}

SystemMatrix system_matrix(const Support& s, const VarForm& form, std::span<const FeSpace> spaces)
{
    require_kind(form, false);
    const int ncomp = static_cast<int>(spaces.size());
    if (ncomp == 0) throw Error("no finite element spaces given");
    BasisCache cache(s);
    SystemMatrix out;
    out.NNdofu = component_dofs(s.th, spaces);
    std::vector<int> offset(static_cast<std::size_t>(ncomp) + 1, 0);
    std::partial_sum(out.NNdofu.begin(), out.NNdofu.end(), offset.begin() + 1);
    out.triples = SparseTriples(offset.back(), offset.back());

    const VarForm ext = expand_extended(form);
    std::vector<std::pair<int, int>> order;
    std::map<std::pair<int, int>, std::vector<Elementary>> blocks;
    for (const auto& e : ext.entries) {
        const int i = resolve_component(e.test.terms[0].symbol, 'v', ncomp);
        const int j = resolve_component(e.trial->terms[0].symbol, 'u', ncomp);
        if (!blocks.contains({i, j})) order.emplace_back(i, j);
        blocks[{i, j}].push_back(to_elementary(e, s));
    }
    for (const auto& [i, j] : order) {
        const SparseTriples block = bilinear_kernel(s, cache, blocks[{i, j}], spaces[i], spaces[j]);
        out.triples.append(block, offset[i], offset[j]);
    }
    return out;
}

Eigen::VectorXd system_vector(const Support& s, const VarForm& form, std::span<const FeSpace> spaces)
{
    require_kind(form, true);
    const int ncomp = static_cast<int>(spaces.size());
    if (ncomp == 0) throw Error("no finite element spaces given");
    BasisCache cache(s);
    const std::vector<int> nn = component_dofs(s.th, spaces);
    std::vector<int> offset(static_cast<std::size_t>(ncomp) + 1, 0);
    std::partial_sum(nn.begin(), nn.end(), offset.begin() + 1);

    const VarForm ext = expand_extended(expand_shorthand(form, ncomp, s.domain));
    std::vector<std::vector<Elementary>> comps(static_cast<std::size_t>(ncomp));
    for (const auto& e : ext.entries) {
        const int i = resolve_component(e.test.terms[0].symbol, 'v', ncomp);
        comps[i].push_back(to_elementary(e, s));
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(offset.back());
    for (int i = 0; i < ncomp; ++i) {
        out.segment(offset[i], nn[i]) = linear_kernel(s, cache, comps[i], spaces[i]);
    }
    return out;
}

std::vector<Elementary> scalar_entries(const Support& s, const VarForm& form)
{
    std::vector<Elementary> entries;
    for (const auto& e : expand_extended(form).entries) {
        entries.push_back(to_elementary(e, s));
    }
    return entries;
}

} // namespace

std::vector<int> component_dofs(const FeMesh& th, std::span<const FeSpace> spaces)
{
    std::vector<int> nn;
    for (const auto& sp : spaces) {
        const int k = sp.degree();
        nn.push_back(k == 1 ? th.num_nodes()
                            : (k == 2 ? th.num_nodes() + th.num_edges()
                                      : th.num_nodes() + 2 * th.num_edges() + th.num_elems()));
    }
    return nn;
}

SparseTriples assemble_scalar_2d(const FeMesh& th, const VarForm& form, FeSpace test, FeSpace trial, int quad_order)
{
    require_kind(form, false);
    const Support s(th, Domain::Area, {}, quad_order);
    BasisCache cache(s);
    return bilinear_kernel(s, cache, scalar_entries(s, form), test, trial);
}

Eigen::VectorXd assemble_scalar_linear_2d(const FeMesh& th, const VarForm& form, FeSpace test, int quad_order)
{
    require_kind(form, true);
    const Support s(th, Domain::Area, {}, quad_order);
    BasisCache cache(s);
    return linear_kernel(s, cache, scalar_entries(s, form), test);
}

SparseTriples assemble_scalar_1d(const FeMesh& th, std::span<const int> edges, const VarForm& form, FeSpace test,
                                 FeSpace trial, int quad_order)
{
    require_kind(form, false);
    const Support s(th, Domain::Boundary, edges, quad_order);
    BasisCache cache(s);
    return bilinear_kernel(s, cache, scalar_entries(s, form), test, trial);
}

Eigen::VectorXd assemble_scalar_linear_1d(const FeMesh& th, std::span<const int> edges, const VarForm& form,
                                          FeSpace test, int quad_order)
{
    require_kind(form, true);
    const Support s(th, Domain::Boundary, edges, quad_order);
    BasisCache cache(s);
    return linear_kernel(s, cache, scalar_entries(s, form), test);
}

SystemMatrix assemble_matrix(const FeMesh& th, const VarForm& form, std::span<const FeSpace> spaces, int quad_order)
{
    return system_matrix(Support(th, Domain::Area, {}, quad_order), form, spaces);
}

SystemMatrix assemble_boundary_matrix(const FeMesh& th, std::span<const int> edges, const VarForm& form,
                                      std::span<const FeSpace> spaces, int quad_order)
{
    return system_matrix(Support(th, Domain::Boundary, edges, quad_order), form, spaces);
}

Eigen::VectorXd assemble_vector(const FeMesh& th, const VarForm& form, std::span<const FeSpace> spaces, int quad_order)
{
    return system_vector(Support(th, Domain::Area, {}, quad_order), form, spaces);
}

Eigen::VectorXd assemble_boundary_vector(const FeMesh& th, std::span<const int> edges, const VarForm& form,
                                         std::span<const FeSpace> spaces, int quad_order)
{
    return system_vector(Support(th, Domain::Boundary, edges, quad_order), form, spaces);
}

} // namespace fem
