#pragma once

#include "fem/field.hpp"
#include "fem/fespace.hpp"
#include "fem/mesh.hpp"
#include "fem/term.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace fem {

namespace detail {
template <class F>
inline constexpr bool is_eigen_v = std::is_base_of_v<Eigen::EigenBase<std::decay_t<F>>, std::decay_t<F>>;
} // namespace detail

/// A finite element function given by its dof vector.
struct FeFunction {
    FeSpace space;
    Eigen::VectorXd dofs;
};

/// One coefficient matrix per component, used with the vector shorthand
/// test 'v.val' on multi-component systems.
struct ComponentCoefs {
    std::vector<CoefMatrix> parts;
};

/// Coefficient of a form entry: a constant or function of (x,y), an FE
/// function, or a precomputed coefficient matrix. Vector-valued data
/// (VectorField, ComponentCoefs) is accepted where a component expansion or a
/// normal contraction gives it a scalar meaning.
class Coef {
public:
    using Value = std::variant<double, ScalarField, VectorField, FeFunction, CoefMatrix, ComponentCoefs>;

    Coef(double c) : value_(c) {}
    Coef(int c) : value_(static_cast<double>(c)) {}
    Coef(FeFunction f) : value_(std::move(f)) {}
    Coef(CoefMatrix m) : value_(std::move(m)) {}
    Coef(ComponentCoefs m) : value_(std::move(m)) {}
    template <class Derived>
    Coef(const Eigen::MatrixBase<Derived>& m) : value_(CoefMatrix(m))
    {
    }

    template <class F>
        requires(std::is_invocable_r_v<double, F, double, double> && !std::is_arithmetic_v<std::decay_t<F>> &&
                 !detail::is_eigen_v<F>)
    Coef(F&& f) : value_(ScalarField(std::forward<F>(f)))
    {
    }

    template <class F>
        requires(std::is_invocable_r_v<std::array<double, 2>, F, double, double> &&
                 !std::is_invocable_r_v<double, F, double, double> && !detail::is_eigen_v<F>)
    Coef(F&& f) : value_(VectorField(std::forward<F>(f)))
    {
    }

    [[nodiscard]] const Value& value() const { return value_; }
    template <class T>
    [[nodiscard]] const T* get() const
    {
        return std::get_if<T>(&value_);
    }
    [[nodiscard]] bool is_vector_valued() const { return get<VectorField>() || get<ComponentCoefs>(); }

private:
    Value value_;
};

struct FormEntry {
    Coef coef;
    TermSum test;
    std::optional<TermSum> trial; // absent for linear forms
};

/// Parallel (Coef, Test, Trial) lists.
struct VarForm {
    std::vector<FormEntry> entries;

    [[nodiscard]] static VarForm bilinear(std::vector<Coef> coef, const std::vector<std::string>& test,
                                          const std::vector<std::string>& trial);
    [[nodiscard]] static VarForm linear(std::vector<Coef> coef, const std::vector<std::string>& test);

    [[nodiscard]] bool is_linear() const;
    [[nodiscard]] std::size_t size() const { return entries.size(); }

    /// Concatenates entries; both forms must be of the same kind.
    VarForm& operator+=(const VarForm& other);
};

/// Distributes '+'-joined sums into elementary (test, trial) products carrying
/// the original coefficient; 'grad' x 'grad' becomes (dx,dx) + (dy,dy).
/// Linear entries: sums are split, and 'grad' with a two-component
/// coefficient becomes (f1, .dx) + (f2, .dy).
[[nodiscard]] VarForm expand_extended(const VarForm& form);

/// True when every entry holds one term per side and no 'grad'.
[[nodiscard]] bool is_elementary(const VarForm& form);

/// Renames test symbols by lookup in `test_map` and trial symbols in `trial_map`.
/// Throws when a symbol is missing from its map.
[[nodiscard]] VarForm rename_symbols(const VarForm& form, const std::map<std::string, std::string>& test_map,
                                     const std::map<std::string, std::string>& trial_map);

/// vstr[i] -> "v{i+1}", ustr[i] -> "u{i+1}".
[[nodiscard]] VarForm standardize_symbols(const std::vector<std::string>& vstr, const std::vector<std::string>& ustr,
                                          const VarForm& form);

/// 0-based component of a standard symbol: "v" -> 0, "v3" -> 2 (prefix 'v' or 'u').
/// Returns -1 when the symbol is not of that form.
[[nodiscard]] int component_index(const std::string& symbol, char prefix);

enum class Domain { Area, Boundary };

/// Normalizes a coefficient into a coefficient matrix: NT x ng on the area,
/// NBE x ng on the listed boundary edges. Vector fields on edges are
/// contracted with the outward normal.
[[nodiscard]] CoefMatrix coef_to_matrix(const Coef& c, const FeMesh& th, int quad_order, Domain domain,
                                        std::span<const int> edges = {});

} // namespace fem
