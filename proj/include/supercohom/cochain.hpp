#ifndef SUPERCOHOM_COCHAIN_HPP
#define SUPERCOHOM_COCHAIN_HPP

#include "supercohom/algebra.hpp"

namespace supercohom {

enum class ModuleKind { Trivial, Adjoint, Coadjoint };

/// Coefficient module of the complex. Trivial is always admissible; Adjoint
/// and Coadjoint require a finite-dimensional algebra fully covered by the
/// slice (the action must close inside it).
class ModuleSpec {
public:
    static ModuleSpec trivial() { return ModuleSpec{ModuleKind::Trivial}; }
    static ModuleSpec adjoint() { return ModuleSpec{ModuleKind::Adjoint}; }
    static ModuleSpec coadjoint() { return ModuleSpec{ModuleKind::Coadjoint}; }

    ModuleKind kind() const { return kind_; }
    std::string name() const;

    /// Throws UsageError when the module is not admissible over this slice.
    void check_admissible(const AlgebraSlice& slice) const;

    int dim(const AlgebraSlice& slice) const;
    Parity elem_parity(const AlgebraSlice& slice, int m) const;
    int elem_grade(const AlgebraSlice& slice, int m) const;
    std::string elem_name(const AlgebraSlice& slice, int m) const;

    /// a . m expanded over the module basis: Trivial -> 0; Adjoint -> [a, m];
    /// Coadjoint -> (a . mu)(b) = -(-1)^{p(a) p(mu)} mu([a, b]).
    std::vector<std::pair<int, FieldElement>> action(const AlgebraSlice& slice, int a, int m) const;

private:
    explicit ModuleSpec(ModuleKind k) : kind_(k) {}
    ModuleKind kind_ = ModuleKind::Trivial;
};

/// Canonical cochain-basis label: argument ids with even ids strictly
/// increasing followed by odd ids non-strictly increasing, plus the module
/// basis index the dual is taken against.
struct CochainKey {
    std::vector<int> args;
    int module_index = 0;

    bool operator==(const CochainKey& o) const {
        return module_index == o.module_index && args == o.args;
    }
    bool operator<(const CochainKey& o) const {
        if (args != o.args) return args < o.args;
        return module_index < o.module_index;
    }
};

struct CanonResult {
    bool zero = false;
    int sign = 1;
    std::vector<int> args;
};
/// Sorts an argument tuple into canonical order: -1 per adjacent swap unless
/// both elements are odd; zero on a repeated even id.
CanonResult canonicalize(const AlgebraSlice& slice, std::vector<int> args);

/// A finite linear combination of canonical keys sharing (degree, grade,
/// parity).
class Cochain {
public:
    Cochain() = default;
    Cochain(Field field, int degree, int grade, Parity parity)
        : field_(field), degree_(degree), grade_(grade), parity_(parity) {}

    const Field& field() const { return field_; }
    int degree() const { return degree_; }
    int grade() const { return grade_; }
    Parity parity() const { return parity_; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::map<CochainKey, FieldElement>& coeffs() const { return coeffs_; }

    void add(const CochainKey& key, const FieldElement& c);
    FieldElement coeff(const CochainKey& key) const;

    Cochain operator+(const Cochain& o) const;
    Cochain operator-(const Cochain& o) const;
    Cochain operator-() const;
    Cochain scaled(const FieldElement& c) const;
    bool operator==(const Cochain& o) const {
        return degree_ == o.degree_ && coeffs_ == o.coeffs_;
    }

private:
    Field field_;
    int degree_ = 0, grade_ = 0;
    Parity parity_ = Parity::Even;
    std::map<CochainKey, FieldElement> coeffs_;
};

/// Smallest slice window [lo, hi] whose basis can host every argument of a
/// degree <= k, grade g cochain (and every bracket of two arguments, which
/// stays inside by grade additivity). Adjoint/Coadjoint need the full algebra.
struct GradeWindow {
    int lo = 0, hi = 0;
};
GradeWindow required_window(const AlgebraFamily& family, const ModuleSpec& module, int k, int g);

/// Complete deterministic basis of C^k_{g, parity}(A; M) over the slice.
/// Throws when the slice window is too narrow for the requested cell.
std::vector<CochainKey> cochain_basis(const AlgebraSlice& slice, const ModuleSpec& module, int k,
                                      int g, Parity parity);

/// Matrix of d^k: rows indexed by cochain_basis(k+1, g, parity), columns by
/// cochain_basis(k, g, parity); entry (r, c) is the coefficient of basis dual
/// c in d evaluated at the (k+1)-argument key r.
ExactMatrix differential_matrix(const AlgebraSlice& slice, const ModuleSpec& module, int k, int g,
                                Parity parity);

/// Matrix-free boundary evaluation: the degree-lowering transpose action of
/// differential_matrix. The coefficient of a (k-1)-key t in the result is
/// sum over k-keys K of differential_matrix(k-1)[K, t] * c[K]; a degree-k
/// cochain is a cocycle exactly when this vanishes, and degree-k coboundaries
/// are the boundaries of (k+1)-cochains. d of a degree-0 cochain is zero.
Cochain apply_differential(const AlgebraSlice& slice, const ModuleSpec& module, const Cochain& c);

/// Exterior product of trivial-module cochains: degrees, grades and parities
/// add; each key pair concatenates and canonicalizes with its sign (repeated
/// odd arguments are legal and keep coefficient 1, so a wedge power of C(O)
/// is exactly C(O,...,O)).
Cochain wedge(const AlgebraSlice& slice, const Cochain& a, const Cochain& b);

/// The multilinear expansion of C(f_1, ..., f_k) for grade- and
/// parity-homogeneous element payloads f_i (trivial module).
Cochain cochain_from_args(const AlgebraSlice& slice, const std::vector<Payload>& args,
                          const FieldElement& coeff);

/// Text forms: `C(X,1,x^2) - C(X,x,x)` with generating-function or
/// display-name arguments (trivial module).
Cochain parse_cochain(const AlgebraSlice& slice, std::string_view text);
std::string format_cochain(const AlgebraSlice& slice, const Cochain& c,
                           bool generating_functions = true);
std::string format_cochain_latex(const AlgebraSlice& slice, const Cochain& c);

}  // namespace supercohom

#endif
