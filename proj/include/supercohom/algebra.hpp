#ifndef SUPERCOHOM_ALGEBRA_HPP
#define SUPERCOHOM_ALGEBRA_HPP

#include <map>
#include <optional>
#include <unordered_map>

#include "supercohom/linalg.hpp"
#include "supercohom/superpoly.hpp"

namespace supercohom {

enum class FamilyKind { W, S, Po, H, K, B, Le, SB, SLe, M, SM, Custom };

std::string family_kind_name(FamilyKind k);
std::optional<FamilyKind> parse_family_kind(std::string_view s);

/// Finite-dimensional algebra given by an explicit structure-constant table.
struct CustomAlgebra {
    struct Elem {
        std::string name;
        Parity parity = Parity::Even;
        int grade = 0;
    };
    std::vector<Elem> elems;
    // [i,j] = sum c * e_k; missing (j,i) entries are derived by super skew-symmetry
    std::map<std::pair<int, int>, std::vector<std::pair<FieldElement, int>>> table;
};

CustomAlgebra parse_custom_algebra(std::string_view text, const Field& field);

/// An element: one generating function for the Poisson/contact/Buttin-type
/// families, or one coefficient polynomial per coordinate vector field for
/// W/S (even components first, then odd).
struct Payload {
    std::vector<SuperPolynomial> comps;

    bool is_zero() const;
    Payload operator+(const Payload& o) const;
    Payload operator-(const Payload& o) const;
    Payload scaled(const FieldElement& c) const;
    bool operator==(const Payload& o) const { return comps == o.comps; }
};

class AlgebraFamily {
public:
    /// ctx == nullptr selects the family's standard variables and grading
    /// (x,p,q,X grade 1; t,T grade 2).
    static AlgebraFamily make(FamilyKind kind, int n, int m, Field field, ContextPtr ctx = nullptr);
    static AlgebraFamily make_custom(CustomAlgebra data, Field field);

    FamilyKind kind() const { return kind_; }
    int n() const { return n_; }
    int m() const { return m_; }
    const Field& field() const { return field_; }
    const ContextPtr& ctx() const { return ctx_; }
    const CustomAlgebra& custom() const { return *custom_; }

    bool is_custom() const { return kind_ == FamilyKind::Custom; }
    bool vector_field_rep() const { return kind_ == FamilyKind::W || kind_ == FamilyKind::S; }
    bool odd_bracket() const;
    bool has_constraint() const;
    bool is_quotient() const;  // Le, SLe, H
    bool finite_dimensional() const;

    /// grade(element) = grade(generating function) + grade_shift()
    int grade_shift() const { return shift_; }
    int min_element_grade() const;
    /// Max attainable grade; nullopt when unbounded.
    std::optional<int> max_element_grade() const;
    int component_count() const;  // payload size
    std::string name() const;     // e.g. "SLe(2)", "W(1|2)"

    /// The bracket on payloads (quotient families drop the central component).
    Payload bracket(const Payload& f, const Payload& g) const;
    /// Divergence for S, Delta for SB/SLe, (1-E)d/dT - Delta for SM.
    SuperPolynomial constraint_apply(const Payload& f) const;

    std::optional<Parity> element_parity(const Payload& f) const;
    std::optional<int> element_grade(const Payload& f) const;

    Payload payload_from_poly(SuperPolynomial p) const;  // genfn families
    SuperPolynomial zero_poly() const { return SuperPolynomial(ctx_, field_); }

private:
    FamilyKind kind_ = FamilyKind::B;
    int n_ = 0, m_ = 0;
    Field field_;
    ContextPtr ctx_;
    std::shared_ptr<const CustomAlgebra> custom_;
    int shift_ = 0;

    void validate_grading();
    SuperPolynomial poisson_part(const SuperPolynomial& f, const SuperPolynomial& g) const;
    SuperPolynomial buttin_part(const SuperPolynomial& f, const SuperPolynomial& g) const;
    SuperPolynomial delta_op(const SuperPolynomial& f) const;  // 2f - E(f)
    SuperPolynomial apply_field(const Payload& d, const SuperPolynomial& h) const;
    SuperPolynomial drop_center(SuperPolynomial p) const;
};

struct BasisElement {
    int id = -1;
    Payload payload;  // empty for Custom
    Parity parity = Parity::Even;
    int grade = 0;
    std::string display_name;
};

/// Deterministic basis of the grade-g homogeneous component (kernel of the
/// constraint operator for the special families, center excluded for the
/// quotients). ids are local to the returned list.
std::vector<BasisElement> enumerate_basis(const AlgebraFamily& family, int grade);

struct BracketEntry {
    bool out_of_range = false;
    std::vector<std::pair<int, FieldElement>> terms;  // (basis id, coefficient)
};

/// A grade-truncated realization: indexed basis plus exact structure constants.
/// Immutable after build; concurrent reads are safe.
class AlgebraSlice {
public:
    const AlgebraFamily& family() const { return family_; }
    int g_lo() const { return g_lo_; }
    int g_hi() const { return g_hi_; }
    int size() const { return static_cast<int>(basis_.size()); }
    const BasisElement& elem(int id) const { return basis_[id]; }
    const std::vector<BasisElement>& basis() const { return basis_; }
    const std::vector<int>& ids_at_grade(int g) const;
    int find_by_name(std::string_view name) const;  // -1 when absent

    /// [b_i, b_j] expanded in the basis; out_of_range when the product grade
    /// leaves the window.
    BracketEntry bracket_terms(int i, int j) const;

    /// Exact coordinates of a grade-homogeneous payload over ids_at_grade(g);
    /// throws when the payload is outside the span (or, for constrained
    /// families, outside the kernel).
    ExactVector expand_at_grade(int g, const Payload& p) const;

private:
    friend AlgebraSlice build_slice(const AlgebraFamily&, int, int, const std::vector<Payload>&);
    AlgebraFamily family_{AlgebraFamily::make_custom(CustomAlgebra{}, Field())};
    int g_lo_ = 0, g_hi_ = 0;
    std::vector<BasisElement> basis_;
    std::map<int, std::vector<int>> by_grade_;
    // expansion data per grade: coordinate map + echelonized basis matrix
    struct GradeData {
        std::vector<std::pair<int, SuperMonomial>> coords;  // (component, monomial)
        std::map<std::pair<int, SuperMonomial>, int> coord_index;
        EchelonForm ech;  // of the (coords x basis) matrix, with transform
    };
    std::map<int, GradeData> grade_data_;
    std::vector<BracketEntry> table_;  // (i,j) for i <= j at index i*size+j
    std::vector<int> decl_of_;         // Custom: slice id -> declaration index
    std::vector<int> empty_;

    ExactVector payload_coords(const GradeData& gd, const Payload& p) const;
};

/// Structure constants are computed by exact linear solves; nonzero bracket
/// products of grade outside [g_lo, g_hi] are flagged, not dropped (products
/// that vanish identically are safe at any grade). user_basis entries
/// replace the automatic basis of their grade (validated to span it).
AlgebraSlice build_slice(const AlgebraFamily& family, int g_lo, int g_hi,
                         const std::vector<Payload>& user_basis = {});

/// B -> Le, SB -> SLe, Po -> H.
AlgebraFamily quotient_center(const AlgebraFamily& family);

struct VerifyReport {
    bool ok = true;
    std::vector<std::string> violations;
};
/// Super skew-symmetry, grade additivity and the super Jacobi identity on all
/// triples whose intermediate grades stay inside the window.
VerifyReport verify_algebra(const AlgebraSlice& slice, long long max_triples = -1);

struct GradingElement {
    int grade0_even_count = 0;
    ExactVector coeffs;  // over the grade-0 even basis elements
    Payload payload;     // empty for Custom
};
/// A grade-0 even combination a0 with [a0, b] = grade(b) * b for every basis
/// element in the window; nullopt when none exists.
std::optional<GradingElement> find_internal_grading_element(const AlgebraSlice& slice);

}  // namespace supercohom

#endif
