#ifndef SUPERCOHOM_SUPERPOLY_HPP
#define SUPERCOHOM_SUPERPOLY_HPP

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "supercohom/field.hpp"

namespace supercohom {

enum class Parity : int { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
    return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}
inline Parity flip(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

/// Named even/odd variables with their integer grades. Even grades must be
/// strictly positive so every homogeneous component is finite-dimensional.
class VariableContext {
public:
    VariableContext(std::vector<std::string> even_names, std::vector<int> even_grades,
                    std::vector<std::string> odd_names, std::vector<int> odd_grades);

    int even_count() const { return static_cast<int>(even_names_.size()); }
    int odd_count() const { return static_cast<int>(odd_names_.size()); }
    const std::string& even_name(int i) const { return even_names_[i]; }
    const std::string& odd_name(int i) const { return odd_names_[i]; }
    int even_grade(int i) const { return even_grades_[i]; }
    int odd_grade(int i) const { return odd_grades_[i]; }
    const std::vector<int>& even_grades() const { return even_grades_; }
    const std::vector<int>& odd_grades() const { return odd_grades_; }

    /// -1 if the name is not declared.
    int find_even(std::string_view name) const;
    int find_odd(std::string_view name) const;

    int odd_mask_grade(std::uint32_t mask) const;
    /// Sum of all negative odd grades: the least grade any monomial can have.
    int min_monomial_grade() const;

private:
    std::vector<std::string> even_names_, odd_names_;
    std::vector<int> even_grades_, odd_grades_;
};

using ContextPtr = std::shared_ptr<const VariableContext>;

/// x^alpha * X_S: even exponent vector plus odd-variable bitmask
/// (bit i set <=> i-th declared odd variable present, factors implicitly
/// ordered by variable index).
struct SuperMonomial {
    std::vector<int> even_exponents;
    std::uint32_t odd_mask = 0;

    bool operator==(const SuperMonomial& o) const {
        return odd_mask == o.odd_mask && even_exponents == o.even_exponents;
    }
    /// Graded lexicographic: total degree, then even exponents, then mask.
    bool operator<(const SuperMonomial& o) const;

    int total_degree() const;
    static SuperMonomial unit(const VariableContext& ctx);
};

int monomial_grade(const SuperMonomial& m, const VariableContext& ctx);
inline Parity monomial_parity(const SuperMonomial& m) {
    return static_cast<Parity>(__builtin_popcount(m.odd_mask) & 1);
}

struct MonoProduct {
    bool zero = false;
    int sign = 1;
    SuperMonomial mono;
};
/// Grassmann-signed monomial product; zero when odd masks overlap.
MonoProduct mono_mul(const SuperMonomial& m1, const SuperMonomial& m2);

/// Finite sum of monomials with nonzero FieldElement coefficients.
class SuperPolynomial {
public:
    SuperPolynomial() = default;
    SuperPolynomial(ContextPtr ctx, Field field) : ctx_(std::move(ctx)), field_(field) {}

    static SuperPolynomial monomial(ContextPtr ctx, Field field, SuperMonomial m,
                                    FieldElement coeff);
    static SuperPolynomial constant(ContextPtr ctx, Field field, FieldElement coeff);

    const ContextPtr& context() const { return ctx_; }
    const Field& field() const { return field_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<SuperMonomial, FieldElement>& terms() const { return terms_; }

    void add_term(const SuperMonomial& m, const FieldElement& c);
    FieldElement coeff(const SuperMonomial& m) const;

    SuperPolynomial operator+(const SuperPolynomial& o) const;
    SuperPolynomial operator-(const SuperPolynomial& o) const;
    SuperPolynomial operator*(const SuperPolynomial& o) const;
    SuperPolynomial operator-() const;
    SuperPolynomial scaled(const FieldElement& c) const;
    SuperPolynomial& operator+=(const SuperPolynomial& o) { return *this = *this + o; }
    SuperPolynomial& operator-=(const SuperPolynomial& o) { return *this = *this - o; }
    bool operator==(const SuperPolynomial& o) const { return terms_ == o.terms_; }

    SuperPolynomial partial_even(int var) const;
    /// LEFT derivative w.r.t. the var-th odd variable.
    SuperPolynomial partial_odd(int var) const;

    /// Common parity/grade of all monomials; nullopt when mixed (zero
    /// polynomial reports Even / 0).
    std::optional<Parity> parity() const;
    std::optional<int> grade() const;

    /// Sum_v w_v * v * d/dv with the signed odd derivative; scales each
    /// monomial by its weighted multiplicity.
    SuperPolynomial euler_weighted(const std::vector<int>& even_weights,
                                   const std::vector<int>& odd_weights) const;

    std::string str() const;

private:
    ContextPtr ctx_;
    Field field_;
    std::map<SuperMonomial, FieldElement> terms_;
};

/// Complete, duplicate-free, grlex-ordered list of monomials of the given
/// grade (and parity when requested). Finite because even grades are >= 1.
std::vector<SuperMonomial> enumerate_monomials(const VariableContext& ctx, int grade,
                                               std::optional<Parity> parity = std::nullopt);

/// Textual forms: `3/2 x^2 y X - Z` (caret powers, juxtaposition with spaces).
std::string format_monomial(const SuperMonomial& m, const VariableContext& ctx);
std::string format_poly(const SuperPolynomial& p);
std::string format_poly_latex(const SuperPolynomial& p);
SuperPolynomial parse_poly(std::string_view text, ContextPtr ctx, const Field& field);

}  // namespace supercohom

#endif
