#ifndef SUPERCOHOM_FIELD_HPP
#define SUPERCOHOM_FIELD_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace supercohom {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Bad input: malformed files, mixed fields, invalid parameters.
struct UsageError : Error {
    using Error::Error;
};
/// Exact-arithmetic failure (division by zero and friends).
struct ArithmeticError : Error {
    using Error::Error;
};
/// A cross-check the implementation guarantees has failed; always a bug.
struct InternalError : Error {
    using Error::Error;
};

enum class FieldKind { Rationals, PrimeField };

bool is_prime(std::uint64_t n);

/// Identifies the active coefficient field: Q or Z_p with p prime, p >= 5
/// (characteristics 2 and 3 are rejected).
struct FieldSpec {
    FieldKind kind = FieldKind::Rationals;
    std::uint64_t modulus = 0;  // PrimeField only

    static FieldSpec rationals() { return FieldSpec{FieldKind::Rationals, 0}; }
    static FieldSpec prime_field(std::uint64_t p);

    bool operator==(const FieldSpec& o) const { return kind == o.kind && modulus == o.modulus; }
    bool operator!=(const FieldSpec& o) const { return !(*this == o); }
    std::string name() const;
};

/// An immutable element of the active field in canonical form: a reduced
/// fraction with positive denominator over Q, or a residue in [0, p) over Z_p.
/// Equality is representational equality.
class FieldElement {
public:
    FieldElement() = default;  // zero over Q

    FieldSpec spec() const { return spec_; }
    bool is_zero() const;
    bool is_one() const;

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement inv() const;
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    FieldElement& operator/=(const FieldElement& o) { return *this = *this / o; }

    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    /// Numerator/denominator access, rationals only.
    const BigRational& rational() const;
    std::uint64_t residue() const;

    std::string str() const;

private:
    friend class Field;
    FieldSpec spec_ = FieldSpec::rationals();
    BigRational rat_;      // Rationals
    std::uint64_t res_ = 0;  // PrimeField

    void check_same(const FieldElement& o) const;
};

/// Factory for elements of one field; all higher modules hold a Field and
/// stay agnostic of which one it is.
class Field {
public:
    Field() : spec_(FieldSpec::rationals()) {}
    explicit Field(FieldSpec spec) : spec_(spec) {}

    const FieldSpec& spec() const { return spec_; }
    bool operator==(const Field& o) const { return spec_ == o.spec_; }

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement from_int(long long v) const;
    FieldElement from_bigint(const BigInt& v) const;
    FieldElement from_fraction(const BigInt& num, const BigInt& den) const;

    /// Literal grammar: [-]?digits(/digits)?
    FieldElement parse(std::string_view text) const;

private:
    FieldSpec spec_;
};

/// format/parse round-trip: parse(format(a)) == a.
std::string format_scalar(const FieldElement& a);
FieldElement parse_scalar(std::string_view text, const FieldSpec& spec);

}  // namespace supercohom

#endif
