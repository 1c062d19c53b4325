#include "supercohom/field.hpp"

#include <charconv>

namespace supercohom {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

FieldSpec FieldSpec::prime_field(std::uint64_t p) {
    if (p <= 3) throw UsageError("prime field characteristic must be >= 5, got " + std::to_string(p));
    if (!is_prime(p)) throw UsageError("modulus " + std::to_string(p) + " is not prime");
    return FieldSpec{FieldKind::PrimeField, p};
}

std::string FieldSpec::name() const {
    return kind == FieldKind::Rationals ? "Q" : "Zp(" + std::to_string(modulus) + ")";
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
    if (a == 0) throw ArithmeticError("division by zero in Z_" + std::to_string(p));
    // extended Euclid on signed 128-bit to dodge overflow for large p
    __int128 t = 0, newt = 1;
    __int128 r = p, newr = a;
    while (newr != 0) {
        __int128 q = r / newr;
        t -= q * newt;
        std::swap(t, newt);
        r -= q * newr;
        std::swap(r, newr);
    }
    if (t < 0) t += p;
    return static_cast<std::uint64_t>(t);
}

}  // namespace

void FieldElement::check_same(const FieldElement& o) const {
    if (spec_ != o.spec_)
        throw UsageError("mixed-field operands: " + spec_.name() + " vs " + o.spec_.name());
}

bool FieldElement::is_zero() const {
    return spec_.kind == FieldKind::Rationals ? rat_.is_zero() : res_ == 0;
}

bool FieldElement::is_one() const {
    return spec_.kind == FieldKind::Rationals ? rat_ == 1 : res_ == 1;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
    check_same(o);
    FieldElement r = *this;
    if (spec_.kind == FieldKind::Rationals)
        r.rat_ += o.rat_;
    else {
        r.res_ += o.res_;
        if (r.res_ >= spec_.modulus || r.res_ < res_) r.res_ -= spec_.modulus;
    }
    return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const { return *this + (-o); }

FieldElement FieldElement::operator*(const FieldElement& o) const {
    check_same(o);
    FieldElement r = *this;
    if (spec_.kind == FieldKind::Rationals)
        r.rat_ *= o.rat_;
    else
        r.res_ = mulmod(res_, o.res_, spec_.modulus);
    return r;
}

FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inv(); }

FieldElement FieldElement::operator-() const {
    FieldElement r = *this;
    if (spec_.kind == FieldKind::Rationals)
        r.rat_ = -rat_;
    else
        r.res_ = res_ == 0 ? 0 : spec_.modulus - res_;
    return r;
}

FieldElement FieldElement::inv() const {
    FieldElement r = *this;
    if (spec_.kind == FieldKind::Rationals) {
        if (rat_.is_zero()) throw ArithmeticError("division by zero in Q");
        r.rat_ = 1 / rat_;
    } else {
        r.res_ = invmod(res_, spec_.modulus);
    }
    return r;
}

bool FieldElement::operator==(const FieldElement& o) const {
    check_same(o);
    return spec_.kind == FieldKind::Rationals ? rat_ == o.rat_ : res_ == o.res_;
}

const BigRational& FieldElement::rational() const {
    if (spec_.kind != FieldKind::Rationals) throw UsageError("not a rational element");
    return rat_;
}

std::uint64_t FieldElement::residue() const {
    if (spec_.kind != FieldKind::PrimeField) throw UsageError("not a prime-field element");
    return res_;
}

std::string FieldElement::str() const { return format_scalar(*this); }

FieldElement Field::zero() const {
    FieldElement e;
    e.spec_ = spec_;
    return e;
}

FieldElement Field::one() const { return from_int(1); }

FieldElement Field::from_int(long long v) const { return from_bigint(BigInt(v)); }

FieldElement Field::from_bigint(const BigInt& v) const {
    FieldElement e;
    e.spec_ = spec_;
    if (spec_.kind == FieldKind::Rationals) {
        e.rat_ = BigRational(v);
    } else {
        BigInt m = v % spec_.modulus;
        if (m < 0) m += spec_.modulus;
        e.res_ = static_cast<std::uint64_t>(m);
    }
    return e;
}

FieldElement Field::from_fraction(const BigInt& num, const BigInt& den) const {
    if (den.is_zero()) throw ArithmeticError("zero denominator");
    if (spec_.kind == FieldKind::Rationals) {
        FieldElement e;
        e.spec_ = spec_;
        // cpp_rational requires a positive denominator before canonicalizing
        e.rat_ = den < 0 ? BigRational(-num, -den) : BigRational(num, den);
        return e;
    }
    return from_bigint(num) / from_bigint(den);
}

FieldElement Field::parse(std::string_view text) const {
    size_t slash = text.find('/');
    auto parse_int = [](std::string_view s) -> BigInt {
        if (s.empty()) throw UsageError("empty scalar literal");
        size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw UsageError("malformed scalar literal '" + std::string(s) + "'");
        for (size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9')
                throw UsageError("malformed scalar literal '" + std::string(s) + "'");
        return BigInt(std::string(s));
    };
    if (slash == std::string_view::npos) return from_bigint(parse_int(text));
    BigInt num = parse_int(text.substr(0, slash));
    BigInt den = parse_int(text.substr(slash + 1));
    return from_fraction(num, den);
}

std::string format_scalar(const FieldElement& a) {
    if (a.spec().kind == FieldKind::Rationals) {
        const BigRational& r = a.rational();
        std::string s = numerator(r).str();
        if (denominator(r) != 1) s += "/" + denominator(r).str();
        return s;
    }
    return std::to_string(a.residue());
}

FieldElement parse_scalar(std::string_view text, const FieldSpec& spec) {
    return Field(spec).parse(text);
}

}  // namespace supercohom
