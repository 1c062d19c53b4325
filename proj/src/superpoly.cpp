#include "supercohom/superpoly.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <set>

namespace supercohom {

VariableContext::VariableContext(std::vector<std::string> even_names, std::vector<int> even_grades,
                                 std::vector<std::string> odd_names, std::vector<int> odd_grades)
    : even_names_(std::move(even_names)),
      odd_names_(std::move(odd_names)),
      even_grades_(std::move(even_grades)),
      odd_grades_(std::move(odd_grades)) {
    if (even_names_.size() != even_grades_.size() || odd_names_.size() != odd_grades_.size())
        throw UsageError("variable/grading arity mismatch");
    if (odd_names_.size() > 31) throw UsageError("too many odd variables (mask is 32-bit)");
    std::set<std::string> seen;
    for (const auto& n : even_names_)
        if (n.empty() || !seen.insert(n).second) throw UsageError("duplicate or empty variable name '" + n + "'");
    for (const auto& n : odd_names_)
        if (n.empty() || !seen.insert(n).second) throw UsageError("duplicate or empty variable name '" + n + "'");
    for (size_t i = 0; i < even_grades_.size(); ++i)
        if (even_grades_[i] < 1)
            throw UsageError("even variable '" + even_names_[i] + "' must have grade >= 1, got " +
                             std::to_string(even_grades_[i]));
}

int VariableContext::find_even(std::string_view name) const {
    for (int i = 0; i < even_count(); ++i)
        if (even_names_[i] == name) return i;
    return -1;
}

int VariableContext::find_odd(std::string_view name) const {
    for (int i = 0; i < odd_count(); ++i)
        if (odd_names_[i] == name) return i;
    return -1;
}

int VariableContext::odd_mask_grade(std::uint32_t mask) const {
    int g = 0;
    for (int i = 0; i < odd_count(); ++i)
        if (mask & (1u << i)) g += odd_grades_[i];
    return g;
}

int VariableContext::min_monomial_grade() const {
    int g = 0;
    for (int gr : odd_grades_)
        if (gr < 0) g += gr;
    return g;
}

bool SuperMonomial::operator<(const SuperMonomial& o) const {
    int d1 = total_degree(), d2 = o.total_degree();
    if (d1 != d2) return d1 < d2;
    if (even_exponents != o.even_exponents) return even_exponents < o.even_exponents;
    return odd_mask < o.odd_mask;
}

int SuperMonomial::total_degree() const {
    return std::accumulate(even_exponents.begin(), even_exponents.end(), 0) +
           __builtin_popcount(odd_mask);
}

SuperMonomial SuperMonomial::unit(const VariableContext& ctx) {
    return SuperMonomial{std::vector<int>(ctx.even_count(), 0), 0};
}

int monomial_grade(const SuperMonomial& m, const VariableContext& ctx) {
    int g = ctx.odd_mask_grade(m.odd_mask);
    for (size_t i = 0; i < m.even_exponents.size(); ++i)
        g += m.even_exponents[i] * ctx.even_grade(static_cast<int>(i));
    return g;
}

MonoProduct mono_mul(const SuperMonomial& m1, const SuperMonomial& m2) {
    MonoProduct r;
    if (m1.odd_mask & m2.odd_mask) {
        r.zero = true;
        return r;
    }
    // transpositions needed to interleave-sort: pairs (a in m1, b in m2), a > b
    int inversions = 0;
    for (std::uint32_t rest = m2.odd_mask; rest;) {
        int b = __builtin_ctz(rest);
        rest &= rest - 1;
        inversions += __builtin_popcount(m1.odd_mask >> (b + 1));
    }
    r.sign = (inversions & 1) ? -1 : 1;
    r.mono.odd_mask = m1.odd_mask | m2.odd_mask;
    r.mono.even_exponents = m1.even_exponents;
    for (size_t i = 0; i < m2.even_exponents.size(); ++i) r.mono.even_exponents[i] += m2.even_exponents[i];
    return r;
}

SuperPolynomial SuperPolynomial::monomial(ContextPtr ctx, Field field, SuperMonomial m,
                                          FieldElement coeff) {
    SuperPolynomial p(std::move(ctx), field);
    p.add_term(m, coeff);
    return p;
}

SuperPolynomial SuperPolynomial::constant(ContextPtr ctx, Field field, FieldElement coeff) {
    SuperMonomial u = SuperMonomial::unit(*ctx);
    return monomial(std::move(ctx), field, u, coeff);
}

void SuperPolynomial::add_term(const SuperMonomial& m, const FieldElement& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

FieldElement SuperPolynomial::coeff(const SuperMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? field_.zero() : it->second;
}

SuperPolynomial SuperPolynomial::operator+(const SuperPolynomial& o) const {
    SuperPolynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

SuperPolynomial SuperPolynomial::operator-(const SuperPolynomial& o) const {
    SuperPolynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

SuperPolynomial SuperPolynomial::operator-() const { return scaled(-field_.one()); }

SuperPolynomial SuperPolynomial::scaled(const FieldElement& c) const {
    SuperPolynomial r(ctx_, field_);
    if (c.is_zero()) return r;
    for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
    return r;
}

SuperPolynomial SuperPolynomial::operator*(const SuperPolynomial& o) const {
    SuperPolynomial r(ctx_, field_);
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) {
            MonoProduct p = mono_mul(m1, m2);
            if (p.zero) continue;
            FieldElement c = c1 * c2;
            if (p.sign < 0) c = -c;
            r.add_term(p.mono, c);
        }
    return r;
}

SuperPolynomial SuperPolynomial::partial_even(int var) const {
    SuperPolynomial r(ctx_, field_);
    for (const auto& [m, c] : terms_) {
        int e = m.even_exponents[var];
        if (e == 0) continue;
        SuperMonomial d = m;
        d.even_exponents[var] = e - 1;
        r.add_term(d, c * field_.from_int(e));
    }
    return r;
}

SuperPolynomial SuperPolynomial::partial_odd(int var) const {
    SuperPolynomial r(ctx_, field_);
    std::uint32_t bit = 1u << var;
    for (const auto& [m, c] : terms_) {
        if (!(m.odd_mask & bit)) continue;
        SuperMonomial d = m;
        d.odd_mask &= ~bit;
        int below = __builtin_popcount(m.odd_mask & (bit - 1));
        r.add_term(d, (below & 1) ? -c : c);
    }
    return r;
}

std::optional<Parity> SuperPolynomial::parity() const {
    if (terms_.empty()) return Parity::Even;
    Parity p = monomial_parity(terms_.begin()->first);
    for (const auto& [m, c] : terms_)
        if (monomial_parity(m) != p) return std::nullopt;
    return p;
}

std::optional<int> SuperPolynomial::grade() const {
    if (terms_.empty()) return 0;
    int g = monomial_grade(terms_.begin()->first, *ctx_);
    for (const auto& [m, c] : terms_)
        if (monomial_grade(m, *ctx_) != g) return std::nullopt;
    return g;
}

SuperPolynomial SuperPolynomial::euler_weighted(const std::vector<int>& even_weights,
                                                const std::vector<int>& odd_weights) const {
    SuperPolynomial r(ctx_, field_);
    for (const auto& [m, c] : terms_) {
        long long w = 0;
        for (size_t i = 0; i < m.even_exponents.size(); ++i)
            w += static_cast<long long>(even_weights[i]) * m.even_exponents[i];
        for (int j = 0; j < ctx_->odd_count(); ++j)
            if (m.odd_mask & (1u << j)) w += odd_weights[j];
        if (w != 0) r.add_term(m, c * field_.from_int(w));
    }
    return r;
}

std::string SuperPolynomial::str() const { return format_poly(*this); }

std::vector<SuperMonomial> enumerate_monomials(const VariableContext& ctx, int grade,
                                               std::optional<Parity> parity) {
    std::vector<SuperMonomial> out;
    int n = ctx.even_count();
    std::vector<int> exps(n, 0);
    std::function<void(int, int, std::uint32_t)> rec = [&](int var, int remaining, std::uint32_t mask) {
        if (var == n) {
            if (remaining == 0) out.push_back(SuperMonomial{exps, mask});
            return;
        }
        int g = ctx.even_grade(var);
        for (int e = 0; e * g <= remaining; ++e) {
            exps[var] = e;
            rec(var + 1, remaining - e * g, mask);
        }
        exps[var] = 0;
    };
    for (std::uint32_t mask = 0; mask < (1u << ctx.odd_count()); ++mask) {
        if (parity && (static_cast<int>(*parity) != (__builtin_popcount(mask) & 1))) continue;
        int target = grade - ctx.odd_mask_grade(mask);
        if (target < 0) continue;
        rec(0, target, mask);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string format_monomial(const SuperMonomial& m, const VariableContext& ctx) {
    std::string s;
    for (int i = 0; i < ctx.even_count(); ++i) {
        int e = m.even_exponents[i];
        if (e == 0) continue;
        if (!s.empty()) s += ' ';
        s += ctx.even_name(i);
        if (e > 1) s += '^' + std::to_string(e);
    }
    for (int j = 0; j < ctx.odd_count(); ++j) {
        if (!(m.odd_mask & (1u << j))) continue;
        if (!s.empty()) s += ' ';
        s += ctx.odd_name(j);
    }
    return s.empty() ? "1" : s;
}

std::string format_poly(const SuperPolynomial& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : p.terms()) {
        std::string cs = format_scalar(c);
        bool neg = cs[0] == '-';
        if (neg) cs.erase(cs.begin());
        std::string ms = format_monomial(m, *p.context());
        std::string body;
        if (ms == "1")
            body = cs;
        else if (cs == "1")
            body = ms;
        else
            body = cs + ' ' + ms;
        if (s.empty())
            s = (neg ? "-" : "") + body;
        else
            s += (neg ? " - " : " + ") + body;
    }
    return s;
}

std::string format_poly_latex(const SuperPolynomial& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : p.terms()) {
        const VariableContext& ctx = *p.context();
        std::string ms;
        for (int i = 0; i < ctx.even_count(); ++i) {
            int e = m.even_exponents[i];
            if (e == 0) continue;
            ms += ctx.even_name(i);
            if (e > 1) ms += "^{" + std::to_string(e) + "}";
        }
        for (int j = 0; j < ctx.odd_count(); ++j)
            if (m.odd_mask & (1u << j)) ms += ctx.odd_name(j);
        std::string cs;
        FieldElement a = c;
        bool neg = false;
        if (a.spec().kind == FieldKind::Rationals && a.rational() < 0) {
            neg = true;
            a = -a;
        }
        if (a.spec().kind == FieldKind::Rationals && denominator(a.rational()) != 1)
            cs = "\\frac{" + numerator(a.rational()).str() + "}{" + denominator(a.rational()).str() + "}";
        else
            cs = format_scalar(a);
        std::string body = (cs == "1" && !ms.empty()) ? ms : cs + (ms.empty() ? "" : " " + ms);
        if (ms.empty() && cs == "1") body = "1";
        if (s.empty())
            s = (neg ? "-" : "") + body;
        else
            s += (neg ? " - " : " + ") + body;
    }
    return s;
}

namespace {

struct PolyParser {
    std::string_view text;
    size_t pos = 0;
    const VariableContext& ctx;
    const Field& field;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '*')) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() { return text[pos]; }

    [[noreturn]] void fail(const std::string& msg) {
        throw UsageError("polynomial parse error at position " + std::to_string(pos) + ": " + msg +
                         " in '" + std::string(text) + "'");
    }

    BigInt parse_digits() {
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected digits");
        return BigInt(std::string(text.substr(start, pos - start)));
    }

    // longest declared-name match at current position
    int match_name(bool& is_even) {
        size_t best_len = 0;
        int best = -1;
        for (int i = 0; i < ctx.even_count(); ++i) {
            const std::string& n = ctx.even_name(i);
            if (n.size() > best_len && text.substr(pos, n.size()) == n) {
                best_len = n.size();
                best = i;
                is_even = true;
            }
        }
        for (int i = 0; i < ctx.odd_count(); ++i) {
            const std::string& n = ctx.odd_name(i);
            if (n.size() > best_len && text.substr(pos, n.size()) == n) {
                best_len = n.size();
                best = i;
                is_even = false;
            }
        }
        if (best >= 0) pos += best_len;
        return best;
    }

    SuperPolynomial parse() {
        SuperPolynomial out(std::make_shared<VariableContext>(ctx), field);
        bool first = true;
        while (!at_end()) {
            int sign = 1;
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                if (peek() == '-') sign = -1;
                ++pos;
            } else if (!first) {
                fail("expected '+' or '-' between terms");
            }
            first = false;
            skip_ws();
            if (pos >= text.size()) fail("dangling sign");
            // optional coefficient
            FieldElement coeff = field.one();
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                BigInt num = parse_digits();
                if (pos < text.size() && text[pos] == '/') {
                    ++pos;
                    BigInt den = parse_digits();
                    coeff = field.from_fraction(num, den);
                } else {
                    coeff = field.from_bigint(num);
                }
            }
            if (sign < 0) coeff = -coeff;
            SuperMonomial m = SuperMonomial::unit(ctx);
            bool saw_var = false;
            while (true) {
                skip_ws();
                if (pos >= text.size() || peek() == '+' || peek() == '-') break;
                bool is_even = false;
                int v = match_name(is_even);
                if (v < 0) fail("unknown variable");
                saw_var = true;
                int exp = 1;
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    exp = static_cast<int>(parse_digits());
                }
                if (is_even) {
                    m.even_exponents[v] += exp;
                } else {
                    if (exp > 1 || (m.odd_mask & (1u << v))) {
                        // Grassmann square is zero
                        coeff = field.zero();
                    }
                    // sign of appending X_v to the right of current factors
                    int above = __builtin_popcount(m.odd_mask >> (v + 1));
                    if (above & 1) coeff = -coeff;
                    m.odd_mask |= (1u << v);
                }
            }
            (void)saw_var;
            out.add_term(m, coeff);
        }
        return out;
    }
};

}  // namespace

SuperPolynomial parse_poly(std::string_view text, ContextPtr ctx, const Field& field) {
    // "0" parses to the zero polynomial
    std::string trimmed(text);
    PolyParser p{text, 0, *ctx, field};
    size_t i = trimmed.find_first_not_of(" \t");
    if (i != std::string::npos && trimmed[i] == '0' &&
        trimmed.find_first_not_of(" \t", i + 1) == std::string::npos)
        return SuperPolynomial(ctx, field);
    SuperPolynomial r = p.parse();
    return SuperPolynomial(ctx, field) + r;
}

}  // namespace supercohom
