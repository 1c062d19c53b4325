#include "supercohom/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace supercohom {

std::string family_kind_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::W: return "W";
        case FamilyKind::S: return "S";
        case FamilyKind::Po: return "Po";
        case FamilyKind::H: return "H";
        case FamilyKind::K: return "K";
        case FamilyKind::B: return "B";
        case FamilyKind::Le: return "Le";
        case FamilyKind::SB: return "SB";
        case FamilyKind::SLe: return "SLe";
        case FamilyKind::M: return "M";
        case FamilyKind::SM: return "SM";
        case FamilyKind::Custom: return "Custom";
    }
    return "?";
}

std::optional<FamilyKind> parse_family_kind(std::string_view s) {
    static const std::pair<const char*, FamilyKind> names[] = {
        {"W", FamilyKind::W},   {"S", FamilyKind::S},     {"Po", FamilyKind::Po},
        {"H", FamilyKind::H},   {"K", FamilyKind::K},     {"B", FamilyKind::B},
        {"Le", FamilyKind::Le}, {"SB", FamilyKind::SB},   {"SLe", FamilyKind::SLe},
        {"M", FamilyKind::M},   {"SM", FamilyKind::SM},   {"Custom", FamilyKind::Custom},
    };
    for (const auto& [n, k] : names)
        if (s == n) return k;
    return std::nullopt;
}

namespace {

std::vector<std::string> letter_names(int count, const char* singles, const char* prefix) {
    std::vector<std::string> out;
    if (count <= 3) {
        for (int i = 0; i < count; ++i) out.push_back(std::string(1, singles[i]));
    } else {
        for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
    }
    return out;
}

ContextPtr standard_context(FamilyKind kind, int n, int m) {
    std::vector<std::string> even_names, odd_names;
    std::vector<int> even_grades, odd_grades;
    switch (kind) {
        case FamilyKind::W:
        case FamilyKind::S:
            even_names = letter_names(n, "xyz", "x");
            even_grades.assign(n, 1);
            odd_names = letter_names(m, "XYZ", "X");
            odd_grades.assign(m, 1);
            break;
        case FamilyKind::Po:
        case FamilyKind::H:
            for (int i = 1; i <= n; ++i) even_names.push_back(n == 1 ? "p" : "p" + std::to_string(i));
            for (int i = 1; i <= n; ++i) even_names.push_back(n == 1 ? "q" : "q" + std::to_string(i));
            even_grades.assign(2 * n, 1);
            odd_names = letter_names(m, "XYZ", "X");
            odd_grades.assign(m, 1);
            break;
        case FamilyKind::K:
            even_names.push_back("t");
            even_grades.push_back(2);
            for (int i = 1; i <= n; ++i) even_names.push_back(n == 1 ? "p" : "p" + std::to_string(i));
            for (int i = 1; i <= n; ++i) even_names.push_back(n == 1 ? "q" : "q" + std::to_string(i));
            for (int i = 0; i < 2 * n; ++i) even_grades.push_back(1);
            odd_names = letter_names(m, "XYZ", "X");
            odd_grades.assign(m, 1);
            break;
        case FamilyKind::B:
        case FamilyKind::Le:
        case FamilyKind::SB:
        case FamilyKind::SLe:
            even_names = letter_names(n, "xyz", "x");
            even_grades.assign(n, 1);
            odd_names = letter_names(n, "XYZ", "X");
            odd_grades.assign(n, 1);
            break;
        case FamilyKind::M:
        case FamilyKind::SM:
            even_names = letter_names(n, "xyz", "x");
            even_grades.assign(n, 1);
            odd_names.push_back("T");
            odd_grades.push_back(2);
            for (auto& nm : letter_names(n, "XYZ", "X")) odd_names.push_back(nm);
            for (int i = 0; i < n; ++i) odd_grades.push_back(1);
            break;
        case FamilyKind::Custom:
            break;
    }
    return std::make_shared<VariableContext>(std::move(even_names), std::move(even_grades),
                                             std::move(odd_names), std::move(odd_grades));
}

}  // namespace

bool Payload::is_zero() const {
    for (const auto& c : comps)
        if (!c.is_zero()) return false;
    return true;
}

Payload Payload::operator+(const Payload& o) const {
    if (comps.size() != o.comps.size()) throw UsageError("payload component mismatch");
    Payload r = *this;
    for (size_t i = 0; i < comps.size(); ++i) r.comps[i] += o.comps[i];
    return r;
}

Payload Payload::operator-(const Payload& o) const {
    if (comps.size() != o.comps.size()) throw UsageError("payload component mismatch");
    Payload r = *this;
    for (size_t i = 0; i < comps.size(); ++i) r.comps[i] -= o.comps[i];
    return r;
}

Payload Payload::scaled(const FieldElement& c) const {
    Payload r = *this;
    for (auto& p : r.comps) p = p.scaled(c);
    return r;
}

AlgebraFamily AlgebraFamily::make(FamilyKind kind, int n, int m, Field field, ContextPtr ctx) {
    if (kind == FamilyKind::Custom) throw UsageError("use make_custom for custom algebras");
    AlgebraFamily f;
    f.kind_ = kind;
    f.n_ = n;
    f.m_ = m;
    f.field_ = field;
    f.ctx_ = ctx ? std::move(ctx) : standard_context(kind, n, m);
    f.validate_grading();
    return f;
}

AlgebraFamily AlgebraFamily::make_custom(CustomAlgebra data, Field field) {
    AlgebraFamily f;
    f.kind_ = FamilyKind::Custom;
    f.field_ = field;
    f.custom_ = std::make_shared<CustomAlgebra>(std::move(data));
    return f;
}

bool AlgebraFamily::odd_bracket() const {
    switch (kind_) {
        case FamilyKind::B:
        case FamilyKind::Le:
        case FamilyKind::SB:
        case FamilyKind::SLe:
        case FamilyKind::M:
        case FamilyKind::SM:
            return true;
        default:
            return false;
    }
}

bool AlgebraFamily::has_constraint() const {
    return kind_ == FamilyKind::S || kind_ == FamilyKind::SB || kind_ == FamilyKind::SLe ||
           kind_ == FamilyKind::SM;
}

bool AlgebraFamily::is_quotient() const {
    return kind_ == FamilyKind::Le || kind_ == FamilyKind::SLe || kind_ == FamilyKind::H;
}

bool AlgebraFamily::finite_dimensional() const {
    if (is_custom()) return true;
    return ctx_->even_count() == 0;
}

void AlgebraFamily::validate_grading() {
    const VariableContext& c = *ctx_;
    auto arity = [&](int evens, int odds) {
        if (c.even_count() != evens || c.odd_count() != odds)
            throw UsageError(name() + " needs " + std::to_string(evens) + " even and " +
                             std::to_string(odds) + " odd variables, got " +
                             std::to_string(c.even_count()) + "/" + std::to_string(c.odd_count()));
    };
    auto bad = [&](const std::string& what) {
        throw UsageError(name() + ": inconsistent grading (" + what + ")");
    };
    switch (kind_) {
        case FamilyKind::W:
        case FamilyKind::S:
            arity(n_, m_);
            shift_ = 0;
            break;
        case FamilyKind::B:
        case FamilyKind::Le:
        case FamilyKind::SB:
        case FamilyKind::SLe: {
            arity(n_, n_);
            int s = c.even_grade(0) + c.odd_grade(0);
            for (int i = 0; i < n_; ++i)
                if (c.even_grade(i) + c.odd_grade(i) != s) bad("g(x_i)+g(X_i) must not depend on i");
            shift_ = -s;
            break;
        }
        case FamilyKind::M:
        case FamilyKind::SM: {
            arity(n_, n_ + 1);
            int s = c.odd_grade(0);  // T
            for (int i = 0; i < n_; ++i)
                if (c.even_grade(i) + c.odd_grade(i + 1) != s) bad("g(x_i)+g(X_i) must equal g(T)");
            shift_ = -s;
            break;
        }
        case FamilyKind::Po:
        case FamilyKind::H: {
            arity(2 * n_, m_);
            int s = n_ > 0 ? c.even_grade(0) + c.even_grade(n_) : (m_ > 0 ? 2 * c.odd_grade(0) : 0);
            for (int i = 0; i < n_; ++i)
                if (c.even_grade(i) + c.even_grade(n_ + i) != s) bad("g(p_i)+g(q_i) must not depend on i");
            for (int k = 0; k < m_; ++k)
                if (2 * c.odd_grade(k) != s) bad("2 g(X_k) must equal g(p)+g(q)");
            shift_ = -s;
            break;
        }
        case FamilyKind::K: {
            arity(2 * n_ + 1, m_);
            int s = c.even_grade(0);  // t
            for (int i = 0; i < n_; ++i)
                if (c.even_grade(1 + i) + c.even_grade(1 + n_ + i) != s) bad("g(p_i)+g(q_i) must equal g(t)");
            for (int k = 0; k < m_; ++k)
                if (2 * c.odd_grade(k) != s) bad("2 g(X_k) must equal g(t)");
            shift_ = -s;
            break;
        }
        case FamilyKind::Custom:
            break;
    }
}

int AlgebraFamily::component_count() const {
    if (is_custom()) return 0;
    return vector_field_rep() ? ctx_->even_count() + ctx_->odd_count() : 1;
}

int AlgebraFamily::min_element_grade() const {
    if (is_custom()) {
        int g = 0;
        bool first = true;
        for (const auto& e : custom_->elems) {
            if (first || e.grade < g) g = e.grade;
            first = false;
        }
        return g;
    }
    int base = ctx_->min_monomial_grade();
    if (vector_field_rep()) {
        int gmax = 0;
        for (int i = 0; i < ctx_->even_count(); ++i) gmax = std::max(gmax, ctx_->even_grade(i));
        for (int i = 0; i < ctx_->odd_count(); ++i) gmax = std::max(gmax, ctx_->odd_grade(i));
        return base - gmax;
    }
    return base + shift_;
}

std::optional<int> AlgebraFamily::max_element_grade() const {
    if (is_custom()) {
        int g = 0;
        bool first = true;
        for (const auto& e : custom_->elems) {
            if (first || e.grade > g) g = e.grade;
            first = false;
        }
        return g;
    }
    if (ctx_->even_count() > 0) return std::nullopt;
    // purely Grassmann: bounded by the sum of positive odd grades
    int base = 0;
    for (int i = 0; i < ctx_->odd_count(); ++i)
        if (ctx_->odd_grade(i) > 0) base += ctx_->odd_grade(i);
    if (vector_field_rep()) {
        int gmin = ctx_->odd_grade(0);
        for (int i = 0; i < ctx_->odd_count(); ++i) gmin = std::min(gmin, ctx_->odd_grade(i));
        return base - gmin;
    }
    return base + shift_;
}

std::string AlgebraFamily::name() const {
    if (is_custom()) return "Custom";
    std::string k = family_kind_name(kind_);
    switch (kind_) {
        case FamilyKind::W:
        case FamilyKind::S:
            return k + "(" + std::to_string(n_) + "|" + std::to_string(m_) + ")";
        case FamilyKind::Po:
        case FamilyKind::H:
            return k + "(" + std::to_string(2 * n_) + "|" + std::to_string(m_) + ")";
        case FamilyKind::K:
            return k + "(" + std::to_string(2 * n_ + 1) + "|" + std::to_string(m_) + ")";
        default:
            return k + "(" + std::to_string(n_) + ")";
    }
}

Payload AlgebraFamily::payload_from_poly(SuperPolynomial p) const {
    if (vector_field_rep() || is_custom())
        throw UsageError(name() + " elements are not single generating functions");
    Payload r;
    r.comps.push_back(std::move(p));
    return r;
}

namespace {

Parity require_parity(const SuperPolynomial& p, const char* what) {
    auto par = p.parity();
    if (!par) throw UsageError(std::string("mixed-parity ") + what + ": " + format_poly(p));
    return *par;
}

}  // namespace

SuperPolynomial AlgebraFamily::poisson_part(const SuperPolynomial& f, const SuperPolynomial& g) const {
    const int pbase = kind_ == FamilyKind::K ? 1 : 0;
    SuperPolynomial r(ctx_, field_);
    for (int i = 0; i < n_; ++i) {
        r += f.partial_even(pbase + i) * g.partial_even(pbase + n_ + i);
        r -= f.partial_even(pbase + n_ + i) * g.partial_even(pbase + i);
    }
    if (m_ > 0) {
        Parity pf = require_parity(f, "bracket operand");
        SuperPolynomial odd_sum(ctx_, field_);
        for (int k = 0; k < m_; ++k) odd_sum += f.partial_odd(k) * g.partial_odd(k);
        if (pf == Parity::Even)
            r -= odd_sum;
        else
            r += odd_sum;
    }
    return r;
}

SuperPolynomial AlgebraFamily::buttin_part(const SuperPolynomial& f, const SuperPolynomial& g) const {
    // odd partner of x_i: index i for B-type, i+1 for M-type (T is odd index 0)
    const int obase = (kind_ == FamilyKind::M || kind_ == FamilyKind::SM) ? 1 : 0;
    Parity pf = require_parity(f, "bracket operand");
    SuperPolynomial r(ctx_, field_);
    for (int i = 0; i < n_; ++i) {
        r += f.partial_even(i) * g.partial_odd(obase + i);
        SuperPolynomial second = f.partial_odd(obase + i) * g.partial_even(i);
        if (pf == Parity::Even)
            r += second;
        else
            r -= second;
    }
    return r;
}

SuperPolynomial AlgebraFamily::delta_op(const SuperPolynomial& f) const {
    // 2f - E(f) with E excluding the contact variable (t resp. T)
    std::vector<int> we(ctx_->even_count(), 1), wo(ctx_->odd_count(), 1);
    if (kind_ == FamilyKind::K) we[0] = 0;
    if (kind_ == FamilyKind::M || kind_ == FamilyKind::SM) wo[0] = 0;
    return f.scaled(field_.from_int(2)) - f.euler_weighted(we, wo);
}

SuperPolynomial AlgebraFamily::apply_field(const Payload& d, const SuperPolynomial& h) const {
    SuperPolynomial r(ctx_, field_);
    for (int i = 0; i < ctx_->even_count(); ++i) r += d.comps[i] * h.partial_even(i);
    for (int k = 0; k < ctx_->odd_count(); ++k) r += d.comps[ctx_->even_count() + k] * h.partial_odd(k);
    return r;
}

SuperPolynomial AlgebraFamily::drop_center(SuperPolynomial p) const {
    SuperMonomial unit = SuperMonomial::unit(*ctx_);
    FieldElement c = p.coeff(unit);
    if (!c.is_zero()) p.add_term(unit, -c);
    return p;
}

Payload AlgebraFamily::bracket(const Payload& f, const Payload& g) const {
    if (is_custom()) throw UsageError("custom algebras define brackets by table, not payloads");
    if (static_cast<int>(f.comps.size()) != component_count() ||
        static_cast<int>(g.comps.size()) != component_count())
        throw UsageError("payload arity mismatch in bracket");

    if (vector_field_rep()) {
        Parity p1 = *element_parity(f), p2 = *element_parity(g);
        Payload r;
        for (int v = 0; v < component_count(); ++v) {
            SuperPolynomial c = apply_field(f, g.comps[v]);
            SuperPolynomial d = apply_field(g, f.comps[v]);
            if (p1 == Parity::Odd && p2 == Parity::Odd)
                c += d;
            else
                c -= d;
            r.comps.push_back(std::move(c));
        }
        return r;
    }

    const SuperPolynomial& fp = f.comps[0];
    const SuperPolynomial& gp = g.comps[0];
    SuperPolynomial r(ctx_, field_);
    switch (kind_) {
        case FamilyKind::Po:
        case FamilyKind::H:
            r = poisson_part(fp, gp);
            break;
        case FamilyKind::K: {
            r = delta_op(fp) * gp.partial_even(0) - fp.partial_even(0) * delta_op(gp) -
                poisson_part(fp, gp);
            break;
        }
        case FamilyKind::B:
        case FamilyKind::Le:
        case FamilyKind::SB:
        case FamilyKind::SLe:
            r = buttin_part(fp, gp);
            break;
        case FamilyKind::M:
        case FamilyKind::SM: {
            // odd contact bracket on generating functions:
            //   Mb(f,g) = D(f) dg/dT + (-1)^{p(f)} df/dT D(g) - Bb(f,g)
            // with D(h) = 2h - E(h) and E the Euler operator that weights
            // every variable except T by 1.
            Parity pf = require_parity(fp, "bracket operand");
            auto D = [&](const SuperPolynomial& h) {
                std::vector<int> we(ctx_->even_count(), 1), wo(ctx_->odd_count(), 1);
                wo[0] = 0;  // T carries weight 0
                return h.scaled(field_.from_int(2)) - h.euler_weighted(we, wo);
            };
            SuperPolynomial first = D(fp) * gp.partial_odd(0);
            SuperPolynomial second = fp.partial_odd(0) * D(gp);
            if (pf == Parity::Odd) second = -second;
            r = first + second - buttin_part(fp, gp);
            break;
        }
        default:
            throw UsageError("bracket: unsupported family");
    }
    if (is_quotient()) r = drop_center(std::move(r));
    Payload out;
    out.comps.push_back(std::move(r));
    return out;
}

SuperPolynomial AlgebraFamily::constraint_apply(const Payload& f) const {
    switch (kind_) {
        case FamilyKind::S: {
            SuperPolynomial r(ctx_, field_);
            for (int i = 0; i < n_; ++i) r += f.comps[i].partial_even(i);
            for (int k = 0; k < m_; ++k) {
                const SuperPolynomial& gk = f.comps[n_ + k];
                if (gk.is_zero()) continue;
                Parity pg = require_parity(gk, "divergence component");
                SuperPolynomial d = gk.partial_odd(k);
                if (pg == Parity::Odd) d = -d;
                r += d;
            }
            return r;
        }
        case FamilyKind::SB:
        case FamilyKind::SLe: {
            SuperPolynomial r(ctx_, field_);
            for (int i = 0; i < n_; ++i) r += f.comps[0].partial_even(i).partial_odd(i);
            return r;
        }
        case FamilyKind::SM: {
            SuperPolynomial dT = f.comps[0].partial_odd(0);
            std::vector<int> we(ctx_->even_count(), 1), wo(ctx_->odd_count(), 1);
            wo[0] = 0;
            SuperPolynomial r = dT - dT.euler_weighted(we, wo);
            for (int i = 0; i < n_; ++i) r -= f.comps[0].partial_even(i).partial_odd(i + 1);
            return r;
        }
        default:
            throw UsageError(name() + " has no constraint operator");
    }
}

std::optional<Parity> AlgebraFamily::element_parity(const Payload& f) const {
    if (is_custom()) throw UsageError("custom payloads carry no polynomial data");
    std::optional<Parity> result;
    auto combine = [&](std::optional<Parity> p) -> bool {
        if (!p) return false;
        if (!result)
            result = p;
        else if (*result != *p)
            return false;
        return true;
    };
    if (vector_field_rep()) {
        for (int v = 0; v < component_count(); ++v) {
            if (f.comps[v].is_zero()) continue;
            auto p = f.comps[v].parity();
            if (!p) return std::nullopt;
            Parity ep = v < ctx_->even_count() ? *p : flip(*p);
            if (!combine(ep)) return std::nullopt;
        }
        return result ? result : std::optional<Parity>(Parity::Even);
    }
    auto p = f.comps[0].parity();
    if (!p) return std::nullopt;
    return odd_bracket() ? flip(*p) : *p;
}

std::optional<int> AlgebraFamily::element_grade(const Payload& f) const {
    if (is_custom()) throw UsageError("custom payloads carry no polynomial data");
    std::optional<int> result;
    if (vector_field_rep()) {
        for (int v = 0; v < component_count(); ++v) {
            if (f.comps[v].is_zero()) continue;
            auto g = f.comps[v].grade();
            if (!g) return std::nullopt;
            int vg = v < ctx_->even_count() ? ctx_->even_grade(v) : ctx_->odd_grade(v - ctx_->even_count());
            int eg = *g - vg;
            if (!result)
                result = eg;
            else if (*result != eg)
                return std::nullopt;
        }
        return result ? result : std::optional<int>(0);
    }
    auto g = f.comps[0].grade();
    if (!g) return std::nullopt;
    return *g + shift_;
}

AlgebraFamily quotient_center(const AlgebraFamily& family) {
    FamilyKind q;
    switch (family.kind()) {
        case FamilyKind::B: q = FamilyKind::Le; break;
        case FamilyKind::SB: q = FamilyKind::SLe; break;
        case FamilyKind::Po: q = FamilyKind::H; break;
        default:
            throw UsageError(family.name() + " has no distinguished center to quotient by");
    }
    return AlgebraFamily::make(q, family.n(), family.m(), family.field(), family.ctx());
}

std::vector<BasisElement> enumerate_basis(const AlgebraFamily& family, int grade) {
    std::vector<BasisElement> out;
    const Field& F = family.field();

    if (family.is_custom()) {
        const auto& elems = family.custom().elems;
        for (size_t i = 0; i < elems.size(); ++i)
            if (elems[i].grade == grade)
                out.push_back(BasisElement{static_cast<int>(i), Payload{}, elems[i].parity, grade,
                                           elems[i].name});
        return out;
    }

    const ContextPtr& ctx = family.ctx();
    const int ncomp = family.component_count();

    // candidate payloads, each a single monomial in a single component
    std::vector<Payload> candidates;
    if (family.vector_field_rep()) {
        for (int v = 0; v < ncomp; ++v) {
            int vg = v < ctx->even_count() ? ctx->even_grade(v) : ctx->odd_grade(v - ctx->even_count());
            for (const auto& mono : enumerate_monomials(*ctx, grade + vg)) {
                Payload p;
                p.comps.assign(ncomp, SuperPolynomial(ctx, F));
                p.comps[v] = SuperPolynomial::monomial(ctx, F, mono, F.one());
                candidates.push_back(std::move(p));
            }
        }
    } else {
        int gamma = grade - family.grade_shift();
        for (const auto& mono : enumerate_monomials(*ctx, gamma)) {
            if (family.is_quotient() && mono == SuperMonomial::unit(*ctx)) continue;
            Payload p;
            p.comps.push_back(SuperPolynomial::monomial(ctx, F, mono, F.one()));
            candidates.push_back(std::move(p));
        }
    }

    std::vector<Payload> payloads;
    if (!family.has_constraint()) {
        payloads = std::move(candidates);
    } else {
        // kernel of the constraint operator, parity block by parity block
        for (Parity par : {Parity::Even, Parity::Odd}) {
            std::vector<int> cols;
            for (size_t i = 0; i < candidates.size(); ++i)
                if (*family.element_parity(candidates[i]) == par) cols.push_back(static_cast<int>(i));
            if (cols.empty()) continue;
            std::map<std::pair<int, SuperMonomial>, int> rowidx;
            std::vector<std::vector<std::pair<int, FieldElement>>> colentries(cols.size());
            for (size_t c = 0; c < cols.size(); ++c) {
                SuperPolynomial img = family.constraint_apply(candidates[cols[c]]);
                for (const auto& [mono, coef] : img.terms()) {
                    auto key = std::make_pair(0, mono);
                    auto it = rowidx.find(key);
                    int r;
                    if (it == rowidx.end()) {
                        r = static_cast<int>(rowidx.size());
                        rowidx.emplace(key, r);
                    } else {
                        r = it->second;
                    }
                    colentries[c].emplace_back(r, coef);
                }
            }
            ExactMatrix mat(static_cast<int>(rowidx.size()), static_cast<int>(cols.size()), F);
            for (size_t c = 0; c < cols.size(); ++c)
                for (const auto& [r, v] : colentries[c]) mat.add(r, static_cast<int>(c), v);
            for (const auto& vec : kernel_basis(mat)) {
                Payload p;
                p.comps.assign(ncomp, SuperPolynomial(ctx, F));
                for (size_t c = 0; c < cols.size(); ++c) {
                    if (vec[c].is_zero()) continue;
                    p = p + candidates[cols[c]].scaled(vec[c]);
                }
                payloads.push_back(std::move(p));
            }
        }
    }

    for (auto& p : payloads) {
        auto par = family.element_parity(p);
        if (!par) throw InternalError("enumerate_basis produced a mixed-parity element");
        out.push_back(BasisElement{0, std::move(p), *par, grade, ""});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const BasisElement& a, const BasisElement& b) { return a.parity < b.parity; });
    for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

const std::vector<int>& AlgebraSlice::ids_at_grade(int g) const {
    auto it = by_grade_.find(g);
    return it == by_grade_.end() ? empty_ : it->second;
}

int AlgebraSlice::find_by_name(std::string_view name) const {
    for (const auto& b : basis_)
        if (b.display_name == name) return b.id;
    return -1;
}

ExactVector AlgebraSlice::payload_coords(const GradeData& gd, const Payload& p) const {
    const Field& F = family_.field();
    ExactVector v(gd.coords.size(), F.zero());
    for (size_t comp = 0; comp < p.comps.size(); ++comp) {
        for (const auto& [mono, coef] : p.comps[comp].terms()) {
            auto it = gd.coord_index.find({static_cast<int>(comp), mono});
            if (it == gd.coord_index.end())
                throw UsageError("payload term " + format_monomial(mono, *family_.ctx()) +
                                 " is outside the grade slice");
            v[it->second] = coef;
        }
    }
    return v;
}

ExactVector AlgebraSlice::expand_at_grade(int g, const Payload& p) const {
    if (family_.is_custom()) throw UsageError("expand_at_grade needs polynomial payloads");
    auto it = grade_data_.find(g);
    if (it == grade_data_.end()) throw UsageError("grade " + std::to_string(g) + " outside slice");
    const GradeData& gd = it->second;
    ExactVector v = payload_coords(gd, p);
    // transform * basis-matrix = rref with all columns pivotal, so the first
    // rank entries of transform*v are the coordinates
    const Field& F = family_.field();
    int nb = static_cast<int>(ids_at_grade(g).size());
    ExactVector w(gd.ech.transform.rows(), F.zero());
    for (int r = 0; r < gd.ech.transform.rows(); ++r)
        for (const auto& [c, val] : gd.ech.transform.row(r)) w[r] += val * v[c];
    for (int r = nb; r < static_cast<int>(w.size()); ++r)
        if (!w[r].is_zero())
            throw InternalError("payload is outside the span of the grade-" + std::to_string(g) +
                                " basis");
    ExactVector x(w.begin(), w.begin() + nb);
    return x;
}

BracketEntry AlgebraSlice::bracket_terms(int i, int j) const {
    const int B = size();
    if (i <= j) return table_[static_cast<size_t>(i) * B + j];
    BracketEntry e = table_[static_cast<size_t>(j) * B + i];
    bool both_odd = basis_[i].parity == Parity::Odd && basis_[j].parity == Parity::Odd;
    // [b_i,b_j] = -(-1)^{p_i p_j} [b_j,b_i]
    if (!both_odd)
        for (auto& [k, c] : e.terms) c = -c;
    return e;
}

AlgebraSlice build_slice(const AlgebraFamily& family, int g_lo, int g_hi,
                         const std::vector<Payload>& user_basis) {
    if (g_lo > g_hi) throw UsageError("build_slice: empty grade range");
    AlgebraSlice s;
    s.family_ = family;
    s.g_lo_ = g_lo;
    s.g_hi_ = g_hi;
    const Field& F = family.field();

    std::map<int, std::vector<Payload>> user_by_grade;
    for (const auto& p : user_basis) {
        auto g = family.element_grade(p);
        if (!g) throw UsageError("user basis element is not grade-homogeneous");
        if (!family.element_parity(p)) throw UsageError("user basis element is not parity-homogeneous");
        if (family.has_constraint() && !family.constraint_apply(p).is_zero())
            throw UsageError("user basis element violates the family constraint: " +
                             format_poly(p.comps[0]));
        user_by_grade[*g].push_back(p);
    }

    for (int g = g_lo; g <= g_hi; ++g) {
        std::vector<BasisElement> elems = enumerate_basis(family, g);
        auto uit = user_by_grade.find(g);
        if (uit != user_by_grade.end()) {
            if (uit->second.size() != elems.size())
                throw UsageError("user basis at grade " + std::to_string(g) + " has " +
                                 std::to_string(uit->second.size()) + " elements, expected " +
                                 std::to_string(elems.size()));
            std::vector<BasisElement> replaced;
            for (const auto& p : uit->second) {
                replaced.push_back(
                    BasisElement{0, p, *family.element_parity(p), g, ""});
            }
            elems = std::move(replaced);
        }
        std::vector<int>& ids = s.by_grade_[g];
        for (auto& e : elems) {
            if (family.is_custom()) s.decl_of_.push_back(e.id);
            e.id = static_cast<int>(s.basis_.size());
            if (e.display_name.empty())
                e.display_name = (e.parity == Parity::Even ? "E" : "O") + std::to_string(e.id);
            ids.push_back(e.id);
            s.basis_.push_back(std::move(e));
        }
    }

    if (!family.is_custom()) {
        // expansion data per grade
        for (int g = g_lo; g <= g_hi; ++g) {
            AlgebraSlice::GradeData gd;
            const ContextPtr& ctx = family.ctx();
            if (family.vector_field_rep()) {
                for (int v = 0; v < family.component_count(); ++v) {
                    int vg = v < ctx->even_count() ? ctx->even_grade(v)
                                                   : ctx->odd_grade(v - ctx->even_count());
                    for (const auto& mono : enumerate_monomials(*ctx, g + vg)) {
                        gd.coord_index.emplace(std::make_pair(v, mono),
                                               static_cast<int>(gd.coords.size()));
                        gd.coords.emplace_back(v, mono);
                    }
                }
            } else {
                int gamma = g - family.grade_shift();
                for (const auto& mono : enumerate_monomials(*ctx, gamma)) {
                    gd.coord_index.emplace(std::make_pair(0, mono), static_cast<int>(gd.coords.size()));
                    gd.coords.emplace_back(0, mono);
                }
            }
            const std::vector<int>& ids = s.by_grade_[g];
            ExactMatrix mat(static_cast<int>(gd.coords.size()), static_cast<int>(ids.size()), F);
            for (size_t c = 0; c < ids.size(); ++c) {
                ExactVector col = s.payload_coords(gd, s.basis_[ids[c]].payload);
                for (size_t r = 0; r < col.size(); ++r)
                    if (!col[r].is_zero()) mat.set(static_cast<int>(r), static_cast<int>(c), col[r]);
            }
            gd.ech = row_echelon(mat, /*want_transform=*/true);
            if (gd.ech.rank != static_cast<int>(ids.size()))
                throw UsageError("basis at grade " + std::to_string(g) +
                                 " is linearly dependent (rank " + std::to_string(gd.ech.rank) + ")");
            s.grade_data_.emplace(g, std::move(gd));
        }

        // user-supplied grades: span must agree with the automatic basis
        for (const auto& [g, payloads] : user_by_grade) {
            if (g < g_lo || g > g_hi)
                throw UsageError("user basis element at grade " + std::to_string(g) +
                                 " is outside the slice");
            for (const auto& e : enumerate_basis(family, g))
                s.expand_at_grade(g, e.payload);  // throws when spans differ
        }
    }

    // structure constants
    const int B = s.size();
    s.table_.assign(static_cast<size_t>(B) * B, BracketEntry{});
    for (int i = 0; i < B; ++i) {
        for (int j = i; j < B; ++j) {
            BracketEntry& e = s.table_[static_cast<size_t>(i) * B + j];
            int target = s.basis_[i].grade + s.basis_[j].grade;
            bool in_window = target >= g_lo && target <= g_hi;
            if (!in_window && !family.is_custom()) {
                // only flag products that can actually be nonzero
                if (!family.bracket(s.basis_[i].payload, s.basis_[j].payload).is_zero())
                    e.out_of_range = true;
                continue;
            }
            if (family.is_custom()) {
                if (!in_window) {
                    const auto& tab = family.custom().table;
                    auto has_terms = [&](int a, int b) {
                        auto it = tab.find({a, b});
                        return it != tab.end() && !it->second.empty();
                    };
                    if (has_terms(s.decl_of_[i], s.decl_of_[j]) ||
                        has_terms(s.decl_of_[j], s.decl_of_[i]))
                        e.out_of_range = true;
                    continue;
                }
                // the table speaks declaration indices; the slice is grade-sorted
                std::map<int, int> slice_of_decl;
                for (int sid = 0; sid < B; ++sid) slice_of_decl[s.decl_of_[sid]] = sid;
                const auto& tab = family.custom().table;
                auto emit = [&](const std::vector<std::pair<FieldElement, int>>& terms, bool negate) {
                    for (const auto& [c, k] : terms) {
                        if (c.is_zero()) continue;
                        auto sit = slice_of_decl.find(k);
                        if (sit == slice_of_decl.end()) {
                            e.out_of_range = true;  // target element excluded from the slice
                            continue;
                        }
                        e.terms.emplace_back(sit->second, negate ? -c : c);
                    }
                };
                auto it = tab.find({s.decl_of_[i], s.decl_of_[j]});
                if (it != tab.end()) {
                    emit(it->second, false);
                } else {
                    auto rit = tab.find({s.decl_of_[j], s.decl_of_[i]});
                    if (rit != tab.end()) {
                        bool both_odd = s.basis_[i].parity == Parity::Odd &&
                                        s.basis_[j].parity == Parity::Odd;
                        emit(rit->second, !both_odd);
                    }
                }
                continue;
            }
            Payload prod = family.bracket(s.basis_[i].payload, s.basis_[j].payload);
            if (prod.is_zero()) continue;
            ExactVector coeffs;
            try {
                coeffs = s.expand_at_grade(target, prod);
            } catch (const Error& err) {
                throw InternalError("bracket [" + s.basis_[i].display_name + ", " +
                                    s.basis_[j].display_name + "] failed to expand: " + err.what());
            }
            const std::vector<int>& ids = s.ids_at_grade(target);
            for (size_t k = 0; k < coeffs.size(); ++k)
                if (!coeffs[k].is_zero()) e.terms.emplace_back(ids[k], coeffs[k]);
        }
    }
    return s;
}

VerifyReport verify_algebra(const AlgebraSlice& slice, long long max_triples) {
    VerifyReport rep;
    const int B = slice.size();
    const Field& F = slice.family().field();
    auto complain = [&](const std::string& msg) {
        rep.ok = false;
        if (rep.violations.size() < 32) rep.violations.push_back(msg);
    };

    // grade additivity + payload-level super skew-symmetry
    for (int i = 0; i < B; ++i) {
        for (int j = i; j < B; ++j) {
            BracketEntry e = slice.bracket_terms(i, j);
            if (e.out_of_range) continue;
            int target = slice.elem(i).grade + slice.elem(j).grade;
            for (const auto& [k, c] : e.terms)
                if (slice.elem(k).grade != target)
                    complain("grade additivity fails for [" + slice.elem(i).display_name + "," +
                             slice.elem(j).display_name + "]");
            if (!slice.family().is_custom()) {
                Payload fw = slice.family().bracket(slice.elem(i).payload, slice.elem(j).payload);
                Payload bw = slice.family().bracket(slice.elem(j).payload, slice.elem(i).payload);
                bool both_odd = slice.elem(i).parity == Parity::Odd &&
                                slice.elem(j).parity == Parity::Odd;
                Payload sum = both_odd ? fw - bw : fw + bw;
                if (!sum.is_zero())
                    complain("super skew-symmetry fails for [" + slice.elem(i).display_name + "," +
                             slice.elem(j).display_name + "]");
            } else {
                // table-level skew when both orders were declared
                BracketEntry r = slice.bracket_terms(j, i);
                std::map<int, FieldElement> lhs, rhs;
                for (const auto& [k, c] : e.terms) lhs[k] = c;
                bool both_odd = slice.elem(i).parity == Parity::Odd &&
                                slice.elem(j).parity == Parity::Odd;
                for (const auto& [k, c] : r.terms) rhs[k] = both_odd ? c : -c;
                if (lhs != rhs)
                    complain("custom table violates super skew-symmetry at [" +
                             std::to_string(i) + "," + std::to_string(j) + "]");
            }
        }
    }

    // super Jacobi: [u,[v,w]] = [[u,v],w] + (-1)^{p(u)p(v)} [v,[u,w]]
    auto in_range = [&](int a, int b) {
        int t = slice.elem(a).grade + slice.elem(b).grade;
        return t >= slice.g_lo() && t <= slice.g_hi();
    };
    long long counter = 0;
    long long total = static_cast<long long>(B) * B * B;
    long long stride = (max_triples > 0 && total > max_triples) ? total / max_triples : 1;
    for (int u = 0; u < B; ++u) {
        for (int v = 0; v < B; ++v) {
            for (int w = 0; w < B; ++w) {
                if (stride > 1 && (counter++ % stride)) continue;
                if (!in_range(v, w) || !in_range(u, v) || !in_range(u, w)) continue;
                int tg = slice.elem(u).grade + slice.elem(v).grade + slice.elem(w).grade;
                if (tg < slice.g_lo() || tg > slice.g_hi()) continue;
                std::map<int, FieldElement> acc;
                auto add = [&](int k, const FieldElement& c) {
                    auto it = acc.find(k);
                    if (it == acc.end())
                        acc.emplace(k, c);
                    else {
                        it->second += c;
                        if (it->second.is_zero()) acc.erase(it);
                    }
                };
                // LHS
                for (const auto& [e1, c1] : slice.bracket_terms(v, w).terms)
                    for (const auto& [k, c2] : slice.bracket_terms(u, e1).terms) add(k, c1 * c2);
                // -[[u,v],w]
                for (const auto& [e1, c1] : slice.bracket_terms(u, v).terms)
                    for (const auto& [k, c2] : slice.bracket_terms(e1, w).terms) add(k, -(c1 * c2));
                // -(-1)^{p(u)p(v)} [v,[u,w]]
                bool uv_odd = slice.elem(u).parity == Parity::Odd &&
                              slice.elem(v).parity == Parity::Odd;
                FieldElement sgn = uv_odd ? F.one() : -F.one();
                for (const auto& [e1, c1] : slice.bracket_terms(u, w).terms)
                    for (const auto& [k, c2] : slice.bracket_terms(v, e1).terms) add(k, sgn * (c1 * c2));
                if (!acc.empty())
                    complain("Jacobi identity fails on (" + slice.elem(u).display_name + "," +
                             slice.elem(v).display_name + "," + slice.elem(w).display_name + ")");
            }
        }
    }
    return rep;
}

std::optional<GradingElement> find_internal_grading_element(const AlgebraSlice& slice) {
    const Field& F = slice.family().field();
    std::vector<int> e0;
    for (const auto& b : slice.basis())
        if (b.grade == 0 && b.parity == Parity::Even) e0.push_back(b.id);
    if (e0.empty()) return std::nullopt;

    const int B = slice.size();
    // rows indexed (b, k): sum_e c_e * coeff_k([e, b]) = grade(b) * delta_{k,b}
    std::map<std::pair<int, int>, int> rowidx;
    std::vector<std::vector<std::pair<int, FieldElement>>> cols(e0.size());
    std::vector<FieldElement> rhs;
    std::map<std::pair<int, int>, FieldElement> rhs_map;
    auto row_of = [&](int b, int k) {
        auto key = std::make_pair(b, k);
        auto it = rowidx.find(key);
        if (it != rowidx.end()) return it->second;
        int r = static_cast<int>(rowidx.size());
        rowidx.emplace(key, r);
        return r;
    };
    for (size_t c = 0; c < e0.size(); ++c) {
        for (int b = 0; b < B; ++b) {
            BracketEntry e = slice.bracket_terms(e0[c], b);
            if (e.out_of_range) continue;  // grade(b) in range, never flagged
            for (const auto& [k, v] : e.terms) cols[c].emplace_back(row_of(b, k), v);
        }
    }
    for (int b = 0; b < B; ++b)
        if (slice.elem(b).grade != 0) row_of(b, b);  // ensure the eigenvalue row exists
    ExactMatrix M(static_cast<int>(rowidx.size()), static_cast<int>(e0.size()), F);
    for (size_t c = 0; c < e0.size(); ++c)
        for (const auto& [r, v] : cols[c]) M.add(r, static_cast<int>(c), v);
    ExactVector target(rowidx.size(), F.zero());
    for (const auto& [key, r] : rowidx)
        if (key.first == key.second) target[r] = F.from_int(slice.elem(key.first).grade);
    auto sol = solve(M, target);
    if (!sol) return std::nullopt;
    GradingElement ge;
    ge.grade0_even_count = static_cast<int>(e0.size());
    ge.coeffs = *sol;
    if (!slice.family().is_custom()) {
        Payload p;
        p.comps.assign(slice.family().component_count(),
                       SuperPolynomial(slice.family().ctx(), F));
        for (size_t c = 0; c < e0.size(); ++c)
            if (!(*sol)[c].is_zero()) p = p + slice.elem(e0[c]).payload.scaled((*sol)[c]);
        ge.payload = std::move(p);
    }
    return ge;
}

CustomAlgebra parse_custom_algebra(std::string_view text, const Field& field) {
    CustomAlgebra alg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& msg) {
        throw UsageError("custom algebra line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        // strip <...> comments
        std::string stripped;
        bool in_comment = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (!in_comment && line[i] == '<')
                in_comment = true;
            else if (in_comment && line[i] == '>')
                in_comment = false;
            else if (!in_comment)
                stripped += line[i];
        }
        size_t a = stripped.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = stripped.find_last_not_of(" \t\r");
        stripped = stripped.substr(a, b - a + 1);
        if (!header_seen) {
            if (stripped != "supercohom-algebra v1") fail("expected header 'supercohom-algebra v1'");
            header_seen = true;
            continue;
        }
        if (stripped.rfind("element", 0) == 0) {
            std::istringstream ls(stripped.substr(7));
            std::string name, parity;
            int grade;
            if (!(ls >> name >> parity >> grade)) fail("expected: element <name> <even|odd> <grade>");
            Parity p;
            if (parity == "even")
                p = Parity::Even;
            else if (parity == "odd")
                p = Parity::Odd;
            else
                fail("parity must be 'even' or 'odd'");
            alg.elems.push_back(CustomAlgebra::Elem{name, p, grade});
            continue;
        }
        if (stripped[0] == '[') {
            size_t close = stripped.find(']');
            size_t eq = stripped.find('=');
            if (close == std::string::npos || eq == std::string::npos || eq < close)
                fail("expected: [i, j] = c k; c k; ...");
            std::string idx = stripped.substr(1, close - 1);
            size_t comma = idx.find(',');
            if (comma == std::string::npos) fail("expected two indices");
            int i = std::stoi(idx.substr(0, comma));
            int j = std::stoi(idx.substr(comma + 1));
            if (i < 0 || j < 0 || i >= static_cast<int>(alg.elems.size()) ||
                j >= static_cast<int>(alg.elems.size()))
                fail("element index out of range");
            std::vector<std::pair<FieldElement, int>> terms;
            std::string rhs = stripped.substr(eq + 1);
            std::istringstream ts(rhs);
            std::string term;
            while (std::getline(ts, term, ';')) {
                std::istringstream es(term);
                std::string cs;
                int k;
                if (!(es >> cs >> k)) {
                    size_t nb = term.find_first_not_of(" \t");
                    if (nb == std::string::npos) continue;  // allow trailing ;
                    fail("expected: <coeff> <index>");
                }
                if (k < 0 || k >= static_cast<int>(alg.elems.size())) fail("element index out of range");
                terms.emplace_back(field.parse(cs), k);
            }
            alg.table[{i, j}] = std::move(terms);
            continue;
        }
        fail("unrecognized line '" + stripped + "'");
    }
    if (!header_seen) throw UsageError("custom algebra: missing header 'supercohom-algebra v1'");
    return alg;
}

}  // namespace supercohom
