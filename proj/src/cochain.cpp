#include "supercohom/cochain.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace supercohom {

std::string ModuleSpec::name() const {
    switch (kind_) {
        case ModuleKind::Trivial: return "trivial";
        case ModuleKind::Adjoint: return "adjoint";
        case ModuleKind::Coadjoint: return "coadjoint";
    }
    return "?";
}

void ModuleSpec::check_admissible(const AlgebraSlice& slice) const {
    if (kind_ == ModuleKind::Trivial) return;
    const AlgebraFamily& fam = slice.family();
    if (!fam.finite_dimensional())
        throw UsageError(name() + " module requires a finite-dimensional algebra");
    int lo = fam.min_element_grade();
    int hi = *fam.max_element_grade();
    if (slice.g_lo() > lo || slice.g_hi() < hi)
        throw UsageError(name() + " module needs the slice to cover the whole algebra, grades [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

int ModuleSpec::dim(const AlgebraSlice& slice) const {
    return kind_ == ModuleKind::Trivial ? 1 : slice.size();
}

Parity ModuleSpec::elem_parity(const AlgebraSlice& slice, int m) const {
    return kind_ == ModuleKind::Trivial ? Parity::Even : slice.elem(m).parity;
}

int ModuleSpec::elem_grade(const AlgebraSlice& slice, int m) const {
    switch (kind_) {
        case ModuleKind::Trivial: return 0;
        case ModuleKind::Adjoint: return slice.elem(m).grade;
        case ModuleKind::Coadjoint: return -slice.elem(m).grade;
    }
    return 0;
}

std::string ModuleSpec::elem_name(const AlgebraSlice& slice, int m) const {
    switch (kind_) {
        case ModuleKind::Trivial: return "1";
        case ModuleKind::Adjoint: return slice.elem(m).display_name;
        case ModuleKind::Coadjoint: return slice.elem(m).display_name + "'";
    }
    return "?";
}

std::vector<std::pair<int, FieldElement>> ModuleSpec::action(const AlgebraSlice& slice, int a,
                                                             int m) const {
    std::vector<std::pair<int, FieldElement>> out;
    if (kind_ == ModuleKind::Trivial) return out;
    if (kind_ == ModuleKind::Adjoint) {
        BracketEntry e = slice.bracket_terms(a, m);
        if (e.out_of_range)
            throw InternalError("adjoint action left the slice; admissibility check missed it");
        return e.terms;
    }
    // coadjoint: (a . mu_m)(b) = -(-1)^{p(a) p(mu_m)} mu_m([a, b])
    bool flip = slice.elem(a).parity == Parity::Odd && slice.elem(m).parity == Parity::Odd;
    for (int b = 0; b < slice.size(); ++b) {
        BracketEntry e = slice.bracket_terms(a, b);
        if (e.out_of_range)
            throw InternalError("coadjoint action left the slice; admissibility check missed it");
        for (const auto& [k, c] : e.terms)
            if (k == m) out.emplace_back(b, flip ? c : -c);
    }
    return out;
}

CanonResult canonicalize(const AlgebraSlice& slice, std::vector<int> args) {
    auto odd = [&](int id) { return slice.elem(id).parity == Parity::Odd; };
    auto before = [&](int a, int b) {  // strict canonical order
        bool oa = odd(a), ob = odd(b);
        if (oa != ob) return !oa;
        return a < b;
    };
    int sign = 1;
    for (size_t i = 1; i < args.size(); ++i)
        for (size_t j = i; j > 0 && before(args[j], args[j - 1]); --j) {
            if (!(odd(args[j]) && odd(args[j - 1]))) sign = -sign;
            std::swap(args[j], args[j - 1]);
        }
    for (size_t i = 1; i < args.size(); ++i)
        if (args[i] == args[i - 1] && !odd(args[i])) return CanonResult{true, 0, {}};
    return CanonResult{false, sign, std::move(args)};
}

void Cochain::add(const CochainKey& key, const FieldElement& c) {
    if (static_cast<int>(key.args.size()) != degree_)
        throw UsageError("cochain key degree mismatch");
    if (c.is_zero()) return;
    auto it = coeffs_.find(key);
    if (it == coeffs_.end()) {
        coeffs_.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) coeffs_.erase(it);
    }
}

FieldElement Cochain::coeff(const CochainKey& key) const {
    auto it = coeffs_.find(key);
    return it == coeffs_.end() ? field_.zero() : it->second;
}

Cochain Cochain::operator+(const Cochain& o) const {
    if (degree_ != o.degree_) throw UsageError("cochain degree mismatch in sum");
    Cochain r = *this;
    for (const auto& [k, c] : o.coeffs_) r.add(k, c);
    return r;
}

Cochain Cochain::operator-(const Cochain& o) const { return *this + (-o); }

Cochain Cochain::operator-() const {
    Cochain r(field_, degree_, grade_, parity_);
    for (const auto& [k, c] : coeffs_) r.coeffs_.emplace(k, -c);
    return r;
}

Cochain Cochain::scaled(const FieldElement& c) const {
    Cochain r(field_, degree_, grade_, parity_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : coeffs_) r.coeffs_.emplace(k, v * c);
    return r;
}

GradeWindow required_window(const AlgebraFamily& family, const ModuleSpec& module, int k, int g) {
    int lo = family.min_element_grade();
    if (module.kind() != ModuleKind::Trivial) {
        if (!family.finite_dimensional())
            throw UsageError(module.name() + " module requires a finite-dimensional algebra");
        return GradeWindow{lo, *family.max_element_grade()};
    }
    int kk = std::max(k, 1);
    // each argument grade lies in [lo, g - (kk-1)*lo]; bracket products of two
    // in-window arguments stay in-window by grade additivity
    int hi = std::max(lo, g - (kk - 1) * lo);
    if (auto mx = family.max_element_grade()) hi = std::min(hi, std::max(lo, *mx));
    return GradeWindow{lo, hi};
}

namespace {

void check_window(const AlgebraSlice& slice, const ModuleSpec& module, int k, int g) {
    GradeWindow w = required_window(slice.family(), module, k, g);
    if (slice.g_lo() > w.lo || slice.g_hi() < w.hi)
        throw UsageError("slice window [" + std::to_string(slice.g_lo()) + ", " +
                         std::to_string(slice.g_hi()) + "] is too narrow; degree " +
                         std::to_string(k) + " grade " + std::to_string(g) + " needs [" +
                         std::to_string(w.lo) + ", " + std::to_string(w.hi) + "]");
}

}  // namespace

std::vector<CochainKey> cochain_basis(const AlgebraSlice& slice, const ModuleSpec& module, int k,
                                      int g, Parity parity) {
    if (k < 0) throw UsageError("negative cochain degree");
    module.check_admissible(slice);
    check_window(slice, module, k, g);

    const int B = slice.size();
    std::vector<int> evens, odds;
    for (int i = 0; i < B; ++i)
        (slice.elem(i).parity == Parity::Even ? evens : odds).push_back(i);

    // element grades are non-decreasing in id (ids assigned grade by grade)
    int gmin = B ? slice.elem(0).grade : 0;
    int gmax = B ? slice.elem(B - 1).grade : 0;

    std::vector<CochainKey> out;
    for (int m = 0; m < module.dim(slice); ++m) {
        int target = g + module.elem_grade(slice, m);
        int odd_count_parity =
            (static_cast<int>(parity) + static_cast<int>(module.elem_parity(slice, m))) & 1;
        if (k == 0) {
            if (target == 0 && odd_count_parity == 0) out.push_back(CochainKey{{}, m});
            continue;
        }
        std::vector<int> cur;
        // phase 0: even args by strictly increasing id; phase 1: odd args
        // non-strictly increasing
        std::function<void(int, int, int, int)> dfs = [&](int phase, int next, int sum,
                                                          int odd_count) {
            int rem = k - static_cast<int>(cur.size());
            if (rem == 0) {
                if (sum == target && (odd_count & 1) == odd_count_parity)
                    out.push_back(CochainKey{cur, m});
                return;
            }
            int left = target - sum;
            if (left < rem * gmin || left > rem * gmax) return;
            if (phase == 0) {
                dfs(1, 0, sum, odd_count);  // switch to odd phase
                for (size_t idx = next; idx < evens.size(); ++idx) {
                    cur.push_back(evens[idx]);
                    dfs(0, static_cast<int>(idx) + 1, sum + slice.elem(evens[idx]).grade,
                        odd_count);
                    cur.pop_back();
                }
            } else {
                for (size_t idx = next; idx < odds.size(); ++idx) {
                    cur.push_back(odds[idx]);
                    dfs(1, static_cast<int>(idx), sum + slice.elem(odds[idx]).grade,
                        odd_count + 1);
                    cur.pop_back();
                }
            }
        };
        dfs(0, 0, 0, 0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Contraction expansion of one canonical (k+1)-argument key: every ordered
// pair of arguments is replaced by its bracket (and, for nontrivial modules,
// every single argument acts on the value slot); each resulting k-argument
// tuple is canonicalized and emitted with its accumulated sign.
//
// The five terms (bracket among evens, even-odd, odd-odd, module action by
// evens resp. odds) carry the normative prefactors
//   (-1)^j,  (-1)^{q+1},  (-1)^{i+1},  -(-1)^{i+1},  (-1)^q
// with q+1 the number of even arguments and i, j absolute 0-based argument
// positions. The convention is pinned by requiring d composed with d to be
// the zero matrix on trivial, adjoint and coadjoint modules across the test
// corpus together with reproduction of the known explicit representative
// checks; the sign of the odd-action term is the one residual free choice
// (both signs keep the composition zero and all dimensions), fixed here
// once and for all.
template <typename Sink>
void differential_terms(const AlgebraSlice& slice, const ModuleSpec& module, const CochainKey& key,
                        Sink&& sink) {
    const Field& F = slice.family().field();
    const std::vector<int>& args = key.args;
    const int n = static_cast<int>(args.size());
    int q = -1;
    while (q + 1 < n && slice.elem(args[q + 1]).parity == Parity::Even) ++q;

    auto window_fail = [&](int i, int j) {
        throw UsageError("slice window too narrow for bracket [" +
                         slice.elem(args[i]).display_name + ", " +
                         slice.elem(args[j]).display_name + "] inside the differential");
    };
    auto emit_bracket = [&](int pos_replace, int pos_drop, int base_sign) {
        BracketEntry e = slice.bracket_terms(args[pos_replace], args[pos_drop]);
        if (e.out_of_range) window_fail(pos_replace, pos_drop);
        for (const auto& [t, c] : e.terms) {
            std::vector<int> a2;
            a2.reserve(n - 1);
            for (int p = 0; p < n; ++p) {
                if (p == pos_drop) continue;
                a2.push_back(p == pos_replace ? t : args[p]);
            }
            CanonResult cr = canonicalize(slice, std::move(a2));
            if (cr.zero) continue;
            FieldElement v = c * F.from_int(base_sign * cr.sign);
            sink(CochainKey{std::move(cr.args), key.module_index}, v);
        }
    };

    // term 1: evens paired with evens
    for (int i = 0; i <= q; ++i)
        for (int j = i + 1; j <= q; ++j) emit_bracket(i, j, (j % 2 == 0) ? 1 : -1);
    // term 2: evens paired with odds
    int s2 = ((q + 1) % 2 == 0) ? 1 : -1;
    for (int i = 0; i <= q; ++i)
        for (int j = q + 1; j < n; ++j) emit_bracket(i, j, s2);
    // term 3: odds paired with odds
    for (int i = q + 1; i < n; ++i) {
        int s3 = ((i + 1) % 2 == 0) ? 1 : -1;
        for (int j = i + 1; j < n; ++j) emit_bracket(i, j, s3);
    }

    if (module.kind() == ModuleKind::Trivial) return;

    auto emit_action = [&](int pos, int base_sign) {
        std::vector<int> a2;
        a2.reserve(n - 1);
        for (int p = 0; p < n; ++p)
            if (p != pos) a2.push_back(args[p]);
        CanonResult cr = canonicalize(slice, std::move(a2));
        if (cr.zero) return;
        for (int mprime = 0; mprime < module.dim(slice); ++mprime) {
            for (const auto& [mt, ac] : module.action(slice, args[pos], mprime)) {
                if (mt != key.module_index) continue;
                FieldElement v = ac * F.from_int(base_sign * cr.sign);
                sink(CochainKey{cr.args, mprime}, v);
            }
        }
    };
    // term 4: action of even arguments
    for (int i = 0; i <= q; ++i)
        emit_action(i, ((i + 1) % 2 == 0) ? -1 : 1);
    // term 5: action of odd arguments
    int s5 = (((q % 2) + 2) % 2 == 0) ? 1 : -1;
    for (int i = q + 1; i < n; ++i) emit_action(i, s5);
}

}  // namespace

ExactMatrix differential_matrix(const AlgebraSlice& slice, const ModuleSpec& module, int k, int g,
                                Parity parity) {
    std::vector<CochainKey> rows = cochain_basis(slice, module, k + 1, g, parity);
    std::vector<CochainKey> cols = cochain_basis(slice, module, k, g, parity);
    std::map<CochainKey, int> colindex;
    for (size_t c = 0; c < cols.size(); ++c) colindex.emplace(cols[c], static_cast<int>(c));
    ExactMatrix M(static_cast<int>(rows.size()), static_cast<int>(cols.size()),
                  slice.family().field());
    for (size_t r = 0; r < rows.size(); ++r) {
        differential_terms(slice, module, rows[r],
                           [&](const CochainKey& key, const FieldElement& v) {
                               auto it = colindex.find(key);
                               if (it == colindex.end())
                                   throw InternalError(
                                       "differential produced a key outside the target basis");
                               M.add(static_cast<int>(r), it->second, v);
                           });
    }
    return M;
}

Cochain apply_differential(const AlgebraSlice& slice, const ModuleSpec& module, const Cochain& c) {
    module.check_admissible(slice);
    Cochain out(c.field(), std::max(c.degree() - 1, 0), c.grade(), c.parity());
    if (c.degree() == 0) return out;
    for (const auto& [key, v] : c.coeffs()) {
        const FieldElement& coeff = v;
        differential_terms(slice, module, key,
                           [&](const CochainKey& t, const FieldElement& w) {
                               out.add(t, coeff * w);
                           });
    }
    return out;
}

Cochain wedge(const AlgebraSlice& slice, const Cochain& a, const Cochain& b) {
    const Field& F = slice.family().field();
    Cochain r(F, a.degree() + b.degree(), a.grade() + b.grade(), a.parity() + b.parity());
    for (const auto& [ka, ca] : a.coeffs()) {
        if (ka.module_index != 0) throw UsageError("wedge product needs the trivial module");
        for (const auto& [kb, cb] : b.coeffs()) {
            if (kb.module_index != 0) throw UsageError("wedge product needs the trivial module");
            std::vector<int> all = ka.args;
            all.insert(all.end(), kb.args.begin(), kb.args.end());
            CanonResult cr = canonicalize(slice, std::move(all));
            if (cr.zero) continue;
            r.add(CochainKey{cr.args, 0}, ca * cb * F.from_int(cr.sign));
        }
    }
    return r;
}

Cochain cochain_from_args(const AlgebraSlice& slice, const std::vector<Payload>& args,
                          const FieldElement& coeff) {
    const AlgebraFamily& fam = slice.family();
    const Field& F = fam.field();
    int grade = 0;
    int odd_count = 0;
    std::vector<std::vector<std::pair<int, FieldElement>>> exps;
    for (const auto& p : args) {
        auto g = fam.element_grade(p);
        auto par = fam.element_parity(p);
        if (!g || !par) throw UsageError("cochain argument is not grade/parity homogeneous");
        grade += *g;
        if (*par == Parity::Odd) ++odd_count;
        ExactVector v = slice.expand_at_grade(*g, p);
        const std::vector<int>& ids = slice.ids_at_grade(*g);
        std::vector<std::pair<int, FieldElement>> exp;
        for (size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) exp.emplace_back(ids[i], v[i]);
        exps.push_back(std::move(exp));
    }
    Cochain out(F, static_cast<int>(args.size()), grade,
                static_cast<Parity>(odd_count & 1));
    std::vector<int> ids(args.size());
    std::function<void(size_t, FieldElement)> rec = [&](size_t pos, FieldElement acc) {
        if (pos == exps.size()) {
            CanonResult cr = canonicalize(slice, ids);
            if (cr.zero) return;
            out.add(CochainKey{cr.args, 0}, acc * F.from_int(cr.sign));
            return;
        }
        for (const auto& [id, c] : exps[pos]) {
            ids[pos] = id;
            rec(pos + 1, acc * c);
        }
    };
    rec(0, coeff);
    return out;
}

namespace {

std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(a, b - a + 1));
}

}  // namespace

Cochain parse_cochain(const AlgebraSlice& slice, std::string_view text) {
    const AlgebraFamily& fam = slice.family();
    const Field& F = fam.field();
    std::optional<Cochain> total;
    size_t pos = 0;
    bool negate = false;
    bool first = true;
    while (true) {
        // find the next C( at top level
        size_t cpos = std::string_view::npos;
        for (size_t i = pos; i + 1 < text.size(); ++i)
            if (text[i] == 'C' && text[i + 1] == '(') {
                cpos = i;
                break;
            }
        if (cpos == std::string_view::npos) {
            if (first) throw UsageError("cochain text contains no C(...) term");
            if (!trim(text.substr(pos)).empty())
                throw UsageError("trailing junk in cochain text: '" +
                                 trim(text.substr(pos)) + "'");
            break;
        }
        std::string prefix = trim(text.substr(pos, cpos - pos));
        if (!prefix.empty() && prefix.back() == '*') prefix = trim(prefix.substr(0, prefix.size() - 1));
        FieldElement coeff = F.one();
        if (!first) {
            if (prefix.empty() || (prefix[0] != '+' && prefix[0] != '-'))
                throw UsageError("expected '+' or '-' between cochain terms");
            negate = prefix[0] == '-';
            prefix = trim(prefix.substr(1));
        } else if (!prefix.empty() && (prefix[0] == '+' || prefix[0] == '-')) {
            negate = prefix[0] == '-';
            prefix = trim(prefix.substr(1));
        }
        if (!prefix.empty()) coeff = F.parse(prefix);
        if (negate) coeff = -coeff;
        size_t close = text.find(')', cpos);
        if (close == std::string_view::npos) throw UsageError("unbalanced parenthesis in cochain");
        std::string inside(text.substr(cpos + 2, close - cpos - 2));
        std::vector<int> name_ids;
        std::vector<Payload> payloads;
        bool all_names = true;
        size_t start = 0;
        while (start <= inside.size()) {
            size_t comma = inside.find(',', start);
            std::string arg = trim(comma == std::string::npos ? inside.substr(start)
                                                              : inside.substr(start, comma - start));
            if (arg.empty()) throw UsageError("empty cochain argument");
            int id = slice.find_by_name(arg);
            if (id >= 0) {
                name_ids.push_back(id);
                if (!fam.is_custom()) payloads.push_back(slice.elem(id).payload);
            } else if (fam.is_custom() || fam.vector_field_rep()) {
                throw UsageError("unknown basis element name '" + arg + "'");
            } else {
                all_names = false;
                payloads.push_back(fam.payload_from_poly(parse_poly(arg, fam.ctx(), F)));
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        Cochain term;
        if (fam.is_custom()) {
            (void)all_names;  // every argument was a name, or we threw above
            int grade = 0, odd_count = 0;
            for (int id : name_ids) {
                grade += slice.elem(id).grade;
                if (slice.elem(id).parity == Parity::Odd) ++odd_count;
            }
            term = Cochain(F, static_cast<int>(name_ids.size()), grade,
                           static_cast<Parity>(odd_count & 1));
            CanonResult cr = canonicalize(slice, name_ids);
            if (!cr.zero) term.add(CochainKey{cr.args, 0}, coeff * F.from_int(cr.sign));
        } else {
            term = cochain_from_args(slice, payloads, coeff);
        }
        if (!total) {
            total = term;
        } else {
            if (term.degree() != total->degree() || term.grade() != total->grade() ||
                term.parity() != total->parity())
                throw UsageError("cochain terms disagree in degree, grade or parity");
            total = *total + term;
        }
        first = false;
        pos = close + 1;
    }
    return *total;
}

std::string format_cochain(const AlgebraSlice& slice, const Cochain& c,
                           bool generating_functions) {
    if (c.is_zero()) return "0";
    const AlgebraFamily& fam = slice.family();
    bool gen = generating_functions && !fam.is_custom() && !fam.vector_field_rep();
    std::string out;
    bool first = true;
    for (const auto& [key, coef] : c.coeffs()) {
        std::string cs = format_scalar(coef);
        bool neg = cs[0] == '-';
        std::string mag = neg ? cs.substr(1) : cs;
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        if (mag != "1") out += mag + " ";
        out += "C(";
        for (size_t i = 0; i < key.args.size(); ++i) {
            if (i) out += ", ";
            out += gen ? format_poly(slice.elem(key.args[i]).payload.comps[0])
                       : slice.elem(key.args[i]).display_name;
        }
        if (key.module_index != 0) out += "; #" + std::to_string(key.module_index);
        out += ")";
        first = false;
    }
    return out;
}

std::string format_cochain_latex(const AlgebraSlice& slice, const Cochain& c) {
    if (c.is_zero()) return "0";
    const AlgebraFamily& fam = slice.family();
    bool gen = !fam.is_custom() && !fam.vector_field_rep();
    std::string out;
    bool first = true;
    for (const auto& [key, coef] : c.coeffs()) {
        std::string cs = format_scalar(coef);
        bool neg = cs[0] == '-';
        std::string mag = neg ? cs.substr(1) : cs;
        size_t slash = mag.find('/');
        if (slash != std::string::npos)
            mag = "\\frac{" + mag.substr(0, slash) + "}{" + mag.substr(slash + 1) + "}";
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        if (mag != "1") out += mag + "\\, ";
        out += "C\\left(";
        for (size_t i = 0; i < key.args.size(); ++i) {
            if (i) out += ", ";
            out += gen ? format_poly_latex(slice.elem(key.args[i]).payload.comps[0])
                       : ("\\mathrm{" + slice.elem(key.args[i]).display_name + "}");
        }
        out += "\\right)";
        first = false;
    }
    return out;
}

}  // namespace supercohom
