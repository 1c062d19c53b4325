#include "supercohom/cli.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace supercohom {

std::string output_format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::Ascii: return "ascii";
        case OutputFormat::Latex: return "latex";
        case OutputFormat::Machine: return "machine";
    }
    return "?";
}

std::optional<OutputFormat> parse_output_format(std::string_view s) {
    if (s == "ascii") return OutputFormat::Ascii;
    if (s == "latex") return OutputFormat::Latex;
    if (s == "machine") return OutputFormat::Machine;
    return std::nullopt;
}

namespace {

std::string lower(std::string_view s) {
    std::string r(s);
    for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
}

std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

[[noreturn]] void fail(int line, int col, const std::string& msg) {
    throw UsageError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                     msg);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ';' || c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = trim(cur);
    if (!last.empty()) out.push_back(last);
    return out;
}

int parse_int(const std::string& v, int line, int col) {
    try {
        size_t used = 0;
        int r = std::stoi(v, &used);
        if (used != v.size()) fail(line, col, "trailing characters after integer '" + v + "'");
        return r;
    } catch (const UsageError&) {
        throw;
    } catch (...) {
        fail(line, col, "expected an integer, got '" + v + "'");
    }
}

std::pair<int, int> parse_range(const std::string& v, int line, int col) {
    size_t dots = v.find("..");
    if (dots == std::string::npos) {
        int x = parse_int(v, line, col);
        return {x, x};
    }
    int lo = parse_int(trim(v.substr(0, dots)), line, col);
    int hi = parse_int(trim(v.substr(dots + 2)), line, col);
    if (lo > hi) fail(line, col, "empty range '" + v + "'");
    return {lo, hi};
}

bool parse_bool(const std::string& v, int line, int col) {
    std::string s = lower(v);
    if (s == "yes" || s == "true" || s == "on" || s == "1") return true;
    if (s == "no" || s == "false" || s == "off" || s == "0") return false;
    fail(line, col, "expected yes/no, got '" + v + "'");
}

// NAME(n) or NAME(n|m)
void parse_algebra_value(JobSpec& spec, const std::string& v, int line, int col) {
    if (lower(v).rfind("custom", 0) == 0) {
        spec.kind = FamilyKind::Custom;
        spec.custom_path = trim(v.substr(6));
        if (spec.custom_path.empty()) fail(line, col, "custom algebra needs a table path");
        return;
    }
    size_t open = v.find('(');
    size_t close = v.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        fail(line, col, "expected FAMILY(n) or FAMILY(n|m), got '" + v + "'");
    std::string name = trim(v.substr(0, open));
    auto kind = parse_family_kind(name);
    if (!kind) fail(line, col, "unknown algebra family '" + name + "'");
    spec.kind = *kind;
    std::string inner = v.substr(open + 1, close - open - 1);
    size_t bar = inner.find('|');
    if (bar == std::string::npos) {
        spec.n = parse_int(trim(inner), line, col);
        spec.m = 0;
    } else {
        spec.n = parse_int(trim(inner.substr(0, bar)), line, col);
        spec.m = parse_int(trim(inner.substr(bar + 1)), line, col);
    }
}

std::vector<int> parse_int_list(const std::string& v, int line, int col) {
    std::vector<int> out;
    for (const std::string& item : split_list(v)) out.push_back(parse_int(item, line, col));
    return out;
}

struct CellResult {
    CohomologyResult result;
};

std::string plain_cochain(const AlgebraSlice& s, const Cochain& c, bool genfn) {
    return c.is_zero() ? "0" : format_cochain(s, c, genfn);
}

void render_equations_ascii(std::ostream& os, const CohomologyEngine& eng, const ModuleSpec& mod,
                            int k, int g) {
    const AlgebraSlice& s = eng.slice();
    for (Parity p : {Parity::Even, Parity::Odd}) {
        auto basis = cochain_basis(s, mod, k, g, p);
        if (basis.empty()) continue;
        os << "  cell k=" << k << " g=" << g << " parity=" << (p == Parity::Even ? "even" : "odd")
           << "\n  coordinates:\n";
        for (size_t j = 0; j < basis.size(); ++j) {
            Cochain unit(s.family().field(), k, g, p);
            unit.add(basis[j], s.family().field().one());
            os << "    x_" << j + 1 << " <-> " << plain_cochain(s, unit, false) << "\n";
        }
        os << "  cocycle equations:\n";
        ExactMatrix Z(0, static_cast<int>(basis.size()), s.family().field());
        if (k > 0) Z = differential_matrix(s, mod, k - 1, g, p).transposed();
        bool any = false;
        for (int r = 0; r < Z.rows(); ++r) {
            if (Z.row(r).empty()) continue;
            any = true;
            os << "    ";
            bool first = true;
            for (const auto& [cidx, val] : Z.row(r)) {
                std::string cs = format_scalar(val);
                if (!first && cs[0] != '-') os << "+ ";
                os << cs << "*x_" << cidx + 1 << " ";
                first = false;
            }
            os << "= 0\n";
        }
        if (!any) os << "    (none: every combination is a cocycle)\n";
        os << "  coboundary parametrization x = b t:\n";
        ExactMatrix b = differential_matrix(s, mod, k, g, p).transposed();
        for (int r = 0; r < b.rows(); ++r) {
            os << "    x_" << r + 1 << " =";
            if (b.row(r).empty()) {
                os << " 0";
            } else {
                for (const auto& [t, val] : b.row(r)) {
                    std::string cs = format_scalar(val);
                    os << " " << (cs[0] == '-' ? "" : "+") << cs << "*t_" << t + 1;
                }
            }
            os << "\n";
        }
    }
}

MachineResult to_machine(const CohomologyEngine& eng, const std::vector<CohomologyResult>& cells) {
    MachineResult m;
    m.algebra = eng.family().name();
    m.module = eng.module().name();
    m.field = eng.family().field().spec().name();
    const AlgebraSlice& s = eng.slice();
    for (const CohomologyResult& r : cells) {
        MachineCell mc;
        mc.k = r.k;
        mc.g = r.g;
        mc.even_dim = r.even_dim;
        mc.odd_dim = r.odd_dim;
        for (const Cochain& rep : r.representatives) {
            MachineRepresentative mr;
            mr.parity = rep.parity() == Parity::Even ? "even" : "odd";
            for (const auto& [key, coeff] : rep.coeffs()) {
                std::vector<std::string> names;
                for (int id : key.args) names.push_back(s.elem(id).display_name);
                mr.terms.emplace_back(format_scalar(coeff), std::move(names));
            }
            mc.representatives.push_back(std::move(mr));
        }
        m.cells.push_back(std::move(mc));
    }
    return m;
}

std::string render_ascii(const CohomologyEngine& eng, const JobSpec& spec,
                         const std::vector<CohomologyResult>& cells) {
    const AlgebraSlice& s = eng.slice();
    std::ostringstream os;
    os << "supercohom report\n";
    os << "algebra: " << eng.family().name() << "\n";
    os << "module: " << eng.module().name() << "\n";
    os << "field: " << eng.family().field().spec().name() << "\n";
    os << "window: [" << s.g_lo() << ", " << s.g_hi() << "]\n";
    if (spec.print_basis) {
        os << "\nbasis elements:\n";
        for (const BasisElement& b : s.basis()) {
            os << "  " << b.display_name;
            if (!b.payload.comps.empty()) os << " = " << format_poly(b.payload.comps[0]);
            os << "   (grade " << b.grade << ", " << (b.parity == Parity::Even ? "even" : "odd")
               << ")\n";
        }
    }
    if (spec.print_commutators) {
        os << "\nnonzero commutators:\n";
        for (int i = 0; i < s.size(); ++i)
            for (int j = i; j < s.size(); ++j) {
                BracketEntry e = s.bracket_terms(i, j);
                if (e.terms.empty()) continue;
                os << "  [" << s.elem(i).display_name << ", " << s.elem(j).display_name << "] =";
                for (const auto& [k, c] : e.terms) {
                    std::string cs = format_scalar(c);
                    os << " " << (cs[0] == '-' ? "" : "+") << cs << "*" << s.elem(k).display_name;
                }
                os << "\n";
            }
    }
    if (spec.print_equations) {
        os << "\ndetermining equations:\n";
        for (const CohomologyResult& r : cells)
            render_equations_ascii(os, eng, eng.module(), r.k, r.g);
    }
    os << "\ncohomology:\n";
    for (const CohomologyResult& r : cells) {
        os << "H^" << r.k << "_" << r.g << ": even dim " << r.even_dim << ", odd dim " << r.odd_dim
           << "\n";
        int idx = 0;
        for (const Cochain& rep : r.representatives) {
            ++idx;
            os << "  class " << idx << " (" << (rep.parity() == Parity::Even ? "even" : "odd")
               << "):\n";
            os << "    " << plain_cochain(s, rep, true) << "\n";
            os << "    = " << plain_cochain(s, rep, false) << "\n";
        }
    }
    return os.str();
}

std::string render_latex(const CohomologyEngine& eng, const JobSpec& spec,
                         const std::vector<CohomologyResult>& cells) {
    const AlgebraSlice& s = eng.slice();
    std::ostringstream os;
    os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n";
    os << "\\section*{" << eng.family().name() << ", " << eng.module().name() << " module, $"
       << eng.family().field().spec().name() << "$}\n";
    if (spec.print_basis) {
        os << "\\subsection*{Basis}\n\\begin{align*}\n";
        for (const BasisElement& b : s.basis()) {
            os << b.display_name << " &= ";
            if (!b.payload.comps.empty()) os << format_poly_latex(b.payload.comps[0]);
            os << " \\\\\n";
        }
        os << "\\end{align*}\n";
    }
    for (const CohomologyResult& r : cells) {
        os << "\\subsection*{$H^{" << r.k << "}_{" << r.g << "}$: even dim " << r.even_dim
           << ", odd dim " << r.odd_dim << "}\n";
        for (const Cochain& rep : r.representatives)
            os << "\\begin{equation*}\n" << format_cochain_latex(s, rep) << "\n\\end{equation*}\n";
    }
    os << "\\end{document}\n";
    return os.str();
}

}  // namespace

JobSpec parse_job(std::string_view text) {
    JobSpec spec;
    bool have_header = false;
    bool have_algebra = false;
    std::optional<std::vector<int>> even_grading, odd_grading;
    int line_no = 0;
    bool in_comment = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        // strip <...> comments (may span lines)
        std::string clean;
        for (char c : raw) {
            if (in_comment) {
                if (c == '>') in_comment = false;
            } else if (c == '<') {
                in_comment = true;
            } else {
                clean += c;
            }
        }
        std::string stmt = trim(clean);
        if (stmt.empty()) continue;
        if (!have_header) {
            if (stmt != "supercohom-job v1")
                fail(line_no, 1, "missing header: the first statement must be 'supercohom-job v1'");
            have_header = true;
            continue;
        }
        size_t colon = stmt.find(':');
        if (colon == std::string::npos) fail(line_no, 1, "expected 'key: value' in '" + stmt + "'");
        std::string key = lower(trim(stmt.substr(0, colon)));
        std::string value = trim(stmt.substr(colon + 1));
        int col = static_cast<int>(raw.find(':') + 2);
        if (!value.empty() && value.back() == '.') value = trim(value.substr(0, value.size() - 1));
        if (value.empty()) fail(line_no, col, "empty value for key '" + key + "'");

        if (key == "algebra") {
            parse_algebra_value(spec, value, line_no, col);
            have_algebra = true;
        } else if (key == "buttin superalgebra" || key == "leites superalgebra" ||
                   key == "special buttin superalgebra" || key == "special leites superalgebra") {
            spec.kind = key[0] == 'b'   ? FamilyKind::B
                        : key[0] == 'l' ? FamilyKind::Le
                        : key[8] == 'b' ? FamilyKind::SB
                                        : FamilyKind::SLe;
            spec.n = parse_int(value, line_no, col);
            spec.m = 0;
            have_algebra = true;
        } else if (key == "even variables") {
            spec.even_vars = split_list(value);
        } else if (key == "odd variables") {
            spec.odd_vars = split_list(value);
        } else if (key == "grading for even variables") {
            even_grading = parse_int_list(value, line_no, col);
            for (int g : *even_grading)
                if (g < 1) fail(line_no, col, "even variable grades must be positive");
        } else if (key == "grading for odd variables") {
            odd_grading = parse_int_list(value, line_no, col);
        } else if (key == "module type") {
            std::string m = lower(value);
            if (m == "trivial")
                spec.module = ModuleKind::Trivial;
            else if (m == "adjoint")
                spec.module = ModuleKind::Adjoint;
            else if (m == "coadjoint")
                spec.module = ModuleKind::Coadjoint;
            else
                fail(line_no, col, "unknown module type '" + value + "'");
        } else if (key == "field") {
            std::string f = lower(value);
            if (f == "q") {
                spec.field = FieldSpec::rationals();
            } else if (f.rfind("zp", 0) == 0) {
                std::string num = trim(value.substr(2));
                if (!num.empty() && num.front() == '(' && num.back() == ')')
                    num = trim(num.substr(1, num.size() - 2));
                long long p = parse_int(num, line_no, col);
                if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
                    fail(line_no, col, "'" + num + "' is not prime");
                try {
                    spec.field = FieldSpec::prime_field(static_cast<std::uint64_t>(p));
                } catch (const Error& e) {
                    fail(line_no, col, e.what());
                }
            } else {
                fail(line_no, col, "unknown field '" + value + "' (use Q or Zp <prime>)");
            }
        } else if (key == "cohomology number") {
            std::tie(spec.k_lo, spec.k_hi) = parse_range(value, line_no, col);
            if (spec.k_lo < 0) fail(line_no, col, "cohomology number must be non-negative");
        } else if (key == "grade") {
            std::tie(spec.g_lo, spec.g_hi) = parse_range(value, line_no, col);
        } else if (key == "output") {
            auto f = parse_output_format(lower(value));
            if (!f) fail(line_no, col, "unknown output format '" + value + "'");
            spec.format = *f;
        } else if (key == "print basis") {
            spec.print_basis = parse_bool(value, line_no, col);
        } else if (key == "print commutators") {
            spec.print_commutators = parse_bool(value, line_no, col);
        } else if (key == "print equations") {
            spec.print_equations = parse_bool(value, line_no, col);
        } else {
            fail(line_no, 1, "unknown key '" + key + "'");
        }
    }
    if (!have_header) throw UsageError("empty job file: missing 'supercohom-job v1' header");
    if (!have_algebra) throw UsageError("job file does not select an algebra");
    if (even_grading && spec.even_vars.empty())
        throw UsageError("grading for even variables given without the variables");
    if (odd_grading && spec.odd_vars.empty())
        throw UsageError("grading for odd variables given without the variables");
    spec.even_grading =
        even_grading ? *even_grading : std::vector<int>(spec.even_vars.size(), 1);
    spec.odd_grading = odd_grading ? *odd_grading : std::vector<int>(spec.odd_vars.size(), 1);
    if (spec.even_grading.size() != spec.even_vars.size())
        throw UsageError("even grading length does not match the even variable count");
    if (spec.odd_grading.size() != spec.odd_vars.size())
        throw UsageError("odd grading length does not match the odd variable count");
    return spec;
}

std::string run_job(const JobSpec& spec, std::optional<OutputFormat> format, int threads) {
    Field F(spec.field);
    AlgebraFamily family = [&] {
        if (spec.kind == FamilyKind::Custom) {
            std::ifstream in(spec.custom_path);
            if (!in) throw UsageError("cannot open custom algebra table: " + spec.custom_path);
            std::ostringstream buf;
            buf << in.rdbuf();
            return AlgebraFamily::make_custom(parse_custom_algebra(buf.str(), F), F);
        }
        ContextPtr ctx;
        if (!spec.even_vars.empty() || !spec.odd_vars.empty())
            ctx = std::make_shared<VariableContext>(spec.even_vars, spec.even_grading,
                                                    spec.odd_vars, spec.odd_grading);
        return AlgebraFamily::make(spec.kind, spec.n, spec.m, F, ctx);
    }();

    ModuleSpec module = spec.module == ModuleKind::Trivial    ? ModuleSpec::trivial()
                        : spec.module == ModuleKind::Adjoint ? ModuleSpec::adjoint()
                                                             : ModuleSpec::coadjoint();
    CohomologyEngine eng(family, module, spec.k_hi, spec.g_lo, spec.g_hi);
    VerifyReport vr = verify_algebra(eng.slice());
    if (!vr.ok)
        throw Error("algebra verification failed: " +
                    (vr.violations.empty() ? std::string("unknown violation") : vr.violations[0]));

    std::vector<std::pair<int, int>> grid;
    for (int k = spec.k_lo; k <= spec.k_hi; ++k)
        for (int g = spec.g_lo; g <= spec.g_hi; ++g) grid.emplace_back(k, g);
    std::vector<CohomologyResult> cells(grid.size());
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            try {
                cells[i] = eng.compute(grid[i].first, grid[i].second);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);

    OutputFormat fmt = format.value_or(spec.format);
    switch (fmt) {
        case OutputFormat::Ascii: return render_ascii(eng, spec, cells);
        case OutputFormat::Latex: return render_latex(eng, spec, cells);
        case OutputFormat::Machine: return render_machine_result(to_machine(eng, cells));
    }
    throw InternalError("unhandled output format");
}

std::string render_machine_result(const MachineResult& r) {
    std::ostringstream os;
    os << "supercohom-result v1\n";
    os << "algebra: " << r.algebra << "\n";
    os << "module: " << r.module << "\n";
    os << "field: " << r.field << "\n";
    os << "cells: " << r.cells.size() << "\n";
    for (const MachineCell& c : r.cells) {
        os << "cell k=" << c.k << " g=" << c.g << " even_dim=" << c.even_dim
           << " odd_dim=" << c.odd_dim << " reps=" << c.representatives.size() << "\n";
        for (const MachineRepresentative& rep : c.representatives) {
            os << "rep parity=" << rep.parity << " terms=" << rep.terms.size() << "\n";
            for (const auto& [coeff, names] : rep.terms) {
                os << "term " << coeff << " :";
                for (size_t i = 0; i < names.size(); ++i) os << (i ? "," : " ") << names[i];
                os << "\n";
            }
        }
    }
    os << "end\n";
    return os.str();
}

namespace {

std::string expect_prefixed(const std::string& line, const std::string& prefix, int line_no) {
    if (line.rfind(prefix, 0) != 0)
        fail(line_no, 1, "expected '" + prefix + "...' in machine result");
    return trim(line.substr(prefix.size()));
}

int field_int(const std::string& token, const std::string& name, int line_no) {
    if (token.rfind(name + "=", 0) != 0)
        fail(line_no, 1, "expected '" + name + "=...' in '" + token + "'");
    return parse_int(token.substr(name.size() + 1), line_no, 1);
}

}  // namespace

MachineResult parse_machine_result(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) fail(line_no, 1, "unexpected end of machine result");
        ++line_no;
        return trim(line);
    };
    if (next_line() != "supercohom-result v1")
        fail(line_no, 1, "missing 'supercohom-result v1' header");
    MachineResult r;
    r.algebra = expect_prefixed(next_line(), "algebra: ", line_no);
    r.module = expect_prefixed(next_line(), "module: ", line_no);
    r.field = expect_prefixed(next_line(), "field: ", line_no);
    int ncells = parse_int(expect_prefixed(next_line(), "cells: ", line_no), line_no, 1);
    for (int ci = 0; ci < ncells; ++ci) {
        std::istringstream hdr(expect_prefixed(next_line(), "cell ", line_no));
        std::string tok;
        MachineCell cell;
        std::vector<std::string> toks;
        while (hdr >> tok) toks.push_back(tok);
        if (toks.size() != 5) fail(line_no, 1, "malformed cell header");
        cell.k = field_int(toks[0], "k", line_no);
        cell.g = field_int(toks[1], "g", line_no);
        cell.even_dim = field_int(toks[2], "even_dim", line_no);
        cell.odd_dim = field_int(toks[3], "odd_dim", line_no);
        int nreps = field_int(toks[4], "reps", line_no);
        for (int ri = 0; ri < nreps; ++ri) {
            std::string rh = expect_prefixed(next_line(), "rep ", line_no);
            std::istringstream rhs(rh);
            std::string ptok, ttok;
            rhs >> ptok >> ttok;
            MachineRepresentative rep;
            if (ptok.rfind("parity=", 0) != 0) fail(line_no, 1, "malformed rep header");
            rep.parity = ptok.substr(7);
            if (rep.parity != "even" && rep.parity != "odd")
                fail(line_no, 1, "rep parity must be even or odd");
            int nterms = field_int(ttok, "terms", line_no);
            for (int ti = 0; ti < nterms; ++ti) {
                std::string tl = expect_prefixed(next_line(), "term ", line_no);
                size_t colon = tl.find(" :");
                if (colon == std::string::npos) fail(line_no, 1, "malformed term line");
                std::string coeff = trim(tl.substr(0, colon));
                std::string args = trim(tl.substr(colon + 2));
                std::vector<std::string> names;
                if (!args.empty()) names = split_list(args);
                rep.terms.emplace_back(coeff, names);
            }
            cell.representatives.push_back(std::move(rep));
        }
        r.cells.push_back(std::move(cell));
    }
    if (next_line() != "end") fail(line_no, 1, "missing 'end' terminator");
    return r;
}

}  // namespace supercohom
