#include "supercohom/cohomology.hpp"

#include <atomic>
#include <chrono>
#include <thread>

namespace supercohom {

namespace {

Cochain from_vector(const Field& F, int k, int g, Parity p, const std::vector<CochainKey>& basis,
                    const ExactVector& v) {
    Cochain c(F, k, g, p);
    for (size_t i = 0; i < basis.size(); ++i)
        if (!v[i].is_zero()) c.add(basis[i], v[i]);
    return c;
}

}  // namespace

CohomologyEngine::CohomologyEngine(AlgebraFamily family, ModuleSpec module, int k_max, int g_lo,
                                   int g_hi)
    : family_(std::move(family)),
      module_(std::move(module)),
      k_max_(k_max),
      slice_(build_slice(family_, 0, 0)) {
    if (k_max < 0) throw UsageError("k_max must be non-negative");
    if (g_lo > g_hi) throw UsageError("empty grade range");
    // One window serving every cell of the envelope, degree k_max + 1
    // included so that coboundary certificates stay representable.
    bool first = true;
    for (int g = g_lo; g <= g_hi; ++g) {
        GradeWindow w = required_window(family_, module_, k_max_ + 1, g);
        if (first) {
            window_ = w;
            first = false;
        } else {
            window_.lo = std::min(window_.lo, w.lo);
            window_.hi = std::max(window_.hi, w.hi);
        }
    }
    slice_ = build_slice(family_, window_.lo, window_.hi);
    module_.check_admissible(slice_);
}

void CohomologyEngine::check_envelope(int k, int g) const {
    if (k < 0 || k > k_max_)
        throw UsageError("degree " + std::to_string(k) + " outside the engine envelope [0, " +
                         std::to_string(k_max_) + "]");
    GradeWindow need = required_window(family_, module_, k + 1, g);
    if (need.lo < window_.lo || need.hi > window_.hi)
        throw UsageError("grade " + std::to_string(g) + " outside the engine envelope");
}

const ExactMatrix& CohomologyEngine::raising_matrix(int k, int g, Parity p) {
    std::tuple<int, int, int> key{k, g, static_cast<int>(p)};
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = matrices_.find(key);
        if (it != matrices_.end()) return it->second;
    }
    ExactMatrix m = differential_matrix(slice_, module_, k, g, p);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return matrices_.emplace(key, std::move(m)).first->second;
}

ExactVector CohomologyEngine::coordinates(const Cochain& c,
                                          const std::vector<CochainKey>& basis) const {
    const Field& F = family_.field();
    std::map<CochainKey, int> index;
    for (size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<int>(i);
    ExactVector v(basis.size(), F.zero());
    for (const auto& [key, coeff] : c.coeffs()) {
        auto it = index.find(key);
        if (it == index.end())
            throw InternalError("cochain key outside the enumerated basis of its cell");
        v[it->second] = coeff;
    }
    return v;
}

std::pair<int, int> CohomologyEngine::cell_dims(int k, int g, Parity p, std::vector<Cochain>* reps,
                                                CohomologyResult::ParityDiag* diag) {
    auto t0 = std::chrono::steady_clock::now();
    const Field& F = family_.field();
    std::vector<CochainKey> basis = cochain_basis(slice_, module_, k, g, p);
    int N = static_cast<int>(basis.size());
    const ExactMatrix& up = raising_matrix(k, g, p);
    ExactMatrix bmat = up.transposed();  // columns: boundaries of (k+1)-keys
    ExactMatrix Z(0, N, F);              // cocycle equations
    if (k > 0) Z = raising_matrix(k - 1, g, p).transposed();

    // boundary-of-boundary must vanish on every generator
    for (int c = 0; c < bmat.cols(); ++c) {
        ExactVector col(N, F.zero());
        for (int r = 0; r < N; ++r) col[r] = bmat.at(r, c);
        for (const FieldElement& x : Z.multiply(col))
            if (!x.is_zero())
                throw InternalError("differential composition is nonzero at degree " +
                                    std::to_string(k) + ", grade " + std::to_string(g));
    }

    int dim;
    if (reps) {
        std::vector<ExactVector> q = quotient_basis(Z, bmat);
        dim = static_cast<int>(q.size());
        std::vector<ExactVector> zker = kernel_basis(up);
        for (const ExactVector& v : q) {
            Cochain rep = normalize(from_vector(F, k, g, p, basis, v));
            if (!is_cocycle(rep)) throw InternalError("emitted representative is not closed");
            // non-triviality: a coboundary pairs to zero with every kernel
            // vector of the raising map
            bool nontrivial = false;
            ExactVector rv = coordinates(rep, basis);
            for (const ExactVector& z : zker) {
                FieldElement dot = F.zero();
                for (int i = 0; i < N; ++i) dot = dot + rv[i] * z[i];
                if (!dot.is_zero()) {
                    nontrivial = true;
                    break;
                }
            }
            if (!nontrivial) throw InternalError("emitted representative is a coboundary");
            reps->push_back(std::move(rep));
        }
    } else {
        dim = (N - rank(Z)) - rank(bmat);
    }

    if (diag) {
        diag->parity = p;
        diag->dim_k = N;
        diag->dim_k_plus_1 = up.rows();
        diag->dim_k_minus_1 = Z.rows();
        diag->nnz_up = up.nonzeros();
        diag->nnz_down = Z.nonzeros();
        diag->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return {dim, N};
}

CohomologyResult CohomologyEngine::compute(int k, int g) {
    check_envelope(k, g);
    CohomologyResult r;
    r.family_name = family_.name();
    r.module_name = module_.name();
    r.k = k;
    r.g = g;
    r.window = window_;
    for (Parity p : {Parity::Even, Parity::Odd}) {
        CohomologyResult::ParityDiag diag;
        std::vector<Cochain> reps;
        auto [dim, n] = cell_dims(k, g, p, &reps, &diag);
        (void)n;
        (p == Parity::Even ? r.even_dim : r.odd_dim) = dim;
        for (Cochain& c : reps) r.representatives.push_back(std::move(c));
        r.diagnostics.push_back(diag);
    }
    return r;
}

bool CohomologyEngine::is_cocycle(const Cochain& c) const {
    return apply_differential(slice_, module_, c).is_zero();
}

CoboundaryCheck CohomologyEngine::is_coboundary(const Cochain& c) {
    check_envelope(c.degree(), c.grade());
    const Field& F = family_.field();
    int k = c.degree(), g = c.grade();
    Parity p = c.parity();
    std::vector<CochainKey> basis = cochain_basis(slice_, module_, k, g, p);
    std::vector<CochainKey> above = cochain_basis(slice_, module_, k + 1, g, p);
    ExactVector v = coordinates(c, basis);
    SpanCheck sc = in_span(raising_matrix(k, g, p).transposed(), v);
    CoboundaryCheck out;
    out.is_coboundary = sc.in_span;
    out.preimage = Cochain(F, k + 1, g, p);
    if (sc.in_span) {
        out.preimage = from_vector(F, k + 1, g, p, above, sc.certificate);
        // certificate validity: its boundary must reproduce c exactly
        if (!(apply_differential(slice_, module_, out.preimage) == c))
            throw InternalError("coboundary certificate fails to reproduce the cochain");
    }
    return out;
}

bool CohomologyEngine::class_equal(const Cochain& a, const Cochain& b) {
    if (a.degree() != b.degree() || a.grade() != b.grade() || a.parity() != b.parity())
        return false;
    if (!is_cocycle(a) || !is_cocycle(b)) return false;
    Cochain diff = a - b;
    if (diff.is_zero()) return true;
    return is_coboundary(diff).is_coboundary;
}

Cochain CohomologyEngine::normalize(const Cochain& c) {
    if (c.is_zero()) return c;
    const FieldElement& lead = c.coeffs().begin()->second;
    return c.scaled(c.field().one() / lead);
}

std::vector<Cochain> CohomologyEngine::alternative_forms(const Cochain& rep, int max_forms) {
    check_envelope(rep.degree(), rep.grade());
    const Field& F = family_.field();
    int k = rep.degree(), g = rep.grade();
    Parity p = rep.parity();
    std::vector<CochainKey> basis = cochain_basis(slice_, module_, k, g, p);
    ExactVector v = coordinates(rep, basis);
    // row space of bmat^T = boundary space; its RREF gives, per pivot
    // coordinate j, a boundary vector equal to 1 at j
    EchelonForm eb = row_echelon(raising_matrix(k, g, p));
    std::vector<Cochain> out;
    for (int r = 0; r < static_cast<int>(eb.pivot_cols.size()); ++r) {
        if (static_cast<int>(out.size()) >= max_forms) break;
        int j = eb.pivot_cols[r];
        if (v[j].is_zero()) continue;  // coordinate already absent
        ExactVector w = v;
        for (const auto& [col, val] : eb.rref.row(r)) w[col] = w[col] - v[j] * val;
        // no rescaling here: each form must differ from rep by exactly a
        // boundary, and normalization would change the class by a scalar
        Cochain form = from_vector(F, k, g, p, basis, w);
        if (form.is_zero() || form == rep) continue;
        if (!is_cocycle(form) || !class_equal(form, rep))
            throw InternalError("alternative form fails class verification");
        bool dup = false;
        for (const Cochain& prev : out) dup = dup || prev == form;
        if (!dup) out.push_back(std::move(form));
    }
    return out;
}

std::vector<CohomologyEngine::ScanCell> CohomologyEngine::scan(int k_lo, int k_hi, int g_lo,
                                                               int g_hi, int threads) {
    if (k_lo > k_hi || g_lo > g_hi) throw UsageError("empty scan range");
    std::vector<ScanCell> cells;
    for (int k = k_lo; k <= k_hi; ++k)
        for (int g = g_lo; g <= g_hi; ++g) {
            check_envelope(k, g);
            cells.push_back(ScanCell{k, g, 0, 0});
        }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                ScanCell& cell = cells[i];
                cell.even_dim = cell_dims(cell.k, cell.g, Parity::Even, nullptr, nullptr).first;
                cell.odd_dim = cell_dims(cell.k, cell.g, Parity::Odd, nullptr, nullptr).first;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return cells;
}

}  // namespace supercohom
