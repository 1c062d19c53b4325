#include "supercohom/linalg.hpp"

#include <algorithm>
#include <map>

namespace supercohom {

namespace {

using SparseRow = std::vector<std::pair<int, FieldElement>>;

// dst += factor * src
SparseRow axpy(const SparseRow& dst, const SparseRow& src, const FieldElement& factor) {
    SparseRow out;
    out.reserve(dst.size() + src.size());
    size_t i = 0, j = 0;
    while (i < dst.size() || j < src.size()) {
        if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
            out.push_back(dst[i++]);
        } else if (i == dst.size() || src[j].first < dst[i].first) {
            FieldElement v = factor * src[j].second;
            if (!v.is_zero()) out.emplace_back(src[j].first, v);
            ++j;
        } else {
            FieldElement v = dst[i].second + factor * src[j].second;
            if (!v.is_zero()) out.emplace_back(dst[i].first, v);
            ++i;
            ++j;
        }
    }
    return out;
}

SparseRow scale_row(const SparseRow& r, const FieldElement& c) {
    SparseRow out;
    out.reserve(r.size());
    for (const auto& [col, v] : r) out.emplace_back(col, v * c);
    return out;
}

}  // namespace

void ExactMatrix::add(int r, int c, const FieldElement& v) {
    if (v.is_zero()) return;
    auto& row = data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const auto& p, int col) { return p.first < col; });
    if (it != row.end() && it->first == c) {
        it->second += v;
        if (it->second.is_zero()) row.erase(it);
    } else {
        row.insert(it, {c, v});
    }
}

void ExactMatrix::set(int r, int c, const FieldElement& v) {
    auto& row = data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const auto& p, int col) { return p.first < col; });
    if (it != row.end() && it->first == c) {
        if (v.is_zero())
            row.erase(it);
        else
            it->second = v;
    } else if (!v.is_zero()) {
        row.insert(it, {c, v});
    }
}

FieldElement ExactMatrix::at(int r, int c) const {
    const auto& row = data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const auto& p, int col) { return p.first < col; });
    if (it != row.end() && it->first == c) return it->second;
    return field_.zero();
}

long long ExactMatrix::nonzeros() const {
    long long n = 0;
    for (const auto& r : data_) n += static_cast<long long>(r.size());
    return n;
}

ExactVector ExactMatrix::multiply(const ExactVector& x) const {
    if (static_cast<int>(x.size()) != cols_) throw UsageError("matrix-vector shape mismatch");
    ExactVector out(rows_, field_.zero());
    for (int r = 0; r < rows_; ++r)
        for (const auto& [c, v] : data_[r]) out[r] += v * x[c];
    return out;
}

ExactMatrix ExactMatrix::from_columns(int rows, Field field, const std::vector<ExactVector>& cols) {
    ExactMatrix m(rows, static_cast<int>(cols.size()), field);
    for (size_t c = 0; c < cols.size(); ++c) {
        if (static_cast<int>(cols[c].size()) != rows) throw UsageError("column length mismatch");
        for (int r = 0; r < rows; ++r)
            if (!cols[c][r].is_zero()) m.data_[r].emplace_back(static_cast<int>(c), cols[c][r]);
    }
    return m;
}

ExactMatrix ExactMatrix::hcat(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.rows_ != b.rows_) throw UsageError("hcat row mismatch");
    ExactMatrix m(a.rows_, a.cols_ + b.cols_, a.field_);
    for (int r = 0; r < a.rows_; ++r) {
        m.data_[r] = a.data_[r];
        for (const auto& [c, v] : b.data_[r]) m.data_[r].emplace_back(c + a.cols_, v);
    }
    return m;
}

ExactMatrix ExactMatrix::transposed() const {
    ExactMatrix m(cols_, rows_, field_);
    for (int r = 0; r < rows_; ++r)
        for (const auto& [c, v] : data_[r]) m.data_[c].emplace_back(r, v);
    return m;
}

namespace {

struct WorkRow {
    SparseRow row;
    SparseRow trans;  // unit row of the identity initially
};

EchelonForm row_echelon_sparse(const ExactMatrix& m, bool want_transform) {
    const Field& F = m.field();
    std::vector<WorkRow> pending;
    pending.reserve(m.rows());
    for (int r = 0; r < m.rows(); ++r) {
        WorkRow w;
        w.row = m.row(r);
        if (want_transform) w.trans = {{r, F.one()}};
        pending.push_back(std::move(w));
    }
    std::vector<WorkRow> pivots;  // in pivot-column order
    std::vector<int> pivot_cols;

    while (true) {
        // pick the pending row with the smallest leading column; ties -> shortest
        int best = -1;
        for (size_t i = 0; i < pending.size(); ++i) {
            if (pending[i].row.empty()) continue;
            if (best < 0) {
                best = static_cast<int>(i);
                continue;
            }
            int lc = pending[i].row[0].first, bc = pending[best].row[0].first;
            if (lc < bc || (lc == bc && pending[i].row.size() < pending[best].row.size()))
                best = static_cast<int>(i);
        }
        if (best < 0) break;
        WorkRow piv = std::move(pending[best]);
        pending.erase(pending.begin() + best);
        int col = piv.row[0].first;
        FieldElement inv = piv.row[0].second.inv();
        piv.row = scale_row(piv.row, inv);
        if (want_transform) piv.trans = scale_row(piv.trans, inv);
        // eliminate this column everywhere
        auto eliminate = [&](WorkRow& w) {
            auto it = std::lower_bound(w.row.begin(), w.row.end(), col,
                                       [](const auto& p, int c) { return p.first < c; });
            if (it == w.row.end() || it->first != col) return;
            FieldElement f = -it->second;
            w.row = axpy(w.row, piv.row, f);
            if (want_transform) w.trans = axpy(w.trans, piv.trans, f);
        };
        for (auto& w : pending) eliminate(w);
        for (auto& w : pivots) eliminate(w);
        // keep pivots sorted by pivot column
        auto pos = std::lower_bound(pivot_cols.begin(), pivot_cols.end(), col);
        size_t idx = static_cast<size_t>(pos - pivot_cols.begin());
        pivot_cols.insert(pos, col);
        pivots.insert(pivots.begin() + idx, std::move(piv));
    }

    EchelonForm ef;
    ef.rank = static_cast<int>(pivots.size());
    ef.pivot_cols = pivot_cols;
    ef.rref = ExactMatrix(ef.rank, m.cols(), F);
    for (int r = 0; r < ef.rank; ++r)
        for (const auto& [c, v] : pivots[r].row) ef.rref.set(r, c, v);
    if (want_transform) {
        ef.has_transform = true;
        ef.transform = ExactMatrix(m.rows(), m.rows(), F);
        int r = 0;
        for (const auto& p : pivots) {
            for (const auto& [c, v] : p.trans) ef.transform.set(r, c, v);
            ++r;
        }
        for (const auto& p : pending) {
            for (const auto& [c, v] : p.trans) ef.transform.set(r, c, v);
            ++r;
        }
    }
    return ef;
}

// small matrices: dense Gauss-Jordan
EchelonForm row_echelon_dense(const ExactMatrix& m, bool want_transform) {
    const Field& F = m.field();
    int R = m.rows(), C = m.cols();
    std::vector<ExactVector> a(R, ExactVector(C, F.zero()));
    std::vector<ExactVector> t;
    if (want_transform) {
        t.assign(R, ExactVector(R, F.zero()));
        for (int r = 0; r < R; ++r) t[r][r] = F.one();
    }
    for (int r = 0; r < R; ++r)
        for (const auto& [c, v] : m.row(r)) a[r][c] = v;

    std::vector<int> pivot_cols;
    int row = 0;
    for (int col = 0; col < C && row < R; ++col) {
        int sel = -1;
        for (int r = row; r < R; ++r)
            if (!a[r][col].is_zero()) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        std::swap(a[row], a[sel]);
        if (want_transform) std::swap(t[row], t[sel]);
        FieldElement inv = a[row][col].inv();
        for (int c = 0; c < C; ++c) a[row][c] *= inv;
        if (want_transform)
            for (int c = 0; c < R; ++c) t[row][c] *= inv;
        for (int r = 0; r < R; ++r) {
            if (r == row || a[r][col].is_zero()) continue;
            FieldElement f = a[r][col];
            for (int c = 0; c < C; ++c) a[r][c] -= f * a[row][c];
            if (want_transform)
                for (int c = 0; c < R; ++c) t[r][c] -= f * t[row][c];
        }
        pivot_cols.push_back(col);
        ++row;
    }
    EchelonForm ef;
    ef.rank = row;
    ef.pivot_cols = pivot_cols;
    ef.rref = ExactMatrix(ef.rank, C, F);
    for (int r = 0; r < ef.rank; ++r)
        for (int c = 0; c < C; ++c)
            if (!a[r][c].is_zero()) ef.rref.set(r, c, a[r][c]);
    if (want_transform) {
        ef.has_transform = true;
        ef.transform = ExactMatrix(R, R, F);
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < R; ++c)
                if (!t[r][c].is_zero()) ef.transform.set(r, c, t[r][c]);
    }
    return ef;
}

}  // namespace

EchelonForm row_echelon(const ExactMatrix& m, bool want_transform) {
    if (m.cols() < 64) return row_echelon_dense(m, want_transform);
    return row_echelon_sparse(m, want_transform);
}

int rank(const ExactMatrix& m) { return row_echelon(m).rank; }

std::vector<ExactVector> kernel_basis(const ExactMatrix& m) {
    EchelonForm ef = row_echelon(m);
    const Field& F = m.field();
    std::vector<bool> is_pivot(m.cols(), false);
    for (int c : ef.pivot_cols) is_pivot[c] = true;
    std::vector<ExactVector> out;
    for (int f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        ExactVector x(m.cols(), F.zero());
        x[f] = F.one();
        for (int r = 0; r < ef.rank; ++r) x[ef.pivot_cols[r]] = -ef.rref.at(r, f);
        out.push_back(std::move(x));
    }
    return out;
}

std::optional<ExactVector> solve(const ExactMatrix& m, const ExactVector& v) {
    if (static_cast<int>(v.size()) != m.rows()) throw UsageError("solve shape mismatch");
    ExactMatrix aug = ExactMatrix::hcat(m, ExactMatrix::from_columns(m.rows(), m.field(), {v}));
    EchelonForm ef = row_echelon(aug);
    for (int c : ef.pivot_cols)
        if (c == m.cols()) return std::nullopt;
    ExactVector x(m.cols(), m.field().zero());
    for (int r = 0; r < ef.rank; ++r) x[ef.pivot_cols[r]] = ef.rref.at(r, m.cols());
    return x;
}

SpanCheck in_span(const ExactMatrix& m, const ExactVector& v) {
    SpanCheck sc;
    auto x = solve(m, v);
    if (x) {
        sc.in_span = true;
        sc.certificate = std::move(*x);
    }
    return sc;
}

namespace {

// forward column elimination for incremental rank / membership checks
class IncrementalSpan {
public:
    explicit IncrementalSpan(Field f) : field_(f) {}

    // reduces v; returns true (and absorbs the remainder) when independent
    bool insert(SparseRow v) {
        reduce(v);
        if (v.empty()) return false;
        FieldElement inv = v[0].second.inv();
        int piv = v[0].first;
        rows_[piv] = scale_row(v, inv);
        return true;
    }

    bool contains(SparseRow v) {
        reduce(v);
        return v.empty();
    }

private:
    void reduce(SparseRow& v) const {
        while (!v.empty()) {
            auto it = rows_.find(v[0].first);
            if (it == rows_.end()) return;
            v = axpy(v, it->second, -v[0].second);
        }
    }
    Field field_;
    std::map<int, SparseRow> rows_;
};

SparseRow to_sparse(const ExactVector& v) {
    SparseRow r;
    for (size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) r.emplace_back(static_cast<int>(i), v[i]);
    return r;
}

}  // namespace

std::vector<ExactVector> quotient_basis(const ExactMatrix& Z, const ExactMatrix& b) {
    if (Z.cols() != b.rows())
        throw UsageError("quotient_basis shape mismatch: Z is (*," + std::to_string(Z.cols()) +
                         "), b is (" + std::to_string(b.rows()) + ",*)");
    const Field& F = Z.field();
    const int N = Z.cols();

    // (a) eliminate the parameters: rows of B span the annihilator of im(b)
    std::vector<ExactVector> ann = kernel_basis(b.transposed());
    ExactMatrix B(static_cast<int>(ann.size()), N, F);
    for (size_t r = 0; r < ann.size(); ++r)
        for (int c = 0; c < N; ++c)
            if (!ann[r][c].is_zero()) B.set(static_cast<int>(r), c, ann[r][c]);

    // (b) canonical forms; rank B == rank Z means no non-trivial cocycle, and
    // the general substep (c) below then yields the empty set.
    EchelonForm eb = row_echelon(B);
    EchelonForm ez = row_echelon(Z);

    // (c) y = Bx; rewrite Zx = 0 as Ay = 0. Each Z row lies in the row space
    // of B (coboundaries are cocycles), with expansion coefficients read off
    // at B's pivot columns since eb.rref is reduced.
    const int m_dim = eb.rank;
    ExactMatrix A(ez.rank, m_dim, F);
    for (int zr = 0; zr < ez.rank; ++zr) {
        SparseRow residual = ez.rref.row(zr);
        for (int r = 0; r < m_dim; ++r) {
            FieldElement c = F.zero();
            for (const auto& [col, v] : residual)
                if (col == eb.pivot_cols[r]) {
                    c = v;
                    break;
                }
            if (c.is_zero()) continue;
            A.set(zr, r, c);
            residual = axpy(residual, eb.rref.row(r), -c);
        }
        if (!residual.empty())
            throw InternalError("quotient_basis: a cocycle constraint is not implied by the "
                                "coboundary relations (d∘d != 0?)");
    }

    // parametric y's of Ay = 0 pull back to representatives supported on B's pivots
    std::vector<ExactVector> ys = kernel_basis(A);
    std::vector<ExactVector> reps;
    for (const auto& y : ys) {
        ExactVector x(N, F.zero());
        for (int r = 0; r < m_dim; ++r) x[eb.pivot_cols[r]] = y[r];
        reps.push_back(std::move(x));
    }

    // count identity: dim H = nullity(Z) - rank(b)
    int rank_b = rank(b);
    int expected = (N - ez.rank) - rank_b;
    if (static_cast<int>(reps.size()) != expected)
        throw InternalError("quotient_basis count mismatch: got " + std::to_string(reps.size()) +
                            ", expected " + std::to_string(expected));

    // representative validity
    for (const auto& v : reps)
        for (const auto& zv : Z.multiply(v))
            if (!zv.is_zero()) throw InternalError("quotient_basis representative is not a cocycle");

    // cross-check: extend an im(b) basis to a ker(Z) basis
    {
        IncrementalSpan span(F);
        for (int c = 0; c < b.cols(); ++c) {
            SparseRow col;
            for (int r = 0; r < b.rows(); ++r) {
                FieldElement v = b.at(r, c);
                if (!v.is_zero()) col.emplace_back(r, v);
            }
            span.insert(std::move(col));
        }
        std::vector<ExactVector> alt;
        for (auto& k : kernel_basis(Z)) {
            if (span.insert(to_sparse(k))) alt.push_back(std::move(k));
        }
        if (alt.size() != reps.size())
            throw InternalError("quotient_basis cross-check: dimension disagreement");
        // same span modulo im(b)
        IncrementalSpan span2(F);
        for (int c = 0; c < b.cols(); ++c) {
            SparseRow col;
            for (int r = 0; r < b.rows(); ++r) {
                FieldElement v = b.at(r, c);
                if (!v.is_zero()) col.emplace_back(r, v);
            }
            span2.insert(std::move(col));
        }
        for (const auto& v : reps)
            if (!span2.insert(to_sparse(v)))
                throw InternalError("quotient_basis representative is a coboundary");
        for (const auto& v : alt)
            if (!span2.contains(to_sparse(v)))
                throw InternalError("quotient_basis cross-check: span disagreement");
    }

    return reps;
}

std::string dump_matrix(const ExactMatrix& m) {
    std::string s = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " +
                    m.field().spec().name() + "\n";
    for (int r = 0; r < m.rows(); ++r)
        for (const auto& [c, v] : m.row(r))
            s += std::to_string(r) + " " + std::to_string(c) + " " + format_scalar(v) + "\n";
    return s;
}

}  // namespace supercohom
