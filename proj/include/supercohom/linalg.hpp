#ifndef SUPERCOHOM_LINALG_HPP
#define SUPERCOHOM_LINALG_HPP

#include <optional>
#include <utility>
#include <vector>

#include "supercohom/field.hpp"

namespace supercohom {

using ExactVector = std::vector<FieldElement>;

/// Sparse exact matrix: rows held as sorted (col, value) pairs, no stored zeros.
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(int rows, int cols, Field field)
        : rows_(rows), cols_(cols), field_(field), data_(rows) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Field& field() const { return field_; }

    void add(int r, int c, const FieldElement& v);
    void set(int r, int c, const FieldElement& v);
    FieldElement at(int r, int c) const;
    const std::vector<std::pair<int, FieldElement>>& row(int r) const { return data_[r]; }
    long long nonzeros() const;

    ExactVector multiply(const ExactVector& x) const;  // M x
    static ExactMatrix from_columns(int rows, Field field, const std::vector<ExactVector>& cols);
    /// Horizontal concatenation [A | B].
    static ExactMatrix hcat(const ExactMatrix& a, const ExactMatrix& b);
    ExactMatrix transposed() const;

private:
    int rows_ = 0, cols_ = 0;
    Field field_;
    std::vector<std::vector<std::pair<int, FieldElement>>> data_;
};

struct EchelonForm {
    ExactMatrix rref;                 ///< reduced row echelon form (zero rows dropped)
    std::vector<int> pivot_cols;      ///< strictly increasing
    int rank = 0;
    ExactMatrix transform;            ///< transform * M = [rref; 0] when requested
    bool has_transform = false;
};

/// Exact Gauss elimination. Pivoting: first nonzero column, shortest row
/// preferred within a column (fill-in control; arithmetic is exact).
/// Falls back to a dense kernel below 64 columns.
EchelonForm row_echelon(const ExactMatrix& m, bool want_transform = false);

int rank(const ExactMatrix& m);

/// Basis of {x : Mx = 0}, free-variable parametrization from the RREF,
/// ordered by free column.
std::vector<ExactVector> kernel_basis(const ExactMatrix& m);

/// Solve M x = v (columns as generators); nullopt when v is outside the span.
std::optional<ExactVector> solve(const ExactMatrix& m, const ExactVector& v);

struct SpanCheck {
    bool in_span = false;
    ExactVector certificate;  ///< coefficients with M * certificate = v
};
SpanCheck in_span(const ExactMatrix& m, const ExactVector& v);

/// Cohomology-space extraction. Z x = 0 cuts out the cocycles, x = b t
/// parametrizes the coboundaries (same N-dimensional coordinate space:
/// Z is (*, N), b is (N, *)). Returns representatives v with Z v = 0,
/// v independent modulo the column space of b, count = nullity(Z) - rank(b).
///
/// Normative path: eliminate t to get B x = 0 with ker B = im b, set y = B x,
/// rewrite Z x = 0 as A y = 0 and read off the parametric y's. Cross-checked
/// against extending an im(b) basis to a ker(Z) basis; disagreement throws
/// InternalError.
std::vector<ExactVector> quotient_basis(const ExactMatrix& Z, const ExactMatrix& b);

std::string dump_matrix(const ExactMatrix& m);  ///< `rows cols field` header + `r c value` lines

}  // namespace supercohom

#endif
