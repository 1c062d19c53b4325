#ifndef SUPERCOHOM_COHOMOLOGY_HPP
#define SUPERCOHOM_COHOMOLOGY_HPP

#include <mutex>

#include "supercohom/cochain.hpp"

namespace supercohom {

/// One computed cell H^k_g(A; M), both parities.
struct CohomologyResult {
    std::string family_name;
    std::string module_name;
    int k = 0;
    int g = 0;
    int even_dim = 0;
    int odd_dim = 0;
    /// Normalized representatives (first nonzero coordinate in canonical key
    /// order equals 1): even-parity classes first, then odd-parity ones.
    std::vector<Cochain> representatives;

    struct ParityDiag {
        Parity parity = Parity::Even;
        int dim_k = 0, dim_k_plus_1 = 0, dim_k_minus_1 = 0;
        long long nnz_up = 0, nnz_down = 0;
        double seconds = 0.0;
    };
    GradeWindow window;
    std::vector<ParityDiag> diagnostics;
};

struct CoboundaryCheck {
    bool is_coboundary = false;
    /// Degree k+1 cochain w with boundary(w) = c when is_coboundary.
    Cochain preimage;
};

/// Driver for one (family, module) pair over a fixed degree/grade envelope.
/// The envelope fixes the slice window up front so that basis-element ids,
/// and therefore parsed cochains, stay valid across every call.
///
/// Orientation of the complex: a degree-k cochain c is a cocycle when its
/// matrix-free boundary apply_differential(c) vanishes, and a coboundary when
/// it is the boundary of a degree-(k+1) cochain; H^k_g is the quotient.
/// Internal cross-checks (boundary-of-boundary on every assembled pair, the
/// independent recomputation inside quotient_basis, and re-verification of
/// every emitted representative) throw InternalError on disagreement.
class CohomologyEngine {
public:
    CohomologyEngine(AlgebraFamily family, ModuleSpec module, int k_max, int g_lo, int g_hi);

    const AlgebraSlice& slice() const { return slice_; }
    const AlgebraFamily& family() const { return family_; }
    const ModuleSpec& module() const { return module_; }
    int k_max() const { return k_max_; }

    CohomologyResult compute(int k, int g);

    bool is_cocycle(const Cochain& c) const;
    CoboundaryCheck is_coboundary(const Cochain& c);
    /// Same cohomology class: both closed and the difference is a certified
    /// coboundary.
    bool class_equal(const Cochain& a, const Cochain& b);

    /// Other representatives of the same class, produced by adding boundaries
    /// that zero out successive coordinates of the original; every returned
    /// form is closed and class-equal to the input (re-verified).
    std::vector<Cochain> alternative_forms(const Cochain& rep, int max_forms = 4);

    struct ScanCell {
        int k = 0, g = 0;
        int even_dim = 0, odd_dim = 0;
    };
    /// Dimension grid over the ranges (inclusive); cells run concurrently on
    /// up to `threads` workers and aggregate in (k, g) order regardless of
    /// completion order.
    std::vector<ScanCell> scan(int k_lo, int k_hi, int g_lo, int g_hi, int threads = 1);

    /// First nonzero coordinate (canonical key order) scaled to 1.
    static Cochain normalize(const Cochain& c);

private:
    AlgebraFamily family_;
    ModuleSpec module_;
    int k_max_;
    GradeWindow window_;
    AlgebraSlice slice_;

    // cache of degree-raising matrices per (k, g, parity)
    std::map<std::tuple<int, int, int>, ExactMatrix> matrices_;
    std::mutex cache_mutex_;

    const ExactMatrix& raising_matrix(int k, int g, Parity p);
    void check_envelope(int k, int g) const;
    std::pair<int, int> cell_dims(int k, int g, Parity p, std::vector<Cochain>* reps,
                                  CohomologyResult::ParityDiag* diag);
    ExactVector coordinates(const Cochain& c, const std::vector<CochainKey>& basis) const;
};

}  // namespace supercohom

#endif
