#ifndef SUPERCOHOM_CLI_HPP
#define SUPERCOHOM_CLI_HPP

#include <optional>

#include "supercohom/cohomology.hpp"

namespace supercohom {

enum class OutputFormat { Ascii, Latex, Machine };

std::string output_format_name(OutputFormat f);
std::optional<OutputFormat> parse_output_format(std::string_view s);

/// A parsed job file (header line `supercohom-job v1`).
///
/// Grammar: one `key: value` statement per line, `<...>` comments ignored
/// anywhere, keys case-insensitive, a trailing `.` on the value allowed.
/// Keys:
///   algebra: B(1) | SLe(2) | W(1|2) | ... | custom <path>
///   <family> superalgebra: n        (phrase aliases: buttin, leites,
///                                    special buttin, special leites)
///   even variables: x; y            (optional; family default otherwise)
///   grading for even variables: 1; 1
///   odd variables: X; Y
///   grading for odd variables: -1; -1
///   module type: trivial | adjoint | coadjoint
///   field: Q | Zp 46337
///   cohomology number: 5  |  1..5
///   grade: 0  |  -3..3
///   output: ascii | latex | machine
///   print basis / print commutators / print equations: yes | no
struct JobSpec {
    FamilyKind kind = FamilyKind::B;
    int n = 1, m = 0;
    std::string custom_path;  // kind == Custom

    std::vector<std::string> even_vars, odd_vars;  // empty: family default
    std::vector<int> even_grading, odd_grading;

    ModuleKind module = ModuleKind::Trivial;
    FieldSpec field = FieldSpec::rationals();

    int k_lo = 2, k_hi = 2;
    int g_lo = 0, g_hi = 0;

    OutputFormat format = OutputFormat::Ascii;
    bool print_basis = false;
    bool print_commutators = false;
    bool print_equations = false;
};

/// Throws UsageError naming line and column on any malformed statement.
JobSpec parse_job(std::string_view text);

/// Executes the full pipeline and renders in the requested format (the
/// `format` argument, when set, overrides the job's own output key).
std::string run_job(const JobSpec& spec, std::optional<OutputFormat> format = std::nullopt,
                    int threads = 1);

/// Machine format (`supercohom-result v1`): the parse/render pair round-trips
/// byte-exactly, and the parsed data reconstructs every dimension and
/// representative coefficient.
struct MachineRepresentative {
    std::string parity;  // "even" | "odd"
    // one term per entry: exact scalar plus the argument names of its key
    std::vector<std::pair<std::string, std::vector<std::string>>> terms;
};
struct MachineCell {
    int k = 0, g = 0;
    int even_dim = 0, odd_dim = 0;
    std::vector<MachineRepresentative> representatives;
};
struct MachineResult {
    std::string algebra, module, field;
    std::vector<MachineCell> cells;
};
MachineResult parse_machine_result(std::string_view text);
std::string render_machine_result(const MachineResult& r);

}  // namespace supercohom

#endif
