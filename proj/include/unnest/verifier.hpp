#pragma once

#include "unnest/analyzer.hpp"
#include "unnest/transformer.hpp"
#include "unnest/value.hpp"
#include "unnest/workbook.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace unnest {

struct EmptyDrivers : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DivergenceKind {
    ValueMismatch,  // both sides produced ordinary values that differ
    ErrorLatency,   // exactly one side produced an error value
    TestErrorSkip,  // a test errored: the original propagates it, the
                    // lookup skips the non-matching error row
};

std::string divergence_kind_name(DivergenceKind kind);

struct Divergence {
    std::string context; // "(F,T,F,F,F)" or "B10=Rev, B11=5"
    Value original;
    Value transformed;
    DivergenceKind kind = DivergenceKind::ValueMismatch;
};

enum class EquivalenceStatus { Equivalent, Divergent, Inconclusive };

std::string status_name(EquivalenceStatus status);

struct EquivalenceReport {
    EquivalenceStatus status = EquivalenceStatus::Inconclusive;
    std::size_t assignments_checked = 0;
    std::vector<Divergence> divergences;
    std::vector<LatentError> latent_errors;
    std::string note;
};

// Exhaustive truth-table oracle: replaces the plan's test cells with
// boolean stubs and its outcome cells with distinct numeric sentinels,
// then compares the stubbed nested-IF against the lookup result for all
// 2^N assignments. Stubs and sentinels are keyed by formula identity, so
// a plan with swapped outcomes or a negated test diverges observably.
// N beyond the limit reports Inconclusive (assignments_checked == 0).
EquivalenceReport structural_equivalence(const IfChain& chain, const TransformPlan& plan,
                                         int limit = 16);

// Sweeps the Cartesian product of driver values, comparing the result
// cell of both workbooks state by state. Throws EmptyDrivers when no
// driver values are given.
using DriverSweep = std::vector<std::pair<CellAddress, std::vector<Value>>>;
EquivalenceReport state_equivalence(const Workbook& original, const Workbook& transformed,
                                    const CellAddress& result_cell, const DriverSweep& drivers);

// Truth-table equivalence of two expressions over boolean stubs for the
// given tests (inverted occurrences bind to the negated stub). Used to
// check normalization rewrites.
bool equivalent_over_tests(const ExprPtr& a, const ExprPtr& b,
                           const std::vector<ExprPtr>& tests);

// Substitutes boolean stubs for the tests (and their inversions) inside
// an expression; non-matching nodes are rebuilt as-is.
ExprPtr stub_tests(const ExprPtr& e, const std::vector<ExprPtr>& tests,
                   const std::vector<bool>& values);

// Recovers a lookup plan from a transformed workbook whose result cell
// holds the single exact-match lookup formula; nullopt otherwise.
std::optional<TransformPlan> infer_lookup_plan(const Workbook& transformed,
                                               const CellAddress& result_cell);

} // namespace unnest
