#pragma once

#include "unnest/analyzer.hpp"
#include "unnest/ast.hpp"
#include "unnest/workbook.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace unnest {

struct NotAFormula : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlacementCollision : std::runtime_error {
    PlacementCollision(std::string message, std::vector<CellAddress> blocking)
        : std::runtime_error(std::move(message)), blocking(std::move(blocking)) {}
    std::vector<CellAddress> blocking;
};

enum class Orientation { Vertical, Horizontal };

struct PlacementSpec {
    // Top-left of the generated table. When absent, the anchor lands two
    // columns right of the source formula's rightmost referenced column,
    // on the source row.
    std::optional<CellAddress> anchor;
    Orientation orientation = Orientation::Vertical;
    bool use_names = false;   // also define Test1../Value1.. names
    bool label_column = true; // emit the Name / Value label strips
};

enum class GuardMode { NoGuard, WrapIfError };

struct GuardPolicy {
    GuardMode mode = GuardMode::NoGuard;
    std::string flag_text = "#LATENT!"; // shown when a guarded outcome errors
};

enum class TransformMode { Lookup, Visibility };

// Everything the transform will write, before any of it is applied.
struct TransformPlan {
    TransformMode mode = TransformMode::Lookup;
    CellAddress source;
    IfChain chain;
    Orientation orientation = Orientation::Vertical;
    std::vector<std::pair<CellAddress, ExprPtr>> test_cells;
    std::vector<std::pair<CellAddress, ExprPtr>> outcome_cells; // last = otherwise outcome
    std::optional<std::pair<CellAddress, ExprPtr>> otherwise_test_cell; // literal TRUE
    std::optional<RangeRef> table_range; // lookup mode only
    ExprPtr result_formula;              // replaces the source cell
    GuardPolicy guard;
    std::vector<std::pair<CellAddress, std::string>> label_cells;
    std::vector<std::pair<std::string, CellAddress>> names;

    // The paper's arithmetic: N tests + N+1 outcomes + the rewritten
    // result cell (visibility mode has no new result cell).
    int cell_count() const {
        int n = static_cast<int>(test_cells.size() + outcome_cells.size());
        return mode == TransformMode::Lookup ? n + 1 : n;
    }
};

// Plans the full lookup technique for the nested-IF at source:
// visible test cells, visible outcome cells, the adjacency table with a
// literal-TRUE otherwise row, and a single exact-match lookup formula.
// Branch-on-true and mixed chains are normalized on the way in.
TransformPlan plan_lookup_transform(const Workbook& wb, const CellAddress& source,
                                    const PlacementSpec& placement, const GuardPolicy& guard);

// Visibility-only rewrite for any IF tree, including complex branching:
// every logical test and every leaf outcome moves to its own cell and the
// source keeps its IF structure, now referencing those cells.
TransformPlan plan_visibility_transform(const Workbook& wb, const CellAddress& source,
                                        const PlacementSpec& placement);

// Pure application: returns a new workbook with every planned cell
// written and the source cell replaced. Re-checks placement.
Workbook apply_plan(const Workbook& wb, const TransformPlan& plan);

using DriverState = std::vector<std::pair<CellAddress, Value>>;

struct LatentError {
    std::size_t state_index = 0;
    CellAddress cell;
    ErrorKind kind = ErrorKind::Value;
};

// For each state, reports every generated test/outcome cell that holds an
// error value while the result cell itself stays error-free.
std::vector<LatentError> detect_latent_errors(const Workbook& transformed,
                                              const TransformPlan& plan,
                                              const std::vector<DriverState>& states);

} // namespace unnest
