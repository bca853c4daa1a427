#include "unnest/cli.hpp"

#include "unnest/analyzer.hpp"
#include "unnest/evaluator.hpp"
#include "unnest/parser.hpp"
#include "unnest/printer.hpp"
#include "unnest/transformer.hpp"
#include "unnest/verifier.hpp"
#include "unnest/workbook.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace unnest::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<Workbook> load_workbook(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot open " << path << "\n";
        return std::nullopt;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_cell_list(buf.str());
    } catch (const std::exception& e) {
        err << "error: " << path << ": " << e.what() << "\n";
        return std::nullopt;
    }
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "error: cannot write " << path << "\n";
        return false;
    }
    out << content;
    return true;
}

struct AnalyzeRecord {
    CellAddress cell;
    int if_count = 0;
    int depth = 0;
    BranchShape shape = BranchShape::Complex;
    std::vector<std::string> tests;
    std::vector<std::string> outcomes;
    std::optional<Span> complex_span;
};

AnalyzeRecord build_record(const CellAddress& addr, const FormulaCell& formula) {
    AnalyzeRecord rec;
    rec.cell = addr;
    rec.if_count = count_ifs(*formula.ast);
    rec.depth = nesting_depth(*formula.ast);
    rec.shape = is_if_call(*formula.ast) ? classify(*formula.ast) : BranchShape::Complex;
    if (rec.shape == BranchShape::Complex) {
        rec.complex_span = find_complex_node(*formula.ast);
        if (!rec.complex_span)
            rec.complex_span = formula.ast->span;
        return rec;
    }
    IfChain chain = extract_chain(normalize_to_branch_on_false(formula.ast), addr);
    for (const auto& t : chain.tests)
        rec.tests.push_back(format_expr(t));
    for (const auto& o : chain.outcomes)
        rec.outcomes.push_back(format_expr(o));
    return rec;
}

void print_record(const AnalyzeRecord& rec, std::ostream& out) {
    out << format_address(rec.cell) << ": if_count=" << rec.if_count << " depth=" << rec.depth
        << " shape=" << shape_name(rec.shape) << "\n";
    if (rec.shape == BranchShape::Complex) {
        out << "  Complex: lookup technique not applicable; try --mode visibility";
        if (rec.complex_span)
            out << " (offending IF at bytes " << rec.complex_span->begin << ".."
                << rec.complex_span->end << ")";
        out << "\n";
        return;
    }
    for (std::size_t i = 0; i < rec.tests.size(); ++i)
        out << "  test " << i + 1 << ": " << rec.tests[i] << "\n";
    for (std::size_t i = 0; i < rec.outcomes.size(); ++i) {
        out << "  outcome " << i + 1;
        if (i + 1 == rec.outcomes.size())
            out << " (otherwise)";
        out << ": " << rec.outcomes[i] << "\n";
    }
}

json record_json(const AnalyzeRecord& rec) {
    json j;
    j["cell"] = format_address(rec.cell);
    j["if_count"] = rec.if_count;
    j["depth"] = rec.depth;
    j["shape"] = shape_name(rec.shape);
    j["transformable"] = rec.shape != BranchShape::Complex;
    if (rec.shape == BranchShape::Complex) {
        j["diagnostic"] = {
            {"message", "lookup technique not applicable; try --mode visibility"},
            {"span_begin", rec.complex_span ? rec.complex_span->begin : 0},
            {"span_end", rec.complex_span ? rec.complex_span->end : 0},
        };
    } else {
        j["tests"] = rec.tests;
        j["outcomes"] = rec.outcomes;
    }
    return j;
}

json report_json(const EquivalenceReport& report) {
    json j;
    j["status"] = status_name(report.status);
    j["assignments_checked"] = report.assignments_checked;
    j["divergences"] = json::array();
    for (const auto& d : report.divergences)
        j["divergences"].push_back({{"context", d.context},
                                    {"original", d.original.display()},
                                    {"transformed", d.transformed.display()},
                                    {"kind", divergence_kind_name(d.kind)}});
    j["latent_errors"] = json::array();
    for (const auto& l : report.latent_errors)
        j["latent_errors"].push_back({{"state_index", l.state_index},
                                      {"cell", format_address(l.cell)},
                                      {"error", error_code(l.kind)}});
    if (!report.note.empty())
        j["note"] = report.note;
    return j;
}

void print_report(const std::string& label, const EquivalenceReport& report, std::ostream& out) {
    out << label << ": " << status_name(report.status) << " (" << report.assignments_checked
        << (report.assignments_checked == 1 ? " assignment" : " assignments") << ")\n";
    if (!report.note.empty())
        out << "  note: " << report.note << "\n";
    for (const auto& d : report.divergences)
        out << "  " << divergence_kind_name(d.kind) << " at " << d.context << ": original "
            << d.original.display() << ", transformed " << d.transformed.display() << "\n";
    for (const auto& l : report.latent_errors)
        out << "  latent " << error_code(l.kind) << " in " << format_address(l.cell)
            << " (state " << l.state_index << ")\n";
}

std::string strip_span(const std::vector<std::pair<CellAddress, ExprPtr>>& cells) {
    if (cells.empty())
        return "-";
    if (cells.size() == 1)
        return format_address(cells.front().first);
    return format_address(cells.front().first) + ":" + format_address(cells.back().first);
}

} // namespace

int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
    auto wb = load_workbook(opt.file, err);
    if (!wb)
        return kExitInputError;

    std::vector<AnalyzeRecord> records;
    if (opt.cell) {
        CellAddress addr;
        try {
            addr = parse_address(*opt.cell);
        } catch (const BadAddress& e) {
            err << "error: " << e.what() << "\n";
            return kExitInputError;
        }
        const Cell* cell = wb->find_cell(addr);
        if (!cell || !cell->is_formula()) {
            err << "error: " << format_address(addr) << " does not hold a formula\n";
            return kExitInputError;
        }
        records.push_back(build_record(addr, *cell->formula()));
    } else {
        for (const auto& hit : find_nested_ifs(*wb, opt.min_ifs))
            records.push_back(build_record(hit.cell, *wb->find_cell(hit.cell)->formula()));
    }

    if (opt.json) {
        json j;
        j["command"] = "analyze";
        j["tool_version"] = kToolVersion;
        j["file"] = opt.file;
        j["records"] = json::array();
        for (const auto& r : records)
            j["records"].push_back(record_json(r));
        out << j.dump(2) << "\n";
        return kExitOk;
    }

    if (records.empty()) {
        out << "no nested-IF found\n";
        return kExitOk;
    }
    for (const auto& r : records)
        print_record(r, out);
    return kExitOk;
}

int run_transform(const TransformOptions& opt, std::ostream& out, std::ostream& err) {
    auto wb = load_workbook(opt.file, err);
    if (!wb)
        return kExitInputError;

    if (opt.out_file && !opt.force) {
        std::error_code ec;
        if (*opt.out_file == opt.file ||
            fs::equivalent(fs::path(*opt.out_file), fs::path(opt.file), ec)) {
            err << "error: refusing to overwrite input " << opt.file
                << " (pass --force to allow)\n";
            return kExitInputError;
        }
    }

    CellAddress source;
    PlacementSpec placement;
    try {
        source = parse_address(opt.cell);
        if (opt.anchor)
            placement.anchor = parse_address(*opt.anchor);
    } catch (const BadAddress& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    placement.orientation = opt.orientation == "h" ? Orientation::Horizontal
                                                   : Orientation::Vertical;
    placement.use_names = opt.use_names;

    GuardPolicy guard;
    if (opt.guard_text) {
        guard.mode = GuardMode::WrapIfError;
        if (!opt.guard_text->empty())
            guard.flag_text = *opt.guard_text;
    }

    TransformPlan plan;
    try {
        plan = opt.mode == "visibility" ? plan_visibility_transform(*wb, source, placement)
                                        : plan_lookup_transform(*wb, source, placement, guard);
    } catch (const ComplexChain& e) {
        err << "error: ComplexChain: " << e.what() << "; try --mode visibility\n";
        return kExitInputError;
    } catch (const PlacementCollision& e) {
        err << "error: PlacementCollision: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    const int tests = static_cast<int>(plan.test_cells.size());
    const int outcomes = static_cast<int>(plan.outcome_cells.size());
    out << "plan: " << (plan.mode == TransformMode::Lookup ? "lookup" : "visibility")
        << " transform of " << format_address(source) << "\n";
    out << "  tests:    " << tests << " cells at " << strip_span(plan.test_cells) << "\n";
    if (plan.otherwise_test_cell)
        out << "  otherwise: " << format_address(plan.otherwise_test_cell->first)
            << " := TRUE\n";
    out << "  outcomes: " << outcomes << " cells at " << strip_span(plan.outcome_cells) << "\n";
    if (plan.table_range)
        out << "  table:    " << format_expr(make_range(*plan.table_range)) << "\n";
    out << "  result:   " << format_address(source) << " := "
        << print_formula(plan.result_formula) << "\n";
    out << "  cells:    " << plan.cell_count() << " (" << tests << " tests + " << outcomes
        << " outcomes" << (plan.mode == TransformMode::Lookup ? " + 1 result" : "") << ")\n";

    if (plan.mode == TransformMode::Lookup) {
        EquivalenceReport check = structural_equivalence(plan.chain, plan);
        print_report("structural check", check, out);
        if (check.status == EquivalenceStatus::Divergent) {
            err << "error: transform verification failed; nothing written\n";
            return kExitDivergent;
        }
    } else {
        // Visibility rewrites keep the IF structure; spot-check the value
        // on the current workbook state.
        Value before = evaluate_cell(*wb, source);
        Value after = evaluate_cell(apply_plan(*wb, plan), source);
        out << "evaluation check: " << (before == after ? "source value unchanged ("
                                                        : "MISMATCH (")
            << after.display() << ")\n";
        if (!(before == after)) {
            err << "error: transform verification failed; nothing written\n";
            return kExitDivergent;
        }
    }

    if (!opt.out_file) {
        out << "dry run (no --out): nothing written\n";
        return kExitOk;
    }

    Workbook result = apply_plan(*wb, plan);
    if (!write_file(*opt.out_file, save_cell_list(result), err))
        return kExitInputError;
    out << "wrote " << *opt.out_file << "\n";
    return kExitOk;
}

namespace {

std::optional<DriverSweep> parse_drivers(const std::vector<std::string>& specs,
                                         std::ostream& err) {
    DriverSweep drivers;
    for (const auto& spec : specs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos) {
            err << "error: bad --drive '" << spec << "' (expected ADDR=v1,v2,...)\n";
            return std::nullopt;
        }
        CellAddress addr;
        try {
            addr = parse_address(spec.substr(0, eq));
        } catch (const BadAddress& e) {
            err << "error: " << e.what() << "\n";
            return std::nullopt;
        }
        std::vector<Value> values;
        std::string rest = spec.substr(eq + 1);
        std::size_t start = 0;
        while (true) {
            auto comma = rest.find(',', start);
            std::string token = comma == std::string::npos ? rest.substr(start)
                                                           : rest.substr(start, comma - start);
            values.push_back(parse_literal(token));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (values.empty()) {
            err << "error: --drive " << spec << " has no values\n";
            return std::nullopt;
        }
        drivers.emplace_back(addr, std::move(values));
    }
    return drivers;
}

} // namespace

int run_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
    auto original = load_workbook(opt.original, err);
    if (!original)
        return kExitInputError;
    auto transformed = load_workbook(opt.transformed, err);
    if (!transformed)
        return kExitInputError;

    CellAddress cell;
    try {
        cell = parse_address(opt.cell);
    } catch (const BadAddress& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    auto drivers = parse_drivers(opt.drives, err);
    if (!drivers)
        return kExitInputError;

    std::optional<EquivalenceReport> structural;
    const Cell* source = original->find_cell(cell);
    if (source && source->is_formula() && is_if_call(*source->formula()->ast) &&
        classify(*source->formula()->ast) != BranchShape::Complex) {
        if (auto plan = infer_lookup_plan(*transformed, cell)) {
            IfChain chain = extract_chain(
                normalize_to_branch_on_false(source->formula()->ast), cell);
            structural = structural_equivalence(chain, *plan);
        }
    }

    std::optional<EquivalenceReport> state;
    if (!drivers->empty())
        state = state_equivalence(*original, *transformed, cell, *drivers);

    bool divergent = (structural && structural->status == EquivalenceStatus::Divergent) ||
                     (state && state->status == EquivalenceStatus::Divergent);
    bool checked = (structural && structural->assignments_checked > 0) ||
                   (state && state->assignments_checked > 0);

    if (opt.json) {
        json j;
        j["command"] = "verify";
        j["tool_version"] = kToolVersion;
        j["original"] = opt.original;
        j["transformed"] = opt.transformed;
        j["cell"] = format_address(cell);
        j["report"] = {
            {"status", divergent ? "Divergent" : (checked ? "Equivalent" : "Inconclusive")},
            {"structural", structural ? report_json(*structural) : json(nullptr)},
            {"state", state ? report_json(*state) : json(nullptr)},
        };
        out << j.dump(2) << "\n";
    } else {
        if (structural)
            print_report("structural", *structural, out);
        else
            out << "structural: skipped (" << format_address(cell)
                << " is not a verifiable lookup pair)\n";
        if (state)
            print_report("state sweep", *state, out);
        else
            out << "state sweep: skipped (no --drive)\n";
        out << "overall: " << (divergent ? "Divergent" : (checked ? "Equivalent" : "Inconclusive"))
            << "\n";
    }

    if (divergent)
        return kExitDivergent;
    if (!checked) {
        err << "error: nothing to verify (no structural pair and no --drive)\n";
        return kExitInputError;
    }
    return kExitOk;
}

int run_scan(const ScanOptions& opt, std::ostream& out, std::ostream& err) {
    fs::path root(opt.directory);
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        err << "error: " << opt.directory << " is not a directory\n";
        return kExitInputError;
    }

    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cells")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());

    struct ScanRecord {
        std::string file;
        CellAddress cell;
        int if_count = 0;
        int depth = 0;
        BranchShape shape = BranchShape::Complex;
    };
    std::vector<ScanRecord> records;
    std::vector<std::pair<std::string, std::string>> skipped;
    int files_scanned = 0;
    long formulas_scanned = 0;
    int max_depth = 0;
    std::map<std::string, int> histogram;

    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        Workbook wb;
        try {
            wb = load_cell_list(buf.str());
        } catch (const std::exception& e) {
            skipped.emplace_back(file, e.what());
            continue;
        }
        ++files_scanned;
        for (const auto& [addr, cell] : wb.cells())
            if (cell.is_formula())
                ++formulas_scanned;
        for (const auto& hit : find_nested_ifs(wb, opt.min_ifs)) {
            records.push_back({file, hit.cell, hit.if_count, hit.depth, hit.shape});
            max_depth = std::max(max_depth, hit.depth);
            ++histogram[shape_name(hit.shape)];
        }
    }

    json j;
    j["command"] = "scan";
    j["tool_version"] = kToolVersion;
    j["records"] = json::array();
    for (const auto& r : records)
        j["records"].push_back({{"file", r.file},
                                {"cell", format_address(r.cell)},
                                {"if_count", r.if_count},
                                {"depth", r.depth},
                                {"shape", shape_name(r.shape)},
                                {"transformable", r.shape != BranchShape::Complex}});
    j["aggregate"] = {
        {"files_scanned", files_scanned},
        {"formulas_scanned", formulas_scanned},
        {"nested_if_count", records.size()},
        {"shape_histogram", histogram},
        {"max_depth", max_depth},
    };
    j["skipped"] = json::array();
    for (const auto& [file, reason] : skipped)
        j["skipped"].push_back({{"file", file}, {"error", reason}});

    if (opt.report_file && !write_file(*opt.report_file, j.dump(2) + "\n", err))
        return kExitInputError;

    if (opt.json) {
        out << j.dump(2) << "\n";
    } else {
        out << "files scanned: " << files_scanned << "\n";
        out << "formulas scanned: " << formulas_scanned << "\n";
        out << "nested-IF formulas: " << records.size() << "\n";
        out << "shapes:";
        if (histogram.empty())
            out << " none";
        for (const auto& [shape, count] : histogram)
            out << " " << shape << "=" << count;
        out << "\n";
        out << "max depth: " << max_depth << "\n";
        for (const auto& r : records)
            out << "  " << r.file << " " << format_address(r.cell) << " if_count=" << r.if_count
                << " depth=" << r.depth << " shape=" << shape_name(r.shape) << "\n";
        for (const auto& [file, reason] : skipped)
            out << "  skipped " << file << ": " << reason << "\n";
        if (opt.report_file)
            out << "wrote report " << *opt.report_file << "\n";
    }
    return kExitOk;
}

} // namespace unnest::cli
