#include "unnest/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"unnest - refactor nested-IF spreadsheet formulas into lookup tables"};
    app.set_version_flag("--version", unnest::cli::kToolVersion);
    app.require_subcommand(1);

    unnest::cli::AnalyzeOptions analyze;
    auto* cmd_analyze = app.add_subcommand(
        "analyze", "Report nested-IF chains in a workbook: counts, depth, shape, tests, outcomes");
    cmd_analyze->add_option("file", analyze.file, "workbook in cell-list format")->required();
    cmd_analyze->add_option("--cell", analyze.cell, "analyze a single cell");
    cmd_analyze->add_option("--min-ifs", analyze.min_ifs, "minimum IF count to report")
        ->capture_default_str();
    cmd_analyze->add_flag("--json", analyze.json, "machine-readable output");

    unnest::cli::TransformOptions transform;
    auto* cmd_transform = app.add_subcommand(
        "transform", "Rewrite a nested-IF cell using the lookup technique (or visibility mode)");
    cmd_transform->add_option("file", transform.file, "workbook in cell-list format")->required();
    cmd_transform->add_option("--cell", transform.cell, "cell holding the nested-IF")->required();
    cmd_transform->add_option("--out", transform.out_file,
                              "output workbook path (omit for a dry run)");
    cmd_transform->add_option("--anchor", transform.anchor,
                              "top-left cell of the generated table");
    cmd_transform->add_option("--orientation", transform.orientation, "v (VLOOKUP) or h (HLOOKUP)")
        ->check(CLI::IsMember({"v", "h"}))
        ->capture_default_str();
    cmd_transform->add_option("--mode", transform.mode, "lookup or visibility")
        ->check(CLI::IsMember({"lookup", "visibility"}))
        ->capture_default_str();
    std::string guard_text;
    auto* guard_opt = cmd_transform->add_option(
        "--guard-errors", guard_text,
        "wrap outcome formulas in IFERROR with this flag text (default #LATENT!)");
    guard_opt->expected(0, 1);
    cmd_transform->add_flag("--names", transform.use_names, "also define Test*/Value* names");
    cmd_transform->add_flag("--force", transform.force, "allow overwriting the input file");

    unnest::cli::VerifyOptions verify;
    auto* cmd_verify = app.add_subcommand(
        "verify", "Check semantic equivalence of an original and a transformed workbook");
    cmd_verify->add_option("original", verify.original, "original workbook")->required();
    cmd_verify->add_option("transformed", verify.transformed, "transformed workbook")->required();
    cmd_verify->add_option("--cell", verify.cell, "result cell to compare")->required();
    cmd_verify->add_option("--drive", verify.drives,
                           "driver sweep ADDR=v1,v2,... (repeatable)");
    cmd_verify->add_flag("--json", verify.json, "machine-readable output");

    unnest::cli::ScanOptions scan;
    auto* cmd_scan = app.add_subcommand(
        "scan", "Recursively scan *.cells files and report nested-IF risk metrics");
    cmd_scan->add_option("directory", scan.directory, "directory to scan")->required();
    cmd_scan->add_option("--report", scan.report_file, "write the JSON report to this file");
    cmd_scan->add_option("--min-ifs", scan.min_ifs, "minimum IF count to report")
        ->capture_default_str();
    cmd_scan->add_flag("--json", scan.json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; map real errors to 2.
        return code == 0 ? 0 : unnest::cli::kExitInputError;
    }

    if (cmd_analyze->parsed())
        return unnest::cli::run_analyze(analyze, std::cout, std::cerr);
    if (cmd_transform->parsed()) {
        if (guard_opt->count() > 0)
            transform.guard_text = guard_text;
        return unnest::cli::run_transform(transform, std::cout, std::cerr);
    }
    if (cmd_verify->parsed())
        return unnest::cli::run_verify(verify, std::cout, std::cerr);
    if (cmd_scan->parsed())
        return unnest::cli::run_scan(scan, std::cout, std::cerr);
    return unnest::cli::kExitInputError;
}
