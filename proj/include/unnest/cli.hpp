#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace unnest::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Stable exit-code contract for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDivergent = 3;

struct AnalyzeOptions {
    std::string file;
    std::optional<std::string> cell;
    int min_ifs = 2;
    bool json = false;
};

struct TransformOptions {
    std::string file;
    std::string cell;
    std::optional<std::string> out_file; // absent: dry run
    std::optional<std::string> anchor;
    std::string orientation = "v"; // v | h
    std::string mode = "lookup";   // lookup | visibility
    std::optional<std::string> guard_text;
    bool use_names = false;
    bool force = false;
};

struct VerifyOptions {
    std::string original;
    std::string transformed;
    std::string cell;
    std::vector<std::string> drives; // "ADDR=v1,v2,..."
    bool json = false;
};

struct ScanOptions {
    std::string directory;
    std::optional<std::string> report_file;
    int min_ifs = 2;
    bool json = false;
};

int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);
int run_transform(const TransformOptions& opt, std::ostream& out, std::ostream& err);
int run_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);
int run_scan(const ScanOptions& opt, std::ostream& out, std::ostream& err);

} // namespace unnest::cli
