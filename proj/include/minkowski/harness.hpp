#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "minkowski/counterexample.hpp"

namespace minkowski {

/// Invalid run configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitGatedFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunConfig {
    std::string command;
    int k_lo = 7;
    int k_hi = 11;
    std::vector<double> alphas{0.25, 0.5, 0.75};
    /// Multipliers on the default tolerances of each suite
    /// ("basis", "wigner", "geometry", "sweep", "report").
    std::map<std::string, double> tolerance_scale;
    /// "triple_cap", "path_cap", "node_cap", "degree_cap".
    std::map<std::string, double> budgets;
    std::string out_dir = ".";
    std::string format = "csv";
    std::string input;
    unsigned threads = 0;
    std::uint64_t seed = 20240601;
    double delta = 0.05;

    /// Throws ConfigError describing the first violated rule.
    void validate() const;
    double tolerance(const std::string& suite) const;
    double budget(const std::string& name) const;
};

/// Parses "a..b" or a single integer.
std::pair<int, int> parse_k_range(const std::string& text);

enum class CheckStatus { Pass, Fail, Info };
std::string to_string(CheckStatus s);

struct OutputRecord {
    std::string suite;
    std::string check_id;
    std::string claim;
    CheckStatus status = CheckStatus::Info;
    double measured = 0.0;
    std::string expected;
    double tolerance = 0.0;
    double runtime_ms = 0.0;
    bool gated = true;
};

/// One entry of the check registry: every emitted check id appears here with
/// the claim it exercises.
struct CheckSpec {
    const char* id;
    const char* suite;
    const char* claim;
    bool gated;
};

std::span<const CheckSpec> check_registry();
/// The claims a complete run must cover.
std::span<const char* const> claim_list();

struct TraceEntry {
    std::string claim;
    std::vector<std::string> check_ids;
    bool covered() const { return !check_ids.empty(); }
};

/// Claim -> check ids, built from the registry.
std::vector<TraceEntry> traceability_matrix();

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    double slope_stderr = 0.0;
};

/// Least squares of log(value) on log(l). Needs >= 3 pairs and positive data.
FitResult fit_exponent(std::span<const std::pair<double, double>> pairs);

struct SuiteResult {
    std::vector<OutputRecord> records;
    std::vector<SweepRow> rows;
    bool passed() const;
};

SuiteResult verify_basis(const RunConfig& config);
SuiteResult verify_wigner(const RunConfig& config);
SuiteResult verify_geometry(const RunConfig& config);
SuiteResult run_sweep(const RunConfig& config);
/// Exponent fits and trends from a sweep CSV.
SuiteResult run_report(const RunConfig& config, std::istream& sweep_csv);

/// Parses the sweep CSV written by write_sweep_csv.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Columns: suite,check_id,claim,status,measured,expected,tolerance,gated.
/// Runtime is left out so the file depends only on (config, seed).
void write_records_csv(std::ostream& out, std::span<const OutputRecord> records);
std::string records_to_json(std::span<const OutputRecord> records);

/// Executes config.command, writes <out_dir>/<command>.<format> (plus
/// sweep_rows.<format> for sweeps) and prints a summary to `log`.
int run(const RunConfig& config, std::ostream& log);

} // namespace minkowski
