#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace seqclt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitRuntimeError = 3;

struct RunOptions {
    /// Overrides the config's out_dir and the SEQCLT_OUT_DIR environment variable.
    std::optional<std::filesystem::path> out_dir;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed_override;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    int exit_code = kExitOk;
    std::string kind;
    std::filesystem::path out_dir;
    std::vector<CheckResult> checks;
    std::vector<std::string> files;
    std::string config_hash;
    nlohmann::json report;
};

/// Experiment kinds accepted in the "kind" field.
const std::vector<std::string>& experiment_kinds();

/// Hex FNV-1a of the canonical serialisation of a config.
std::string config_hash(const nlohmann::json& config);

/// Validates and runs one experiment, writing report.json and per-kind CSVs.
/// Schema problems throw ConfigError listing every offending path.
RunResult run_experiment(const nlohmann::json& config, const RunOptions& options);
RunResult run_experiment_file(const std::filesystem::path& config_path, const RunOptions& options);

struct SummaryRow {
    std::string experiment;
    std::optional<std::size_t> N;
    std::optional<double> dc;
    std::optional<double> se;
    std::optional<double> slope;
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;
};

/// Rate rows of every report plus one slope row per fitted sweep. Only
/// clt_rate and quenched_rate reports can be combined.
std::vector<SummaryRow> summarize(const std::vector<std::filesystem::path>& reports);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

}  // namespace seqclt
