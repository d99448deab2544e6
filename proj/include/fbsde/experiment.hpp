#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbsde/basis.hpp"
#include "fbsde/problem.hpp"

namespace fbsde {

enum class SchemeChoice { later, now, both };

/// Invalid configuration; `key()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct SweepSpec {
    std::vector<std::size_t> paths;
    std::vector<std::size_t> steps;
    std::vector<std::size_t> k;
    std::vector<std::uint64_t> seeds;
};

struct RunConfig {
    ProblemCatalogEntry problem{"call", {}};
    SchemeChoice scheme = SchemeChoice::later;
    std::size_t paths = 100'000;
    std::size_t steps = 10;
    std::size_t k = 6;
    BasisFamily family = BasisFamily::laguerre;
    std::uint64_t seed = 42;
    SweepSpec sweep;
    double ridge = 0.0;
    int picard_iters = 5;
    double picard_tol = 1e-10;
    /// Fill the runtime_ms column; off by default so reports are byte-reproducible.
    bool timing = false;
    std::string output_path = "fbsde_report.csv";
};

/// Applies one key=value assignment. Problem parameters (S0, K, ...) are plain keys.
/// Throws ConfigError naming the key.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses key=value lines ('#' starts a comment, blank lines ignored) on top of `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Fills catalog defaults for missing problem parameters and validates counts, sweep lists
/// and the problem itself. Throws ConfigError.
void finalize_config(RunConfig& config);

struct ReportRow {
    std::string scheme;
    std::string problem;
    std::size_t paths = 0;
    std::size_t steps = 0;
    std::size_t k = 0;
    std::string family;
    std::uint64_t seed = 0;
    double y0_hat = 0.0;
    double z0_hat = 0.0;
    std::optional<double> y0_ref;
    std::optional<double> z0_ref;
    std::optional<double> abs_err_y;
    std::optional<double> abs_err_z;
    std::optional<double> log10_rel_err_y;
    std::optional<double> log10_rel_err_z;
    double max_condition = 1.0;
    std::optional<double> runtime_ms;
    /// "rel" when the log error columns are relative to |ref|, "abs" when the reference is
    /// zero, empty without a reference.
    std::string error_mode_y;
    std::string error_mode_z;
};

/// Header line of the report, without the trailing newline.
std::string csv_header();
std::string csv_line(const ReportRow& row);
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Runs every sweep point (Cartesian product of the sweep lists, falling back to the scalar
/// settings) in order M, N, k, seed. Each point simulates one ensemble shared by the
/// requested schemes and emits one row per scheme.
std::vector<ReportRow> run(const RunConfig& config, std::size_t workers = 0);

/// run() with scheme forced to both; rows come in (later, now) pairs.
std::vector<ReportRow> compare_schemes(RunConfig config, std::size_t workers = 0);

/// run() followed by writing the CSV to config.output_path. Throws std::runtime_error naming
/// the path on I/O failure.
std::vector<ReportRow> run_to_file(const RunConfig& config, std::size_t workers = 0);

}  // namespace fbsde
