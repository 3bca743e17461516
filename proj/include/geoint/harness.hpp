#pragma once

// Scenario runner: problem x integrator x parameters, recorded as CSV with
// invariant diagnostics and a gnuplot script.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoint/numerics.hpp"

namespace geoint {

struct Scenario {
    std::string problem = "toda";
    std::string integrator = "rk4sym";
    std::optional<double> dt;
    std::optional<double> eps_res;  // BPL residual bound, or the local error bound of rk4_adaptive
    double t_final = 0.0;
    std::string out;  // CSV path; empty for no output
    int order = 10;
    int pade_num = 4;
    int pade_den = 5;
    int quad_nodes = 20;
    int stride = 1;
    int modes = 64;         // kdv only
    double forcing = 0.5;   // duffing_forced only

    /// Tolerance-driven integrators (bpl, rk4_adaptive) take eps_res; all others take dt.
    bool tolerance_driven() const;
    void validate() const;
};

/// Sets one key. Unknown keys and malformed numbers are validation errors.
void apply_setting(Scenario& s, std::string_view key, std::string_view value);
/// Flat key=value lines, '#' starts a comment.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

struct Sample {
    double t = 0.0;
    Vector state;
    Vector invariants;
    double step = 0.0;      // step that produced this sample, 0 for the initial one
    std::int64_t cpu_ns = 0;  // cumulative since the start of the run
};

struct RunSummary {
    std::size_t steps = 0;
    double mean_step = 0.0;
    double max_error = 0.0;
    double mean_error = 0.0;   // (1/t_f) int |err| dt, trapezoid on the recorded grid
    double final_error = 0.0;
    std::int64_t cpu_ns = 0;
};

struct RunRecord {
    std::string problem;
    std::string integrator;
    std::vector<std::string> state_names;
    std::vector<std::string> invariant_names;
    std::string error_name;  // invariant column that measures the error, empty if none
    std::size_t steps = 0;   // accepted steps, recorded or not
    bool complete = true;
    std::string failure;
    std::vector<Sample> rows;

    RunSummary summary() const;
    /// The error column as a series, one value per row.
    Vector error_series() const;
};

/// Runs the scenario and writes s.out when set. On an integrator failure the
/// partial record is written with a failure marker and the error is rethrown.
RunRecord run_scenario(const Scenario& s);

void write_csv(const RunRecord& rec, const std::filesystem::path& path);
RunRecord read_csv(const std::filesystem::path& path);

struct ComparisonRow {
    std::string label;
    RunSummary summary;
    double step_ratio = 1.0;   // mean step / first entry's
    double error_ratio = 1.0;  // mean error / first entry's
    double cpu_ratio = 1.0;
};

/// Aligned summaries of at least two records on the same problem.
std::vector<ComparisonRow> compare(std::span<const RunRecord> records);
std::string format_comparison(std::span<const ComparisonRow> rows);

/// Writes the CSV and a gnuplot script next to it; returns the script path.
std::filesystem::path emit_plot_scripts(const RunRecord& rec, const std::filesystem::path& csv_path);

}  // namespace geoint
