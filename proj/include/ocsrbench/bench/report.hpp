#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ocsrbench/bench/scoring.hpp"

namespace ocsrbench::bench {

enum class ReportFormat { json, csv, md };

/// Accepts "json", "csv", "md".
std::optional<ReportFormat> parse_report_format(std::string_view name);

/// Machine report: {"runs": [{run_id, model, protocol, config, evaluated, matched,
/// accuracy, failures, grid, samples}]} in input order. Excludes timestamps, so equal inputs
/// give equal bytes.
std::string report_json(const std::vector<RunRecord>& runs);

/// Difficulty grid rows: "model,protocol,n_vis,n_chem,matched,population,accuracy".
std::string report_csv(const std::vector<RunRecord>& runs);

/// Comparison table, one row per model in first-appearance order, columns SMILES,
/// Simplified Graph, Graph. Cells hold the 2-decimal accuracy, or "-" when the model has no
/// run (or no evaluated sample) under that protocol.
std::string report_markdown(const std::vector<RunRecord>& runs);

/// Throws InputError "duplicate run key: <model>/<protocol>" when two runs share both.
void check_run_keys(const std::vector<RunRecord>& runs);

/// Writes <prefix>.json / .csv / .md for each requested format and returns the paths.
/// Throws InputError on a duplicate run key and Error when a file cannot be written.
std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& runs, const std::filesystem::path& prefix,
                                               const std::set<ReportFormat>& formats);

}  // namespace ocsrbench::bench
