#pragma once

#include "cpaenum/arrangement.hpp"
#include "cpaenum/sampling.hpp"

#include <string>
#include <vector>

namespace cpaenum {

// {"regions": [{"pattern", "redundant", "interior", "margin"[, "affine"]}], "stats": {...}}.
// Stats carry only schedule-independent fields so the document is identical for any worker count.
std::string partition_to_json(const Partition& part, bool include_affine = false);

// Header: index,pattern,redundant,margin,interior  (interior coordinates space-separated).
std::string partition_to_csv(const Partition& part);

// One-line human summary: region count, LP calls, tree nodes, wall time, workers, completeness.
std::string stats_line(const EnumerationStats& stats, bool complete);

std::string report_to_json(const ComparisonReport& report);

// Long form, one row per report:
// input_dim,widths,activation,seed,box,budget,enumeration,enum_time,sampling_mean,sampling_std,runs,percent_found
std::string reports_to_csv(const std::vector<ComparisonReport>& reports);

// Table-shaped: one row per input dimension, one column per width, cells "enum / mean±std / pct%".
std::string reports_to_table_csv(const std::vector<ComparisonReport>& reports);

// Header: elapsed,samples,regions.
std::string curve_to_csv(const DiscoveryCurve& curve);

void write_text_file(const std::string& path, const std::string& text);

} // namespace cpaenum
