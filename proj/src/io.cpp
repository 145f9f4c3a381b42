#include "cpaenum/io.hpp"

#include "cpaenum/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cpaenum {

using json = nlohmann::json;

namespace {

std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string join_widths(const std::vector<std::size_t>& widths, char sep)
{
    std::string s;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i)
            s.push_back(sep);
        s += std::to_string(widths[i]);
    }
    return s;
}

json matrix_json(const Matrix& m)
{
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        rows.push_back(json(std::vector<double>(row.begin(), row.end())));
    }
    return rows;
}

} // namespace

std::string partition_to_json(const Partition& part, bool include_affine)
{
    json regions = json::array();
    for (const Region& r : part.regions) {
        json jr;
        jr["pattern"] = r.pattern.signs_string();
        jr["redundant"] = r.pattern.redundant_string();
        jr["interior"] = r.interior;
        jr["margin"] = r.margin;
        if (include_affine && r.affine) {
            jr["affine"] = {{"A", matrix_json(r.affine->A)}, {"c", r.affine->c}};
        }
        regions.push_back(std::move(jr));
    }
    json doc;
    doc["regions"] = std::move(regions);
    doc["stats"] = {{"region_count", part.stats.region_count},
                    {"lp_calls", part.stats.lp_calls},
                    {"tree_nodes", part.stats.tree_nodes},
                    {"complete", part.complete}};
    if (!part.diagnostics.empty())
        doc["diagnostics"] = part.diagnostics;
    return doc.dump() + "\n";
}

std::string partition_to_csv(const Partition& part)
{
    std::string out = "index,pattern,redundant,margin,interior\n";
    for (std::size_t i = 0; i < part.regions.size(); ++i) {
        const Region& r = part.regions[i];
        out += std::to_string(i) + "," + r.pattern.signs_string() + "," + r.pattern.redundant_string() + "," +
               fmt_double(r.margin) + ",";
        for (std::size_t k = 0; k < r.interior.size(); ++k) {
            if (k)
                out.push_back(' ');
            out += fmt_double(r.interior[k]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string stats_line(const EnumerationStats& stats, bool complete)
{
    return "regions=" + std::to_string(stats.region_count) + " lp_calls=" + std::to_string(stats.lp_calls) +
           " tree_nodes=" + std::to_string(stats.tree_nodes) + " wall_time=" + fixed(stats.wall_time, 6) +
           "s workers=" + std::to_string(stats.worker_count) + " complete=" + (complete ? "true" : "false");
}

std::string report_to_json(const ComparisonReport& report)
{
    json doc;
    doc["enumeration_count"] = report.enumeration_count;
    doc["enumeration_time"] = report.enumeration_time;
    doc["sampling_mean"] = report.sampling_mean;
    doc["sampling_std"] = report.sampling_std;
    doc["sampling_runs"] = report.sampling_runs;
    doc["percent_found"] = report.percent_found;
    doc["run_counts"] = report.run_counts;
    doc["run_seeds"] = report.run_seeds;
    doc["run_samples"] = report.run_samples;
    doc["subsumption_violations"] = report.subsumption_violations;
    doc["config"] = {{"input_dim", report.config.input_dim},
                     {"widths", report.config.widths},
                     {"activation", report.config.activation},
                     {"seed", report.config.seed},
                     {"box_half_width", report.config.box_half_width},
                     {"budget_policy", report.config.budget_policy}};
    return doc.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<ComparisonReport>& reports)
{
    std::string out = "input_dim,widths,activation,seed,box,budget,enumeration,enum_time,sampling_mean,sampling_std,"
                      "runs,percent_found\n";
    for (const auto& r : reports) {
        out += std::to_string(r.config.input_dim) + "," + join_widths(r.config.widths, ' ') + "," +
               r.config.activation + "," + std::to_string(r.config.seed) + "," + fmt_double(r.config.box_half_width) +
               "," + r.config.budget_policy + "," + std::to_string(r.enumeration_count) + "," +
               fixed(r.enumeration_time, 6) + "," + fixed(r.sampling_mean, 3) + "," + fixed(r.sampling_std, 3) + "," +
               std::to_string(r.sampling_runs) + "," + fixed(r.percent_found, 2) + "\n";
    }
    return out;
}

std::string reports_to_table_csv(const std::vector<ComparisonReport>& reports)
{
    std::set<std::string> columns_seen;
    std::vector<std::string> columns;
    std::map<std::size_t, std::map<std::string, const ComparisonReport*>> grid;
    for (const auto& r : reports) {
        const std::string col = "K=" + join_widths(r.config.widths, 'x');
        if (columns_seen.insert(col).second)
            columns.push_back(col);
        grid[r.config.input_dim][col] = &r;
    }
    std::string out = "D";
    for (const auto& c : columns)
        out += "," + c;
    out.push_back('\n');
    for (const auto& [dim, row] : grid) {
        out += std::to_string(dim);
        for (const auto& c : columns) {
            out.push_back(',');
            auto it = row.find(c);
            if (it == row.end()) {
                out += "-";
                continue;
            }
            const ComparisonReport& r = *it->second;
            out += std::to_string(r.enumeration_count) + " / " + fixed(r.sampling_mean, 1) + "±" +
                   fixed(r.sampling_std, 1) + " / " + fixed(r.percent_found, 1) + "%";
        }
        out.push_back('\n');
    }
    return out;
}

std::string curve_to_csv(const DiscoveryCurve& curve)
{
    std::string out = "elapsed,samples,regions\n";
    for (const auto& p : curve.points)
        out += fixed(p.elapsed, 6) + "," + std::to_string(p.samples_drawn) + "," + std::to_string(p.distinct_regions) +
               "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw InputError("write to '" + path + "' failed");
}

} // namespace cpaenum
