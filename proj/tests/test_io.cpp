#include "cpaenum/deep.hpp"
#include "cpaenum/io.hpp"

#include "doctest.h"

#include <nlohmann/json.hpp>

#include <sstream>

using namespace cpaenum;

namespace {

Partition small_partition()
{
    const std::size_t widths[] = {3};
    return enumerate_network(random_network(2, widths, Activation::relu(), 1), Box::bounded(2, 1e3));
}

} // namespace

TEST_CASE("partition JSON layout")
{
    const Partition p = small_partition();
    const auto doc = nlohmann::json::parse(partition_to_json(p, true));
    REQUIRE(doc["regions"].size() == p.regions.size());
    CHECK(doc["stats"]["region_count"] == p.stats.region_count);
    CHECK(doc["stats"]["complete"] == true);
    CHECK_FALSE(doc["stats"].contains("wall_time"));
    const auto& r0 = doc["regions"][0];
    CHECK(r0["pattern"] == p.regions[0].pattern.signs_string());
    CHECK(r0["interior"].get<std::vector<double>>() == p.regions[0].interior);
    CHECK(r0["affine"]["A"].size() == 3);
    CHECK_FALSE(nlohmann::json::parse(partition_to_json(p))["regions"][0].contains("affine"));
}

TEST_CASE("partition CSV layout")
{
    const Partition p = small_partition();
    std::istringstream in(partition_to_csv(p));
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,pattern,redundant,margin,interior");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
        ++rows;
    }
    CHECK(rows == p.regions.size());
}

TEST_CASE("stats line")
{
    EnumerationStats s;
    s.region_count = 7;
    s.lp_calls = 9;
    s.tree_nodes = 11;
    s.worker_count = 2;
    const std::string line = stats_line(s, true);
    CHECK(line.find("regions=7") != std::string::npos);
    CHECK(line.find("lp_calls=9") != std::string::npos);
    CHECK(line.find("workers=2") != std::string::npos);
    CHECK(line.find("complete=true") != std::string::npos);
}

TEST_CASE("curve CSV")
{
    DiscoveryCurve c;
    CHECK(curve_to_csv(c) == "elapsed,samples,regions\n");
    c.points.push_back({0.5, 4, 3});
    CHECK(curve_to_csv(c) == "elapsed,samples,regions\n0.500000,4,3\n");
}

TEST_CASE("comparison table has one row per input dimension")
{
    std::vector<ComparisonReport> reports;
    for (std::size_t D : {2, 4, 8}) {
        ComparisonReport r;
        r.config.input_dim = D;
        r.config.widths = {16};
        r.enumeration_count = 100;
        r.sampling_mean = 50;
        r.percent_found = 50;
        reports.push_back(r);
    }
    const std::string table = reports_to_table_csv(reports);
    CHECK(table == "D,K=16\n2,100 / 50.0±0.0 / 50.0%\n4,100 / 50.0±0.0 / 50.0%\n8,100 / 50.0±0.0 / 50.0%\n");
    const auto doc = nlohmann::json::parse(report_to_json(reports[0]));
    CHECK(doc["config"]["input_dim"] == 2);
    std::istringstream in(reports_to_csv(reports));
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        ++n;
    CHECK(n == 4);
}
