#include "cpaenum/network.hpp"

#include "doctest.h"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("cpa_enum_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

// Runs the CLI with stdout captured to `stdout_file`; returns the exit status.
int run(const std::string& args, const std::string& stdout_file = "stdout.txt", const std::string& env = "")
{
    const std::string cmd = env + " '" + std::string(CPA_ENUM_BIN) + "' " + args + " > '" + path(stdout_file) +
                            "' 2> '" + path("stderr.txt") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& file)
{
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& file, const std::string& text) { std::ofstream(file, std::ios::binary) << text; }

} // namespace

TEST_CASE("gen writes a reloadable file deterministically")
{
    const std::string args = "gen -D 2 -w 16 --act leaky_relu --alpha 0.01 --seed 7 -o ";
    REQUIRE(run(args + path("a.json")) == 0);
    REQUIRE(run(args + path("b.json")) == 0);
    CHECK(slurp(path("a.json")) == slurp(path("b.json")));
    const cpaenum::Network net = cpaenum::load_network_file(path("a.json"));
    CHECK(net.input_dim() == 2);
    CHECK(net.layer(0).output_width() == 16);
}

TEST_CASE("usage and input errors exit with 2")
{
    CHECK(run("gen -w 4") == 2);
    CHECK(run("enumerate -n " + path("missing.json")) == 2);
    write(path("bad.json"), "{\"input_dim\": 2}");
    CHECK(run("enumerate -n " + path("bad.json")) == 2);
    CHECK(run("nonsense") == 2);
    CHECK(run("enumerate -n " + path("a.json"), "stdout.txt", "CPA_ENUM_WORKERS=zero") == 2);
}

TEST_CASE("enumerate one hyperplane")
{
    write(path("k1.json"), R"({"input_dim": 2, "layers": [
      {"weights": [[1, 0]], "bias": [0], "activation": {"kind": "relu"}}]})");
    REQUIRE(run("enumerate -n " + path("k1.json") + " --out " + path("k1_part.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("k1_part.json")));
    CHECK(doc["regions"].size() == 2);
}

TEST_CASE("enumerate reports seven regions for three lines")
{
    REQUIRE(run("gen -D 2 -w 3 --act relu --seed 3 -o " + path("k3.json")) == 0);
    REQUIRE(run("enumerate -n " + path("k3.json"), "k3_stats.txt") == 0);
    CHECK(slurp(path("k3_stats.txt")).find("regions=7 ") != std::string::npos);
}

TEST_CASE("worker count does not change the partition file")
{
    REQUIRE(run("gen -D 3 -w 8,8 --seed 5 -o " + path("w.json")) == 0);
    REQUIRE(run("enumerate -n " + path("w.json") + " --affine --workers 1 --out " + path("w1.json") + " --csv " +
                path("w1.csv")) == 0);
    REQUIRE(run("enumerate -n " + path("w.json") + " --affine --workers 8 --out " + path("w8.json") + " --csv " +
                path("w8.csv")) == 0);
    REQUIRE(run("enumerate -n " + path("w.json") + " --affine --out " + path("we.json"), "stdout.txt",
                "CPA_ENUM_WORKERS=4") == 0);
    CHECK(slurp(path("w1.json")) == slurp(path("w8.json")));
    CHECK(slurp(path("w1.csv")) == slurp(path("w8.csv")));
    CHECK(slurp(path("w1.json")) == slurp(path("we.json")));
}

TEST_CASE("sample with no budget writes only the header")
{
    REQUIRE(run("sample -n " + path("k3.json") + " --samples 0 -o " + path("curve.csv")) == 0);
    CHECK(slurp(path("curve.csv")) == "elapsed,samples,regions\n");
}

TEST_CASE("compare saturates on a tiny net")
{
    REQUIRE(run("compare -n " + path("k3.json") + " --samples 100000 --runs 3 -o " + path("t.csv") + " --json " +
                path("t.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("t.json")));
    CHECK(doc[0]["percent_found"].get<double>() == doctest::Approx(100.0));
    CHECK(doc[0]["sampling_runs"] == 3);
}

TEST_CASE("compare grid emits one row per input dimension")
{
    REQUIRE(run("compare -D 2,4,8 -w 6 --samples 2000 --runs 2 -o " + path("grid.csv")) == 0);
    std::istringstream in(slurp(path("grid.csv")));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "D,K=6");
    CHECK(lines[1].rfind("2,", 0) == 0);
    CHECK(lines[2].rfind("4,", 0) == 0);
    CHECK(lines[3].rfind("8,", 0) == 0);
}

TEST_CASE("slice writes an SVG")
{
    REQUIRE(run("gen -D 3 -w 5,5 --act relu --seed 2 -o " + path("s.json")) == 0);
    REQUIRE(run("slice -n " + path("s.json") + " -o " + path("s.svg")) == 0);
    const std::string svg = slurp(path("s.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<line") != std::string::npos);
    CHECK(run("slice -n " + path("s.json") + " --u 1,0,0 --v 1,0,0 -o " + path("bad.svg")) == 2);
}
