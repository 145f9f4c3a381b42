// cpa-enum: exact linear-region enumeration for piecewise-linear networks.
//
// Exit codes: 0 success, 2 input/usage error, 3 numerical failure (incomplete partition).

#include "cpaenum/deep.hpp"
#include "cpaenum/error.hpp"
#include "cpaenum/io.hpp"
#include "cpaenum/sampling.hpp"
#include "cpaenum/slice.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace cpaenum;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int default_workers()
{
    if (const char* env = std::getenv("CPA_ENUM_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1)
                return n;
        } catch (const std::exception&) {
        }
        throw InputError("CPA_ENUM_WORKERS must be a positive integer");
    }
    return 1;
}

Activation parse_activation(const std::string& name, double alpha)
{
    Activation act{activation_kind_from_string(name), alpha};
    if (!act.sign_based())
        throw InputError("--act must be relu, leaky_relu or abs");
    return act;
}

struct LpFlags {
    double tol_interior = kDefaultInteriorTol;
    double margin_cap = kDefaultMarginCap;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--tol-interior", tol_interior, "Strict-interior margin threshold")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--margin-cap", margin_cap, "Cap on the LP margin objective")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
    LPOptions options() const
    {
        LPOptions o;
        o.interior_tol = tol_interior;
        o.margin_cap = margin_cap;
        return o;
    }
};

struct GenArgs {
    std::size_t dim = 0;
    std::vector<std::size_t> widths;
    std::string act = "leaky_relu";
    double alpha = kDefaultLeakyAlpha;
    std::uint64_t seed = 0;
    std::string out;
};

struct EnumerateArgs {
    std::string net;
    double box = kDefaultBoxHalfWidth;
    bool unbounded = false;
    int workers = 1;
    std::string out;
    std::string csv;
    bool affine = false;
    LpFlags lp;
};

struct SampleArgs {
    std::string net;
    double box = 10.0;
    std::uint64_t samples = 0;
    double seconds = 0.0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out;
};

struct CompareArgs {
    std::string net;
    std::vector<std::size_t> dims;
    std::vector<std::size_t> widths;
    std::string act = "leaky_relu";
    double alpha = kDefaultLeakyAlpha;
    std::uint64_t seed = 0;
    int runs = 5;
    double box = 10.0;
    int workers = 1;
    std::uint64_t samples = 0;
    std::string out;
    std::string json;
    std::string long_csv;
    LpFlags lp;
};

struct SliceArgs {
    std::string net;
    std::vector<double> anchor;
    std::vector<double> basis_u;
    std::vector<double> basis_v;
    double extent = 5.0;
    int resolution = 800;
    int workers = 1;
    std::string out;
    std::string restricted_out;
    LpFlags lp;
};

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

int run_gen(const GenArgs& a)
{
    const Network net = random_network(a.dim, a.widths, parse_activation(a.act, a.alpha), a.seed);
    emit(a.out, save_network(net));
    return 0;
}

int run_enumerate(const EnumerateArgs& a)
{
    const Network net = load_network_file(a.net);
    const Box box = a.unbounded ? Box::unbounded(net.input_dim()) : Box::bounded(net.input_dim(), a.box);
    EnumerateOptions opts;
    opts.lp = a.lp.options();
    opts.workers = a.workers;
    const Partition part = enumerate_network(net, box, opts);
    if (!a.out.empty())
        write_text_file(a.out, partition_to_json(part, a.affine));
    if (!a.csv.empty())
        write_text_file(a.csv, partition_to_csv(part));
    std::cout << stats_line(part.stats, part.complete) << "\n";
    for (const auto& d : part.diagnostics)
        std::cerr << "numerical failure: " << d << "\n";
    return part.complete ? 0 : kExitNumerical;
}

int run_sample(const SampleArgs& a)
{
    const Network net = load_network_file(a.net);
    const Box box = Box::bounded(net.input_dim(), a.box);
    const SampleBudget budget =
        a.seconds > 0.0 ? SampleBudget::of_seconds(a.seconds) : SampleBudget::of_samples(a.samples);
    SampleOptions opts;
    opts.workers = a.workers;
    const SampleResult res = sample_discover(net, box, budget, a.seed, opts);
    emit(a.out.empty() ? "-" : a.out, curve_to_csv(res.curve));
    if (!a.out.empty())
        std::cout << "samples=" << res.samples_drawn << " regions=" << res.patterns.size() << "\n";
    return 0;
}

int run_compare(const CompareArgs& a)
{
    CompareOptions opts;
    opts.enumerate.lp = a.lp.options();
    opts.enumerate.workers = a.workers;
    opts.sample.workers = a.workers;
    opts.fixed_samples = a.samples;

    std::vector<ComparisonReport> reports;
    if (!a.net.empty()) {
        const Network net = load_network_file(a.net);
        reports.push_back(compare(net, Box::bounded(net.input_dim(), a.box), a.runs, a.seed, opts));
    } else {
        if (a.dims.empty() || a.widths.empty())
            throw InputError("compare: give --net, or both -D and -w for a generated grid");
        const Activation act = parse_activation(a.act, a.alpha);
        for (std::size_t dim : a.dims) {
            for (std::size_t width : a.widths) {
                const std::size_t widths[] = {width};
                const Network net = random_network(dim, widths, act, a.seed);
                reports.push_back(compare(net, Box::bounded(dim, a.box), a.runs, a.seed, opts));
                const auto& r = reports.back();
                std::cerr << "D=" << dim << " K=" << width << " enumeration=" << r.enumeration_count
                          << " sampling=" << r.sampling_mean << " found=" << r.percent_found << "%\n";
            }
        }
    }
    emit(a.out.empty() ? "-" : a.out, reports_to_table_csv(reports));
    if (!a.long_csv.empty())
        write_text_file(a.long_csv, reports_to_csv(reports));
    if (!a.json.empty()) {
        std::string doc = "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i)
            doc += (i ? ",\n" : "") + report_to_json(reports[i]);
        write_text_file(a.json, doc + "]\n");
    }
    for (const auto& r : reports)
        if (r.subsumption_violations > 0) {
            std::cerr << "sampled patterns missing from the enumeration: " << r.subsumption_violations << "\n";
            return kExitNumerical;
        }
    return 0;
}

int run_slice(const SliceArgs& a)
{
    const Network net = load_network_file(a.net);
    SliceSpec spec = SliceSpec::axis_aligned(net.input_dim(), a.extent);
    if (!a.anchor.empty())
        spec.anchor = a.anchor;
    if (!a.basis_u.empty())
        spec.basis_u = a.basis_u;
    if (!a.basis_v.empty())
        spec.basis_v = a.basis_v;
    spec.resolution = a.resolution;
    spec.validate(net.input_dim());

    EnumerateOptions opts;
    opts.lp = a.lp.options();
    opts.workers = a.workers;
    const SliceResult slice = compute_slice(net, spec, opts);
    emit(a.out, slice_to_svg(slice, net, spec));
    if (!a.restricted_out.empty())
        save_network_file(restrict_to_plane(net, spec), a.restricted_out);
    if (!a.out.empty())
        std::cout << "regions=" << slice.partition.stats.region_count << " segments=" << slice.segments.size()
                  << "\n";
    return slice.partition.complete ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact linear-region enumeration for piecewise-linear networks"};
    app.require_subcommand(1);

    int workers_default = 1;
    try {
        workers_default = default_workers();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "Generate a random network (i.i.d. standard normal parameters)");
    cmd_gen->add_option("-D,--input-dim", gen.dim, "Input dimension")->required()->check(CLI::PositiveNumber);
    cmd_gen->add_option("-w,--width", gen.widths, "Layer widths (repeat or comma-separate)")
        ->required()
        ->delimiter(',');
    cmd_gen->add_option("--act", gen.act, "relu | leaky_relu | abs")->capture_default_str();
    cmd_gen->add_option("--alpha", gen.alpha, "leaky_relu negative slope")->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    cmd_gen->add_option("-o,--out", gen.out, "Output file (default stdout)");

    EnumerateArgs en;
    en.workers = workers_default;
    auto* cmd_en = app.add_subcommand("enumerate", "Enumerate every region of the input-space partition");
    cmd_en->add_option("-n,--net", en.net, "Network JSON")->required();
    cmd_en->add_option("--box", en.box, "Half width of the input box")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_en->add_flag("--unbounded", en.unbounded, "Enumerate over the whole input space");
    cmd_en->add_option("--workers", en.workers, "Worker threads (default $CPA_ENUM_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    cmd_en->add_option("--out", en.out, "Partition JSON output");
    cmd_en->add_option("--csv", en.csv, "Region list CSV output");
    cmd_en->add_flag("--affine", en.affine, "Include per-region affine maps in the JSON");
    en.lp.add(cmd_en);

    SampleArgs sa;
    sa.workers = workers_default;
    auto* cmd_sa = app.add_subcommand("sample", "Discover regions by uniform sampling of the box");
    cmd_sa->add_option("-n,--net", sa.net, "Network JSON")->required();
    cmd_sa->add_option("--box", sa.box, "Half width of the sampling box")->check(CLI::PositiveNumber)->capture_default_str();
    auto* samples_opt = cmd_sa->add_option("--samples", sa.samples, "Sample-count budget");
    cmd_sa->add_option("--seconds", sa.seconds, "Wall-clock budget")->check(CLI::PositiveNumber)->excludes(samples_opt);
    cmd_sa->add_option("--seed", sa.seed, "RNG seed")->capture_default_str();
    cmd_sa->add_option("--workers", sa.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd_sa->add_option("-o,--out", sa.out, "Discovery curve CSV (default stdout)");

    CompareArgs co;
    co.workers = workers_default;
    auto* cmd_co = app.add_subcommand("compare", "Exact enumeration versus sampling at a matched time budget");
    cmd_co->add_option("-n,--net", co.net, "Network JSON (otherwise a grid is generated from -D and -w)");
    cmd_co->add_option("-D,--input-dim", co.dims, "Input dimensions of the grid")->delimiter(',');
    cmd_co->add_option("-w,--width", co.widths, "Single-layer widths of the grid")->delimiter(',');
    cmd_co->add_option("--act", co.act, "relu | leaky_relu | abs")->capture_default_str();
    cmd_co->add_option("--alpha", co.alpha, "leaky_relu negative slope")->capture_default_str();
    cmd_co->add_option("--seed", co.seed, "Network and sampling seed")->capture_default_str();
    cmd_co->add_option("--runs", co.runs, "Sampling runs per configuration")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_co->add_option("--box", co.box, "Half width of the box")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_co->add_option("--workers", co.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd_co->add_option("--samples", co.samples, "Fixed sample budget instead of matched wall time");
    cmd_co->add_option("-o,--out", co.out, "Table CSV (default stdout)");
    cmd_co->add_option("--json", co.json, "Reports as a JSON array");
    cmd_co->add_option("--long-csv", co.long_csv, "One CSV row per configuration");
    co.lp.add(cmd_co);

    SliceArgs sl;
    sl.workers = workers_default;
    auto* cmd_sl = app.add_subcommand("slice", "Draw the partition restricted to a 2-plane as SVG");
    cmd_sl->add_option("-n,--net", sl.net, "Network JSON")->required();
    cmd_sl->add_option("--anchor", sl.anchor, "Plane anchor point")->delimiter(',');
    cmd_sl->add_option("--u", sl.basis_u, "First basis vector")->delimiter(',');
    cmd_sl->add_option("--v", sl.basis_v, "Second basis vector")->delimiter(',');
    cmd_sl->add_option("--extent", sl.extent, "Half width of the drawn square")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_sl->add_option("--resolution", sl.resolution, "Canvas side in pixels")->capture_default_str();
    cmd_sl->add_option("--workers", sl.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd_sl->add_option("-o,--out", sl.out, "SVG output (default stdout)");
    cmd_sl->add_option("--restricted-out", sl.restricted_out, "Write the 2-input restricted network JSON");
    sl.lp.add(cmd_sl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (cmd_gen->parsed())
            return run_gen(gen);
        if (cmd_en->parsed())
            return run_enumerate(en);
        if (cmd_sa->parsed())
            return run_sample(sa);
        if (cmd_co->parsed())
            return run_compare(co);
        if (cmd_sl->parsed())
            return run_slice(sl);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
