// msst: minimum-sum dipolar spanning trees and discrete 2-centers in R^3.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msst/msst.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

struct InputArgs {
    std::string input;
    std::string format{"auto"};
    double eps{msst::kDefaultEps};
};

void add_input_options(CLI::App* cmd, InputArgs& args) {
    cmd->add_option("-i,--input", args.input, "Instance file (JSON or CSV)")->required();
    cmd->add_option("--format", args.format, "Input format: auto, json or csv")
        ->check(CLI::IsMember({"auto", "json", "csv"}));
    cmd->add_option("--eps", args.eps, "Relative tolerance");
}

void check_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps) || eps >= 1e-2) {
        throw msst::ValidationError("--eps must be in (0, 0.01)");
    }
}

msst::Instance load(const InputArgs& args) {
    check_eps(args.eps);
    return msst::load_instance(args.input, msst::parse_format(args.format), args.eps);
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        msst::detail::write_file(output, text);
    }
}

msst::Mode parse_mode(const std::string& algo) {
    return algo == "bruteforce" ? msst::Mode::BruteForce : msst::Mode::Tree;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string tok = text.substr(start, comma - start);
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size() || v < 2) {
            throw msst::ValidationError("--sizes: '" + tok + "' is not an integer >= 2");
        }
        sizes.push_back(static_cast<std::size_t>(v));
        start = comma + 1;
    }
    return sizes;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-sum dipolar spanning tree and discrete 2-center in R^3"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "msst 1.0.0");

    // solve / two-center
    InputArgs solve_in;
    std::string solve_out, solve_algo{"tree"};
    unsigned solve_workers = 0;
    auto add_solve = [&](const char* name, const char* help) {
        auto* cmd = app.add_subcommand(name, help);
        add_input_options(cmd, solve_in);
        cmd->add_option("-o,--output", solve_out, "Result file (default: stdout)");
        cmd->add_option("--algo", solve_algo, "tree or bruteforce")->check(CLI::IsMember({"tree", "bruteforce"}));
        cmd->add_option("--workers", solve_workers, "Worker threads (0 = all cores)");
        return cmd;
    };
    auto* solve = add_solve("solve", "Minimum-sum dipolar spanning tree");
    auto* two_center = add_solve("two-center", "Discrete 2-center from the same farthest-point matrix");

    // oracle
    InputArgs oracle_in;
    std::string oracle_out;
    auto* oracle = app.add_subcommand("oracle", "Brute-force O(n^3) optimum for both objectives");
    add_input_options(oracle, oracle_in);
    oracle->add_option("-o,--output", oracle_out, "Result file (default: stdout)");

    // gen
    std::size_t gen_n = 0;
    std::string gen_dist{"cube"}, gen_out, gen_format{"auto"};
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    gen->add_option("-n,--n", gen_n, "Number of points")->required();
    gen->add_option("--dist", gen_dist, "cube, sphere, clusters or collinear")
        ->check(CLI::IsMember({"cube", "sphere", "clusters", "collinear"}));
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("-o,--output", gen_out, "Instance file (default: stdout)");
    gen->add_option("--format", gen_format, "auto, json or csv")->check(CLI::IsMember({"auto", "json", "csv"}));

    // bench
    std::string bench_sizes{"256,512,1024,2048"}, bench_dist{"cube"}, bench_out;
    std::size_t bench_seeds = 5;
    unsigned bench_workers = 1;
    double bench_eps = msst::kDefaultEps;
    bool bench_oracle = false;
    auto* bench = app.add_subcommand("bench", "Time tree mode over sizes and seeds");
    bench->add_option("--sizes", bench_sizes, "Comma-separated sizes");
    bench->add_option("--seeds", bench_seeds, "Seeds per size (0..seeds-1)");
    bench->add_option("--dist", bench_dist, "cube, sphere, clusters or collinear")
        ->check(CLI::IsMember({"cube", "sphere", "clusters", "collinear"}));
    bench->add_option("--workers", bench_workers, "Worker threads (0 = all cores)");
    bench->add_option("--eps", bench_eps, "Relative tolerance");
    bench->add_flag("--compare-oracle", bench_oracle, "Also time bruteforce mode");
    bench->add_option("-o,--output", bench_out, "CSV file (default: stdout)");

    // export-polytope
    InputArgs export_in;
    std::size_t export_pole = 0;
    std::string export_node, export_out;
    auto* export_poly = app.add_subcommand("export-polytope", "Write one exclusion-tree polytope as OFF");
    add_input_options(export_poly, export_in);
    export_poly->add_option("--pole", export_pole, "Pole index")->required();
    export_poly->add_option("--node", export_node, "Path from the root, e.g. L or LRL (empty = root)");
    export_poly->add_option("-o,--output", export_out, "OFF file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*solve || *two_center) {
            const auto inst = load(solve_in);
            msst::SolveOptions opts{solve_in.eps, parse_mode(solve_algo), solve_workers};
            msst::Stopwatch clock;
            const auto F = msst::compute_matrix(inst.points, opts);
            const auto res = *solve ? msst::solve_msst(inst.points, F) : msst::solve_two_center(inst.points, F);
            msst::ReportContext ctx{*solve ? "msst" : "two-center", inst.name, inst.points.size(),
                                    msst::to_string(opts.mode), opts.eps, clock.elapsed_ms()};
            emit(msst::result_to_json(res, ctx), solve_out);
        } else if (*oracle) {
            const auto inst = load(oracle_in);
            msst::Stopwatch clock;
            const auto res = msst::brute_force_dipoles(inst.points);
            msst::ReportContext ctx{"oracle", inst.name, inst.points.size(), "oracle", oracle_in.eps,
                                    clock.elapsed_ms()};
            emit(msst::oracle_to_json(res, ctx), oracle_out);
        } else if (*gen) {
            const auto inst = msst::generate(gen_n, msst::parse_distribution(gen_dist), gen_seed);
            const auto fmt = msst::resolve_format(msst::parse_format(gen_format), gen_out);
            emit(fmt == msst::Format::Csv ? msst::instance_to_csv(inst) : msst::instance_to_json(inst), gen_out);
        } else if (*bench) {
            check_eps(bench_eps);
            const auto sizes = parse_sizes(bench_sizes);
            if (bench_seeds == 0) throw msst::ValidationError("--seeds must be positive");
            msst::BenchOptions opts{msst::parse_distribution(bench_dist), bench_workers, bench_eps, bench_oracle};
            const auto records = msst::run_bench(sizes, bench_seeds, opts);
            emit(msst::records_to_csv(records) + "\n" + msst::summary_to_csv(msst::summarize(records)), bench_out);
        } else if (*export_poly) {
            const auto inst = load(export_in);
            if (export_pole >= inst.points.size()) {
                throw msst::ValidationError("--pole " + std::to_string(export_pole) + " is out of range (n = " +
                                            std::to_string(inst.points.size()) + ")");
            }
            const msst::ExclusionTree tree(inst.points, export_pole, msst::TreeOptions{export_in.eps});
            tree.export_polytope_off(export_node, export_out);
        }
    } catch (const msst::ParseError& e) {
        std::cerr << "msst: parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const msst::ValidationError& e) {
        std::cerr << "msst: invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "msst: error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
