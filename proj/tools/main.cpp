#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace hurwitz::cli;

int main(int argc, char** argv) {
    CLI::App app{"Hurwitz-space Frobenius manifolds: tau functions, Hamiltonians and identity checks"};
    app.require_subcommand(1);

    std::string file;
    bool json = false, strict = false;
    auto* analyze = app.add_subcommand("analyze", "Report canonical and flat data, H, tau, G and caustic diagnostics");
    analyze->add_option("file", file, "Covering spec (JSON)")->required();
    analyze->add_flag("--json", json, "JSON output");
    analyze->add_flag("--strict", strict, "Exit 4 on a caustic warning");

    CheckOptions check_opt;
    auto* check = app.add_subcommand("check", "Run the identity suite on one covering");
    check->add_option("file", file, "Covering spec (JSON)")->required();
    check->add_option("--fd-step", check_opt.fd_step, "Relative finite-difference step")->capture_default_str();
    check->add_option("--tol", check_opt.tol, "Tolerance for every identity")->capture_default_str();
    check->add_option("--seed", check_opt.seed, "Seed of the random sweep direction")->capture_default_str();

    SweepOptions sweep_opt;
    std::string to;
    bool sweep_json = false;
    auto* sweep = app.add_subcommand("sweep", "Ratio constancy along a straight parameter segment");
    sweep->add_option("file", file, "Covering spec (JSON)")->required();
    sweep->add_option("--param", sweep_opt.param, "Dot path, e.g. poles.0.b or poles.0.c.1")->required();
    sweep->add_option("--to", to, "End value RE,IM")->required();
    sweep->add_option("--steps", sweep_opt.steps, "Number of steps")->capture_default_str();
    sweep->add_flag("--json", sweep_json, "JSON output");

    std::string name;
    std::optional<std::string> out_path;
    auto* example = app.add_subcommand("example", "Write a built-in covering spec (a2, h0_surf, h12)");
    example->add_option("name", name, "Example name")->required();
    example->add_option("--out", out_path, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseError;
    }

    if (*analyze) return cmd_analyze(file, json, strict, std::cout, std::cerr);
    if (*check) return cmd_check(file, check_opt, std::cout, std::cerr);
    if (*sweep) {
        try {
            sweep_opt.to = parse_complex_arg(to);
        } catch (const SpecError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kParseError;
        }
        return cmd_sweep(file, sweep_opt, sweep_json, std::cout, std::cerr);
    }
    return cmd_example(name, out_path, std::cout, std::cerr);
}
