/**
 * @file stf_main.cpp
 * @brief The `stf` command-line tool: depth, theta, transfer and verify subcommands.
 */
#include <iostream>

#include "CLI11.hpp"
#include "stf/cli.hpp"

namespace {

constexpr int kUsageExit = 2;

}  // namespace

int main(int argc, char** argv) {
    using namespace stf;
    CLI::App app{"Stable transfer factors on unramified tori"};
    app.set_config("--config", "", "Flat key=value configuration file");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string format = "json", sign = "table";
    app.add_option("--p", cfg.p, "Residue characteristic")->capture_default_str();
    app.add_option("--k", cfg.k, "Residue field degree: f = F_{p^k}")->capture_default_str();
    app.add_option("--n", cfg.n, "Torus degree [E:F]")->capture_default_str();
    app.add_option("--prec", cfg.prec, "Working precision in powers of the uniformizer")->capture_default_str();
    app.add_option("--depth-cap", cfg.depth_cap, "Deepest character stratum to enumerate")->capture_default_str();
    app.add_option("--format", format, "Output format: json or csv")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for randomized suites")->capture_default_str();
    app.add_option("--sign-convention", sign, "Sign convention: table or raw")->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str();

    std::string gamma, t, psi, mode = "both", suite, artifacts;
    auto* depth = app.add_subcommand("depth", "Depth report for a torus element or matrix");
    depth->add_option("gamma", gamma, "Element literal or [[a, b], [c, d]] matrix")->required();
    auto* theta = app.add_subcommand("theta", "Character value Θ_ψ(γ) on the torus");
    theta->add_option("psi", psi, "Character label psi=[a_1,...]@r=R")->required();
    theta->add_option("gamma", gamma, "Torus element literal")->required();
    auto* transfer = app.add_subcommand("transfer", "Transfer factor L(γ,t)");
    transfer->add_option("gamma", gamma, "Torus element literal")->required();
    transfer->add_option("t", t, "Torus element literal")->required();
    transfer->add_option("--mode", mode, "brute, closed or both")->capture_default_str();
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", suite, "Suite name, criterion number or all")->required();
    verify->add_option("--artifacts", artifacts, "Directory for report artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageExit;
    }

    try {
        cfg.format = parse_format(format);
        cfg.conv = parse_sign_convention(sign);
        CommandOutput out;
        if (*depth) out = cmd_depth(cfg, gamma);
        if (*theta) out = cmd_theta(cfg, psi, gamma);
        if (*transfer) out = cmd_transfer(cfg, gamma, t, mode);
        if (*verify) out = cmd_verify(cfg, suite, app.count("--p") + app.count("--n") > 0, artifacts);
        std::cout << out.text;
        return out.exit_code;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
