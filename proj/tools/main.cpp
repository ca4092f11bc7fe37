#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace momentcone::cli;

namespace {

// Runs fn against the output file, or stdout when path is empty.
template <class Fn>
int with_output(const std::string& path, Fn fn)
{
    if (path.empty()) return fn(std::cout);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open output file " + path);
    int code = fn(out);
    out.close();
    if (!out) throw UsageError("failed writing " + path);
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"momentcone: moment-based tests for random discrete measures"};
    app.require_subcommand(1);

    std::string config_path, output, samples;
    std::vector<std::string> overrides;
    int order = 1;

    auto common = [&](CLI::App* sub, bool reads_samples) {
        sub->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--set", overrides, "override a config key, e.g. --set model.rate=2")->take_all();
        sub->add_option("-o,--output", output, "output file (default stdout)");
        if (reads_samples)
            sub->add_option("-s,--samples", samples, "sample file from `simulate`; analytic mode when omitted");
    };

    auto* simulate = app.add_subcommand("simulate", "draw samples and write a JSON Lines sample file");
    common(simulate, false);
    auto* moments = app.add_subcommand("moments", "CSV table of M_{i_1..i_n}(delta) with standard errors");
    common(moments, true);
    auto* verdict = app.add_subcommand("verdict", "discreteness and point-process verdict as JSON");
    common(verdict, true);
    auto* rho = app.add_subcommand("recover-rho", "recover the correlation measure of order n");
    common(rho, true);
    rho->add_option("-n,--order", order, "order n (1..4)");
    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (selftest->parsed()) return run_selftest(std::cout);
        const RunConfig cfg = load_config(config_path, overrides);
        const std::optional<std::string> sample_path = samples.empty() ? std::nullopt : std::optional(samples);
        if (simulate->parsed()) return with_output(output, [&](std::ostream& o) { return cmd_simulate(cfg, o); });
        if (moments->parsed())
            return with_output(output, [&](std::ostream& o) { return cmd_moments(cfg, sample_path, o); });
        if (verdict->parsed())
            return with_output(output, [&](std::ostream& o) { return cmd_verdict(cfg, sample_path, o); });
        if (rho->parsed())
            return with_output(output, [&](std::ostream& o) { return cmd_recover_rho(cfg, sample_path, order, o); });
    } catch (const UsageError& e) {
        std::cerr << "momentcone: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "momentcone: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
