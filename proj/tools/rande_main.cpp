#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "rande/io_util.hpp"
#include "rande/pipeline.hpp"
#include "rande/version.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> sigma;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "run configuration JSON file");
    cmd->add_option("--output", flags.output, "run directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "global seed (overrides config)");
    cmd->add_option("--threads", flags.threads,
                    "worker threads, 0 = all cores (overrides config)");
    cmd->add_option("--sigma", flags.sigma,
                    "proportional noise level (overrides config)");
}

rande::RunConfig resolve_config(const CommonFlags& flags) {
    nlohmann::json doc = nlohmann::json::object();
    if (!flags.config_path.empty()) {
        try {
            doc = nlohmann::json::parse(rande::read_text(flags.config_path));
        } catch (const nlohmann::json::exception& e) {
            throw rande::ConfigError("cannot parse " + flags.config_path + ": " +
                                     e.what());
        } catch (const std::runtime_error& e) {
            throw rande::ConfigError(e.what());
        }
    }
    // Flag overrides land in the document before resolution so that the
    // resolved config (and its hash) reflect what actually ran.
    if (flags.output) doc["output"] = *flags.output;
    if (flags.seed) doc["seed"] = *flags.seed;
    if (flags.threads) doc["threads"] = *flags.threads;
    if (flags.sigma) doc["dataset"]["sigma"] = *flags.sigma;
    return rande::config_from_json(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter-distribution estimation for reaction-diffusion "
                 "populations with competition"};
    app.set_version_flag("--version", std::string(rande::kToolVersion));
    app.require_subcommand(1);

    CommonFlags flags;
    bool force = false;
    std::string method = "prmf";

    CLI::App* generate = app.add_subcommand("generate", "generate a synthetic dataset");
    add_common(generate, flags);
    generate->add_flag("--force", force, "overwrite an existing dataset");

    CLI::App* basis = app.add_subcommand("basis", "precompute the phenotype basis library");
    add_common(basis, flags);

    CLI::App* fit = app.add_subcommand("fit", "fit model weights / parameters");
    add_common(fit, flags);
    fit->add_option("--method", method, "prmf | pde")->required();

    CLI::App* analyze = app.add_subcommand("analyze", "errors, wave speeds and clustering");
    add_common(analyze, flags);

    CLI::App* report = app.add_subcommand("report", "print a run summary");
    add_common(report, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        rande::RunConfig config = resolve_config(flags);
        if (generate->parsed()) {
            rande::cmd_generate(config, force);
        } else if (basis->parsed()) {
            rande::cmd_basis(config);
        } else if (fit->parsed()) {
            rande::cmd_fit(config, method);
        } else if (analyze->parsed()) {
            rande::cmd_analyze(config);
        } else if (report->parsed()) {
            rande::cmd_report(config, std::cout);
        }
    } catch (const rande::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
