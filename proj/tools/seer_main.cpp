// seer: fit a thematic model described by an INI file and write its tables.
//
//   seer --config model.ini [--out DIR] [--algorithm NAME] [--planes g:1,2]...
//   seer report DIR

#include "seer/cli/pipeline.hpp"
#include "seer/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Structural equation exploratory regression"};
    app.require_subcommand(0, 1);

    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string algorithm;
    std::vector<std::string> planes;
    bool all_variables = false;
    bool quiet = false;

    auto* cfg_opt = app.add_option("-c,--config", config, "Model configuration (INI)")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "Output directory (overrides SEER_OUT_DIR and the configuration)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed recorded with the run; the algorithms are deterministic");
    app.add_option("-a,--algorithm", algorithm, "pls1, ln_pls2, seer_a3, seer_b2 or select");
    app.add_option("--planes", planes, "Correlation plane group:j,k (repeatable)");
    app.add_flag("--all-variables", all_variables, "Planes show every model variable");
    app.add_flag("-q,--quiet", quiet, "Do not print the summary");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Print the summary of a finished run");
    report->add_option("dir", report_dir, "Output directory of the run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (report->parsed()) {
            seer::cli::print_report(std::cout, report_dir);
            return 0;
        }
        if (cfg_opt->count() == 0) throw seer::ConfigError("--config is required");
        seer::cli::RunRequest req;
        req.config_path = config;
        if (!out_dir.empty()) req.out_dir = out_dir;
        if (seed_opt->count()) req.seed = seed;
        if (!algorithm.empty()) req.algorithm = seer::cli::algorithm_from_string(algorithm);
        for (const auto& p : planes) req.outputs.planes.push_back(seer::cli::parse_plane(p));
        req.outputs.all_variables = all_variables;
        const auto outcome = seer::cli::execute(req);
        if (!quiet) seer::cli::print_summary(std::cout, outcome);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "seer: " << e.what() << '\n';
        return 1;
    }
}
