// zerocell: run a JSON experiment config, or merge finished runs.
//
//   zerocell --config run.json [--seed S] [--threads K] [--output DIR]
//   zerocell report DIR/manifest.json ... --output DIR
//   zerocell catalogue
//
// Exit status: 0 all verdicts pass, 1 some verdict failed, 2 bad config or
// usage, 3 runtime failure.

#include <iostream>

#include <CLI11.hpp>

#include "zerocell/experiment.hpp"

using namespace zerocell;

int main(int argc, char** argv)
{
    CLI::App app{"Zero cells of Poisson hyperplane tessellations"};
    std::string config_path, output;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--seed", seed, "seed, overrides the config");
    app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--output", output, "output directory, overrides the config");

    auto* report = app.add_subcommand("report", "merge finished runs into summary.csv");
    std::vector<std::string> manifests;
    std::string report_out = ".";
    report->add_option("manifests", manifests, "manifest.json files");
    report->add_option("--output", report_out, "directory for summary.csv");

    auto* catalogue = app.add_subcommand("catalogue", "print the identity catalogue as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*catalogue) {
            std::cout << catalogue_json().dump(2) << "\n";
            return 0;
        }
        if (*report) {
            std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
            const auto table = merge_reports(paths);
            std::filesystem::create_directories(report_out);
            write_atomic(std::filesystem::path(report_out) / "summary.csv", table.str());
            std::cout << "summary.csv: " << table.rows.size() << " rows\n";
            return 0;
        }
        if (config_path.empty()) {
            std::cerr << "error: --config is required\n" << app.help();
            return 2;
        }
        ExperimentConfig cfg;
        try {
            cfg = parse_config(nlohmann::json::parse(read_file(config_path)));
            if (seed) cfg.seed = seed;
            if (!cfg.seed) throw ConfigError("field 'seed' is missing (set it in the config or pass --seed)");
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        if (threads == 0) threads = cfg.threads > 0 ? cfg.threads : default_threads();
        const std::filesystem::path dir = output.empty() ? cfg.output_dir : output;
        const auto res = run_experiment(cfg, dir, *cfg.seed, threads);
        for (const auto& v : res.verdicts)
            std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << (v.detail.empty() ? "" : "  " + v.detail) << "\n";
        return res.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
