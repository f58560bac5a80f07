#include "anilap/error.hpp"
#include "anilap/experiments.hpp"
#include "anilap/numerics.hpp"
#include "anilap/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    using namespace anilap;
    CLI::App app{"anilap: anisotropic nonlocal operators"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    std::optional<std::string> out;
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--jobs", jobs, "worker threads (0: hardware concurrency)");
    app.add_option("--out", out, "override the output directory");

    std::string path;
    auto* run = app.add_subcommand("run", "run one experiment and write its report");
    run->add_option("config", path, "experiment config (JSON)")->required();
    auto* val = app.add_subcommand("validate", "parse and validate a config");
    val->add_option("config", path, "experiment config (JSON)")->required();
    auto* list = app.add_subcommand("list-experiments", "list known experiments");
    for (auto* sub : {run, val, list}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }
    set_jobs(jobs);

    if (list->parsed()) {
        for (const auto& e : experiment_registry()) std::cout << e.name << "\t" << e.summary << "\n";
        return 0;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(path);
        if (seed) cfg.seed = *seed;
        if (out) cfg.output = *out;
        validate(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    if (val->parsed()) {
        std::cout << "ok: " << cfg.experiment << "\n";
        return 0;
    }

    const auto report = run_experiment(cfg);
    try {
        emit_report(report, cfg.output, manifest(cfg));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    std::cout << cfg.experiment << ": " << to_string(report.verdict);
    if (!report.reason.empty()) std::cout << " (" << report.reason << ")";
    std::cout << "\n";
    return exit_status(report.verdict);
}
