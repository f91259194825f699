#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "smplab/lab.hpp"

namespace {

int run_cmd(const std::string& config_path, const std::string& out_override,
            long seed_override, bool has_seed) {
    smplab::lab::ExperimentConfig cfg;
    try {
        cfg = smplab::lab::ExperimentConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (!out_override.empty())
        cfg.output = out_override;
    if (has_seed)
        cfg.seed = static_cast<std::uint64_t>(seed_override);

    smplab::lab::ExperimentReport rep;
    try {
        rep = smplab::lab::run_experiment(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    const auto paths = smplab::lab::emit_report(rep, cfg.output);
    for (const auto& p : paths)
        std::printf("wrote %s\n", p.c_str());
    if (!rep.pass) {
        for (const auto& f : rep.failures)
            std::fprintf(stderr, "FAIL: %s\n", f.c_str());
        std::printf("%s: FAIL\n", rep.experiment.c_str());
        return 1;
    }
    std::printf("%s: PASS\n", rep.experiment.c_str());
    return 0;
}

int validate_cmd(const std::string& config_path) {
    try {
        smplab::lab::ExperimentConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    std::printf("ok\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"experiment harness for parabolic maximum-principle studies"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long seed = 0;
    bool has_seed = false;

    auto* run = app.add_subcommand("run", "run one experiment from a config");
    run->add_option("--config", config_path, "JSON config path")->required();
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--seed", seed, "seed override")
        ->each([&](const std::string&) { has_seed = true; });

    auto* list = app.add_subcommand("list", "list available experiments");

    auto* validate =
        app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("--config", config_path, "JSON config path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& name : smplab::lab::list_experiments())
            std::printf("%s\n", name.c_str());
        return 0;
    }
    if (validate->parsed())
        return validate_cmd(config_path);
    return run_cmd(config_path, out_dir, seed, has_seed);
}
