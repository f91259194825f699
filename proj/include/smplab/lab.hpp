#ifndef SMPLAB_LAB_HPP
#define SMPLAB_LAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace smplab::lab {

/// Parsed experiment configuration. Scenario-specific defaults are merged
/// under the user-provided values; unknown top-level keys are rejected.
struct ExperimentConfig {
    std::string experiment;
    nlohmann::json operator_desc;
    nlohmann::json geometry;
    nlohmann::json grid;
    nlohmann::json initial;
    nlohmann::json boundary;
    nlohmann::json tolerances;
    std::uint64_t seed = 1;
    std::string output = "out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
};

struct CsvTable {
    std::string name; // file stem, e.g. "gap"
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string experiment;
    bool pass = false;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    std::vector<std::string> failures;
    nlohmann::ordered_json certificate; // null unless a barrier was certified
    std::vector<CsvTable> tables;
};

std::vector<std::string> list_experiments();

/// Runs the named scenario. Pure in-memory: deterministic given config+seed;
/// file output happens in emit_report. Scenario assertion failures are
/// recorded in the report (pass = false), not thrown.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes report.json (stable key order; a trailing timestamp field) and one
/// CSV per table into the output directory. Returns the written paths.
std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& out_dir);

} // namespace smplab::lab

#endif
