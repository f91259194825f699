#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smplab/lab.hpp"

using namespace smplab::lab;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_timestamp(std::string text) {
    const auto pos = text.find("\"timestamp\"");
    REQUIRE(pos != std::string::npos);
    return text.substr(0, pos);
}

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS(ExperimentConfig::from_json(
        json::parse(R"({"experiment":"no_such_thing"})")));
    CHECK_THROWS(ExperimentConfig::from_json(
        json::parse(R"({"experiment":"positivity","bogus_key":1})")));
    CHECK_THROWS(ExperimentConfig::from_json(json::parse(
        R"({"experiment":"positivity","tolerances":{"t_pos":-1.0}})")));
    CHECK_THROWS(ExperimentConfig::from_file("/nonexistent/config.json"));

    const ExperimentConfig cfg = ExperimentConfig::from_json(
        json::parse(R"({"experiment":"positivity","seed":42,
                        "grid":{"nx":17}})"));
    CHECK(cfg.seed == 42);
    CHECK(cfg.grid.at("nx") == 17);                 // user override
    CHECK(cfg.operator_desc.at("kind") == "bellman"); // scenario default

    CHECK(list_experiments().size() == 7);
}

TEST_CASE("truncated counterexample runs as the expected failure witness") {
    const ExperimentConfig cfg = ExperimentConfig::from_json(
        json::parse(R"({"experiment":"truncated_counterexample"})"));
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.pass);
    CHECK(rep.metrics.at("super_residual") == 0.0);
    CHECK(rep.metrics.at("min_value") == 0.0);
    CHECK(rep.metrics.at("max_value").get<double>() > 0.0);
}

TEST_CASE("reports are deterministic given config and seed") {
    const auto cfg = ExperimentConfig::from_json(
        json::parse(R"({"experiment":"elliptic_reduction","seed":5})"));
    const ExperimentReport a = run_experiment(cfg);
    const ExperimentReport b = run_experiment(cfg);

    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "smplab_det_test";
    fs::remove_all(base);
    emit_report(a, (base / "a").string());
    emit_report(b, (base / "b").string());
    CHECK(strip_timestamp(slurp(base / "a" / "report.json")) ==
          strip_timestamp(slurp(base / "b" / "report.json")));
    fs::remove_all(base);
}

TEST_CASE("axis_strictness emits the gap table with monotone time") {
    ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(
        R"({"experiment":"axis_strictness","grid":{"nx":25},
            "geometry":{"cert_grid":16}})"));
    const ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.pass);
    CHECK(rep.metrics.at("min_gap_after_start").get<double>() > 0.0);
    CHECK(!rep.certificate.is_null());
    CHECK(rep.certificate.at("margin").get<double>() > 0.0);

    REQUIRE(!rep.tables.empty());
    const CsvTable& gap = rep.tables.front();
    CHECK(gap.name == "gap");
    REQUIRE(gap.header.size() == 2);
    CHECK(gap.header[0] == "t");
    CHECK(gap.header[1] == "gap");
    for (size_t i = 1; i < gap.rows.size(); ++i)
        CHECK(gap.rows[i][0] > gap.rows[i - 1][0]);

    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "smplab_csv_test";
    fs::remove_all(base);
    const auto paths = emit_report(rep, base.string());
    bool has_csv = false, has_json = false;
    for (const auto& p : paths) {
        if (p.ends_with("gap.csv"))
            has_csv = true;
        if (p.ends_with("report.json"))
            has_json = true;
    }
    CHECK(has_csv);
    CHECK(has_json);
    const std::string csv = slurp(base / "gap.csv");
    CHECK(csv.rfind("t,gap\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos); // LF endings only
    fs::remove_all(base);
}

TEST_CASE("report json has stable key order") {
    const auto cfg = ExperimentConfig::from_json(
        json::parse(R"({"experiment":"truncated_counterexample"})"));
    const ExperimentReport rep = run_experiment(cfg);
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "smplab_order_test";
    fs::remove_all(base);
    emit_report(rep, base.string());
    const std::string text = slurp(base / "report.json");
    const auto pos_exp = text.find("\"experiment\"");
    const auto pos_pass = text.find("\"pass\"");
    const auto pos_metrics = text.find("\"metrics\"");
    const auto pos_stamp = text.find("\"timestamp\"");
    CHECK(pos_exp < pos_pass);
    CHECK(pos_pass < pos_metrics);
    CHECK(pos_metrics < pos_stamp);
    fs::remove_all(base);
}
