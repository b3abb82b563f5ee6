#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsd/cli.hpp"
#include "qsd/serialize.hpp"

using namespace qsd;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "qsd_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("run reports analytic and pipeline success") {
    const auto r = run({"run", "--scheme", "mixed-special", "--gamma", "0.5", "--priors", "0.3,0.3,0.4"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("analytic_success").get<double>() == doctest::Approx(1.0 - 2.0 * 0.25 * 0.6));
    CHECK(j.at("pipeline_success").get<double>() == doctest::Approx(j.at("analytic_success").get<double>()));
    const auto& cm = j.at("confusion_matrix");
    CHECK(cm.size() == 3);
    CHECK(cm.at(0).size() == 4);
    CHECK(cm.at(0).at(0).get<double>() == doctest::Approx(0.5));
    CHECK(j.at("labels").at(3) == "inconclusive");
}

TEST_CASE("domain errors exit with code 2 and one JSON line") {
    const auto r = run({"run", "--scheme", "mixed-special", "--gamma", "0.9", "--priors", "0.3,0.3,0.4"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    const Json j = Json::parse(r.err);
    CHECK(j.at("error") == "GammaOutOfRange");

    const auto g = run({"validate", "--scheme", "mixed-general", "--gamma", "0.8", "--alpha", "-0.5", "--priors",
                        "1/3,1/3,1/3"});
    CHECK(g.code == 2);
    CHECK(Json::parse(g.err).at("error") == "GramNotPsd");

    const auto p = run({"run", "--scheme", "mixed-special", "--gamma", "0.5", "--priors", "0.3,0.3,0.3"});
    CHECK(p.code == 2);
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"run", "--scheme", "mixed-special", "--priors", "0.3,0.3,0.4"}).code == 1);
    CHECK(run({"run", "--scheme", "nope", "--gamma", "0.5", "--priors", "0.3,0.3,0.4"}).code == 1);
    CHECK(run({"run", "--scheme", "mixed-special", "--gamma", "abc", "--priors", "0.3,0.3,0.4"}).code == 1);
    CHECK(run({"run", "--scheme", "mixed-special", "--gamma", "0.5", "--priors", "0.3,x,0.4"}).code == 1);
    CHECK(run({"compare", "--theorem", "3.1", "--gamma-grid", "0:1"}).code == 1);
    CHECK(run({"compare"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("validate prints residuals") {
    const auto r = run({"validate", "--scheme", "zero-aux", "--overlaps", "0.09,0.3,0.3", "--priors", "1/3,1/3,1/3"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("unitarity_residual").get<double>() <= 1e-10);
    CHECK(j.at("povm_residual").get<double>() <= 1e-9);
    CHECK(j.at("pipeline_analytic_delta").get<double>() <= 1e-9);

    const auto c = run({"validate", "--scheme", "rra", "--c-plus", "0.9", "--c-minus", "0.4", "--priors", "0.8,0.2",
                        "--format", "csv"});
    REQUIRE(c.code == 0);
    CHECK(c.out.rfind("metric,value\n", 0) == 0);
    CHECK(c.out.find("analytic_success,0.32\n") != std::string::npos);
}

TEST_CASE("compare emits CSV and a verdict summary") {
    const auto r = run({"compare", "--theorem", "3.1", "--gamma-grid", "0:0.9:0.05", "--prior-step", "0.05"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == csv_header());
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
        CHECK(line.substr(line.rfind(',') + 1) == "true");
    }
    CHECK(rows == 19 * 231);
    CHECK(r.err.find("failures: 0\n") != std::string::npos);
    CHECK(r.err.find("total: " + std::to_string(rows)) != std::string::npos);
    CHECK(r.out.find('\r') == std::string::npos);

    const auto again = run({"compare", "--theorem", "3.1", "--gamma-grid", "0:0.9:0.05", "--prior-step", "0.05"});
    CHECK(again.out == r.out);

    const auto t = run({"compare", "--theorem", "2.1", "--format", "json"});
    REQUIRE(t.code == 0);
    const Json j = Json::parse(t.out);
    CHECK(j.at("summary").at("failures") == 0);
}

TEST_CASE("simulate is reproducible") {
    const std::vector<std::string> args{"simulate", "--scheme", "mixed-special", "--gamma", "0.5", "--priors",
                                        "0.3,0.3,0.4", "--n", "100000", "--seed", "3"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const Json j = Json::parse(a.out);
    CHECK(j.at("n") == 100000);
    CHECK(std::abs(j.at("empirical_success").get<double>() - 0.7) <= 5 * j.at("std_error").get<double>());
}

TEST_CASE("sweep tabulates one parameter") {
    const auto r = run({"sweep", "--scheme", "mixed-general", "--gamma", "0.5", "--priors", "0.25,0.25,0.5",
                        "--grid", "alpha=0.1:0.5:0.1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("alpha,analytic_success,pipeline_success,branch_note\n", 0) == 0);
    CHECK(r.out.find("0.1,0.8,0.8,alpha < gamma^2\n") != std::string::npos);
    CHECK(run({"sweep", "--scheme", "mixed-general", "--gamma", "0.5", "--priors", "0.25,0.25,0.5"}).code == 1);
}

TEST_CASE("dump, output files and config") {
    const auto path = scratch("scheme.json");
    std::filesystem::remove(path);
    const auto r = run({"dump", "--scheme", "unambiguous-special", "--gamma", "0.5", "--x0", "0.6", "--x1", "0.7",
                        "--priors", "0.3,0.3,0.4", "--output", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const Json j = Json::parse(in);
    CHECK(j.at("kind") == "unambiguous-special");
    CHECK(j.at("povm").at("labels").size() == 4);
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));

    const auto cfg = scratch("config.json");
    {
        std::ofstream f(cfg);
        f << R"({"scheme": "mixed-general", "params": {"gamma": 0.5, "alpha": 0.6}, "priors": [0.25, 0.25, 0.5]})";
    }
    const auto c = run({"run", "--config", cfg.string()});
    REQUIRE(c.code == 0);
    CHECK(Json::parse(c.out).at("analytic_success").get<double>() == doctest::Approx(0.7));
    const auto o = run({"run", "--config", cfg.string(), "--alpha", "0.1"});
    CHECK(Json::parse(o.out).at("analytic_success").get<double>() == doctest::Approx(0.8));
    CHECK(run({"run", "--config", scratch("missing.json").string()}).code == 1);
}
