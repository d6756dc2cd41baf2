#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minkowski/harness.hpp"

using namespace minkowski;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("minkowski_test_" + name);
    fs::remove_all(dir);
    return dir;
}

RunConfig config_for(const std::string& command) {
    RunConfig c;
    c.command = command;
    return c;
}

} // namespace

TEST_CASE("fit_exponent recovers exact power laws") {
    std::vector<std::pair<double, double>> pairs;
    for (int k = 7; k <= 11; ++k) {
        const double l = std::ldexp(1.0, k);
        pairs.emplace_back(l, 3.0 * std::pow(l, -1.5));
    }
    const auto fit = fit_exponent(pairs);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.max_residual < 1e-12);
    CHECK(fit.slope_stderr < 1e-12);

    for (auto& [l, v] : pairs)
        v *= 1.0 + 0.1 / l;
    CHECK(fit_exponent(pairs).slope == doctest::Approx(-1.5).epsilon(0.02));

    const std::vector<std::pair<double, double>> two{{128, 1.0}, {256, 0.5}};
    CHECK_THROWS(fit_exponent(two));
    const std::vector<std::pair<double, double>> bad{{128, 1.0}, {256, 0.0}, {512, 0.5}};
    CHECK_THROWS(fit_exponent(bad));
    const std::vector<std::pair<double, double>> negative{{128, 1.0}, {256, -0.5}, {512, 0.5}};
    CHECK_THROWS(fit_exponent(negative));
}

TEST_CASE("k ranges") {
    CHECK(parse_k_range("7..11") == std::pair{7, 11});
    CHECK(parse_k_range("9") == std::pair{9, 9});
    CHECK_THROWS_AS(parse_k_range("7-11"), ConfigError);
    CHECK_THROWS_AS(parse_k_range("a..b"), ConfigError);
    CHECK_THROWS_AS(parse_k_range(""), ConfigError);
    CHECK_THROWS_AS(parse_k_range("7..9x"), ConfigError);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(config_for("sweep").validate());
    CHECK_THROWS_AS(config_for("bogus").validate(), ConfigError);

    auto c = config_for("sweep");
    c.k_lo = 9;
    c.k_hi = 8;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.k_lo = 6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.alphas = {0.5, 1.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.alphas.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.tolerance_scale["nope"] = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.tolerance_scale["wigner"] = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.budgets["triple_cap"] = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config_for("sweep");
    c.format = "xml";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(config_for("report").validate(), ConfigError);
    c = config_for("verify-wigner");
    c.delta = 0.9;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = config_for("sweep");
    CHECK(c.tolerance("basis") == 1.0);
    c.tolerance_scale["basis"] = 2.0;
    CHECK(c.tolerance("basis") == 2.0);
    CHECK(c.budget("triple_cap") == 1e7);
    CHECK_THROWS_AS(c.budget("nope"), ConfigError);
}

TEST_CASE("registry") {
    std::set<std::string> ids;
    for (const auto& spec : check_registry())
        CHECK(ids.insert(spec.id).second);
    std::set<std::string> claims;
    for (const auto& spec : check_registry())
        if (spec.gated)
            claims.insert(spec.claim);
    for (const char* claim : claim_list())
        CHECK_MESSAGE(claims.count(claim), claim);
    for (const auto& e : traceability_matrix())
        CHECK_MESSAGE(e.covered(), e.claim);
}

TEST_CASE("verify-geometry emits registered ids") {
    const auto result = verify_geometry(config_for("verify-geometry"));
    CHECK(result.passed());
    std::set<std::string> registered, emitted;
    for (const auto& spec : check_registry())
        if (std::string(spec.suite) == "geometry")
            registered.insert(spec.id);
    for (const auto& r : result.records) {
        CHECK(r.suite == "geometry");
        CHECK_MESSAGE(registered.count(r.check_id), r.check_id);
        emitted.insert(r.check_id);
    }
    CHECK(emitted == registered);
}

TEST_CASE("record serialization") {
    OutputRecord r{"basis", "basis.x", "a, \"quoted\" claim", CheckStatus::Pass, 0.5, "<= 1", 1e-12, 3.0, true};
    std::ostringstream out;
    write_records_csv(out, std::span<const OutputRecord>(&r, 1));
    CHECK(out.str() == "suite,check_id,claim,status,measured,expected,tolerance,gated\n"
                       "basis,basis.x,\"a, \"\"quoted\"\" claim\",pass,0.5,<= 1,9.9999999999999998e-13,true\n");
    const auto j = nlohmann::json::parse(records_to_json(std::span<const OutputRecord>(&r, 1)));
    CHECK(j[0]["runtime_ms"].get<double>() == 3.0);
    CHECK(j[0]["status"] == "pass");
    CHECK(to_string(CheckStatus::Info) == "info");
}

TEST_CASE("run writes reproducible files") {
    const auto dir = scratch("geometry");
    auto c = config_for("verify-geometry");
    c.out_dir = dir.string();
    std::ostringstream log1, log2;
    CHECK(run(c, log1) == kExitPass);
    const auto first = slurp(dir / "verify-geometry.csv");
    CHECK(first.rfind("suite,check_id", 0) == 0);
    CHECK(run(c, log2) == kExitPass);
    CHECK(slurp(dir / "verify-geometry.csv") == first);
    CHECK(log1.str().find("gated failures") != std::string::npos);

    c.format = "json";
    std::ostringstream log3;
    CHECK(run(c, log3) == kExitPass);
    CHECK(nlohmann::json::parse(slurp(dir / "verify-geometry.json")).is_array());

    auto bad = config_for("nothing");
    std::ostringstream log4;
    CHECK(run(bad, log4) == kExitConfigError);
    fs::remove_all(dir);
}

TEST_CASE("sweep and report round trip") {
    const auto dir = scratch("sweep");
    auto c = config_for("sweep");
    c.k_lo = 7;
    c.k_hi = 11;
    c.alphas = {0.5};
    c.out_dir = dir.string();
    std::ostringstream log;
    CHECK(run(c, log) == kExitPass);
    const auto csv = slurp(dir / "sweep_rows.csv");
    std::istringstream in(csv);
    const auto rows = read_sweep_csv(in);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].k == 7);
    CHECK(rows[2].ell == 512);
    CHECK(rows[0].cubic_quadrature.has_value());
    std::ostringstream again;
    write_sweep_csv(again, rows);
    CHECK(again.str() == csv);

    auto r = config_for("report");
    r.input = (dir / "sweep_rows.csv").string();
    r.out_dir = dir.string();
    std::ostringstream rlog;
    CHECK(run(r, rlog) == kExitPass);

    // Three degrees are too pre-asymptotic for the moment slope.
    c.k_hi = 9;
    std::ostringstream short_log;
    CHECK(run(c, short_log) == kExitGatedFailure);
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "traceability.csv"));

    std::istringstream garbage("not,a,sweep\n1,2,3\n");
    CHECK_THROWS(read_sweep_csv(garbage));
    fs::remove_all(dir);
}
