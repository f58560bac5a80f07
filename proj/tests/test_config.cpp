#include "anilap/error.hpp"
#include "anilap/experiments.hpp"
#include "anilap/numerics.hpp"
#include "anilap/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace anilap;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentConfig base(const std::string& name) {
    ExperimentConfig c;
    c.experiment = name;
    c.alpha = {1.5, 0.5};
    return c;
}

} // namespace

TEST_CASE("config round trip over the catalogs") {
    std::mt19937_64 rng(9);
    for (const char* variant : {"axes", "modulated-axes"})
        for (const char* coeff : {"constant", "checkerboard", "bump"})
            for (const char* g : {"zero", "constant", "bump", "oscillatory"})
                for (const char* f : {"zero", "constant"}) {
                    auto c = base("dirichlet-solve");
                    c.kernel.variant = variant;
                    c.kernel.coefficient.kind = coeff;
                    c.kernel.coefficient.center = {0.1, 0.2};
                    c.data.g.kind = g;
                    c.data.g.hi = 2.5;
                    c.data.g.half_width = {0.5, 0.5};
                    c.data.f.kind = f;
                    c.data.f.value = 1.0;
                    c.grid.cells = {16, 32};
                    c.seed = rng();
                    c.data.q = 3.5;
                    validate(c);
                    const auto back = parse_config(json::parse(to_json(c).dump()));
                    CHECK(back == c);
                }
}

TEST_CASE("unknown keys and bad values are config errors") {
    auto expect_config_error = [](const json& j) {
        try {
            validate(parse_config(j));
            FAIL("accepted " << j.dump());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ConfigError);
        }
    };
    expect_config_error(json{{"experiment", "geometry-doubling"}, {"alpha", {1.5}}, {"colour", 1}});
    expect_config_error(json{{"experiment", "geometry-doubling"}, {"alpha", {1.5}}, {"grid", {{"cels", {4}}}}});
    expect_config_error(json{{"experiment", "nope"}, {"alpha", {1.5}}});
    expect_config_error(json{{"experiment", "geometry-doubling"}, {"alpha", {2.5}}});
    expect_config_error(json{{"experiment", "geometry-doubling"}, {"alpha", "1.5"}});
    expect_config_error(json{{"experiment", "geometry-doubling"}});
    expect_config_error(json{{"experiment", "geometry-doubling"}, {"alpha", {1.0, 1.0}}, {"grid", {{"cells", {8}}}}});
    // q <= max{2, beta} with f != 0.
    expect_config_error(json{{"experiment", "weak-harnack"},
                             {"alpha", {1.5, 0.5}},
                             {"data", {{"f", {{"kind", "constant"}, {"value", 1.0}}}, {"q", 2.5}}}});
    expect_config_error(
        json{{"experiment", "weak-harnack"}, {"alpha", {1.5, 0.5}}, {"domain", {{"theta", 1.5}, {"lambda", 2.0}}}});
    expect_config_error(json{{"experiment", "mc-exit-scaling"}, {"alpha", {1.0, 1.0}}, {"kernel", {{"variant", "isotropic"}, {"coefficient", {{"kind", "constant"}, {"value", 3.0}}}}}});
}

TEST_CASE("malformed files report the parse position") {
    const auto p = std::filesystem::temp_directory_path() / "anilap_bad.json";
    std::ofstream(p) << "{\n  \"experiment\": \"geometry-doubling\",\n  \"alpha\": [1.5,\n}";
    try {
        (void)load_config(p.string());
        FAIL("accepted malformed file");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("geometry doubling reports ratio 16") {
    const auto r = run_experiment(base("geometry-doubling"));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.measured.front().value == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(exit_status(r.verdict) == 0);
}

TEST_CASE("numeric failures become verdict error") {
    auto c = base("poincare");
    c.grid.cells = {2};  // rejected at validation: one entry per axis
    const auto r = run_experiment(c);
    CHECK(r.verdict == Verdict::Error);
    CHECK(exit_status(r.verdict) == 3);
    CHECK(r.reason.find("ConfigError") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
    const auto dir = std::filesystem::temp_directory_path() / "anilap_det";
    std::filesystem::remove_all(dir);
    for (const char* name : {"weak-tail", "mc-exit-scaling", "dirichlet-solve"}) {
        auto c = base(name);
        c.mc.paths = 2000;
        c.grid.cells = {16, 16};
        std::string first;
        for (unsigned jobs : {1u, 4u, 4u}) {
            set_jobs(jobs);
            const auto r = run_experiment(c);
            const auto out = dir / (std::string(name) + std::to_string(jobs));
            emit_report(r, out, manifest(c));
            const std::string text = slurp(out / "report.json");
            if (first.empty())
                first = text;
            else
                CHECK(text == first);
            CHECK(std::filesystem::exists(out / "manifest.json"));
            CHECK(std::filesystem::exists(out / "runtime.txt"));
            // The manifest alone reproduces the report.
            const auto again = run_experiment(parse_config(json::parse(slurp(out / "manifest.json"))["inputs"]));
            CHECK(dump_json(to_json(again)) + "\n" == text);
        }
        set_jobs(0);
    }
}

TEST_CASE("float formatting keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(NAN) == "nan");
    const json j = {{"x", 1.0 / 3}};
    CHECK(dump_json(j).find("0.33333333333333331") != std::string::npos);
    Curve c{"osc", {"n", "osc"}, {{0, 1.5}, {1, 0.25}}};
    CHECK(to_csv(c) == "n,osc\n0,1.5\n1,0.25\n");
}

TEST_CASE("empty measurement set yields verdict error") {
    ExperimentReport r;
    r.experiment = "x";
    const auto dir = std::filesystem::temp_directory_path() / "anilap_empty";
    emit_report(r, dir, json::object());
    const auto j = json::parse(slurp(dir / "report.json"));
    CHECK(j["verdict"] == "error");
}

TEST_CASE("unwritable output directory") {
    ExperimentReport r;
    CHECK_THROWS_AS(emit_report(r, "/proc/anilap/none", json::object()), Error);
}
