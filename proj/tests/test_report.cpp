#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "wavecov/report.hpp"

using namespace wavecov;
using Catch::Approx;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}
}  // namespace

TEST_CASE("config round-trips through its canonical text form", "[report]") {
    RunConfig c;
    c.set("kernel", "fractional");
    c.set("h1", "0.8");
    c.set("h2", "0.8");
    c.set("h3", "0.8");
    c.set("seed", "42");
    c.set_double("t", 0.1 + 0.2);  // 17 significant digits keep the exact double

    const RunConfig back = RunConfig::parse_string(c.canonical());
    CHECK(back == c);
    CHECK(back.canonical() == c.canonical());
    CHECK(back.hash() == c.hash());
    CHECK(back.get_double("t", 0.0) == 0.1 + 0.2);

    // comments and blank lines are tolerated; malformed lines are not
    const RunConfig file = RunConfig::parse_string("# comment\n\nkernel=riesz\nbeta=1.0\n");
    CHECK(file.get("kernel") == "riesz");
    CHECK_THROWS_AS(RunConfig::parse_string("kernel riesz\n"), std::invalid_argument);
}

TEST_CASE("format_double survives a parse round trip", "[report]") {
    for (double v : {1.0 / 3.0, 0.1 + 0.2, 2.0 * pi, 1e-300, 123456.789012345678}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("kernel and quadrature views of the config", "[report]") {
    RunConfig c;
    c.set("kernel", "bessel");
    c.set("alpha", "2.5");
    const KernelSpec k = c.make_kernel();
    CHECK(k.family() == KernelFamily::Bessel);
    CHECK(k.alpha() == 2.5);

    c.set("kernel", "nope");
    CHECK_THROWS_AS(c.make_kernel(), std::invalid_argument);

    RunConfig q;
    q.set("radial_nodes", "128");
    q.set("tolerance", "1e-5");
    const QuadratureSpec spec = q.make_quadrature();
    CHECK(spec.radial_nodes == 128);
    CHECK(spec.tolerance == 1e-5);
}

TEST_CASE("lag grids parse from lists and dyadic ranges", "[report]") {
    const std::vector<double> a = RunConfig::parse_lags("0.01,0.02,0.04");
    REQUIRE(a.size() == 3);
    CHECK(a[1] == 0.02);
    const std::vector<double> b = RunConfig::parse_lags("2^-9..2^-3");
    REQUIRE(b.size() == 7);
    CHECK(b.front() == Approx(std::pow(2.0, -9)));
    CHECK(b.back() == Approx(std::pow(2.0, -3)));
    CHECK_THROWS_AS(RunConfig::parse_lags("2^x..2^y"), std::invalid_argument);
    CHECK(RunConfig::parse_lags("").empty());
}

TEST_CASE("field sample binary export round-trips", "[report]") {
    FieldSample s;
    s.times = {0.5, 1.0};
    s.points = {{0, 0, 0}, {0.25, 0.5, -0.125}, {1, 1, 1}};
    s.n_real = 4;
    s.seed = 987654321ULL;
    s.mode_count = 17;
    s.values.resize(4 * 2 * 3);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = std::sin(0.37 * double(i));

    const std::string path = (std::filesystem::temp_directory_path() / "wavecov_fs_test.bin").string();
    write_field_sample(path, s);
    const FieldSample r = read_field_sample(path);
    CHECK(r.seed == s.seed);
    CHECK(r.mode_count == s.mode_count);
    REQUIRE(r.times == s.times);
    REQUIRE(r.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(r.values[i] == s.values[i]);
    for (std::size_t p = 0; p < s.points.size(); ++p) {
        CHECK(r.points[p].x1 == s.points[p].x1);
        CHECK(r.points[p].x2 == s.points[p].x2);
        CHECK(r.points[p].x3 == s.points[p].x3);
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv output is byte-stable across writes", "[report]") {
    namespace fs = std::filesystem;
    const std::string p1 = (fs::temp_directory_path() / "wavecov_csv_a.csv").string();
    const std::string p2 = (fs::temp_directory_path() / "wavecov_csv_b.csv").string();
    for (const std::string& p : {p1, p2}) {
        CsvWriter w(p);
        w.header({"lag", "value"});
        w.row({0.001953125, 1.0 / 3.0});
        w.row({0.00390625, 2.0 / 3.0});
    }
    CHECK(slurp(p1) == slurp(p2));
    CHECK(slurp(p1).find("0.33333333333333331") != std::string::npos);
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("report envelope embeds config, hash, and seed", "[report]") {
    RunConfig c;
    c.set("kernel", "riesz");
    c.set("beta", "1.0");
    c.set("seed", "7");
    const json j = report_envelope("check", c);
    CHECK(j["command"] == "check");
    CHECK(j["config"]["beta"] == "1.0");
    CHECK(j["seed"] == 7);
    char expect[32];
    std::snprintf(expect, sizeof(expect), "%016llx", static_cast<unsigned long long>(c.hash()));
    CHECK(j["config_hash"] == expect);
    // reconstructing the config from the embedded entries reproduces the hash
    RunConfig back;
    for (const auto& [k, v] : j["config"].items()) back.set(k, v.get<std::string>());
    CHECK(back.hash() == c.hash());
}
