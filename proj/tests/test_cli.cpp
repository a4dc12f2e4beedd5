#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "knzeta/cli.hpp"
#include "knzeta/errors.hpp"

using namespace knzeta;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path scratch_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("kn_zeta_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Four momenta in a plane: k1, k2, -k1, -k2 with k.k = 2 and k1.k2 = 2c.
nlohmann::json planar_momenta(double c) {
    const double r = std::sqrt(2.0);
    const double sn = std::sqrt(1 - c * c);
    auto vec = [](double x, double y) {
        std::vector<double> v(kSpacetimeDim, 0.0);
        v[1] = x;
        v[2] = y;
        return v;
    };
    return {{"momenta", {vec(r, 0), vec(r * c, r * sn), vec(-r, 0), vec(-r * c, -r * sn)}}};
}

std::string write_json(const std::filesystem::path &path, const nlohmann::json &j) {
    std::ofstream(path) << j.dump();
    return path.string();
}

} // namespace

TEST_CASE("usage errors and N range") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"compute"}).code == 2);
    const Run r = run({"compute", "--N", "3"});
    CHECK(r.code == 2);
    CHECK(r.err.find("NOutOfRange") != std::string::npos);
    CHECK(run({"compute", "--N", "9"}).code == 2);
    CHECK(run({"eval", "--N", "4", "--p", "4", "--s", "s_1_2=-1", "s_3_2=-1"}).code == 2);
    CHECK(run({"compute", "--N", "4", "--format", "xml"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("compute in text and JSON") {
    const Run t = run({"compute", "--N", "4"});
    CHECK(t.code == 0);
    CHECK(t.out.find("Z^(4)(s)") != std::string::npos);
    CHECK(t.out.find("1 - p^(1 + s_1_2 + s_3_2)") != std::string::npos);
    const Run j = run({"compute", "--N", "4", "--format", "json"});
    REQUIRE(j.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(j.out);
    CHECK(doc.at("form") == "fraction");
    CHECK(doc.at("den_text").size() == 3);
    const Run six = run({"compute", "--N", "6", "--format", "json"});
    REQUIRE(six.code == 0);
    CHECK(nlohmann::json::parse(six.out).at("form") == "sum");
}

TEST_CASE("eval values and warnings") {
    const Run ok = run({"eval", "--N", "4", "--p", "2", "--p", "3", "--s", "s_1_2=-0.6", "s_3_2=-0.6", "--format",
                        "json"});
    REQUIRE(ok.code == 0);
    CHECK(ok.err.empty());
    const nlohmann::json doc = nlohmann::json::parse(ok.out);
    CHECK(doc.at("values").size() == 2);
    const Run pos = run({"eval", "--N", "4", "--p", "2", "--s", "s_1_2=0.5", "s_3_2=0.25"});
    CHECK(pos.code == 0);
    CHECK(pos.err.find("integral diverges") != std::string::npos);
    const Run viol = run({"eval", "--N", "4", "--p", "2", "--s", "s_1_2=-0.2", "s_3_2=-0.3"});
    CHECK(viol.code == 0);
    CHECK(viol.err.find("violates") != std::string::npos);
    const Run missing = run({"eval", "--N", "4", "--p", "2", "--s", "s_1_2=-0.6"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("MissingAssignment") != std::string::npos);
    const Run wrong = run({"eval", "--N", "4", "--p", "2", "--s", "s_1_2=-0.6", "s_3_2=-0.6", "s_1_4=1"});
    CHECK(wrong.code == 2);
}

TEST_CASE("momenta input") {
    const auto dir = scratch_dir("momenta");
    const std::string good = write_json(dir / "good.json", planar_momenta(-0.3));
    const Run k = run({"eval", "--N", "4", "--p", "3", "--momenta", good, "--format", "json"});
    REQUIRE(k.code == 0);
    const Run s = run({"eval", "--N", "4", "--p", "3", "--s", "s_1_2=-0.6", "s_2_3=0.6", "--format", "json"});
    REQUIRE(s.code == 0);
    const auto kv = nlohmann::json::parse(k.out).at("values")[0].at("value");
    const auto sv = nlohmann::json::parse(s.out).at("values")[0].at("value");
    CHECK(std::abs(kv[0].get<double>() - sv[0].get<double>()) <= 1e-9 * std::max(1.0, std::abs(sv[0].get<double>())));
    CHECK(std::abs(kv[1].get<double>() - sv[1].get<double>()) <= 1e-9);

    nlohmann::json off = planar_momenta(-0.3);
    off["momenta"][0][1] = 1.5;
    const Run shell = run({"eval", "--N", "4", "--p", "3", "--momenta", write_json(dir / "shell.json", off)});
    CHECK(shell.code == 2);
    CHECK(shell.err.find("KinematicsViolation") != std::string::npos);
    const Run count = run({"eval", "--N", "5", "--p", "3", "--momenta", good});
    CHECK(count.code == 2);
    CHECK(count.err.find("KinematicsViolation") != std::string::npos);
    CHECK(run({"eval", "--N", "4", "--p", "3", "--momenta", (dir / "absent.json").string()}).code == 2);
}

TEST_CASE("poles and domain") {
    const Run p = run({"poles", "--N", "4", "--format", "json"});
    REQUIRE(p.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(p.out);
    CHECK(doc.at("count") == 3);
    for (const auto &h : doc.at("hyperplanes")) {
        CHECK(!h.at("shape").is_null());
    }
    const Run w = run({"domain", "--N", "5"});
    CHECK(w.code == 0);
    CHECK(w.out.find("all conditions pass") != std::string::npos);
    const Run z = run({"domain", "--N", "4", "--s", "s_1_2=0", "s_3_2=0"});
    CHECK(z.code == 0);
    CHECK(z.out.find("C1': FAIL") != std::string::npos);
}

TEST_CASE("verify exit codes") {
    const Run ok = run({"verify", "--N", "4", "--p", "3", "--samples", "20000"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("checks passed") != std::string::npos);
    const Run bad = run({"verify", "--N", "4", "--p", "3", "--samples", "20000", "--inject-fault"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("memo directory round trip") {
    const auto dir = scratch_dir("memo");
    REQUIRE(setenv("KN_ZETA_MEMO_DIR", dir.c_str(), 1) == 0);
    const Run first = run({"compute", "--N", "5"});
    REQUIRE(first.code == 0);
    const auto file = dir / "memo_N5.json";
    CHECK(std::filesystem::exists(file));
    CHECK_FALSE(std::filesystem::exists(dir / "memo_N5.json.tmp"));
    const Run second = run({"compute", "--N", "5"});
    CHECK(second.out == first.out);
    std::ofstream(file) << "{ not json";
    CHECK(run({"compute", "--N", "5"}).code == 2);
    unsetenv("KN_ZETA_MEMO_DIR");
}

TEST_CASE("assignment flag parsing") {
    auto [v, z] = parse_assignment_flag("s_1_2=-0.5");
    CHECK(v == SVar::make(1, 2));
    CHECK(z == Complex(-0.5, 0));
    std::tie(v, z) = parse_assignment_flag("s_2_3=0.25-1.5i");
    CHECK(v == SVar::make(2, 3));
    CHECK(z == Complex(0.25, -1.5));
    std::tie(v, z) = parse_assignment_flag("s_2_3=2i");
    CHECK(z == Complex(0, 2));
    CHECK_THROWS_AS(parse_assignment_flag("s_1_2"), Error);
    CHECK_THROWS_AS(parse_assignment_flag("s_1_2=abc"), Error);
    CHECK_THROWS_AS(parse_assignment_flag("s_1_2=1+2"), Error);
}
