#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <gtakagi/gtakagi.hpp>

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(GTAKAGI_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    int status = pclose(p);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

} // namespace

TEST_CASE("digits command fixtures") {
    auto r = run_cli("digits --beta 2 --x 1/3 --depth 8");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["digits"] == "01010101");
    CHECK(j["certified"] == true);
    CHECK(j["simple"] == "no");

    auto g = run_cli("digits --beta golden --x 1 --depth 4");
    REQUIRE(g.exit_code == 0);
    auto jg = parse(g.out);
    CHECK(jg["digits"] == "1100");
    CHECK(jg["certified"] == true);
    CHECK(jg["simple"] == "yes");
}

TEST_CASE("digit-list input round-trips through synthesize") {
    auto r = run_cli("digits --beta golden --x digits:1010 --depth 6");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["digits"] == "101000");
    CHECK(j["source"] == "user-supplied");
    // non-greedy digit lists are rejected with the domain-error exit code
    auto bad = run_cli("digits --beta golden --x digits:011 --depth 4");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("domain errors exit with the documented code and an error object") {
    auto r = run_cli("digits --beta 2.5 --x 0.5 --depth 4");
    CHECK(r.exit_code == 2);
    auto j = parse(r.out);
    CHECK(j["error"]["code"] == 2);

    auto p = run_cli("digits --beta 1.7 --x 0.5 --depth 4 --precision-bits 48");
    CHECK(p.exit_code == 2);
}

TEST_CASE("eval command cross-checks the classical oracle at beta=2") {
    auto r = run_cli("eval --beta 2 --x 1/3 --depth 100");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    std::string v = j["value_def"];
    CHECK(v.substr(0, 8) == "6.666666");
    CHECK(j["consistent"] == true);
    CHECK(j["cross_check_ok"] == true);

    auto z = run_cli("eval --beta golden --x 0 --depth 50");
    REQUIRE(z.exit_code == 0);
    CHECK(parse(z.out)["value_def"] == "0");
}

TEST_CASE("eval reaches tiny radii at depth 200") {
    auto r = run_cli("eval --beta golden --x 0.25 --depth 200");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    std::string rad = j["value_def_radius"];
    // radius string like d.dddde-NN with NN >= 20
    auto epos = rad.rfind("e-");
    REQUIRE(epos != std::string::npos);
    CHECK(std::stoi(rad.substr(epos + 2)) >= 20);
}

TEST_CASE("measure command emits the golden closed forms") {
    auto r = run_cli("measure --beta golden --k 16");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    std::string f = j["F"];
    std::string m = j["M"];
    CHECK(f.substr(0, 12) == "1.3819660112");
    CHECK(m.substr(0, 12) == "2.7639320225");
    CHECK(j["finite_orbit"] == true);

    auto c = run_cli("measure --beta golden --k 16 --format csv");
    REQUIRE(c.exit_code == 0);
    CHECK(c.out.rfind("beta,K,F,F_radius,M,M_radius\n", 0) == 0);
}

TEST_CASE("witness command: constant quotient column at beta=2, x=1/3") {
    auto r = run_cli("witness --beta 2 --x 1/3 --n-max 10 --format csv");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "N,l_N,x_N,quotient_direct,quotient_formula,statistic");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (rows <= 10) {
            auto c1 = line.find(',');
            auto c2 = line.find(',', c1 + 1);
            auto c3 = line.find(',', c2 + 1);
            auto c4 = line.find(',', c3 + 1);
            CHECK(line.substr(c3 + 1, c4 - c3 - 1) == "2e0");
        }
    }
    CHECK(rows == 11);
}

TEST_CASE("outputs are byte-identical across reruns and worker counts") {
    std::string base = "holder --beta golden --x 0.390625 --alpha 0.5 --samples 64 "
                       "--delta-min 1e-7 --delta-max 1e-2 --seed 11";
    auto a = run_cli(base + " --workers 1");
    auto b = run_cli(base + " --workers 4");
    auto c = run_cli(base + " --workers 1");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);

    std::string clt = "clt --beta 1.8 --n 500 --m 200 --seed 3 --k 32";
    auto d = run_cli(clt + " --workers 1");
    auto e = run_cli(clt + " --workers 3");
    REQUIRE(d.exit_code == 0);
    CHECK(d.out == e.out);
}

TEST_CASE("curve emits the requested grid") {
    auto r = run_cli("curve --beta 2 --points 17 --depth 64 --format csv");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,value,radius,depth");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 17);
}

TEST_CASE("lemma2 and lemma3 commands") {
    auto r = run_cli("lemma2 --beta 2 --x 1/3 --y 1/4");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["N"] == 4);
    CHECK(j["holds"] == true);

    auto same = run_cli("lemma2 --beta 2 --x 1/3 --y 1/3");
    CHECK(same.exit_code == 6);

    auto csv = run_cli("lemma2 --beta 2 --x 1/3 --y 1/4 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("N,side,lhs,lhs_radius,rhs,rhs_radius,holds,certified\n4,-1,", 0) == 0);

    auto l3 = run_cli("lemma3 --beta golden --x 0.71875 --n-max 200");
    REQUIRE(l3.exit_code == 0);
    auto j3 = parse(l3.out);
    CHECK(j3["rows"].size() == 200);
}

TEST_CASE("curve values at beta=2 match the classical function within radii") {
    auto r = run_cli("curve --beta 2 --points 65 --depth 80 --format csv");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line); // header
    int checked = 0;
    int idx = 0;
    while (std::getline(lines, line)) {
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        auto c3 = line.find(',', c2 + 1);
        double value = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        double radius = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        mpq_class x(idx, 64);
        x.canonicalize();
        gtakagi::Enclosure cls =
            gtakagi::takagi_classical(gtakagi::Enclosure::from_rational(x, 192), 80);
        double delta = std::fabs(value - cls.to_double());
        CHECK(delta <= radius + cls.radius().to_double() + 1e-15);
        ++idx;
        ++checked;
    }
    CHECK(checked == 65);
}

TEST_CASE("reports write to --out and stdout identically") {
    std::string tmp = "/tmp/gtakagi_out_test.json";
    auto direct = run_cli("measure --beta golden --k 12");
    auto filed = run_cli("measure --beta golden --k 12 --out " + tmp);
    REQUIRE(filed.exit_code == 0);
    CHECK(filed.out.empty());
    std::ifstream f(tmp);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == direct.out);
}

TEST_CASE("witness json carries radii for every certified column") {
    auto r = run_cli("witness --beta golden --x 0.40625 --n-max 6");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    REQUIRE(j["rows"].size() == 7);
    CHECK(j["identity_ok"] == true);
    CHECK(j["rows"][0].contains("quotient_direct_radius"));
    CHECK(j["rows"][0].contains("statistic_radius"));
}

TEST_CASE("clt command reports the fast-mode law at beta=2") {
    auto r = run_cli("clt --beta 2 --n 2000 --m 500 --seed 1 --workers 2");
    REQUIRE(r.exit_code == 0);
    auto j = parse(r.out);
    CHECK(j["mode"] == "fast");
    double v_hat = std::stod(j["v_hat"].get<std::string>());
    CHECK(v_hat > 0.4);
    CHECK(v_hat < 0.6);
}
