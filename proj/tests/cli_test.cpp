#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef BIVEXP_CLI_PATH
#error "BIVEXP_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string base = "cli_test_tmp_" + std::to_string(counter++);
    const std::string out = base + ".out", err = base + ".err";
    const std::string cmd =
        std::string(BIVEXP_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return r;
}

/// Parses one CSV cell (0-based row below header, 0-based column).
std::string csv_cell(const std::string& text, int row, int col) {
    std::istringstream in(text);
    std::string line;
    for (int r = -1; r < row; ++r)
        if (!std::getline(in, line)) return {};
    if (!std::getline(in, line)) return {};
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c <= col; ++c)
        if (!std::getline(ls, cell, ',')) return {};
    return cell;
}

}  // namespace

TEST_CASE("cli: riccati tanh run") {
    const RunResult r =
        run_cli("riccati --f \"-1\" --g 0 --h 1 --y0 0 --range -2:2:1000 --tol 1e-10");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("x,re,im,is_infinity,chordal_step\n", 0) == 0);
    // row at x = 1 is node 750
    CHECK_THAT(std::stod(csv_cell(r.out, 750, 1)),
               Catch::Matchers::WithinAbs(std::tanh(1.0), 1e-6));
}

TEST_CASE("cli: deterministic byte-identical output") {
    const std::string args =
        "riccati --f \"cos(x)\" --g 0 --h \"cos(x)\" --y0 0 --range -2:2:500 "
        "--tol 1e-10 --format json";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli: usage errors exit 1") {
    CHECK(run_cli("frobnicate --range -1:1:10").exit_code == 1);
    CHECK(run_cli("riccati --f 1 --range -1:1:0").exit_code == 1);
    CHECK(run_cli("riccati --f \"sin(\" --g 0 --h 0 --y0 0 --range -1:1:10").exit_code == 1);
    CHECK(run_cli("riccati --f 1 --g 0 --h 0 --y0 0 --range 1:2:10").exit_code == 1);
    CHECK(run_cli("riccati --f 1 --g 0 --h 0 --y0 0").exit_code == 1);  // missing range
}

TEST_CASE("cli: solver rejection exits 2") {
    // coarse grid + huge coefficients exceed the series term cap
    const RunResult r =
        run_cli("riccati --f 500 --g 0 --h 500 --y0 0 --range -2:2:10 --tol 1e-10");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("cli: cell count auto-adjusts so 0 lands on a node") {
    const RunResult r = run_cli("riccati --f 0 --g 0 --h 0 --y0 0 --range -1:2:10");
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("adjusted cell count") != std::string::npos);
    // 12 cells is the nearest count upward with a node at 0
    CHECK(r.out.find("\n0,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("cli: airy values") {
    const RunResult r = run_cli("airy --range -1:1:200 --tol 1e-12");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("x,Ai,Bi,u1,u2\n", 0) == 0);
    CHECK_THAT(std::stod(csv_cell(r.out, 100, 1)),
               Catch::Matchers::WithinAbs(0.35502805388781723926, 1e-10));
    CHECK_THAT(std::stod(csv_cell(r.out, 100, 2)),
               Catch::Matchers::WithinAbs(0.61492662744600073515, 1e-10));
}

TEST_CASE("cli: miura reconstruction matches q") {
    const RunResult r = run_cli("miura --q 1 --y0 0 --range -2:2:1000 --tol 1e-10");
    REQUIRE(r.exit_code == 0);
    // interior row: q and q_reconstructed agree
    const double q = std::stod(csv_cell(r.out, 500, 4));
    const double qr = std::stod(csv_cell(r.out, 500, 5));
    CHECK_THAT(qr, Catch::Matchers::WithinAbs(q, 1e-5));
    CHECK(run_cli("miura --q 1 --y0 0 --range -2:2:1000 --check-recon 1e-4").exit_code == 0);
    CHECK(run_cli("miura --q 1 --y0 0 --range -2:2:1000 --check-recon 1e-14").exit_code == 3);
}

TEST_CASE("cli: singular curve of the shear path samples -1/x") {
    const RunResult r =
        run_cli("singular-curve --f \"-1\" --g 0 --h 0 --range -2:2:100 --tol 1e-10");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("x,re,im\n", 0) == 0);
    // first row is x = -2 with value 0.5
    CHECK_THAT(std::stod(csv_cell(r.out, 0, 1)), Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("cli: oracle-compare on the Abel case") {
    const RunResult r = run_cli(
        "oracle-compare --f \"cos(x)\" --g 0 --h \"cos(x)\" --y0 0 --range 0:1:2000 "
        "--tol 1e-10 --format json --max-gap 1e-6");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "agreement");
    CHECK(j["max_chordal_gap"].get<double>() < 1e-6);
}

TEST_CASE("cli: json format embeds metadata and diagnostics") {
    const RunResult r =
        run_cli("bivexp --f 1 --g 1 --range 0:1:100 --tol 1e-12 --format json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["meta"]["command"] == "bivexp");
    CHECK(j["meta"]["terms_used"].get<int>() > 5);
    CHECK(j["meta"]["tail_bound"].get<double>() < 1e-12);
    CHECK(j["meta"].contains("timestamp_ms") == false);
    CHECK(j["E"]["re"].size() == 101);
}

TEST_CASE("cli: output file writing") {
    const std::string path = "cli_test_out.csv";
    const RunResult r =
        run_cli("linear --alpha 0 --beta 1 --y0 1 --yp0 0 --range 0:1:100 --out " + path);
    REQUIRE(r.exit_code == 0);
    const std::string content = slurp(path);
    CHECK(content.rfind("x,re_y,im_y,re_yp,im_yp\n", 0) == 0);
    std::remove(path.c_str());
}
