#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ctfl/cli.hpp"
#include "ctfl/io.hpp"

using namespace ctfl;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

template <class Row>
std::vector<Row> rows_of(const std::string& csv) {
    std::istringstream in(csv);
    return from_table<Row>(read_csv(in));
}

}  // namespace

TEST_CASE("eigs on a single interval") {
    const auto r = run({"eigs", "--base", "3", "--alphabet", "0,2", "--iterate", "0", "--rho", "1"});
    REQUIRE(r.code == 0);
    const auto rows = rows_of<EigenvalueResult>(r.out);
    REQUIRE(!rows.empty());
    CHECK(rows[0].value == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("eigs --kmax auto ends below the tail threshold") {
    const auto r = run({"eigs", "--base", "5", "--alphabet", "0,2,3", "--iterate", "3", "--rho", "40", "--kmax",
                        "auto"});
    REQUIRE(r.code == 0);
    const auto rows = rows_of<EigenvalueResult>(r.out);
    double top = 0;
    for (const auto& e : rows) top = std::max(top, e.value);
    CHECK(rows.back().k > 40);
    CHECK(rows.back().value < std::max(1e-12, 1e-9 * top));

    const auto fixed = run({"eigs", "--base", "5", "--alphabet", "0,2,3", "--iterate", "3", "--rho", "40", "--kmax",
                            "4"});
    CHECK(rows_of<EigenvalueResult>(fixed.out).size() == 5);
}

TEST_CASE("validation and cap exit codes") {
    CHECK(run({"eigs", "--base", "3", "--alphabet", "0,3", "--iterate", "1", "--rho", "1"}).code == 2);
    CHECK(run({"eigs", "--base", "3", "--alphabet", "0,2", "--kmax", "many"}).code == 2);
    CHECK(run({"eigs", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"sweep", "--experiment", "nope"}).code == 2);
    CHECK(run({"sweep", "--experiment", "reverse", "--size", "3"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    const auto big = run({"eigs", "--base", "3", "--alphabet", "0,2", "--iterate", "30", "--rho", "1"});
    CHECK(big.code == 3);
    CHECK(big.err.find("lambda0") != std::string::npos);
}

TEST_CASE("cap from the environment") {
    ::setenv("CTFL_MAX_INTERVALS", "10", 1);
    const auto r = run({"norm", "--base", "3", "--alphabet", "0,2", "--iterate", "4", "--rho", "9"});
    ::unsetenv("CTFL_MAX_INTERVALS");
    CHECK(r.code == 3);
    CHECK(run({"norm", "--base", "3", "--alphabet", "0,2", "--iterate", "4", "--rho", "9"}).code == 0);
}

TEST_CASE("cantor-fn on the first mid-third iterate") {
    const auto r = run({"cantor-fn", "--base", "3", "--alphabet", "0,2", "--iterate", "1", "--x", "0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "x,F\n0.5,0.5\n");
}

TEST_CASE("norm json metadata") {
    const auto r = run({"norm", "--base", "5", "--alphabet", "0,1,2", "--iterate", "2", "--rho", "5", "--format",
                        "json", "--tol", "1e-8"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    const auto& m = doc["metadata"];
    for (const char* key : {"spec", "schedule", "gamma", "seed", "tolerances", "cap", "h_equivalent", "version"})
        CHECK(m.contains(key));
    CHECK(m["tolerances"]["rel_tol"] == 1e-8);
    CHECK(m["h_equivalent"] == doctest::Approx(1.0 / 25.0));
    CHECK(doc["rows"][0]["argmax_k"] == 0);
}

TEST_CASE("levels file drives indexed problems") {
    const auto path = std::filesystem::temp_directory_path() / "ctfl_cli_levels.txt";
    {
        std::ofstream f(path);
        f << "# coarsest first\n3;0,2\n5;0..2\n";
    }
    const auto r = run({"eigs", "--levels", path.string(), "--rho", "15", "--kmax", "0"});
    REQUIRE(r.code == 0);
    const auto rows = rows_of<EigenvalueResult>(r.out);
    // (1 - e^{-15}) A_{3,{0,2}}(15) A_{5,{0,1,2}}(5)
    const double a1 = (1 - std::exp(-5.0) + std::exp(-10.0) - std::exp(-15.0)) / (1 - std::exp(-15.0));
    const double a2 = (1 - std::exp(-3.0)) / (1 - std::exp(-5.0));
    const double want = (1 - std::exp(-15.0)) * a1 * a2;
    CHECK(rows[0].value == doctest::Approx(want).epsilon(1e-13));
    CHECK(run({"eigs", "--levels", path.string(), "--base", "3"}).code == 2);
    CHECK(run({"eigs", "--levels", "/nonexistent/levels.txt"}).code == 2);
    std::filesystem::remove(path);
}

TEST_CASE("sweep outputs parse back into their rows") {
    const auto rev = run({"sweep", "--experiment", "reverse", "--base", "3", "--size", "2", "--nmax", "10"});
    REQUIRE(rev.code == 0);
    const auto rows = rows_of<RatioRow>(rev.out);
    REQUIRE(rows.size() == 11);
    for (const auto& r : rows) CHECK(r.ratio > 0);
    for (int n = 3; n <= 10; ++n) CHECK(rows[n].ratio < rows[n - 1].ratio);

    const auto precise = run({"sweep", "--experiment", "precise", "--base", "3", "--alphabet", "0,2", "--nmax", "4"});
    REQUIRE(precise.code == 0);
    CHECK(rows_of<SweepRow>(precise.out).size() == 5);

    const auto decay = run({"sweep", "--experiment", "indexed-decay", "--nmax", "12", "--seed", "7"});
    REQUIRE(decay.code == 0);
    CHECK(decay.err.find("seed=7") != std::string::npos);
    CHECK(rows_of<IndexedDecayRow>(decay.out).back().fitted_beta > 0);

    const auto cex = run({"sweep", "--experiment", "indexed-counterexample", "--base", "4", "--size", "2"});
    REQUIRE(cex.code == 0);
    CHECK(rows_of<IndexedCounterexampleRow>(cex.out).back().level_base == 65536);

    const auto pm = run({"sweep", "--experiment", "positive-measure", "--nmax", "6", "--rho", "3"});
    REQUIRE(pm.code == 0);
    CHECK(rows_of<PositiveMeasureRow>(pm.out).size() == 7);
}

TEST_CASE("output is byte-identical across runs and --out matches stdout") {
    const std::vector<std::string> args{"sweep", "--experiment", "indexed-decay", "--format", "json", "--seed", "3"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.out == b.out);

    const auto path = std::filesystem::temp_directory_path() / "ctfl_cli_out.json";
    auto with_out = args;
    with_out.insert(with_out.end(), {"--out", path.string()});
    REQUIRE(run(with_out).code == 0);
    std::ifstream f(path);
    const std::string file((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(file == a.out);
    std::filesystem::remove(path);
}

TEST_CASE("verify is deterministic") {
    const std::vector<std::string> args{"verify", "--suite", "all", "--seed", "42", "--samples", "40"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("FAIL") == std::string::npos);
    CHECK(run({"verify", "--suite", "nope"}).code == 2);
}
