#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "rucmkt/json_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

std::string bin() { return RUCMKT_BIN; }

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path sandbox(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rucmkt_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

const fs::path& solved_artifacts() {
    static const fs::path dir = [] {
        const fs::path d = sandbox("solve");
        const std::string case_path = rucmkt::test::data_dir() + "/sixbus.json";
        REQUIRE(run("solve --case " + case_path + " --lambda 1 --budget 2 --out " +
                    d.string()) == 0);
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("cli: solve writes the artifact set and the Table-VII price row") {
    const fs::path& dir = solved_artifacts();
    for (const char* f :
         {"case.json", "commitment.json", "dispatch.json", "extreme_points.json",
          "duals.json", "prices.json", "reserves.json", "ledger.json",
          "trace.json", "summary.json", "lmp.csv", "ump_up.csv", "ump_down.csv",
          "run_meta.json"})
        CHECK(fs::exists(dir / f));

    const auto ump_up = rucmkt::read_matrix_csv(dir / "ump_up.csv");
    CHECK(std::abs(ump_up[0][20] - 14.87) <= 0.05);
    const auto lmp = rucmkt::read_matrix_csv(dir / "lmp.csv");
    CHECK(std::abs(lmp[3][20] - 43.71) <= 0.05);
}

TEST_CASE("cli: missing case file exits 2 and names the path") {
    CHECK(run("solve --case /nonexistent/nope.json --out /tmp/rucmkt_none") == 2);
}

TEST_CASE("cli: audit passes on fresh artifacts with the bundled portfolio") {
    const fs::path& dir = solved_artifacts();
    const std::string ftr = rucmkt::test::data_dir() + "/sixbus_ftr.json";
    CHECK(run("audit --artifacts " + dir.string() + " --ftr " + ftr) == 0);
    CHECK(fs::exists(dir / "audit.json"));
}

TEST_CASE("cli: tampered ledger fails the audit with exit 1") {
    const fs::path dir = sandbox("tamper");
    fs::copy(solved_artifacts(), dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
    auto ledger = rucmkt::load_json(dir / "ledger.json");
    for (auto& row : ledger["psi_usd"])
        for (auto& v : row) v = v.get<double>() * 0.5;  // halve the charges
    rucmkt::save_json(ledger, dir / "ledger.json");
    CHECK(run("audit --artifacts " + dir.string()) == 1);
}

TEST_CASE("cli: audit on an empty directory exits 2") {
    const fs::path dir = sandbox("emptydir");
    CHECK(run("audit --artifacts " + dir.string()) == 2);
}

TEST_CASE("cli: heatmap regenerates price CSVs from artifacts") {
    const fs::path out = sandbox("heat");
    CHECK(run("heatmap --artifacts " + solved_artifacts().string() + " --out " +
              out.string()) == 0);
    const auto ump_up = rucmkt::read_matrix_csv(out / "ump_up.csv");
    CHECK(ump_up.size() == 6);
    CHECK(ump_up[0].size() == 24);
    CHECK(std::abs(ump_up[0][20] - 14.87) <= 0.05);
    // bit-exact round trip through the repo's own reader
    const auto again = rucmkt::read_matrix_csv(solved_artifacts() / "ump_up.csv");
    CHECK(again == ump_up);
}

TEST_CASE("cli: heatmap without artifacts exits 2") {
    const fs::path dir = sandbox("heatless");
    CHECK(run("heatmap --artifacts " + dir.string()) == 2);
}

TEST_CASE("cli: identical runs produce byte-identical artifacts") {
    const fs::path a = sandbox("det_a");
    const fs::path b = sandbox("det_b");
    const std::string case_path = rucmkt::test::data_dir() + "/sixbus.json";
    REQUIRE(run("solve --case " + case_path + " --seed 7 --out " + a.string()) == 0);
    REQUIRE(run("solve --case " + case_path + " --seed 7 --out " + b.string()) == 0);
    for (const char* f : {"prices.json", "commitment.json", "dispatch.json",
                          "ledger.json", "extreme_points.json", "trace.json",
                          "lmp.csv", "ump_up.csv", "ump_down.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("cli: compare mode confirms the zonal reserve equivalence") {
    const fs::path dir = sandbox("compare");
    const std::string case_path = rucmkt::test::data_dir() + "/sixbus.json";
    CHECK(run("solve --case " + case_path +
              " --lambda 0.8 --budget 2 --mode compare --no-network --out " +
              dir.string()) == 0);
    const auto cmp = rucmkt::load_json(dir / "comparison.json");
    CHECK(cmp.at("ump_equals_reserve_price").get<bool>());
}
