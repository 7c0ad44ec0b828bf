#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "frustra/frustra.hpp"

namespace fs = std::filesystem;

namespace {

// The binary under test; ctest exports FRUSTRA_CLI as $<TARGET_FILE:frustra_cli>.
std::string cli_path() {
    const char* env = std::getenv("FRUSTRA_CLI");
    return env ? env : "";
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& extra_env = "") {
    static int counter = 0;
    const fs::path out_file =
        fs::temp_directory_path() / ("frustra_cli_out_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        extra_env + cli_path() + " " + args + " > " + out_file.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WEXITSTATUS(raw);
    std::ifstream f(out_file);
    std::ostringstream os;
    os << f.rdbuf();
    res.out = os.str();
    fs::remove(out_file);
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("cli binary is exported to the test environment") {
    REQUIRE_FALSE(cli_path().empty());
    REQUIRE(fs::exists(cli_path()));
}

TEST_CASE("gen writes the documented format deterministically") {
    const fs::path dir = fs::temp_directory_path() / "frustra_cli_gen";
    fs::create_directories(dir);
    const fs::path a = dir / "a.inst";
    const fs::path b = dir / "b.inst";
    CHECK(run("gen --n 2 --k 1 --seed 7 --out " + a.string()).exit_code == 0);
    CHECK(run("gen --n 2 --k 1 --seed 7 --out " + b.string()).exit_code == 0);
    const std::string text = slurp(a);
    CHECK(text == slurp(b)); // byte-identical
    long e_lines = 0;
    std::istringstream is(text);
    std::string line;
    bool header_ok = false;
    while (std::getline(is, line)) {
        if (line.rfind("E ", 0) == 0) ++e_lines;
        if (line.rfind("frustra-instance v1 n=2 k=1 seed=7", 0) == 0) header_ok = true;
    }
    CHECK(e_lines == 22);
    CHECK(header_ok);
    fs::remove_all(dir);
}

TEST_CASE("planted gen output is isolated") {
    const fs::path file = fs::temp_directory_path() / "frustra_cli_planted.inst";
    REQUIRE(run("gen --n 3 --k 2 --seed 5 --mode planted --out " + file.string()).exit_code ==
            0);
    std::ifstream f(file);
    const frustra::Instance inst = frustra::deserialize(f);
    REQUIRE(inst.couplings.has_value());
    CHECK(frustra::is_isolated(inst.lattice(), *inst.couplings));
    CHECK(inst.mode == frustra::InstanceMode::Planted);
    fs::remove(file);
}

TEST_CASE("FRUSTRA_SEED overrides --seed") {
    const fs::path dir = fs::temp_directory_path() / "frustra_cli_env";
    fs::create_directories(dir);
    const fs::path a = dir / "a.inst";
    const fs::path b = dir / "b.inst";
    REQUIRE(run("gen --n 1 --k 1 --seed 1 --out " + a.string(),
                "FRUSTRA_SEED=99 ").exit_code == 0);
    REQUIRE(run("gen --n 1 --k 1 --seed 99 --out " + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    fs::remove_all(dir);
}

TEST_CASE("solve reports events and the oracle check") {
    const fs::path dir = fs::temp_directory_path() / "frustra_cli_solve";
    fs::create_directories(dir);

    SUBCASE("all-positive instance: no events, empty DIS") {
        // Hand-built all-positive instance file.
        const frustra::StripLattice L(2, 1);
        frustra::Instance inst;
        inst.n = 2;
        inst.k = 1;
        inst.seed = 0;
        inst.mode = frustra::InstanceMode::Signed;
        frustra::CouplingAssignment J = frustra::sample_couplings(L, 123);
        for (double& v : J.values) v = std::fabs(v) + 1e-6;
        inst.couplings = J;
        inst.weights = frustra::weights_from_couplings(J);
        inst.frustration = {};
        const fs::path file = dir / "pos.inst";
        std::ofstream f(file);
        frustra::serialize(inst, f);
        f.close();

        const RunResult primal = run("solve " + file.string() + " --event primal --radius 1");
        CHECK(primal.exit_code == 0);
        CHECK(primal.out.find("A=false") != std::string::npos);
        CHECK(primal.out.find("dis_weight=0") != std::string::npos);
        const RunResult dual = run("solve " + file.string() + " --event dual --radius 0.4");
        CHECK(dual.exit_code == 0);
        CHECK(dual.out.find("D=false") != std::string::npos);
    }

    SUBCASE("oracle-sized instance with --check-oracle says MATCH") {
        const fs::path file = dir / "small.inst";
        REQUIRE(run("gen --n 2 --k 1 --seed 11 --out " + file.string()).exit_code == 0);
        const RunResult res =
            run("solve " + file.string() + " --event primal --check-oracle --radius 1");
        CHECK(res.exit_code == 0);
        CHECK(res.out.find("oracle: MATCH") != std::string::npos);
        // C(1,1) in dual mode fits the T-join oracle too.
        const fs::path tiny = dir / "tiny.inst";
        REQUIRE(run("gen --n 1 --k 1 --seed 4 --mode dual --out " + tiny.string()).exit_code ==
                0);
        const RunResult dual =
            run("solve " + tiny.string() + " --event dual --check-oracle --radius 1");
        CHECK(dual.exit_code == 0);
        CHECK(dual.out.find("oracle: MATCH") != std::string::npos);
    }

    SUBCASE("corrupted file exits 1") {
        const fs::path file = dir / "corrupt.inst";
        std::ofstream f(file);
        f << "frustra-instance v1 n=2 k=1 seed=7 mode=signed\nE garbage\n";
        f.close();
        CHECK(run("solve " + file.string()).exit_code == 1);
    }

    SUBCASE("witness emission") {
        const fs::path file = dir / "w.inst";
        const fs::path wit = dir / "w.jsonl";
        REQUIRE(run("gen --n 2 --k 2 --seed 3 --mode dual --out " + file.string()).exit_code ==
                0);
        REQUIRE(run("solve " + file.string() + " --event dual --radius 1 --emit-path " +
                    wit.string())
                    .exit_code == 0);
        CHECK(slurp(wit).find("\"path\"") != std::string::npos);
    }

    fs::remove_all(dir);
}

TEST_CASE("verify subcommand") {
    CHECK(run("verify lattice").exit_code == 0);
    const RunResult t = run("verify tjoin --seeds 50");
    CHECK(t.exit_code == 0);
    CHECK(t.out.find("PASS") != std::string::npos);
    CHECK(run("verify bogus").exit_code == 1);
}

TEST_CASE("estimate: config handling and reproducible artifacts") {
    const fs::path dir = fs::temp_directory_path() / "frustra_cli_estimate";
    fs::remove_all(dir);
    fs::create_directories(dir);

    SUBCASE("missing config file exits 1") {
        CHECK(run("estimate /nonexistent.cfg").exit_code == 1);
    }
    SUBCASE("k range produces one CSV row per (event, k) and reruns are identical") {
        const fs::path cfg = dir / "exp.cfg";
        {
            std::ofstream f(cfg);
            f << "# tiny smoke experiment\n";
            f << "k=2..5\n";
            f << "trials=40\n";
            f << "seed=31\n";
            f << "radius=1\n";
        }
        const std::string out_a = (dir / "a").string();
        const std::string out_b = (dir / "b").string();
        REQUIRE(run("estimate " + cfg.string() + " --jobs 1 --out " + out_a).exit_code == 0);
        REQUIRE(run("estimate " + cfg.string() + " --jobs 2 --out " + out_b).exit_code == 0);
        const std::string csv_a = slurp(fs::path(out_a) / "frequencies.csv");
        CHECK(csv_a == slurp(fs::path(out_b) / "frequencies.csv"));
        long rows = -1;
        for (char c : csv_a)
            if (c == '\n') ++rows;
        CHECK(rows == 3 * 4); // 3 dual events x 4 ks
        CHECK(slurp(fs::path(out_a) / "manifest.txt") == slurp(fs::path(out_b) / "manifest.txt"));
    }
    SUBCASE("unknown config key rejected") {
        const fs::path cfg = dir / "bad.cfg";
        std::ofstream f(cfg);
        f << "zork=1\n";
        f.close();
        CHECK(run("estimate " + cfg.string() + " --trials 1 --k 1").exit_code == 1);
    }
    fs::remove_all(dir);
}

TEST_CASE("report reprints a stored report") {
    const fs::path dir = fs::temp_directory_path() / "frustra_cli_report";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "exp.cfg";
    {
        std::ofstream f(cfg);
        f << "k=2\ntrials=10\nseed=3\nradius=1\n";
    }
    REQUIRE(run("estimate " + cfg.string() + " --out " + (dir / "run").string()).exit_code == 0);
    const RunResult res = run("report " + (dir / "run" / "report.json").string());
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("p_hat") != std::string::npos);
    CHECK(run("report /nonexistent.json").exit_code == 1);
    fs::remove_all(dir);
}

TEST_SUITE_END();
