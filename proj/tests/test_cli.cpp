#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "vinecg/model_io.hpp"
#include "vinecg/sampler.hpp"
#include "vinecg/scheduler.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "vinecg_cli_test";
    fs::create_directories(dir);
    const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(VINECG_CLI_PATH) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "vinecg_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_csv_file(const std::string& name, const vinecg::DataMatrix& data) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << (data.names.empty() ? "" : data.names[0]);
    for (std::size_t j = 1; j < data.d; ++j) out << "," << data.names[j];
    out << "\n";
    for (std::size_t i = 0; i < data.n; ++i) {
        for (std::size_t j = 0; j < data.d; ++j) {
            if (j > 0) out << ",";
            out << data.at(i, j);
        }
        out << "\n";
    }
    return p;
}

}  // namespace

TEST_CASE("fit on a 2-column CSV produces a single-vertex model") {
    const fs::path csv = write_csv_file("pair.csv", oracles::random_correlated_data(2, 300, 1));
    const fs::path model = scratch_dir() / "pair.json";
    const RunResult r = run_cli("fit --data " + csv.string() + " --output " + model.string());
    CHECK(r.exit_code == 0);
    const vinecg::VineModel m = vinecg::load(slurp(model));
    CHECK(m.dim() == 2);
    CHECK(m.level(0).size() == 1);
}

TEST_CASE("fit rejects out-of-range cond indices with exit 2") {
    const fs::path csv = write_csv_file("range.csv", oracles::random_correlated_data(3, 120, 2));
    const RunResult r = run_cli("fit --data " + csv.string() + " --cond 7 --output /dev/null");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--cond") != std::string::npos);
}

TEST_CASE("usage errors exit 2, missing data exits 3") {
    CHECK(run_cli("fit").exit_code == 2);                       // missing --data
    CHECK(run_cli("frobnicate").exit_code == 2);                // unknown subcommand
    CHECK(run_cli("fit --data /nonexistent.csv").exit_code == 3);
    const fs::path bad = scratch_dir() / "bad.csv";
    std::ofstream(bad) << "a,b\n1,2\n3,oops\n";
    CHECK(run_cli("fit --data " + bad.string()).exit_code == 3);
}

TEST_CASE("sample: deterministic under a fixed seed, entries inside (0,1)") {
    const fs::path model = scratch_dir() / "indep.json";
    {
        std::vector<std::vector<vinecg::CopulaVertex>> levels(1);
        levels[0] = {vinecg::CopulaVertex(0, 1, {}, vinecg::BivariateCopula{})};
        std::ofstream(model) << vinecg::save(vinecg::VineModel(2, std::move(levels)));
    }
    const fs::path out1 = scratch_dir() / "s1.csv";
    const fs::path out2 = scratch_dir() / "s2.csv";
    CHECK(run_cli("sample --model " + model.string() + " --n 5 --seed 1 --output " + out1.string()).exit_code == 0);
    CHECK(run_cli("sample --model " + model.string() + " --n 5 --seed 1 --output " + out2.string()).exit_code == 0);
    const std::string a = slurp(out1);
    CHECK(a == slurp(out2));
    std::istringstream in(a);
    const vinecg::DataMatrix back = vinecg::read_csv(in);
    CHECK(back.n == 5);
    CHECK(back.d == 2);
    for (double v : back.values) CHECK((v > 0.0 && v < 1.0));
}

TEST_CASE("sample: cond-values key mismatch exits 2") {
    const fs::path csv = write_csv_file("cond.csv", oracles::random_correlated_data(3, 200, 3));
    const fs::path model = scratch_dir() / "cond.json";
    CHECK(run_cli("fit --data " + csv.string() + " --cond 1 --output " + model.string()).exit_code == 0);
    const RunResult bad = run_cli("sample --model " + model.string() + " --n 10 --cond-values 0=0.5");
    CHECK(bad.exit_code == 2);
    const fs::path out = scratch_dir() / "cond_out.csv";
    const RunResult good = run_cli("sample --model " + model.string() +
                                   " --n 10 --cond-values 1=0.25 --output " + out.string());
    CHECK(good.exit_code == 0);
    std::istringstream in(slurp(out));
    const vinecg::DataMatrix back = vinecg::read_csv(in);
    for (std::size_t i = 0; i < back.n; ++i) CHECK(back.at(i, 1) == 0.25);
}

TEST_CASE("density: independence model gives all zeros and a total") {
    const fs::path model = scratch_dir() / "indep3.json";
    {
        std::vector<std::vector<vinecg::CopulaVertex>> levels(2);
        levels[0] = {vinecg::CopulaVertex(0, 1, {}, vinecg::BivariateCopula{}),
                     vinecg::CopulaVertex(1, 2, {}, vinecg::BivariateCopula{})};
        levels[1] = {vinecg::CopulaVertex(0, 2, vinecg::VarSet::of({1}), vinecg::BivariateCopula{})};
        std::ofstream(model) << vinecg::save(vinecg::VineModel(3, std::move(levels)));
    }
    const fs::path data = scratch_dir() / "u3.csv";
    std::ofstream(data) << "u0,u1,u2\n0.2,0.5,0.8\n0.4,0.6,0.1\n";
    const RunResult r = run_cli("density --model " + model.string() + " --data " + data.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("log_density") != std::string::npos);
    CHECK(r.out.find("\n0\n0\n") != std::string::npos);
    CHECK(r.err.find("total log-likelihood") != std::string::npos);
}

TEST_CASE("density warns and rank-transforms raw-scale data") {
    const fs::path csv = write_csv_file("raw.csv", oracles::random_correlated_data(2, 100, 4));
    const fs::path model = scratch_dir() / "raw.json";
    CHECK(run_cli("fit --data " + csv.string() + " --quiet --output " + model.string()).exit_code == 0);
    const RunResult r = run_cli("density --model " + model.string() + " --data " + csv.string());
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("rank transform") != std::string::npos);
}

TEST_CASE("schedule prints order, h-calls and sources") {
    const vinecg::VineModel fig = oracles::with_gaussian_copulas(
        vinecg::fig1a_fixture(), {0.5, 0.3, -0.2, 0.6, 0.1, 0.45, -0.35, 0.2, 0.15, 0.4});
    const fs::path model = scratch_dir() / "fig1a.json";
    std::ofstream(model) << vinecg::save(fig);
    const RunResult r = run_cli("schedule --model " + model.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("(0,1,3,2,4), h-calls: 1") != std::string::npos);
    CHECK(r.out.find("source: {0|1,2,3,4}") != std::string::npos);

    const RunResult rc = run_cli("schedule --model " + model.string() + " --cond 2,4");
    CHECK(rc.exit_code == 0);
    CHECK(rc.out.find("(0,1,3)") != std::string::npos);

    const RunResult rw = run_cli("schedule --model " + model.string() + " --worst");
    CHECK(rw.exit_code == 0);
}

TEST_CASE("fit then schedule: reported h-calls equal query of the stored default order") {
    // simulate from a fig1a-structured gaussian vine, fit, then schedule
    const vinecg::VineModel truth = oracles::with_gaussian_copulas(
        vinecg::fig1a_fixture(), {0.6, 0.55, 0.5, 0.45, 0.4, 0.35, 0.3, 0.45, 0.5, 0.55});
    const vinecg::SampleBatch s = vinecg::sample(truth, 1500, {{0, 1, 3, 2, 4}, {}, 5}, 17);
    vinecg::DataMatrix data;
    data.n = s.n;
    data.d = 5;
    data.values = s.values;
    for (int j = 0; j < 5; ++j) data.names.push_back("u" + std::to_string(j));
    const fs::path csv = write_csv_file("fig1a_sim.csv", data);
    const fs::path model = scratch_dir() / "fig1a_fit.json";
    CHECK(run_cli("fit --data " + csv.string() + " --quiet --output " + model.string()).exit_code == 0);

    const vinecg::VineModel fitted = vinecg::load(slurp(model));
    REQUIRE(!fitted.default_order.empty());
    const long stored_q = vinecg::query({fitted.default_order, {}, fitted.dim()}, fitted);

    const RunResult r = run_cli("schedule --model " + model.string());
    CHECK(r.exit_code == 0);
    const std::string needle = "h-calls: ";
    const std::size_t pos = r.out.find(needle);
    REQUIRE(pos != std::string::npos);
    const long reported = std::stol(r.out.substr(pos + needle.size()));
    CHECK(reported == stored_q);
}

TEST_CASE("export-dot mirrors the library renderer") {
    const vinecg::VineModel fig = oracles::with_gaussian_copulas(
        vinecg::fig1a_fixture(), {0.5, 0.3, -0.2, 0.6, 0.1, 0.45, -0.35, 0.2, 0.15, 0.4});
    const fs::path model = scratch_dir() / "dot.json";
    std::ofstream(model) << vinecg::save(fig);
    const RunResult r = run_cli("export-dot --model " + model.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out == vinecg::export_dot(vinecg::load(slurp(model))));
    CHECK(r.out.find("digraph") != std::string::npos);
}
