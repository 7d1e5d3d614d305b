#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdlab/config.hpp"
#include "sdlab/csv.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/rng.hpp"

using namespace sdlab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run_cli(const std::string& args, const std::string& env = "") {
    const char* cli = std::getenv("SDLAB_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "SDLAB_CLI must point at the sdlab executable");
    const std::string cmd = env + " '" + std::string(cli) + "' " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.output += buf;
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("sdlab_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            else if (ch == ',' && !quoted) {
                cells.push_back(cell);
                cell.clear();
            } else cell += ch;
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("seed derivation matches the documented formula") {
    // First SplitMix64 output for state 0.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(split_seed(42, 7) == splitmix64(splitmix64(42) ^ 8));
    CHECK(split_seed(42, 7) != split_seed(42, 8));
}

TEST_CASE("config parsing") {
    const auto kv = config::KeyValues::parse(
        "# comment\nmodel = chain_linear   # trailing\n\nmodel.beta = 5\nn=200\nt_grid = 0.5, 1.0\n");
    const auto cfg = config::from_key_values(kv);
    CHECK(cfg.model == config::Model::chain_linear);
    CHECK(cfg.beta == 5.0);
    CHECK(cfg.n == 200);
    CHECK(cfg.t_grid == std::vector<double>{0.5, 1.0});
    CHECK(cfg.replicas == 1);

    auto bad = [](const std::string& text, const std::string& needle) {
        try {
            (void)config::from_key_values(config::KeyValues::parse(text));
            FAIL("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
        }
    };
    bad("model = sinai\n", "model");
    bad("model.lenght = 2\n", "model.lenght");
    bad("n = ten\n", "'n'");
    bad("observable = wiggle\n", "observable");
    bad("clt.normalizer = magic\n", "clt.normalizer");
    CHECK_THROWS_AS(config::KeyValues::parse("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(config::KeyValues::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("scatterer lists") {
    const auto d = config::parse_disks("1,1,0.5; 0,0,0.25");
    REQUIRE(d.size() == 2);
    CHECK(d[1].radius == 0.25);
    CHECK_THROWS_AS(config::parse_disks("1,1"), ConfigError);
}

TEST_CASE("billiard setups know their mean when it is available") {
    config::ExperimentConfig cfg;
    auto s = config::billiard_setup(cfg);
    REQUIRE(s->mean.has_value());
    CHECK(*s->mean == doctest::Approx((3.14159265358979323846 + 1.0) / 2.0));
    cfg.model = config::Model::drivebelt;
    CHECK_FALSE(config::billiard_setup(cfg)->mean.has_value());
    cfg.observable.name = "sinusoid";
    CHECK(*config::billiard_setup(cfg)->mean == 0.0);
}

TEST_CASE("csv formatting") {
    CHECK(csv::quote("plain") == "plain");
    CHECK(csv::quote("[1,2)") == "\"[1,2)\"");
    CHECK(csv::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(csv::format_real(x)) == x);
}

TEST_CASE("simulate: row count and determinism") {
    const auto dir = scratch("simulate");
    const auto cfg = write_config(dir, "model = stadium\nmodel.l = 1.0\nn = 1000\nreplicas = 1\n");
    const auto a = run_cli("simulate --config " + cfg.string() + " --seed 5 --out " + (dir / "a").string());
    REQUIRE_MESSAGE(a.code == 0, a.output);
    const auto b = run_cli("simulate --config " + cfg.string() + " --seed 5 --out " + (dir / "b").string());
    REQUIRE(b.code == 0);
    const auto rows = read_csv(dir / "a" / "returns.csv");
    REQUIRE(rows.size() == 1001);
    CHECK(rows[0] == std::vector<std::string>{"replica", "step", "m", "k", "f_tilde"});
    CHECK(slurp(dir / "a" / "returns.csv") == slurp(dir / "b" / "returns.csv"));
    // f = 1 induces R.
    CHECK(rows[10][2] == rows[10][4]);
    const auto c = run_cli("simulate --config " + cfg.string() + " --out " + (dir / "c").string(),
                           "SDLAB_SEED=6");
    REQUIRE(c.code == 0);
    CHECK(slurp(dir / "a" / "returns.csv") != slurp(dir / "c" / "returns.csv"));
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    const auto bad = run_cli("simulate --set model=sinai --out " + dir.string());
    CHECK(bad.code == 2);
    CHECK(bad.output.find("model") != std::string::npos);
    const auto unknown = run_cli("clt --set colour=blue --out " + dir.string());
    CHECK(unknown.code == 2);
    CHECK(unknown.output.find("colour") != std::string::npos);
    const auto cap = run_cli("simulate --set model.iteration_cap=1 --set n=50 --out " + dir.string());
    CHECK(cap.code == 3);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("constants report") {
    const auto dir = scratch("constants");
    const auto r = run_cli("constants --out " + dir.string());
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto rows = read_csv(dir / "constants.csv");
    REQUIRE(rows.size() > 5);
    CHECK(rows[0] == std::vector<std::string>{"model", "theta", "c_M", "mu_M_M", "sigma2_induced",
                                              "sigma2_original", "provenance"});
    bool saw_stadium = false, saw_cusp = false, saw_chain = false;
    for (const auto& row : rows) {
        if (row[0] == "stadium") {
            saw_stadium = true;
            CHECK(std::stod(row[5]) == doctest::Approx(0.6255).epsilon(1e-3));
            CHECK(row[6] == "simulated");
        }
        if (row[0] == "cusp") {
            saw_cusp = true;
            CHECK(row[6] == "constants-only");
        }
        if (row[0] == "chain_linear") {
            saw_chain = true;
            CHECK(std::stod(row[1]) == doctest::Approx(0.823959).epsilon(1e-6));
        }
    }
    CHECK(saw_stadium);
    CHECK(saw_cusp);
    CHECK(saw_chain);
}

TEST_CASE("clt, ip, tail and transition run end to end on small chains") {
    const auto dir = scratch("chain");
    const auto cfg = write_config(dir, "model = chain_linear\nn = 2000\nreplicas = 50\n"
                                       "model.burn_in = 1000\nt_grid = 0.5, 1.0\n"
                                       "tail.samples = 200000\ntail.grid_lo = 5\ntail.grid_hi = 50\n");
    const std::string base = "--config " + cfg.string() + " --out " + dir.string();
    const auto clt = run_cli("clt " + base);
    REQUIRE_MESSAGE(clt.code == 0, clt.output);
    const auto summary = read_csv(dir / "clt_summary.csv");
    REQUIRE(summary.size() == 2);
    CHECK(summary[0] == std::vector<std::string>{"D", "mean", "var", "skew", "kurt", "normalizer"});
    CHECK(read_csv(dir / "clt.csv").size() == 51);

    const auto ip = run_cli("ip " + base);
    REQUIRE_MESSAGE(ip.code == 0, ip.output);
    const auto paths = read_csv(dir / "paths.csv");
    CHECK(paths[0] == std::vector<std::string>{"replica", "t", "W"});
    CHECK(paths.size() == 1 + 50 * 2);

    const auto tail = run_cli("tail " + base);
    REQUIRE_MESSAGE(tail.code == 0, tail.output);
    CHECK(read_csv(dir / "tail.csv")[0] == std::vector<std::string>{"n", "count", "prob", "n2prob"});

    const auto tr = run_cli("transition " + base +
                            " --set replicas=4 --set n=5000 --set transition.m_lo=5 --set transition.m_hi=20");
    REQUIRE_MESSAGE(tr.code == 0, tr.output);
    const auto k = read_csv(dir / "kernel.csv");
    CHECK(k[0] == std::vector<std::string>{"m_bin", "n", "p_hat", "stderr", "model_p"});
    CHECK(k.size() > 1);
}

TEST_CASE("verify runs selected criteria") {
    const auto ok = run_cli("verify --only 1 --only 2");
    CHECK_MESSAGE(ok.code == 0, ok.output);
    CHECK(ok.output.find("PASS [1]") != std::string::npos);
    CHECK(ok.output.find("PASS [2]") != std::string::npos);
}
