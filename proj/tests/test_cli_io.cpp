#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rbergomi/cli_io.hpp"

using namespace rbergomi;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli_io");

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rbergomi_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::vector<std::string>& args) {
    std::vector<std::string> full = {"rbergomi"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : full) argv.push_back(s.data());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& content) {
    std::vector<std::string> out;
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("defaults reproduce the experiment setup") {
    const auto cfg = cli::parse_config({"smile", "--out", "x.csv"});
    CHECK(cfg.xi0 == doctest::Approx(0.235 * 0.235));
    CHECK(cfg.eta == 1.9);
    CHECK(cfg.rho == -0.9);
    CHECK(cfg.alpha == -0.43);
    CHECK(cfg.n_steps == 312);
    CHECK(cfg.n_paths == 400000);
    CHECK(cfg.seed == 42);
    CHECK(cfg.estimator == "mixed");
    CHECK(cfg.maturities.size() == 8);
    CHECK(cfg.deltas.size() == 19);
}

TEST_CASE("range violations name the offending key") {
    try {
        cli::parse_config({"smile", "--rho=1.5", "--out", "x.csv"});
        FAIL("expected ConfigError");
    } catch (const cli::ConfigError& e) {
        CHECK(std::string(e.what()).find("rho") != std::string::npos);
    }
    try {
        cli::parse_config({"benchmark", "--alpha=0.2", "--out", "x.csv"});
        FAIL("expected ConfigError");
    } catch (const cli::ConfigError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
}

TEST_CASE("unknown keys and commands are rejected") {
    CHECK_THROWS_AS(cli::parse_config({"smile", "--nu=0.3", "--out", "x.csv"}),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config({"frobnicate", "--out", "x.csv"}), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config({"smile"}), cli::ConfigError);  // out missing
}

TEST_CASE("flags override the config file") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("cfg.json"));
        out << R"({"eta": 1.9, "rho": 0.0, "n_paths": 1234})";
    }
    const auto cfg = cli::parse_config(
        {"smile", "--config", tmp.file("cfg.json"), "--eta=2.0", "--out", "x.csv"});
    CHECK(cfg.eta == 2.0);
    CHECK(cfg.rho == 0.0);
    CHECK(cfg.n_paths == 1234);
}

TEST_CASE("malformed JSON is a config error") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("bad.json"));
        out << "{ eta: nope";
    }
    CHECK_THROWS_AS(
        cli::parse_config({"smile", "--config", tmp.file("bad.json"), "--out", "x.csv"}),
        cli::ConfigError);
}

TEST_CASE("type violations are config errors") {
    CHECK_THROWS_AS(cli::parse_config({"smile", "--n_steps=0.5", "--out", "x.csv"}),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config({"smile", "--maturities=0.25", "--out", "x.csv"}),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_config({"benchmark", "--estimators=[\"sobol\"]", "--out", "x.csv"}),
                    cli::ConfigError);
}

TEST_CASE("volterra-check emits the marginal-law table") {
    TempDir tmp;
    const auto out = tmp.file("volterra.csv");
    const int rc = run({"volterra-check", "--n_paths=2000", "--n_steps=16",
                        "--maturity=1.0", "--out", out});
    CHECK(rc == cli::kOk);
    const auto content = slurp(out);
    CHECK(content.rfind("# rbergomi_mc volterra-check", 0) == 0);
    CHECK(content.find("# seed=42") != std::string::npos);  // provenance includes defaults
    const auto lines = data_lines(content);
    REQUIRE(lines.size() == 18);  // header + 17 grid times
    CHECK(lines[0] == "time,sample_mean,sample_var,target_var");
    CHECK(lines[1].rfind("0,", 0) == 0);
}

TEST_CASE("smile output is byte-deterministic") {
    TempDir tmp;
    const std::vector<std::string> args = {
        "smile",     "--n_paths=2000", "--n_steps=32", "--maturities=[0.25]",
        "--deltas=[0.25,0.5,0.75]", "--threads=2", "--out", tmp.file("s.csv")};
    CHECK(run(args) == cli::kOk);
    const auto a = slurp(tmp.file("s.csv"));
    fs::remove(tmp.file("s.csv"));
    CHECK(run(args) == cli::kOk);
    CHECK(a == slurp(tmp.file("s.csv")));
    const auto lines = data_lines(a);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "maturity,delta_put,log_strike,implied_vol,std_err");
    CHECK(lines[2].rfind("0.25,0.5,", 0) == 0);
}

TEST_CASE("benchmark output: stable columns are byte-identical across reruns") {
    TempDir tmp;
    auto args = [&](const std::string& o) {
        return std::vector<std::string>{
            "benchmark", "--n_paths=400", "--n_reps=6", "--n_steps=32", "--rho=0.0",
            "--estimators=[\"conditional\",\"mixed\"]", "--out", o};
    };
    CHECK(run(args(tmp.file("a.csv"))) == cli::kOk);
    CHECK(run(args(tmp.file("b.csv"))) == cli::kOk);
    const auto la = data_lines(slurp(tmp.file("a.csv")));
    const auto lb = data_lines(slurp(tmp.file("b.csv")));
    REQUIRE(la.size() == lb.size());
    REQUIRE(la.size() == 7);  // header + 2 estimators x 3 strikes
    CHECK(la[0] == "estimator,rho,label,log_strike,target_vol,bias,std,tau_ms,phi2,psi2");
    for (std::size_t i = 1; i < la.size(); ++i) {
        // timing columns (tau_ms, psi2) are measured; everything else must match
        std::istringstream sa(la[i]), sb(lb[i]);
        std::string ca, cb;
        for (int col = 0; std::getline(sa, ca, ',') && std::getline(sb, cb, ','); ++col)
            if (col != 7 && col != 9) CHECK(ca == cb);
    }
    // rho = 0 degenerate-control identity: conditional and mixed rows agree
    for (int strike = 0; strike < 3; ++strike) {
        std::istringstream sc(la[1 + strike]), sm(la[4 + strike]);
        std::string cc, cm;
        for (int col = 0; std::getline(sc, cc, ',') && std::getline(sm, cm, ','); ++col)
            if (col == 5 || col == 6) CHECK(cc == cm);  // bias and std columns
    }
}

TEST_CASE("calibrate emits one row per restart") {
    TempDir tmp;
    const auto out = tmp.file("calib.csv");
    const int rc = run({"calibrate", "--rho=0.0", "--n_paths=200", "--n_steps=16",
                        "--restarts=2", "--max_evals=8", "--budget_ms=0",
                        "--target_ks=[-0.1,0.0,0.1]", "--target_vols=[0.23,0.217,0.228]",
                        "--out", out});
    CHECK(rc == cli::kOk);
    const auto lines = data_lines(slurp(out));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "run,rho_hat,eta_hat,rmse,converged");
    CHECK(lines[1].rfind("0,", 0) == 0);
    CHECK(lines[2].rfind("1,", 0) == 0);
}

TEST_CASE("extract-xi emits the integral next to the model value") {
    TempDir tmp;
    const auto out = tmp.file("xi.csv");
    const int rc = run({"extract-xi", "--rho=0.0", "--n_paths=4000", "--n_steps=32",
                        "--out", out});
    CHECK(rc == cli::kOk);
    const auto lines = data_lines(slurp(out));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "maturity,xi0_integral,model_integral");
    double t, est, model;
    std::sscanf(lines[1].c_str(), "%lf,%lf,%lf", &t, &est, &model);
    CHECK(t == 0.25);
    CHECK(model == doctest::Approx(0.235 * 0.235 * 0.25).epsilon(1e-9));
    CHECK(est == doctest::Approx(model).epsilon(0.15));
}

TEST_CASE("exit codes") {
    TempDir tmp;
    SUBCASE("config error is 2") {
        CHECK(run({"smile", "--rho=2.0", "--out", tmp.file("x.csv")}) == cli::kConfigError);
        CHECK(run({"nonsense", "--out", tmp.file("x.csv")}) == cli::kConfigError);
    }
    SUBCASE("unwritable output is 3") {
        CHECK(run({"volterra-check", "--n_paths=64", "--n_steps=4",
                   "--out", "/nonexistent_dir/x.csv"}) == cli::kIoError);
    }
    SUBCASE("all-flagged estimation is 4") {
        // 4 paths cannot price a 0.01-delta put: every point clamps
        CHECK(run({"smile", "--estimator=base", "--n_paths=4", "--n_steps=8",
                   "--maturities=[0.25]", "--deltas=[0.0001]",
                   "--out", tmp.file("y.csv")}) == cli::kNumericalError);
    }
}

TEST_CASE("piecewise forward variance curve keys") {
    const auto cfg = cli::parse_config({"smile", "--xi0_times=[0.5]",
                                        "--xi0_values=[0.04,0.09]", "--out", "x.csv"});
    const auto model = cfg.model();
    CHECK(model.xi0(0.25) == 0.04);
    CHECK(model.xi0(0.75) == 0.09);
    CHECK_THROWS_AS(cli::parse_config({"smile", "--xi0_times=[0.5]", "--xi0_values=[0.04]",
                                       "--out", "x.csv"}),
                    cli::ConfigError);
}

TEST_SUITE_END();
