#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpr/cli.hpp"

namespace fs = std::filesystem;
using kpr::ChoiceMode;
using kpr::format_mode;
using kpr::format_number;
using kpr::format_temperature;
using kpr::match_analytic;
using kpr::parse_mode;
using kpr::parse_temperature;
using kpr::run_cli;
using kpr::run_sweep;
using kpr::SimulationConfig;
using kpr::SweepCell;
using kpr::SweepGrid;
using kpr::Temperature;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("kpr_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path single_file_matching(const fs::path& dir, const std::string& prefix) {
    fs::path found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename().string().starts_with(prefix)) {
            REQUIRE(found.empty());
            found = entry.path();
        }
    }
    REQUIRE(!found.empty());
    return found;
}

SimulationConfig config(std::uint32_t n, std::uint32_t m, double alpha, Temperature t) {
    SimulationConfig cfg;
    cfg.restaurants = n;
    cfg.agents = m;
    cfg.params.alpha = alpha;
    cfg.params.temperature = t;
    cfg.evenings = 100;
    cfg.burn_in = 10;
    return cfg;
}

}  // namespace

TEST_CASE("temperature grammar") {
    CHECK(parse_temperature("inf").kind() == Temperature::Kind::Infinite);
    CHECK(parse_temperature("0").kind() == Temperature::Kind::Zero);
    CHECK(parse_temperature("0.0").kind() == Temperature::Kind::Zero);
    CHECK(parse_temperature("2.5") == Temperature::finite(2.5));
    CHECK(parse_temperature("1e3") == Temperature::finite(1000.0));

    for (const std::string bad : {"", "-1", "abc", "nan", "1x", "--"}) {
        CHECK_THROWS_AS(parse_temperature(bad), std::invalid_argument);
    }

    CHECK(format_temperature(Temperature::infinite()) == "inf");
    CHECK(format_temperature(Temperature::zero()) == "0");
    CHECK(format_temperature(Temperature::finite(1000.0)) == "1000");
    CHECK(format_temperature(Temperature::finite(0.25)) == "0.25");
}

TEST_CASE("mode grammar") {
    CHECK(parse_mode("probabilistic") == ChoiceMode::Probabilistic);
    CHECK(parse_mode("dictated") == ChoiceMode::DictatedRotation);
    CHECK_THROWS_AS(parse_mode("greedy"), std::invalid_argument);
    CHECK(format_mode(ChoiceMode::Probabilistic) == "probabilistic");
    CHECK(format_mode(ChoiceMode::DictatedRotation) == "dictated");
}

TEST_CASE("numbers print with six significant digits") {
    CHECK(format_number(0.6321205588) == "0.632121");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.015) == "0.015");
    CHECK(format_number(123456789.0) == "1.23457e+08");
}

TEST_CASE("known limits attach their analytic predictions") {
    const auto random_choice = match_analytic(config(1000, 1000, 0.0, Temperature::infinite()));
    REQUIRE(random_choice.has_value());
    CHECK(random_choice->source == kpr::AnalyticSource::PoissonUtilization);
    CHECK(random_choice->value == doctest::Approx(0.6321205588).epsilon(1e-9));
    CHECK(random_choice->inputs.lambda == 1.0);

    const auto dense = match_analytic(config(1000, 2000, 0.0, Temperature::infinite()));
    REQUIRE(dense.has_value());
    CHECK(dense->value == doctest::Approx(0.8646647168).epsilon(1e-9));

    const auto strict = match_analytic(config(1000, 1000, 1.0, Temperature::infinite()));
    REQUIRE(strict.has_value());
    CHECK(strict->source == kpr::AnalyticSource::RankPairing);
    CHECK(strict->value == doctest::Approx(0.576587111328233).epsilon(1e-9));

    const auto avoid = match_analytic(config(1000, 1000, 0.0, Temperature::zero()));
    REQUIRE(avoid.has_value());
    CHECK(avoid->source == kpr::AnalyticSource::AvoidCrowdFixedPoint);
    CHECK(avoid->value == doctest::Approx(0.45693661017).epsilon(1e-9));

    CHECK(!match_analytic(config(1000, 1000, 0.5, Temperature::infinite())).has_value());
    CHECK(!match_analytic(config(1000, 1000, 1.0, Temperature::finite(5.0))).has_value());
    CHECK(!match_analytic(config(1000, 900, 1.0, Temperature::infinite())).has_value());
    CHECK(!match_analytic(config(999, 999, 1.0, Temperature::infinite())).has_value());
    CHECK(!match_analytic(config(1000, 900, 0.0, Temperature::zero())).has_value());
    auto rotation = config(1000, 1000, 0.0, Temperature::infinite());
    rotation.params.mode = ChoiceMode::DictatedRotation;
    CHECK(!match_analytic(rotation).has_value());
}

TEST_CASE("sweep cells are ordered and reproducible across worker counts") {
    SweepGrid grid;
    grid.alphas = {1.0, 0.0};
    grid.temperatures = {Temperature::infinite(), Temperature::zero(),
                         Temperature::finite(2.0)};
    grid.per_cell = config(50, 50, 0.0, Temperature::infinite());
    grid.per_cell.evenings = 400;
    grid.per_cell.burn_in = 100;
    grid.per_cell.seed = 9;

    const auto cells = run_sweep(grid, 3);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0].alpha == 0.0);
    CHECK(cells[0].temperature.kind() == Temperature::Kind::Zero);
    CHECK(cells[1].temperature == Temperature::finite(2.0));
    CHECK(cells[2].temperature.kind() == Temperature::Kind::Infinite);
    CHECK(cells[3].alpha == 1.0);
    CHECK(cells[5].temperature.kind() == Temperature::Kind::Infinite);
    for (const auto& c : cells) {
        CHECK(c.n_evenings == 300);
        CHECK(c.mean_f > 0.0);
        CHECK(c.mean_f <= 1.0);
    }

    const auto serial = run_sweep(grid, 1);
    const auto wide = run_sweep(grid, 8);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(cells[i].mean_f == serial[i].mean_f);
        CHECK(cells[i].std_f == wide[i].std_f);
    }
}

TEST_CASE("sweep grid validation") {
    SweepGrid grid;
    grid.per_cell = config(10, 10, 0.0, Temperature::infinite());
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
    grid.alphas = {0.0};
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
    grid.temperatures = {Temperature::zero()};
    CHECK_NOTHROW(grid.validate());
}

TEST_CASE("sweep csv layout") {
    std::vector<SweepCell> cells(1);
    cells[0] = {1.0, Temperature::finite(1000.0), 0.58123456, 0.015, 100};
    CHECK(kpr::sweep_csv(cells) ==
          "alpha,temperature,mean_f,std_f,n_evenings\n1,1000,0.581235,0.015,100\n");
}

TEST_CASE("simulate writes a self-describing report") {
    const auto dir = fresh_dir("simulate");
    const auto r = cli({"simulate", "--n", "50", "--evenings", "500", "--burn-in", "100",
                        "--seed", "3", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(r.out.find("mean_f=") != std::string::npos);
    CHECK(r.out.find("analytic_value=0.632121") != std::string::npos);

    const auto report = nlohmann::json::parse(slurp(single_file_matching(dir, "report_")));
    CHECK(report["config"]["restaurants"] == 50);
    CHECK(report["config"]["agents"] == 50);
    CHECK(report["config"]["temperature"] == "inf");
    CHECK(report["config"]["seed"] == 3);
    CHECK(report["summary"]["mean"].get<double>() > 0.5);
    CHECK(report["analytic"]["source"] == "poisson_utilization");
    CHECK(report["analytic"]["deviation"].get<double>() >= 0.0);

    const auto hist = slurp(single_file_matching(dir, "histogram_"));
    CHECK(hist.starts_with("bin_center,density\n"));
}

TEST_CASE("dictated simulation reports exact full utilization") {
    const auto dir = fresh_dir("dictated");
    const auto r = cli({"simulate", "--mode", "dictated", "--n", "100", "--evenings", "10",
                        "--burn-in", "0", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("mean_f=1\n") != std::string::npos);
    CHECK(r.out.find("std_f=0\n") != std::string::npos);
}

TEST_CASE("repeated invocations are byte identical") {
    const auto d1 = fresh_dir("det1");
    const auto d2 = fresh_dir("det2");
    const std::vector<std::string> base = {"simulate", "--n", "60", "--evenings", "400",
                                           "--burn-in", "50", "--seed", "21"};
    auto args1 = base;
    args1.insert(args1.end(), {"--out", d1.string()});
    auto args2 = base;
    args2.insert(args2.end(), {"--out", d2.string()});
    CHECK(cli(args1).code == 0);
    CHECK(cli(args2).code == 0);
    CHECK(slurp(single_file_matching(d1, "histogram_")) ==
          slurp(single_file_matching(d2, "histogram_")));
    CHECK(slurp(single_file_matching(d1, "report_")) ==
          slurp(single_file_matching(d2, "report_")));
}

TEST_CASE("sweep command writes one row per cell") {
    const auto dir = fresh_dir("sweep");
    const auto r = cli({"sweep", "--n", "40", "--alphas", "0,1", "--temperatures", "inf,0",
                        "--evenings", "300", "--burn-in", "50", "--seed", "5", "--out",
                        dir.string()});
    CHECK(r.code == 0);
    const auto csv = slurp(dir / "sweep.csv");
    CHECK(csv.starts_with("alpha,temperature,mean_f,std_f,n_evenings\n"));
    int lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 5);

    const auto serial_dir = fresh_dir("sweep_serial");
    const auto serial = cli({"sweep", "--n", "40", "--alphas", "0,1", "--temperatures",
                             "inf,0", "--evenings", "300", "--burn-in", "50", "--seed", "5",
                             "--workers", "1", "--out", serial_dir.string()});
    CHECK(serial.code == 0);
    CHECK(slurp(serial_dir / "sweep.csv") == csv);
}

TEST_CASE("sweep without temperatures fails before writing anything") {
    const auto dir = fresh_dir("sweep_empty");
    const auto r = cli({"sweep", "--n", "40", "--alphas", "0", "--evenings", "300",
                        "--burn-in", "50", "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(!fs::exists(dir / "sweep.csv"));
    CHECK(!r.err.empty());
}

TEST_CASE("analytic queries print prediction JSON") {
    const auto util = cli({"analytic", "--poisson-utilization", "--lambda", "1"});
    CHECK(util.code == 0);
    const auto util_json = nlohmann::json::parse(util.out);
    CHECK(util_json["value"].get<double>() == doctest::Approx(0.6321205588).epsilon(1e-9));
    CHECK(util_json["source"] == "poisson_utilization");
    CHECK(util_json["inputs"]["lambda"] == 1.0);

    const auto pmf = cli({"analytic", "--poisson-pmf", "--lambda", "2", "--m", "3"});
    CHECK(pmf.code == 0);
    CHECK(nlohmann::json::parse(pmf.out)["value"].get<double>() ==
          doctest::Approx(0.1804470443).epsilon(1e-9));

    const auto rank = cli({"analytic", "--rank", "--n", "1000"});
    CHECK(rank.code == 0);
    CHECK(nlohmann::json::parse(rank.out)["value"].get<double>() ==
          doctest::Approx(0.576587111328233).epsilon(1e-9));

    const auto fp = cli({"analytic", "--fixed-point", "--tol", "1e-12"});
    CHECK(fp.code == 0);
    CHECK(nlohmann::json::parse(fp.out)["value"].get<double>() ==
          doctest::Approx(0.45693661017).epsilon(1e-9));

    const auto again = cli({"analytic", "--fixed-point", "--tol", "1e-12"});
    CHECK(again.out == fp.out);
}

TEST_CASE("census validates its regime and reports pooled fractions") {
    const auto dir = fresh_dir("census");
    const auto r = cli({"census", "--n", "200", "--evenings", "300", "--burn-in", "50",
                        "--seed", "8", "--out", dir.string()});
    CHECK(r.code == 0);
    const auto csv = slurp(single_file_matching(dir, "census_"));
    CHECK(csv.starts_with("m,empirical_fraction,poisson_pmf,deviation\n"));

    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    REQUIRE(std::getline(rows, line));
    CHECK(line.starts_with("0,"));
    const auto comma = line.find(',');
    const double empirical = std::stod(line.substr(comma + 1));
    CHECK(empirical == doctest::Approx(0.3679).epsilon(0.15));

    const auto wrong = cli({"census", "--n", "200", "--alpha", "1", "--out", dir.string()});
    CHECK(wrong.code == 2);
    CHECK(!wrong.err.empty());
}

TEST_CASE("usage and config errors exit with code two") {
    CHECK(cli({"simulate"}).code == 2);                                   // missing --n
    CHECK(cli({"simulate", "--n", "10", "--temperature", "-4"}).code == 2);
    CHECK(cli({"simulate", "--n", "10", "--evenings", "5", "--burn-in", "5"}).code == 2);
    CHECK(cli({"simulate", "--n", "10", "--mode", "greedy"}).code == 2);
    CHECK(cli({"analytic"}).code == 2);                                   // nothing selected
    CHECK(cli({"analytic", "--rank", "--fixed-point"}).code == 2);
    CHECK(cli({"analytic", "--rank", "--n", "7"}).code == 2);             // odd N
    CHECK(cli({"analytic", "--poisson-utilization", "--lambda", "-1"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"simulate", "--help"}).code == 0);
}

TEST_CASE("config files provide defaults that flags override") {
    const auto dir = fresh_dir("config");
    const auto cfg_path = dir / "run.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "n=60\nevenings=400\nburn-in=50\nseed=9\n";
    }
    const auto r = cli({"simulate", "--config", cfg_path.string(), "--seed", "11", "--out",
                        dir.string()});
    CHECK(r.code == 0);
    const auto report = nlohmann::json::parse(slurp(single_file_matching(dir, "report_")));
    CHECK(report["config"]["restaurants"] == 60);
    CHECK(report["config"]["evenings"] == 400);
    CHECK(report["config"]["seed"] == 11);
}
