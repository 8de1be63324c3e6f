#include "kpr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpr/rng.hpp"
#include "kpr/stats.hpp"

namespace kpr {

namespace {

using ordered_json = nlohmann::ordered_json;

double temperature_sort_key(const Temperature& t) {
    switch (t.kind()) {
        case Temperature::Kind::Zero: return 0.0;
        case Temperature::Kind::Finite: return t.value();
        case Temperature::Kind::Infinite: return std::numeric_limits<double>::infinity();
    }
    throw std::logic_error("unreachable temperature kind");
}

std::string analytic_source_name(AnalyticSource source) {
    switch (source) {
        case AnalyticSource::PoissonUtilization: return "poisson_utilization";
        case AnalyticSource::PoissonPmf: return "poisson_pmf";
        case AnalyticSource::RankPairing: return "rank_pairing";
        case AnalyticSource::AvoidCrowdFixedPoint: return "avoid_crowd_fixed_point";
    }
    throw std::logic_error("unreachable analytic source");
}

ordered_json analytic_json(const AnalyticPrediction& p) {
    ordered_json inputs;
    switch (p.source) {
        case AnalyticSource::PoissonUtilization:
            inputs["lambda"] = p.inputs.lambda;
            break;
        case AnalyticSource::PoissonPmf:
            inputs["lambda"] = p.inputs.lambda;
            inputs["m"] = p.inputs.m;
            break;
        case AnalyticSource::RankPairing:
            inputs["n"] = p.inputs.n;
            break;
        case AnalyticSource::AvoidCrowdFixedPoint:
            inputs["tolerance"] = p.inputs.tolerance;
            break;
    }
    return ordered_json{{"value", p.value},
                        {"source", analytic_source_name(p.source)},
                        {"inputs", inputs}};
}

std::string digest_hex(std::uint64_t digest) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, digest);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Flag values shared by simulate and census; agents == 0 means "same as --n".
struct CommonOptions {
    std::uint32_t n = 0;
    std::uint32_t agents = 0;
    double alpha = 0.0;
    std::string temperature = "inf";
    std::uint64_t evenings = 10000;
    std::uint64_t burn_in = 1000;
    std::uint64_t seed = 1;
    std::string mode = "probabilistic";
    std::string out_dir = ".";
    std::string config_file;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt, bool with_mode) {
    cmd->add_option("--n", opt.n, "number of restaurants");
    cmd->add_option("--agents", opt.agents, "number of agents (default: --n)");
    cmd->add_option("--alpha", opt.alpha, "rank preference exponent");
    cmd->add_option("--temperature", opt.temperature, "noise scale: inf, 0, or a positive number");
    cmd->add_option("--evenings", opt.evenings, "total evenings to simulate");
    cmd->add_option("--burn-in", opt.burn_in, "evenings discarded before statistics");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    if (with_mode) cmd->add_option("--mode", opt.mode, "probabilistic or dictated");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--config", opt.config_file, "flat key=value file; flags take precedence");
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> items;
    std::string line;
    while (std::getline(in, line)) {
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line has no '=': " + entry);
        }
        items.emplace_back(trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
    }
    return items;
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    if (!value.empty() && value[0] != '-') {
        try {
            const std::uint64_t v = std::stoull(value, &pos);
            if (pos == value.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw std::invalid_argument(key + " must be a non-negative integer, got '" + value + "'");
}

std::uint32_t parse_u32_value(const std::string& key, const std::string& value) {
    const std::uint64_t v = parse_u64_value(key, value);
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument(key + " is out of range: " + value);
    }
    return static_cast<std::uint32_t>(v);
}

double parse_double_value(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    try {
        const double v = std::stod(value, &pos);
        if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(key + " must be a number, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

// Applies one config-file entry to a common flag unless that flag was given on
// the command line; returns false for keys the common set does not know.
bool apply_common_config(CLI::App* cmd, CommonOptions& opt, bool with_mode,
                         const std::string& key, const std::string& value) {
    const auto given = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (key == "n") {
        if (!given("--n")) opt.n = parse_u32_value(key, value);
    } else if (key == "agents") {
        if (!given("--agents")) opt.agents = parse_u32_value(key, value);
    } else if (key == "alpha") {
        if (!given("--alpha")) opt.alpha = parse_double_value(key, value);
    } else if (key == "temperature") {
        if (!given("--temperature")) opt.temperature = value;
    } else if (key == "evenings") {
        if (!given("--evenings")) opt.evenings = parse_u64_value(key, value);
    } else if (key == "burn-in") {
        if (!given("--burn-in")) opt.burn_in = parse_u64_value(key, value);
    } else if (key == "seed") {
        if (!given("--seed")) opt.seed = parse_u64_value(key, value);
    } else if (key == "mode" && with_mode) {
        if (!given("--mode")) opt.mode = value;
    } else if (key == "out") {
        if (!given("--out")) opt.out_dir = value;
    } else {
        return false;
    }
    return true;
}

void load_common_config(CLI::App* cmd, CommonOptions& opt, bool with_mode) {
    if (opt.config_file.empty()) return;
    for (const auto& [key, value] : read_flat_config(opt.config_file)) {
        if (!apply_common_config(cmd, opt, with_mode, key, value)) {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
}

SimulationConfig to_config(const CommonOptions& opt) {
    if (opt.n == 0) throw std::invalid_argument("missing required option --n");
    SimulationConfig cfg;
    cfg.restaurants = opt.n;
    cfg.agents = opt.agents == 0 ? opt.n : opt.agents;
    cfg.params.alpha = opt.alpha;
    cfg.params.temperature = parse_temperature(opt.temperature);
    cfg.params.mode = parse_mode(opt.mode);
    cfg.evenings = opt.evenings;
    cfg.burn_in = opt.burn_in;
    cfg.seed = opt.seed;
    cfg.validate();
    return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

int cmd_simulate(CLI::App* cmd, CommonOptions& opt, std::ostream& out) {
    load_common_config(cmd, opt, true);
    const SimulationConfig cfg = to_config(opt);
    const auto dir = prepare_out_dir(opt.out_dir);

    const UtilizationSeries series = run(cfg);
    const SummaryStats stats = summary(series.values, cfg.restaurants);
    const Histogram hist = histogram(series.values, cfg.restaurants);
    const std::optional<AnalyticPrediction> analytic = match_analytic(cfg);

    const std::string hex = digest_hex(cfg.digest());
    const auto report_path = dir / ("report_" + hex + ".json");
    const auto hist_path = dir / ("histogram_" + hex + ".csv");
    write_text_file(report_path, run_report_json(cfg, stats, analytic));
    write_text_file(hist_path, histogram_csv(hist));

    out << "mean_f=" << format_number(stats.mean) << "\n"
        << "std_f=" << format_number(stats.std) << "\n"
        << "mode_f=" << format_number(stats.mode) << "\n"
        << "skewness=" << format_number(stats.skewness) << "\n"
        << "excess_kurtosis=" << format_number(stats.excess_kurtosis) << "\n";
    if (analytic) {
        out << "analytic_value=" << format_number(analytic->value)
            << " source=" << analytic_source_name(analytic->source)
            << " deviation=" << format_number(std::abs(stats.mean - analytic->value)) << "\n";
    }
    out << "report=" << report_path.string() << "\n"
        << "histogram=" << hist_path.string() << "\n";
    return 0;
}

int cmd_census(CLI::App* cmd, CommonOptions& opt, std::ostream& out) {
    load_common_config(cmd, opt, false);
    const SimulationConfig cfg = to_config(opt);
    if (cfg.params.alpha != 0.0 ||
        cfg.params.temperature.kind() != Temperature::Kind::Infinite ||
        cfg.params.mode != ChoiceMode::Probabilistic) {
        throw std::invalid_argument(
            "census requires the random-choice regime: --alpha 0 --temperature inf");
    }
    const auto dir = prepare_out_dir(opt.out_dir);

    const Histogram census = occupancy_census(cfg);
    const double lambda =
        static_cast<double>(cfg.agents) / static_cast<double>(cfg.restaurants);
    const auto census_path = dir / ("census_" + digest_hex(cfg.digest()) + ".csv");
    write_text_file(census_path, census_csv(census, lambda));

    out << "lambda=" << format_number(lambda) << "\n"
        << "census=" << census_path.string() << "\n";
    return 0;
}

struct SweepOptions {
    CommonOptions common;
    std::vector<double> alphas;
    std::vector<std::string> temperatures;
    unsigned workers = 0;
};

int cmd_sweep(CLI::App* cmd, SweepOptions& opt, std::ostream& out) {
    if (!opt.common.config_file.empty()) {
        for (const auto& [key, value] : read_flat_config(opt.common.config_file)) {
            if (apply_common_config(cmd, opt.common, false, key, value)) continue;
            if (key == "alphas") {
                if (cmd->count("--alphas") == 0) {
                    opt.alphas.clear();
                    for (const auto& a : split_list(value)) {
                        opt.alphas.push_back(parse_double_value(key, a));
                    }
                }
            } else if (key == "temperatures") {
                if (cmd->count("--temperatures") == 0) opt.temperatures = split_list(value);
            } else if (key == "workers") {
                if (cmd->count("--workers") == 0) opt.workers = parse_u32_value(key, value);
            } else {
                throw std::invalid_argument("unknown config key: " + key);
            }
        }
    }

    if (opt.common.n == 0) throw std::invalid_argument("missing required option --n");
    SweepGrid grid;
    grid.alphas = opt.alphas;
    for (const std::string& t : opt.temperatures) {
        grid.temperatures.push_back(parse_temperature(t));
    }
    grid.per_cell.restaurants = opt.common.n;
    grid.per_cell.agents = opt.common.agents == 0 ? opt.common.n : opt.common.agents;
    grid.per_cell.evenings = opt.common.evenings;
    grid.per_cell.burn_in = opt.common.burn_in;
    grid.per_cell.seed = opt.common.seed;
    grid.validate();
    const auto dir = prepare_out_dir(opt.common.out_dir);

    unsigned workers = opt.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

    const std::vector<SweepCell> cells = run_sweep(grid, workers);
    const auto sweep_path = dir / "sweep.csv";
    write_text_file(sweep_path, sweep_csv(cells));

    out << "cells=" << cells.size() << "\n"
        << "sweep=" << sweep_path.string() << "\n";
    return 0;
}

struct AnalyticOptions {
    bool poisson_utilization = false;
    bool poisson_pmf = false;
    bool rank = false;
    bool fixed_point = false;
    double lambda = 1.0;
    std::uint64_t m = 0;
    std::uint32_t n = 1000;
    double tol = 1e-12;
};

int cmd_analytic(const AnalyticOptions& opt, std::ostream& out) {
    const int selected = int(opt.poisson_utilization) + int(opt.poisson_pmf) +
                         int(opt.rank) + int(opt.fixed_point);
    if (selected != 1) {
        throw std::invalid_argument(
            "pick exactly one of --poisson-utilization, --poisson-pmf, --rank, --fixed-point");
    }

    AnalyticPrediction p;
    if (opt.poisson_utilization) {
        p.source = AnalyticSource::PoissonUtilization;
        p.inputs.lambda = opt.lambda;
        p.value = poisson_utilization(opt.lambda);
    } else if (opt.poisson_pmf) {
        p.source = AnalyticSource::PoissonPmf;
        p.inputs.lambda = opt.lambda;
        p.inputs.m = opt.m;
        p.value = poisson_pmf(opt.lambda, opt.m);
    } else if (opt.rank) {
        p.source = AnalyticSource::RankPairing;
        p.inputs.n = opt.n;
        p.value = rank_utilization_estimate(opt.n).f_bar;
    } else {
        p.source = AnalyticSource::AvoidCrowdFixedPoint;
        p.inputs.tolerance = opt.tol;
        p.value = avoid_crowd_fixed_point(opt.tol).value;
    }

    out << analytic_json(p).dump(2) << "\n";
    return 0;
}

}  // namespace

Temperature parse_temperature(const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("temperature must be inf, 0, or a positive number");
    }
    if (pos != text.size() || std::isnan(v) || v < 0.0) {
        throw std::invalid_argument("temperature must be inf, 0, or a positive number");
    }
    if (std::isinf(v)) return Temperature::infinite();
    if (v == 0.0) return Temperature::zero();
    return Temperature::finite(v);
}

std::string format_temperature(const Temperature& t) {
    switch (t.kind()) {
        case Temperature::Kind::Infinite: return "inf";
        case Temperature::Kind::Zero: return "0";
        case Temperature::Kind::Finite: return format_number(t.value());
    }
    throw std::logic_error("unreachable temperature kind");
}

ChoiceMode parse_mode(const std::string& text) {
    if (text == "probabilistic") return ChoiceMode::Probabilistic;
    if (text == "dictated") return ChoiceMode::DictatedRotation;
    throw std::invalid_argument("mode must be probabilistic or dictated");
}

std::string format_mode(ChoiceMode mode) {
    return mode == ChoiceMode::DictatedRotation ? "dictated" : "probabilistic";
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void SweepGrid::validate() const {
    if (alphas.empty()) throw std::invalid_argument("sweep needs at least one alpha");
    if (temperatures.empty()) throw std::invalid_argument("sweep needs at least one temperature");
    SimulationConfig probe = per_cell;
    for (double a : alphas) {
        probe.params.alpha = a;
        probe.params.mode = ChoiceMode::Probabilistic;
        probe.validate();
    }
}

std::vector<SweepCell> run_sweep(const SweepGrid& grid, unsigned workers) {
    grid.validate();

    std::vector<double> alphas = grid.alphas;
    std::sort(alphas.begin(), alphas.end());
    std::vector<Temperature> temps = grid.temperatures;
    std::stable_sort(temps.begin(), temps.end(),
                     [](const Temperature& a, const Temperature& b) {
                         return temperature_sort_key(a) < temperature_sort_key(b);
                     });

    const std::size_t n_cells = alphas.size() * temps.size();
    std::vector<SweepCell> cells(n_cells);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) {
            SimulationConfig cfg = grid.per_cell;
            cfg.params.alpha = alphas[i / temps.size()];
            cfg.params.temperature = temps[i % temps.size()];
            cfg.params.mode = ChoiceMode::Probabilistic;
            cfg.seed = RngStream::mix_seed(grid.per_cell.seed, i);

            const UtilizationSeries series = run(cfg);
            const SummaryStats stats = summary(series.values, cfg.restaurants);
            cells[i] = {cfg.params.alpha, cfg.params.temperature, stats.mean, stats.std,
                        series.values.size()};
        }
    };

    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_cells)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return cells;
}

std::optional<AnalyticPrediction> match_analytic(const SimulationConfig& cfg) {
    if (cfg.params.mode != ChoiceMode::Probabilistic) return std::nullopt;
    const auto kind = cfg.params.temperature.kind();

    if (cfg.params.alpha == 0.0 && kind == Temperature::Kind::Infinite) {
        AnalyticPrediction p;
        p.source = AnalyticSource::PoissonUtilization;
        p.inputs.lambda =
            static_cast<double>(cfg.agents) / static_cast<double>(cfg.restaurants);
        p.value = poisson_utilization(p.inputs.lambda);
        return p;
    }
    if (cfg.params.alpha == 1.0 && kind == Temperature::Kind::Infinite &&
        cfg.agents == cfg.restaurants && cfg.restaurants % 2 == 0) {
        AnalyticPrediction p;
        p.source = AnalyticSource::RankPairing;
        p.inputs.n = cfg.restaurants;
        p.value = rank_utilization_estimate(cfg.restaurants).f_bar;
        return p;
    }
    if (cfg.params.alpha == 0.0 && kind == Temperature::Kind::Zero &&
        cfg.agents == cfg.restaurants) {
        AnalyticPrediction p;
        p.source = AnalyticSource::AvoidCrowdFixedPoint;
        p.inputs.tolerance = 1e-12;
        p.value = avoid_crowd_fixed_point(p.inputs.tolerance).value;
        return p;
    }
    return std::nullopt;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::string csv = "alpha,temperature,mean_f,std_f,n_evenings\n";
    for (const SweepCell& c : cells) {
        csv += format_number(c.alpha);
        csv += ',';
        csv += format_temperature(c.temperature);
        csv += ',';
        csv += format_number(c.mean_f);
        csv += ',';
        csv += format_number(c.std_f);
        csv += ',';
        csv += std::to_string(c.n_evenings);
        csv += '\n';
    }
    return csv;
}

std::string census_csv(const Histogram& census, double lambda) {
    std::string csv = "m,empirical_fraction,poisson_pmf,deviation\n";
    for (std::size_t m = 0; m < census.bin_count(); ++m) {
        const double empirical = census.densities[m];
        const double predicted = poisson_pmf(lambda, m);
        csv += std::to_string(m);
        csv += ',';
        csv += format_number(empirical);
        csv += ',';
        csv += format_number(predicted);
        csv += ',';
        csv += format_number(empirical - predicted);
        csv += '\n';
    }
    return csv;
}

std::string histogram_csv(const Histogram& h) {
    std::string csv = "bin_center,density\n";
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
        csv += format_number(h.center(i));
        csv += ',';
        csv += format_number(h.densities[i]);
        csv += '\n';
    }
    return csv;
}

std::string run_report_json(const SimulationConfig& cfg, const SummaryStats& stats,
                            const std::optional<AnalyticPrediction>& analytic) {
    ordered_json report;
    report["config"] = ordered_json{
        {"restaurants", cfg.restaurants},
        {"agents", cfg.agents},
        {"alpha", cfg.params.alpha},
        {"temperature", format_temperature(cfg.params.temperature)},
        {"mode", format_mode(cfg.params.mode)},
        {"evenings", cfg.evenings},
        {"burn_in", cfg.burn_in},
        {"seed", cfg.seed},
        {"digest", digest_hex(cfg.digest())},
    };
    report["summary"] = ordered_json{
        {"mean", stats.mean},
        {"std", stats.std},
        {"mode", stats.mode},
        {"skewness", stats.skewness},
        {"excess_kurtosis", stats.excess_kurtosis},
    };
    if (analytic) {
        ordered_json a = analytic_json(*analytic);
        a["deviation"] = std::abs(stats.mean - analytic->value);
        report["analytic"] = a;
    }
    return report.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monte Carlo simulator for the ranked-restaurant occupancy game"};
    app.require_subcommand(1);

    CommonOptions sim_opt;
    CLI::App* sim = app.add_subcommand("simulate", "run one simulation and report statistics");
    add_common_options(sim, sim_opt, true);

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "run a grid of (alpha, temperature) cells");
    add_common_options(sweep, sweep_opt.common, false);
    sweep->add_option("--alphas", sweep_opt.alphas, "alpha grid values")->delimiter(',');
    sweep->add_option("--temperatures", sweep_opt.temperatures, "temperature grid values")
        ->delimiter(',');
    sweep->add_option("--workers", sweep_opt.workers, "worker threads (default: all cores)");

    AnalyticOptions ana_opt;
    CLI::App* ana = app.add_subcommand("analytic", "evaluate a closed-form prediction");
    ana->add_flag("--poisson-utilization", ana_opt.poisson_utilization,
                  "occupied fraction under random choice");
    ana->add_flag("--poisson-pmf", ana_opt.poisson_pmf, "arrival count probability");
    ana->add_flag("--rank", ana_opt.rank, "rank-pairing utilization estimate");
    ana->add_flag("--fixed-point", ana_opt.fixed_point, "crowd-avoiding stationary fraction");
    ana->add_option("--lambda", ana_opt.lambda, "agent density");
    ana->add_option("--m", ana_opt.m, "arrival count");
    ana->add_option("--n", ana_opt.n, "number of restaurants");
    ana->add_option("--tol", ana_opt.tol, "bisection tolerance");

    CommonOptions census_opt;
    CLI::App* census = app.add_subcommand("census", "pooled arrival-count distribution");
    add_common_options(census, census_opt, false);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("kpr");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim, sim_opt, out);
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_opt, out);
        if (ana->parsed()) return cmd_analytic(ana_opt, out);
        if (census->parsed()) return cmd_census(census, census_opt, out);
        throw std::logic_error("no subcommand dispatched");
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace kpr
