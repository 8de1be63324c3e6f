#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kpr/analytics.hpp"
#include "kpr/engine.hpp"

namespace kpr {

// Accepts "inf", "0", or a positive decimal.
Temperature parse_temperature(const std::string& text);
std::string format_temperature(const Temperature& t);

// Accepts "probabilistic" or "dictated".
ChoiceMode parse_mode(const std::string& text);
std::string format_mode(ChoiceMode mode);

// Six significant digits, the precision used in all CSV output.
std::string format_number(double v);

struct SweepGrid {
    std::vector<double> alphas;
    std::vector<Temperature> temperatures;
    SimulationConfig per_cell;  // alpha and temperature are overwritten per cell

    void validate() const;
};

struct SweepCell {
    double alpha = 0.0;
    Temperature temperature = Temperature::infinite();
    double mean_f = 0.0;
    double std_f = 0.0;
    std::uint64_t n_evenings = 0;
};

// Runs every (alpha, temperature) cell of the grid on a worker pool. Cells are
// ordered by (alpha, temperature) with Zero < any Finite < Infinite; each cell
// seeds its own stream from (base seed, cell index), so the result is
// independent of worker count and scheduling.
std::vector<SweepCell> run_sweep(const SweepGrid& grid, unsigned workers);

// The analytic value this configuration should reproduce, when one exists:
// random choice, strict rank at equal agent and restaurant counts, or the
// vacancy-seeking zero-temperature limit.
std::optional<AnalyticPrediction> match_analytic(const SimulationConfig& cfg);

std::string sweep_csv(const std::vector<SweepCell>& cells);
std::string census_csv(const Histogram& census, double lambda);
std::string histogram_csv(const Histogram& h);
std::string run_report_json(const SimulationConfig& cfg, const SummaryStats& stats,
                            const std::optional<AnalyticPrediction>& analytic);

// Full command-line entry point; args exclude the program name.
// Returns 0 on success, 1 on runtime failure, 2 on usage or config errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpr
