#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cloe/cloe.hpp"

namespace cloe {

using ResponseFn = std::function<CMatrix(double)>;

/// max_ω σmax(G - H) / max_ω σmax(G) over the evaluation grid.
/// Throws ZeroDenominator when G vanishes on the grid.
double linf_relative_error(const ResponseFn& truth, const ResponseFn& approx, const FrequencyGrid& eval_grid);
double linf_relative_error(const StateSpaceModel& truth, const Interpolant& approx, const FrequencyGrid& eval_grid);

/// Loewner interpolant on r log-spaced samples of [omega_min, omega_max].
Interpolant coarse_loewner(Oracle& oracle, int r, double omega_min, double omega_max,
                           double rank_tol = kDefaultRankTol);

/// Default evaluation grid for the error metric: 2000 log points over the interval.
FrequencyGrid default_eval_grid(const CloeConfig& config);

inline constexpr double kExactThreshold = 1e-12;

struct ComparisonRecord {
    std::string model_id;
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    Eigen::Index p = 0;
    int n_f = 0;
    double epsilon = 0.0;
    std::size_t r_cloe = 0;
    double e_cloe = 0.0;
    double e_coarse = 0.0;
    std::optional<double> ratio; ///< e_coarse / e_cloe, set only when e_cloe > 0
    bool exact = false;          ///< e_cloe below kExactThreshold
    std::size_t oracle_calls = 0;
    std::size_t coarse_calls = 0;
    std::string termination;     ///< termination reason, or "error: ..." for a failed row
    double wall_time = 0.0;      ///< seconds

    bool failed() const { return termination.rfind("error", 0) == 0; }
};

/// Runs CLOE, then a coarse interpolant with exactly as many oracle calls,
/// and scores both on eval_grid. Errors are rethrown as Error with the model id.
ComparisonRecord run_comparison(const std::string& model_id, const StateSpaceModel& model, const CloeConfig& config,
                                const FrequencyGrid& eval_grid);

struct SuiteModel {
    std::string id;
    StateSpaceModel model;
};

/// Twelve seeded resonant models, orders 4 to 20, SISO and MIMO.
std::vector<SuiteModel> seeded_suite();

struct SweepOptions {
    std::vector<int> n_f_values{200, 300, 400, 500};
    std::vector<double> epsilon_values{0.01, 0.05, 0.10, 0.30};
    CloeConfig base{.max_points = 50};
    std::size_t eval_points = 2000;
    unsigned threads = 0; ///< 0 uses the hardware concurrency
};

/// Cartesian product models x n_f x epsilon in that nesting order. A failing
/// row is recorded with an "error: ..." termination and the sweep goes on.
std::vector<ComparisonRecord> sweep(const std::vector<SuiteModel>& models, const SweepOptions& options);

std::string sweep_csv_header();
std::string format_sweep_csv(const std::vector<ComparisonRecord>& records);
void write_sweep_csv(const std::vector<ComparisonRecord>& records, const std::filesystem::path& path);

struct SweepSummary {
    std::size_t records = 0;
    std::size_t failures = 0;
    std::size_t exact = 0;
    std::optional<double> median_ratio; ///< over non-exact rows
    std::optional<double> win_fraction; ///< share of non-exact rows with e_cloe <= e_coarse
    std::map<double, double> median_e_cloe_by_epsilon;
};

SweepSummary summarize(const std::vector<ComparisonRecord>& records);

double median(std::vector<double> values);

} // namespace cloe
