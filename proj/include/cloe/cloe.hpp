#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cloe/loewner.hpp"
#include "cloe/lti.hpp"

namespace cloe {

/// Settings of one constructive interpolation run.
struct CloeConfig {
    double omega_min = 1e-3;
    double omega_max = 1e3;
    int max_points = 40;           ///< budget r̄, must exceed 2
    double epsilon = 0.05;         ///< stop tolerance as a fraction
    int n_f = 400;                 ///< size of the log-spaced search grid
    int points_per_iteration = 2;  ///< 1 or 2
    int guard_cells = 2;           ///< exclusion radius around interpolated points, in grid cells
    double rank_tol = kDefaultRankTol;

    /// Throws InvalidRange, or BudgetTooSmall when max_points <= 2.
    void validate() const;
};

/// The expensive system. Evaluations are cached per frequency and only
/// cache misses count as calls.
class Oracle {
public:
    virtual ~Oracle() = default;

    CMatrix evaluate(double omega);
    std::size_t call_count() const noexcept { return calls_; }
    Eigen::Index outputs() const noexcept { return m_; }
    Eigen::Index inputs() const noexcept { return p_; }

    /// Nearest frequency the oracle can actually provide.
    virtual double snap(double omega) const { return omega; }

protected:
    Oracle(Eigen::Index m, Eigen::Index p) : m_(m), p_(p) {}
    virtual CMatrix compute(double omega) = 0;

private:
    Eigen::Index m_;
    Eigen::Index p_;
    std::size_t calls_ = 0;
    std::map<double, CMatrix> cache_;
};

class ModelOracle final : public Oracle {
public:
    explicit ModelOracle(StateSpaceModel model);
    const StateSpaceModel& model() const noexcept { return model_; }

protected:
    CMatrix compute(double omega) override;

private:
    StateSpaceModel model_;
};

/// Fixed dataset. Requests are snapped to the nearest tabulated frequency
/// (log distance); asking for any other frequency throws InvalidRange.
class TabulatedOracle final : public Oracle {
public:
    explicit TabulatedOracle(std::vector<FrequencySample> samples);
    double snap(double omega) const override;
    const std::vector<FrequencySample>& samples() const noexcept { return samples_; }

protected:
    CMatrix compute(double omega) override;

private:
    std::vector<FrequencySample> samples_;
};

enum class CandidateKind { peak, valley, max_slope, min_slope };
enum class Termination { converged, budget, grid_exhausted };

std::string to_string(CandidateKind kind);
std::string to_string(Termination reason);

struct Candidate {
    double omega = 0.0;
    CandidateKind kind = CandidateKind::peak;
    std::size_t index = 0; ///< position on the search grid
};

/// f(ω) = ||H(jω)||_2 on a log grid with its log-log finite-difference slope.
struct NormCurve {
    FrequencyGrid grid;
    std::vector<double> f;
    std::vector<double> slope;
};

/// Central differences inside, one-sided at the ends; f is clamped at 1e-300 before the log.
NormCurve norm_curve(FrequencyGrid grid, std::vector<double> f);
NormCurve norm_curve(const FrequencyGrid& grid, const std::vector<CMatrix>& responses);
NormCurve norm_curve(const Interpolant& h, const FrequencyGrid& grid);

/// Starting set {omega_min, omega_max}.
std::vector<double> init_set(const CloeConfig& config);

/// Picks up to `count` grid frequencies where the curve shows the strongest dynamics.
///
/// Phase 1 looks at sign changes of the slope: the highest admissible peak,
/// then the lowest admissible valley. Phase 2 fills what is left with the
/// steepest rising then steepest falling admissible points; a single
/// remaining slot goes to whichever of the two is steeper. Indices within
/// `guard` cells of a member of `interpolated`, and those in `blocked`, are
/// not admissible. Ties go to the lower frequency. Throws GridExhausted if
/// nothing is admissible.
std::vector<Candidate> detect_candidates(const NormCurve& curve, const std::vector<double>& interpolated,
                                         int guard, int count, const std::vector<std::size_t>& blocked = {});

/// max_ω ||prev(jω) - curr(jω)||_2 / max_ω ||curr(jω)||_2 over a shared grid.
double stopping_metric(const std::vector<CMatrix>& prev, const std::vector<CMatrix>& curr);

struct IterationRecord {
    int k = 0;
    std::vector<double> interpolation_set; ///< sorted
    std::vector<Candidate> candidates;
    std::optional<double> e_tilde; ///< absent at k = 1
    std::vector<double> sv_row;
    std::vector<double> sv_col;
    Eigen::Index order = 0;
    std::size_t oracle_calls = 0;
};

struct CloeTrace {
    std::vector<IterationRecord> iterations;
    Termination termination = Termination::budget;
};

struct CloeResult {
    Interpolant interpolant;
    CloeTrace trace;
};

/// Constructive interpolation loop. The returned interpolant is built on
/// every frequency the oracle was queried at.
CloeResult run_cloe(Oracle& oracle, const CloeConfig& config);

nlohmann::json trace_to_json(const CloeTrace& trace);

} // namespace cloe
