#include "cloe/cloe.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

#include "cloe/errors.hpp"
#include "cloe/io.hpp"

namespace cloe {

namespace {

constexpr double kNormFloor = 1e-300;
// Slopes below this magnitude count as zero when looking for sign changes.
constexpr double kSlopeDeadBand = 1e-9;

double log_distance(double a, double b)
{
    return std::abs(std::log10(std::max(a, kNormFloor)) - std::log10(std::max(b, kNormFloor)));
}

std::size_t nearest_index(const std::vector<double>& pts, double omega)
{
    const auto it = std::lower_bound(pts.begin(), pts.end(), omega);
    if (it == pts.begin()) return 0;
    if (it == pts.end()) return pts.size() - 1;
    const auto hi = static_cast<std::size_t>(std::distance(pts.begin(), it));
    return log_distance(pts[hi - 1], omega) <= log_distance(pts[hi], omega) ? hi - 1 : hi;
}

std::vector<CMatrix> responses_on(const Interpolant& h, const FrequencyGrid& grid)
{
    std::vector<CMatrix> out;
    out.reserve(grid.size());
    for (const double w : grid.points()) out.push_back(evaluate_interpolant(h, w));
    return out;
}

int sign_of(double slope)
{
    if (slope > kSlopeDeadBand) return 1;
    if (slope < -kSlopeDeadBand) return -1;
    return 0;
}

} // namespace

void CloeConfig::validate() const
{
    if (!(omega_min > 0.0) || !std::isfinite(omega_max) || !(omega_min < omega_max))
        throw InvalidRange("interval needs 0 < omega_min < omega_max");
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw InvalidRange("epsilon must lie in (0, 1)");
    if (n_f < 16) throw InvalidRange("n_f must be at least 16");
    if (points_per_iteration != 1 && points_per_iteration != 2)
        throw InvalidRange("points_per_iteration must be 1 or 2");
    if (guard_cells < 0) throw InvalidRange("guard_cells must be >= 0");
    if (!(rank_tol >= 0.0) || !std::isfinite(rank_tol)) throw InvalidRange("rank_tol must be finite and >= 0");
    if (max_points <= 2) throw BudgetTooSmall("max_points must exceed 2");
}

CMatrix Oracle::evaluate(double omega)
{
    if (const auto it = cache_.find(omega); it != cache_.end()) return it->second;
    CMatrix value = compute(omega);
    if (value.rows() != m_ || value.cols() != p_) throw DimensionMismatch("oracle returned a response of wrong size");
    ++calls_;
    cache_.emplace(omega, value);
    return value;
}

ModelOracle::ModelOracle(StateSpaceModel model)
    : Oracle(model.outputs(), model.inputs()), model_(std::move(model))
{
}

CMatrix ModelOracle::compute(double omega)
{
    return evaluate_transfer(model_, omega);
}

TabulatedOracle::TabulatedOracle(std::vector<FrequencySample> samples)
    : Oracle(samples.empty() ? 0 : samples.front().response.rows(),
             samples.empty() ? 0 : samples.front().response.cols()),
      samples_(std::move(samples))
{
    if (samples_.empty()) throw InsufficientData("tabulated oracle needs samples");
    std::sort(samples_.begin(), samples_.end(),
              [](const FrequencySample& a, const FrequencySample& b) { return a.omega < b.omega; });
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (samples_[i].omega == samples_[i - 1].omega)
            throw DuplicateFrequency("frequency " + format_double(samples_[i].omega) + " tabulated twice");
}

double TabulatedOracle::snap(double omega) const
{
    std::vector<double> pts;
    pts.reserve(samples_.size());
    for (const auto& s : samples_) pts.push_back(s.omega);
    return pts[nearest_index(pts, omega)];
}

CMatrix TabulatedOracle::compute(double omega)
{
    const auto it = std::lower_bound(samples_.begin(), samples_.end(), omega,
                                     [](const FrequencySample& s, double w) { return s.omega < w; });
    if (it == samples_.end() || it->omega != omega)
        throw InvalidRange("frequency " + format_double(omega) + " is not tabulated");
    return it->response;
}

std::string to_string(CandidateKind kind)
{
    switch (kind) {
    case CandidateKind::peak: return "peak";
    case CandidateKind::valley: return "valley";
    case CandidateKind::max_slope: return "max_slope";
    case CandidateKind::min_slope: return "min_slope";
    }
    return "unknown";
}

std::string to_string(Termination reason)
{
    switch (reason) {
    case Termination::converged: return "converged";
    case Termination::budget: return "budget";
    case Termination::grid_exhausted: return "grid_exhausted";
    }
    return "unknown";
}

NormCurve norm_curve(FrequencyGrid grid, std::vector<double> f)
{
    const std::size_t n = grid.size();
    if (f.size() != n) throw DimensionMismatch("curve and grid lengths differ");
    std::vector<double> lf(n);
    std::vector<double> lw(n);
    for (std::size_t i = 0; i < n; ++i) {
        lf[i] = std::log10(std::max(f[i], kNormFloor));
        lw[i] = std::log10(grid[i]);
    }
    std::vector<double> slope(n, 0.0);
    if (n >= 2) {
        slope[0] = (lf[1] - lf[0]) / (lw[1] - lw[0]);
        slope[n - 1] = (lf[n - 1] - lf[n - 2]) / (lw[n - 1] - lw[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (lf[i + 1] - lf[i - 1]) / (lw[i + 1] - lw[i - 1]);
    }
    return NormCurve{std::move(grid), std::move(f), std::move(slope)};
}

NormCurve norm_curve(const FrequencyGrid& grid, const std::vector<CMatrix>& responses)
{
    std::vector<double> f;
    f.reserve(responses.size());
    for (const auto& r : responses) f.push_back(spectral_norm(r));
    return norm_curve(grid, std::move(f));
}

NormCurve norm_curve(const Interpolant& h, const FrequencyGrid& grid)
{
    return norm_curve(grid, responses_on(h, grid));
}

std::vector<double> init_set(const CloeConfig& config)
{
    return {config.omega_min, config.omega_max};
}

std::vector<Candidate> detect_candidates(const NormCurve& curve, const std::vector<double>& interpolated, int guard,
                                         int count, const std::vector<std::size_t>& blocked)
{
    const auto& pts = curve.grid.points();
    const std::size_t n = pts.size();
    if (curve.f.size() != n || curve.slope.size() != n) throw DimensionMismatch("inconsistent norm curve");

    std::vector<bool> admissible(n, true);
    for (const std::size_t b : blocked)
        if (b < n) admissible[b] = false;
    const auto g = static_cast<std::size_t>(std::max(guard, 0));
    for (const double w : interpolated) {
        const std::size_t c = nearest_index(pts, w);
        const std::size_t lo = c >= g ? c - g : 0;
        const std::size_t hi = std::min(n - 1, c + g);
        for (std::size_t i = lo; i <= hi; ++i) admissible[i] = false;
    }
    if (std::none_of(admissible.begin(), admissible.end(), [](bool a) { return a; }))
        throw GridExhausted("no admissible frequency left on the search grid");

    std::vector<Candidate> out;
    std::vector<bool> taken(n, false);
    auto take = [&](std::size_t i, CandidateKind kind) {
        out.push_back({pts[i], kind, i});
        taken[i] = true;
    };
    const auto slots = static_cast<std::size_t>(std::max(count, 0));

    // Phase 1: sign changes of the slope, skipping over dead-band zeros.
    std::optional<std::size_t> best_peak;
    std::optional<std::size_t> best_valley;
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < n; ++i) {
        const int s = sign_of(curve.slope[i]);
        if (s == 0) continue;
        if (prev && sign_of(curve.slope[*prev]) != s) {
            const bool peak = s < 0;
            std::size_t at = *prev;
            for (std::size_t j = *prev; j <= i; ++j)
                if (peak ? curve.f[j] > curve.f[at] : curve.f[j] < curve.f[at]) at = j;
            if (admissible[at]) {
                auto& best = peak ? best_peak : best_valley;
                if (!best || (peak ? curve.f[at] > curve.f[*best] : curve.f[at] < curve.f[*best])) best = at;
            }
        }
        prev = i;
    }
    if (out.size() < slots && best_peak) take(*best_peak, CandidateKind::peak);
    if (out.size() < slots && best_valley && !taken[*best_valley]) take(*best_valley, CandidateKind::valley);

    // Phase 2: slope extremes.
    auto extreme_slope = [&](bool maximize) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < n; ++i) {
            if (!admissible[i] || taken[i]) continue;
            if (!best || (maximize ? curve.slope[i] > curve.slope[*best] : curve.slope[i] < curve.slope[*best]))
                best = i;
        }
        return best;
    };
    if (slots - out.size() == 1) {
        const auto hi = extreme_slope(true);
        const auto lo = extreme_slope(false);
        if (hi && lo) {
            const double up = std::abs(curve.slope[*hi]);
            const double down = std::abs(curve.slope[*lo]);
            if (up > down || (up == down && *hi <= *lo))
                take(*hi, CandidateKind::max_slope);
            else
                take(*lo, CandidateKind::min_slope);
        }
    } else {
        while (out.size() < slots) {
            const bool maximize = (slots - out.size()) % 2 == 0;
            const auto idx = extreme_slope(maximize);
            if (!idx) break;
            take(*idx, maximize ? CandidateKind::max_slope : CandidateKind::min_slope);
        }
    }
    return out;
}

double stopping_metric(const std::vector<CMatrix>& prev, const std::vector<CMatrix>& curr)
{
    if (prev.size() != curr.size()) throw DimensionMismatch("response lists differ in length");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < curr.size(); ++i) {
        num = std::max(num, spectral_norm(prev[i] - curr[i]));
        den = std::max(den, spectral_norm(curr[i]));
    }
    if (den == 0.0) throw ZeroDenominator("current interpolant vanishes on the whole grid");
    return num / den;
}

namespace {

std::vector<FrequencySample> collect(const std::map<double, CMatrix>& data)
{
    std::vector<FrequencySample> out;
    out.reserve(data.size());
    for (const auto& [w, r] : data) out.push_back({w, r});
    return out;
}

std::vector<double> keys(const std::map<double, CMatrix>& data)
{
    std::vector<double> out;
    for (const auto& kv : data) out.push_back(kv.first);
    return out;
}

double metric_or_zero(const std::vector<CMatrix>& prev, const std::vector<CMatrix>& curr)
{
    try {
        return stopping_metric(prev, curr);
    } catch (const ZeroDenominator&) {
        // Both interpolants identically zero on the grid.
        for (std::size_t i = 0; i < prev.size(); ++i)
            if (spectral_norm(prev[i]) != 0.0) throw;
        return 0.0;
    }
}

std::vector<Candidate> next_points(Oracle& oracle, const NormCurve& curve, const std::vector<double>& set,
                                   const CloeConfig& config)
{
    std::vector<std::size_t> blocked;
    while (true) {
        const auto found =
            detect_candidates(curve, set, config.guard_cells, config.points_per_iteration, blocked);
        std::vector<Candidate> accepted;
        for (const auto& c : found) {
            const double w = oracle.snap(c.omega);
            const bool known = std::binary_search(set.begin(), set.end(), w) ||
                               std::any_of(accepted.begin(), accepted.end(),
                                           [w](const Candidate& a) { return a.omega == w; });
            if (known)
                blocked.push_back(c.index);
            else
                accepted.push_back({w, c.kind, c.index});
        }
        if (!accepted.empty()) return accepted;
        if (found.empty()) throw GridExhausted("no candidate frequency left");
    }
}

} // namespace

CloeResult run_cloe(Oracle& oracle, const CloeConfig& config)
{
    config.validate();
    const FrequencyGrid grid = log_grid(config.omega_min, config.omega_max, static_cast<std::size_t>(config.n_f));
    const auto budget = static_cast<std::size_t>(config.max_points);

    std::map<double, CMatrix> data;
    for (const double w : init_set(config)) {
        const double at = oracle.snap(w);
        data.emplace(at, oracle.evaluate(at));
    }

    CloeResult result;
    CloeTrace& trace = result.trace;
    std::optional<std::vector<CMatrix>> previous;
    auto build = [&](int k) {
        IterationRecord rec;
        rec.k = k;
        rec.interpolation_set = keys(data);
        result.interpolant = interpolate(collect(data), config.rank_tol);
        rec.sv_row = result.interpolant.sv_row;
        rec.sv_col = result.interpolant.sv_col;
        rec.order = result.interpolant.order();
        rec.oracle_calls = oracle.call_count();
        auto responses = responses_on(result.interpolant, grid);
        if (previous) rec.e_tilde = metric_or_zero(*previous, responses);
        return std::pair{std::move(rec), std::move(responses)};
    };

    int k = 0;
    bool stopped = false;
    while (data.size() <= budget) {
        ++k;
        auto [rec, responses] = build(k);
        if (rec.e_tilde && *rec.e_tilde <= config.epsilon) {
            trace.termination = Termination::converged;
            trace.iterations.push_back(std::move(rec));
            stopped = true;
            break;
        }
        const NormCurve curve = norm_curve(grid, responses);
        try {
            rec.candidates = next_points(oracle, curve, rec.interpolation_set, config);
        } catch (const GridExhausted&) {
            trace.termination = Termination::grid_exhausted;
            trace.iterations.push_back(std::move(rec));
            stopped = true;
            break;
        }
        for (const auto& c : rec.candidates) data.emplace(c.omega, oracle.evaluate(c.omega));
        trace.iterations.push_back(std::move(rec));
        previous = std::move(responses);
    }
    if (!stopped) {
        // Budget reached: the last enrichment is folded into the returned interpolant.
        trace.termination = Termination::budget;
        auto [rec, responses] = build(k + 1);
        trace.iterations.push_back(std::move(rec));
    }
    return result;
}

nlohmann::json trace_to_json(const CloeTrace& trace)
{
    nlohmann::json iterations = nlohmann::json::array();
    for (const auto& rec : trace.iterations) {
        nlohmann::json cands = nlohmann::json::array();
        for (const auto& c : rec.candidates) cands.push_back({{"omega", c.omega}, {"kind", to_string(c.kind)}});
        nlohmann::json item;
        item["k"] = rec.k;
        item["I"] = rec.interpolation_set;
        item["candidates"] = std::move(cands);
        item["e_tilde"] = rec.e_tilde ? nlohmann::json(*rec.e_tilde) : nlohmann::json(nullptr);
        item["sv_row"] = rec.sv_row;
        item["sv_col"] = rec.sv_col;
        item["nr"] = rec.order;
        item["oracle_calls"] = rec.oracle_calls;
        iterations.push_back(std::move(item));
    }
    return {{"termination", to_string(trace.termination)}, {"iterations", std::move(iterations)}};
}

} // namespace cloe
