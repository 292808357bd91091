// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"

#include "cloe/bench.hpp"
#include "cloe/errors.hpp"
#include "cloe/loewner.hpp"

using namespace cloe;
using namespace cloe::testing;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail)
{
    std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Dataset {
    StateSpaceModel model;
    std::vector<FrequencySample> samples;
};

// 50 datasets: orders 1-8, m, p in 1..3, 4-20 samples (even, so the
// alternating partition gives square pencils) at random log frequencies.
std::vector<Dataset> random_datasets()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> logw(std::log10(0.05), std::log10(20.0));
    std::vector<Dataset> out;
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + t % 8;
        const int m = 1 + (t / 8) % 3;
        const int p = 1 + (t / 3) % 3;
        const int count = 4 + 2 * (t % 9);
        const auto g = random_minimal_model(1000 + static_cast<std::uint64_t>(t), n, m, p);
        std::vector<double> omegas;
        while (static_cast<int>(omegas.size()) < count) {
            const double w = std::pow(10.0, logw(rng));
            bool close = false;
            for (const double o : omegas) close = close || std::abs(std::log10(o / w)) < 1e-3;
            if (!close) omegas.push_back(w);
        }
        std::sort(omegas.begin(), omegas.end());
        out.push_back({g, sample_at(g, omegas)});
    }
    return out;
}

TangentialDataset tangential(const Dataset& d)
{
    return partition_tangential(conjugate_augment(d.samples), d.model.outputs(), d.model.inputs());
}

void criterion_interpolation(const std::vector<Dataset>& sets)
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    bool ok = true;
    for (const auto& d : sets) {
        try {
            const auto h = interpolate(d.samples);
            worst = std::max(worst, tangential_residual(h, tangential(d)));
        } catch (const std::exception& e) {
            ok = false;
            std::printf("  dataset failed: %s\n", e.what());
        }
    }
    const double secs = seconds_since(t0);
    report(1, "interpolation exactness", ok && worst <= 1e-6 && secs < 10.0,
           fmt("%zu datasets, worst relative residual %.2e (tol 1e-6), %.2f s (limit 10 s)", sets.size(), worst,
               secs));
}

struct RankCase {
    int n;
    StateSpaceModel model;
    std::vector<FrequencySample> samples;
};

// Seeded minimal modal systems of order n in {2,4,6,8}, 2n+2 log samples.
std::vector<RankCase> rank_cases()
{
    std::vector<RankCase> out;
    const std::vector<std::pair<int, int>> dims{{1, 1}, {2, 1}, {1, 2}, {2, 2}};
    for (const int n : {2, 4, 6, 8}) {
        for (std::size_t d = 0; d < dims.size(); ++d) {
            ModalModelSpec spec;
            spec.seed = static_cast<std::uint64_t>(300 + 10 * n + static_cast<int>(d));
            spec.n_modes = n / 2;
            spec.freq_range = {0.1, 10.0};
            spec.damping_range = {0.01, 0.1};
            spec.m = dims[d].first;
            spec.p = dims[d].second;
            const auto g = generate_modal_model(spec);
            const auto grid = log_grid(0.05, 20.0, static_cast<std::size_t>(2 * n + 2));
            out.push_back({n, g, sample_at(g, grid.points())});
        }
    }
    return out;
}

TangentialDataset tangential(const RankCase& c)
{
    return partition_tangential(conjugate_augment(c.samples), c.model.outputs(), c.model.inputs());
}

void criterion_rank(const std::vector<RankCase>& cases)
{
    const auto eval_grid = log_grid(0.05, 20.0, 500);
    bool ok = true;
    double worst_err = 0.0;
    std::string bad;
    for (const auto& c : cases) {
        try {
            const auto rank = numerical_rank(realify(build_pencil(tangential(c))));
            const auto h = interpolate(c.samples);
            const double err = linf_relative_error(c.model, h, eval_grid);
            worst_err = std::max(worst_err, err);
            if (rank.nu != c.n || err > 1e-6) {
                ok = false;
                bad += fmt(" [n=%d %tdx%td: nu=%td err=%.1e]", c.n, c.model.outputs(), c.model.inputs(), rank.nu,
                           err);
            }
        } catch (const std::exception& e) {
            ok = false;
            bad += fmt(" [n=%d: %s]", c.n, e.what());
        }
    }
    report(3, "rank equals McMillan degree", ok,
           fmt("%zu systems (n in {2,4,6,8}, 2n+2 samples), worst error %.2e on 500 points (tol 1e-6)%s",
               cases.size(), worst_err, bad.c_str()));
}

void criterion_sylvester(const std::vector<Dataset>& sets, const std::vector<RankCase>& extra)
{
    double worst_complex = 0.0;
    double worst_real = 0.0;
    std::size_t pencils = 0;
    bool ok = true;
    auto check = [&](const TangentialDataset& data) {
        try {
            const auto pencil = build_pencil(data);
            const auto a = sylvester_residual(pencil);
            const auto b = sylvester_residual(realify(pencil));
            worst_complex = std::max({worst_complex, a.right, a.left});
            worst_real = std::max({worst_real, b.right, b.left});
            ++pencils;
        } catch (const std::exception& e) {
            ok = false;
            std::printf("  pencil failed: %s\n", e.what());
        }
    };
    for (const auto& d : sets) check(tangential(d));
    for (const auto& c : extra) check(tangential(c));
    report(2, "Sylvester identities", ok && worst_complex <= 1e-10 && worst_real <= 1e-10,
           fmt("%zu pencils, worst residual %.2e complex / %.2e realified (tol 1e-10)", pencils, worst_complex,
               worst_real));
}

void criteria_trend()
{
    const auto t0 = Clock::now();
    SweepOptions options;
    options.n_f_values = {200, 400};
    options.epsilon_values = {0.01, 0.05, 0.30};
    const auto records = sweep(seeded_suite(), options);
    const double secs = seconds_since(t0);

    std::vector<ComparisonRecord> trend;
    std::size_t failed = 0;
    for (const auto& r : records) {
        if (r.failed()) ++failed;
        if (r.epsilon != 0.30) trend.push_back(r);
    }
    const auto s = summarize(trend);
    const bool ok4 = failed == 0 && s.win_fraction && s.median_ratio && *s.win_fraction >= 0.70 &&
                     *s.median_ratio >= 1.0 && secs < 300.0;
    report(4, "CLOE vs coarse trend", ok4,
           fmt("%zu records, %zu exact, win fraction %.3f (need >= 0.70), median ratio %.3f (need >= 1), %zu failed, "
               "%.1f s for the sweep (limit 300 s)",
               trend.size(), s.exact, s.win_fraction.value_or(-1.0), s.median_ratio.value_or(-1.0), failed, secs));

    const auto all = summarize(records);
    const auto& med = all.median_e_cloe_by_epsilon;
    const bool ok5 = med.count(0.01) && med.count(0.30) && med.at(0.01) <= med.at(0.30);
    report(5, "epsilon sensitivity", ok5,
           fmt("median e_cloe %.3e at 1%% vs %.3e at 30%%", med.count(0.01) ? med.at(0.01) : -1.0,
               med.count(0.30) ? med.at(0.30) : -1.0));

    bool fair = true;
    for (const auto& r : records) fair = fair && (r.failed() || (r.coarse_calls == r.oracle_calls && r.r_cloe == r.oracle_calls));
    if (!fair) report(4, "fairness", false, "coarse and CLOE call counts differ");
}

void criterion_stop_metric()
{
    auto scalars = [](const std::vector<Complex>& v) {
        std::vector<CMatrix> out;
        for (const Complex z : v) out.push_back(CMatrix::Constant(1, 1, z));
        return out;
    };
    const auto a = scalars({{1, 2}, {0.5, -1}, {3, 0}});
    const double same = stopping_metric(a, a);
    const double from_zero = stopping_metric(scalars({0, 0, 0}), scalars({1, {0, 2}, 0.5}));
    std::vector<CMatrix> doubled;
    for (const auto& m : a) doubled.push_back(2.0 * m);
    const double half = stopping_metric(a, doubled);
    const bool ok = std::abs(same) <= 1e-15 && std::abs(from_zero - 1.0) <= 1e-15 && std::abs(half - 0.5) <= 1e-15;
    report(6, "stopping metric examples", ok,
           fmt("identical %.3g (expect 0), zero->norm 2 %.17g (expect 1), doubled %.17g (expect 0.5)", same,
               from_zero, half));
}

// Counts every evaluation that reaches the underlying model.
class CountingOracle final : public Oracle {
public:
    explicit CountingOracle(StateSpaceModel g) : Oracle(g.outputs(), g.inputs()), g_(std::move(g)) {}
    std::size_t raw_calls = 0;

protected:
    CMatrix compute(double omega) override
    {
        ++raw_calls;
        return evaluate_transfer(g_, omega);
    }

private:
    StateSpaceModel g_;
};

void criterion_budget()
{
    std::size_t runs = 0;
    std::string problems;
    for (const auto& s : seeded_suite()) {
        for (const int ppi : {1, 2}) {
            for (const int budget : {6, 15, 40}) {
                for (const double eps : {0.01, 0.05}) {
                    CloeConfig config;
                    config.points_per_iteration = ppi;
                    config.max_points = budget;
                    config.epsilon = eps;
                    config.n_f = 200;
                    try {
                        CountingOracle first(s.model);
                        CountingOracle second(s.model);
                        const auto a = run_cloe(first, config);
                        const auto b = run_cloe(second, config);
                        const auto used = a.interpolant.interpolation_set.size();
                        ++runs;
                        if (first.call_count() != used || first.raw_calls != used ||
                            used > static_cast<std::size_t>(budget + ppi) ||
                            a.trace.iterations.back().interpolation_set.size() != used)
                            problems += fmt(" [%s ppi=%d budget=%d: %zu calls for %zu points]", s.id.c_str(), ppi,
                                            budget, first.raw_calls, used);
                        if (trace_to_json(a.trace) != trace_to_json(b.trace))
                            problems += fmt(" [%s ppi=%d budget=%d: traces differ]", s.id.c_str(), ppi, budget);
                    } catch (const std::exception& e) {
                        problems += fmt(" [%s: %s]", s.id.c_str(), e.what());
                    }
                }
            }
        }
    }
    report(7, "budget and accounting", problems.empty(),
           fmt("%zu runs, call_count = |I_final| <= budget + points_per_iteration, traces repeat%s", runs,
               problems.c_str()));
}

void criterion_degenerate()
{
    std::vector<std::string> notes;
    bool ok = true;
    auto attempt = [&](const std::string& name, const std::function<bool()>& body) {
        try {
            const bool pass = body();
            notes.push_back(name + (pass ? " ok" : " WRONG"));
            ok = ok && pass;
        } catch (const std::exception& e) {
            notes.push_back(name + " threw " + e.what());
            ok = false;
        }
    };

    attempt("constant model", [] {
        Matrix D(2, 2);
        D << 1, -2, 0.5, 3;
        ModelOracle oracle(StateSpaceModel::constant(D));
        CloeConfig config;
        const auto run = run_cloe(oracle, config);
        return run.trace.termination == Termination::converged && run.interpolant.order() == 0 &&
               run.trace.iterations.size() == 2 &&
               max_abs(evaluate_interpolant(run.interpolant, 3.0) - D.cast<Complex>()) <= 1e-14;
    });
    attempt("omega=0", [] {
        const auto g = second_order_resonance();
        const auto samples = sample_at(g, {0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0});
        const auto h = interpolate(samples);
        const auto data = partition_tangential(conjugate_augment(samples), 1, 1);
        return h.is_real && h.order() == 2 && tangential_residual(h, data) <= 1e-6 &&
               linf_relative_error(g, h, log_grid(0.01, 100.0, 500)) <= 1e-6;
    });
    attempt("duplicate frequency", [] {
        const auto samples = sample_at(first_order_lag(), {0.5, 1.0, 1.0, 2.0});
        try {
            interpolate(samples);
        } catch (const DuplicateFrequency&) {
            return true;
        }
        return false;
    });
    attempt("non-conjugate data", [] {
        auto data = partition_tangential(conjugate_augment(sample_at(second_order_resonance(), {0.5, 1.0, 2.0, 4.0})),
                                         1, 1);
        data.right[1].w(0) += Complex(0.0, 0.3);
        try {
            realify(build_pencil(data));
        } catch (const NotConjugateClosed&) {
            return true;
        }
        return false;
    });

    std::string detail;
    for (std::size_t i = 0; i < notes.size(); ++i) detail += (i ? "; " : "") + notes[i];
    report(8, "degenerate inputs", ok, detail);
}

void criterion_realification(const std::vector<Dataset>& sets)
{
    const auto probe = log_grid(0.05, 20.0, 50);
    double worst = 0.0;
    bool real = true;
    bool ok = true;
    for (const auto& d : sets) {
        try {
            const auto hr = interpolate(d.samples);
            const auto hc = realize(build_pencil(tangential(d)));
            for (const CMatrix* m : {&hr.E, &hr.A, &hr.B, &hr.C, &hr.D}) real = real && m->imag().isZero(0.0);
            real = real && hr.is_real;
            double num = 0.0;
            double den = 0.0;
            for (const double w : probe.points()) {
                const CMatrix c = evaluate_interpolant(hc, w);
                num = std::max(num, spectral_norm(evaluate_interpolant(hr, w) - c));
                den = std::max(den, spectral_norm(c));
            }
            worst = std::max(worst, num / den);
        } catch (const std::exception& e) {
            ok = false;
            std::printf("  dataset failed: %s\n", e.what());
        }
    }
    report(9, "realification fidelity", ok && real && worst <= 1e-8,
           fmt("%zu datasets, worst relative gap %.2e on 50 probes (tol 1e-8), matrices exactly real: %s",
               sets.size(), worst, real ? "yes" : "no"));
}

} // namespace

int main()
{
    const auto sets = random_datasets();
    const auto cases = rank_cases();
    criterion_interpolation(sets);
    criterion_sylvester(sets, cases);
    criterion_rank(cases);
    criteria_trend();
    criterion_stop_metric();
    criterion_budget();
    criterion_degenerate();
    criterion_realification(sets);
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
