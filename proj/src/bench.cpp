#include "cloe/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "cloe/errors.hpp"
#include "cloe/io.hpp"

namespace cloe {

double linf_relative_error(const ResponseFn& truth, const ResponseFn& approx, const FrequencyGrid& eval_grid)
{
    double num = 0.0;
    double den = 0.0;
    for (const double w : eval_grid.points()) {
        const CMatrix g = truth(w);
        num = std::max(num, spectral_norm(g - approx(w)));
        den = std::max(den, spectral_norm(g));
    }
    if (den == 0.0) throw ZeroDenominator("reference system vanishes on the evaluation grid");
    return num / den;
}

double linf_relative_error(const StateSpaceModel& truth, const Interpolant& approx, const FrequencyGrid& eval_grid)
{
    return linf_relative_error([&](double w) { return evaluate_transfer(truth, w); },
                               [&](double w) { return evaluate_interpolant(approx, w); }, eval_grid);
}

Interpolant coarse_loewner(Oracle& oracle, int r, double omega_min, double omega_max, double rank_tol)
{
    if (r < 2) throw InvalidRange("coarse interpolant needs r >= 2");
    const FrequencyGrid grid = log_grid(omega_min, omega_max, static_cast<std::size_t>(r));
    std::vector<FrequencySample> samples;
    for (const double w : grid.points()) samples.push_back({w, oracle.evaluate(w)});
    return interpolate(samples, rank_tol);
}

FrequencyGrid default_eval_grid(const CloeConfig& config)
{
    return log_grid(config.omega_min, config.omega_max, 2000);
}

ComparisonRecord run_comparison(const std::string& model_id, const StateSpaceModel& model, const CloeConfig& config,
                                const FrequencyGrid& eval_grid)
{
    const auto start = std::chrono::steady_clock::now();
    ComparisonRecord rec;
    rec.model_id = model_id;
    rec.n = model.order();
    rec.m = model.outputs();
    rec.p = model.inputs();
    rec.n_f = config.n_f;
    rec.epsilon = config.epsilon;
    try {
        ModelOracle cloe_oracle(model);
        const CloeResult run = run_cloe(cloe_oracle, config);
        rec.termination = to_string(run.trace.termination);
        rec.oracle_calls = cloe_oracle.call_count();
        rec.r_cloe = run.interpolant.interpolation_set.size();

        ModelOracle coarse_oracle(model);
        const Interpolant coarse = coarse_loewner(coarse_oracle, static_cast<int>(rec.r_cloe), config.omega_min,
                                                  config.omega_max, config.rank_tol);
        rec.coarse_calls = coarse_oracle.call_count();

        rec.e_cloe = linf_relative_error(model, run.interpolant, eval_grid);
        rec.e_coarse = linf_relative_error(model, coarse, eval_grid);
    } catch (const Error& e) {
        throw Error("model '" + model_id + "': " + e.what());
    }
    rec.exact = rec.e_cloe < kExactThreshold;
    if (rec.e_cloe > 0.0) rec.ratio = rec.e_coarse / rec.e_cloe;
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<SuiteModel> seeded_suite()
{
    struct Entry {
        int modes;
        int m;
        int p;
    };
    // Orders 4..20; six SISO and six MIMO models.
    const Entry entries[] = {{2, 1, 1}, {3, 1, 1}, {4, 1, 1}, {5, 1, 1},  {7, 1, 1}, {10, 1, 1},
                             {3, 2, 1}, {4, 1, 2}, {5, 2, 2}, {6, 3, 2}, {8, 2, 3}, {10, 3, 3}};
    std::vector<SuiteModel> out;
    std::uint64_t seed = 101;
    for (const auto& e : entries) {
        ModalModelSpec spec;
        spec.seed = seed++;
        spec.n_modes = e.modes;
        spec.freq_range = {1e-2, 1e2};
        spec.damping_range = {0.005, 0.1};
        spec.gain_range = {-1.0, 1.0};
        spec.m = e.m;
        spec.p = e.p;
        char id[64];
        std::snprintf(id, sizeof id, "modal%02zu_n%d_%dx%d", out.size() + 1, 2 * e.modes, e.m, e.p);
        out.push_back({id, generate_modal_model(spec)});
    }
    return out;
}

std::vector<ComparisonRecord> sweep(const std::vector<SuiteModel>& models, const SweepOptions& options)
{
    if (models.empty() || options.n_f_values.empty() || options.epsilon_values.empty())
        throw InvalidRange("sweep needs at least one model, n_f and epsilon");

    struct Job {
        const SuiteModel* model;
        int n_f;
        double epsilon;
    };
    std::vector<Job> jobs;
    for (const auto& model : models)
        for (const int nf : options.n_f_values)
            for (const double eps : options.epsilon_values) jobs.push_back({&model, nf, eps});

    std::vector<ComparisonRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            CloeConfig config = options.base;
            config.n_f = job.n_f;
            config.epsilon = job.epsilon;
            try {
                const FrequencyGrid eval = log_grid(config.omega_min, config.omega_max, options.eval_points);
                records[i] = run_comparison(job.model->id, job.model->model, config, eval);
            } catch (const std::exception& e) {
                ComparisonRecord& rec = records[i];
                rec = ComparisonRecord{};
                rec.model_id = job.model->id;
                rec.n = job.model->model.order();
                rec.m = job.model->model.outputs();
                rec.p = job.model->model.inputs();
                rec.n_f = job.n_f;
                rec.epsilon = job.epsilon;
                rec.e_cloe = rec.e_coarse = std::numeric_limits<double>::quiet_NaN();
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                rec.termination = "error: " + msg;
            }
        }
    };
    unsigned threads = options.threads > 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return records;
}

std::string sweep_csv_header()
{
    return "model,n,m,p,nf,epsilon,r_cloe,e_cloe,e_coarse,ratio,oracle_calls,termination";
}

std::string format_sweep_csv(const std::vector<ComparisonRecord>& records)
{
    std::string out = sweep_csv_header() + "\n";
    for (const auto& r : records) {
        out += r.model_id + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.p) + "," +
               std::to_string(r.n_f) + "," + format_double(r.epsilon) + "," + std::to_string(r.r_cloe) + "," +
               format_double(r.e_cloe) + "," + format_double(r.e_coarse) + "," +
               (r.ratio ? format_double(*r.ratio) : std::string()) + "," + std::to_string(r.oracle_calls) + "," +
               r.termination + "\n";
    }
    return out;
}

void write_sweep_csv(const std::vector<ComparisonRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << format_sweep_csv(records);
}

double median(std::vector<double> values)
{
    if (values.empty()) throw InvalidRange("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SweepSummary summarize(const std::vector<ComparisonRecord>& records)
{
    SweepSummary s;
    s.records = records.size();
    std::vector<double> ratios;
    std::size_t wins = 0;
    std::size_t scored = 0;
    std::map<double, std::vector<double>> by_eps;
    for (const auto& r : records) {
        if (r.failed()) {
            ++s.failures;
            continue;
        }
        by_eps[r.epsilon].push_back(r.e_cloe);
        if (r.exact) {
            ++s.exact;
            continue;
        }
        ++scored;
        if (r.e_cloe <= r.e_coarse) ++wins;
        if (r.ratio) ratios.push_back(*r.ratio);
    }
    if (!ratios.empty()) s.median_ratio = median(ratios);
    if (scored > 0) s.win_fraction = static_cast<double>(wins) / static_cast<double>(scored);
    for (auto& [eps, values] : by_eps) s.median_e_cloe_by_epsilon[eps] = median(values);
    return s;
}

} // namespace cloe
