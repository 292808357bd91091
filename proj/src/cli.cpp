#include "cloe/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "cloe/bench.hpp"
#include "cloe/errors.hpp"
#include "cloe/io.hpp"

namespace cloe {

namespace fs = std::filesystem;

namespace {

struct CliFailure {
    int code;
    std::string message;
};

[[noreturn]] void usage_error(const std::string& message)
{
    throw CliFailure{kExitUsage, message};
}

std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const SingularPencil*>(&e)) return "SingularPencil";
    if (dynamic_cast<const InvalidRange*>(&e)) return "InvalidRange";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const DuplicateFrequency*>(&e)) return "DuplicateFrequency";
    if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
    if (dynamic_cast<const CoincidentPoints*>(&e)) return "CoincidentPoints";
    if (dynamic_cast<const NotConjugateClosed*>(&e)) return "NotConjugateClosed";
    if (dynamic_cast<const RankZero*>(&e)) return "RankZero";
    if (dynamic_cast<const GridExhausted*>(&e)) return "GridExhausted";
    if (dynamic_cast<const ZeroDenominator*>(&e)) return "ZeroDenominator";
    if (dynamic_cast<const BudgetTooSmall*>(&e)) return "BudgetTooSmall";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "error";
}

bool is_usage(const std::exception& e)
{
    return dynamic_cast<const InvalidRange*>(&e) || dynamic_cast<const BudgetTooSmall*>(&e);
}

// Runs f, prefixing any library error with the file it concerns.
template <class F>
auto with_path(const fs::path& path, F&& f)
{
    try {
        return f();
    } catch (const std::exception& e) {
        throw CliFailure{kExitFailure, error_kind(e) + ": " + path.string() + ": " + e.what()};
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string num(double v)
{
    return format_double(v);
}

std::string quote(const std::string& s)
{
    if (!s.empty() && s.find_first_of(" \t\"'") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::uint64_t seed = 1;
    int modes = 3;
    double freq_min = 0.1;
    double freq_max = 10.0;
    double damping_min = 0.01;
    double damping_max = 0.1;
    double gain_min = -1.0;
    double gain_max = 1.0;
    int outputs = 1;
    int inputs = 1;
    std::string out = "model.json";
};

void add_generate(CLI::App& app, GenerateArgs& a)
{
    app.add_option("--seed", a.seed, "Generator seed")->capture_default_str();
    app.add_option("--modes", a.modes, "Number of second-order modes")->capture_default_str();
    app.add_option("--freq-min", a.freq_min, "Lowest natural frequency [rad/s]")->capture_default_str();
    app.add_option("--freq-max", a.freq_max, "Highest natural frequency [rad/s]")->capture_default_str();
    app.add_option("--damping-min", a.damping_min, "Lowest damping ratio")->capture_default_str();
    app.add_option("--damping-max", a.damping_max, "Highest damping ratio")->capture_default_str();
    app.add_option("--gain-min", a.gain_min, "Lowest B/C entry")->capture_default_str();
    app.add_option("--gain-max", a.gain_max, "Highest B/C entry")->capture_default_str();
    app.add_option("-m,--outputs", a.outputs, "Number of outputs")->capture_default_str();
    app.add_option("-p,--inputs", a.inputs, "Number of inputs")->capture_default_str();
    app.add_option("-o,--out", a.out, "Output model file")->capture_default_str();
}

int cmd_generate(const GenerateArgs& a, std::ostream& out)
{
    out << "config: cloe generate --seed " << a.seed << " --modes " << a.modes << " --freq-min " << num(a.freq_min)
        << " --freq-max " << num(a.freq_max) << " --damping-min " << num(a.damping_min) << " --damping-max "
        << num(a.damping_max) << " --gain-min " << num(a.gain_min) << " --gain-max " << num(a.gain_max)
        << " --outputs " << a.outputs << " --inputs " << a.inputs << " --out " << quote(a.out) << "\n";
    if (a.inputs < 1 || a.outputs < 1) throw InvalidRange("inputs and outputs must be at least 1");

    ModalModelSpec spec;
    spec.seed = a.seed;
    spec.n_modes = a.modes;
    spec.freq_range = {a.freq_min, a.freq_max};
    spec.damping_range = {a.damping_min, a.damping_max};
    spec.gain_range = {a.gain_min, a.gain_max};
    spec.m = a.outputs;
    spec.p = a.inputs;
    const auto model = generate_modal_model(spec);
    with_path(a.out, [&] { write_model(model, a.out); });

    out << "order " << model.order() << ", " << model.outputs() << " output(s), " << model.inputs()
        << " input(s) -> " << a.out << "\n";
    Eigen::EigenSolver<Matrix> solver(model.A(), false);
    std::vector<Complex> poles;
    for (const Complex& z : solver.eigenvalues())
        if (z.imag() >= 0.0) poles.push_back(z);
    std::sort(poles.begin(), poles.end(), [](Complex x, Complex y) { return std::abs(x) < std::abs(y); });
    for (const Complex& z : poles) {
        const double wn = std::abs(z);
        out << "  pole " << num(z.real()) << " +/- " << num(z.imag()) << "j  (omega_n " << num(wn) << ", zeta "
            << num(-z.real() / wn) << ")\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- reduce

struct ReduceArgs {
    std::string model;
    std::string samples;
    double wmin = 1e-3;
    double wmax = 1e3;
    int nf = 400;
    double eps_percent = 5.0;
    int max_points = 40;
    int ppi = 2;
    int guard = 2;
    double rank_tol = kDefaultRankTol;
    std::string out = "interpolant.json";
    std::string trace = "trace.json";
};

void add_reduce(CLI::App& app, ReduceArgs& a)
{
    auto* model = app.add_option("--model", a.model, "State-space model file (JSON)");
    auto* samples = app.add_option("--samples", a.samples, "Tabulated frequency samples (CSV)");
    model->excludes(samples);
    app.add_option("--wmin", a.wmin, "Lower bound of the frequency interval [rad/s]")->capture_default_str();
    app.add_option("--wmax", a.wmax, "Upper bound of the frequency interval [rad/s]")->capture_default_str();
    app.add_option("--nf", a.nf, "Size of the search grid")->capture_default_str();
    app.add_option("--eps", a.eps_percent, "Stopping tolerance in percent")->capture_default_str();
    app.add_option("--max-points", a.max_points, "Budget of interpolation points")->capture_default_str();
    app.add_option("--ppi", a.ppi, "Points added per iteration (1 or 2)")->capture_default_str();
    app.add_option("--guard", a.guard, "Guard cells around interpolation points")->capture_default_str();
    app.add_option("--rank-tol", a.rank_tol, "Relative rank tolerance")->capture_default_str();
    app.add_option("-o,--out", a.out, "Output interpolant file")->capture_default_str();
    app.add_option("--trace", a.trace, "Output trace file")->capture_default_str();
}

CloeConfig reduce_config(const ReduceArgs& a)
{
    CloeConfig c;
    c.omega_min = a.wmin;
    c.omega_max = a.wmax;
    c.n_f = a.nf;
    c.epsilon = a.eps_percent / 100.0;
    c.max_points = a.max_points;
    c.points_per_iteration = a.ppi;
    c.guard_cells = a.guard;
    c.rank_tol = a.rank_tol;
    c.validate();
    return c;
}

std::vector<FrequencySample> load_samples_in_range(const std::string& path, double wmin, double wmax)
{
    const auto table = with_path(path, [&] { return read_samples(path); });
    for (std::size_t i = 0; i < table.samples.size(); ++i) {
        const double w = table.samples[i].omega;
        if (w < wmin || w > wmax) {
            const ParseError e("frequency " + num(w) + " on data row " + std::to_string(i + 1) +
                                   " lies outside [" + num(wmin) + ", " + num(wmax) + "]",
                               i + 2, "omega");
            throw CliFailure{kExitFailure, "ParseError: " + path + ": " + e.what()};
        }
    }
    return table.samples;
}

int cmd_reduce(const ReduceArgs& a, std::ostream& out, std::ostream& err)
{
    if (a.model.empty() == a.samples.empty()) usage_error("exactly one of --model or --samples is required");
    const std::string source = a.model.empty() ? "--samples " + quote(a.samples) : "--model " + quote(a.model);
    out << "config: cloe reduce " << source << " --wmin " << num(a.wmin) << " --wmax " << num(a.wmax) << " --nf "
        << a.nf << " --eps " << num(a.eps_percent) << " --max-points " << a.max_points << " --ppi " << a.ppi
        << " --guard " << a.guard << " --rank-tol " << num(a.rank_tol) << " --out " << quote(a.out) << " --trace "
        << quote(a.trace) << "\n";
    const CloeConfig config = reduce_config(a);

    std::unique_ptr<Oracle> oracle;
    if (!a.model.empty()) {
        oracle = std::make_unique<ModelOracle>(with_path(a.model, [&] { return read_model(a.model); }));
    } else {
        auto samples = load_samples_in_range(a.samples, a.wmin, a.wmax);
        oracle = with_path(a.samples, [&] { return std::make_unique<TabulatedOracle>(std::move(samples)); });
    }

    const CloeResult result = run_cloe(*oracle, config);
    with_path(a.out, [&] { write_json_file(interpolant_to_json(result.interpolant), a.out); });
    with_path(a.trace, [&] { write_json_file(trace_to_json(result.trace), a.trace); });

    const auto& last = result.trace.iterations.back();
    if (result.trace.termination == Termination::grid_exhausted)
        err << "warning: no admissible frequency left on the search grid; partial results written\n";
    out << "termination: " << to_string(result.trace.termination) << "\n";
    out << "points: " << result.interpolant.interpolation_set.size() << "\n";
    out << "order: " << result.interpolant.order() << "\n";
    out << "e_tilde: " << (last.e_tilde ? num(*last.e_tilde) : std::string("n/a")) << "\n";
    out << "wrote " << a.out << " and " << a.trace << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string model;
    std::string interpolant;
    double wmin = 1e-3;
    double wmax = 1e3;
    int points = 2000;
    std::string out = "bode.csv";
};

void add_eval(CLI::App& app, EvalArgs& a)
{
    auto* model = app.add_option("--model", a.model, "State-space model file (JSON)");
    auto* interp = app.add_option("--interpolant", a.interpolant, "Interpolant file written by reduce");
    model->excludes(interp);
    app.add_option("--wmin", a.wmin, "Lowest grid frequency [rad/s]")->capture_default_str();
    app.add_option("--wmax", a.wmax, "Highest grid frequency [rad/s]")->capture_default_str();
    app.add_option("--points", a.points, "Number of log-spaced grid points")->capture_default_str();
    app.add_option("-o,--out", a.out, "Output CSV file")->capture_default_str();
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err)
{
    if (a.model.empty() == a.interpolant.empty()) usage_error("exactly one of --model or --interpolant is required");
    const std::string path = a.model.empty() ? a.interpolant : a.model;
    out << "config: cloe eval " << (a.model.empty() ? "--interpolant " : "--model ") << quote(path) << " --wmin "
        << num(a.wmin) << " --wmax " << num(a.wmax) << " --points " << a.points << " --out " << quote(a.out) << "\n";
    if (a.points < 1) throw InvalidRange("--points must be at least 1");
    std::vector<double> omegas;
    if (a.points == 1) {
        if (!(a.wmin > 0.0) || a.wmin != a.wmax) throw InvalidRange("a single grid point needs wmin == wmax > 0");
        omegas.push_back(a.wmin);
    } else {
        omegas = log_grid(a.wmin, a.wmax, static_cast<std::size_t>(a.points)).points();
    }

    const auto model = with_path(path, [&] { return read_model(path); });
    std::vector<FrequencySample> rows;
    std::size_t skipped = 0;
    for (const double w : omegas) {
        try {
            rows.push_back({w, evaluate_transfer(model, w)});
        } catch (const SingularPencil&) {
            err << "warning: skipped omega=" << num(w) << " (singular pencil)\n";
            ++skipped;
        }
    }
    with_path(a.out, [&] { write_samples(rows, a.out, true); });
    out << "wrote " << rows.size() << " rows to " << a.out;
    if (skipped > 0) out << " (" << skipped << " skipped)";
    out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string models_dir;
    std::vector<int> nf{200, 300, 400, 500};
    std::vector<double> eps_percent{1, 5, 10, 30};
    double wmin = 1e-3;
    double wmax = 1e3;
    int max_points = 50;
    int eval_points = 2000;
    std::string out = "sweep.csv";
};

void add_sweep(CLI::App& app, SweepArgs& a)
{
    app.add_option("--models-dir", a.models_dir, "Directory of model files (default: built-in seeded suite)");
    app.add_option("--nf", a.nf, "Search-grid sizes, comma separated")->delimiter(',')->capture_default_str();
    app.add_option("--eps", a.eps_percent, "Tolerances in percent, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--wmin", a.wmin, "Lower bound of the frequency interval [rad/s]")->capture_default_str();
    app.add_option("--wmax", a.wmax, "Upper bound of the frequency interval [rad/s]")->capture_default_str();
    app.add_option("--max-points", a.max_points, "Budget of interpolation points")->capture_default_str();
    app.add_option("--eval-points", a.eval_points, "Size of the error-evaluation grid")->capture_default_str();
    app.add_option("-o,--out", a.out, "Output CSV file")->capture_default_str();
}

unsigned thread_cap()
{
    const char* env = std::getenv("CLOE_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    unsigned value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end || value == 0)
        usage_error(std::string("CLOE_THREADS must be a positive integer, got '") + env + "'");
    return value;
}

std::vector<SuiteModel> load_models(const std::string& dir)
{
    if (dir.empty()) return seeded_suite();
    if (!fs::is_directory(dir)) usage_error("models directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    if (files.empty()) usage_error("no model files (*.json) in " + dir);
    std::sort(files.begin(), files.end());
    std::vector<SuiteModel> models;
    for (const auto& f : files) models.push_back({f.stem().string(), with_path(f, [&] { return read_model(f); })});
    return models;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> nf;
    for (const int v : a.nf) nf.push_back(std::to_string(v));
    std::vector<std::string> eps;
    for (const double v : a.eps_percent) eps.push_back(num(v));
    out << "config: cloe sweep" << (a.models_dir.empty() ? "" : " --models-dir " + quote(a.models_dir)) << " --nf "
        << join(nf, ",") << " --eps " << join(eps, ",") << " --wmin " << num(a.wmin) << " --wmax " << num(a.wmax)
        << " --max-points " << a.max_points << " --eval-points " << a.eval_points << " --out " << quote(a.out)
        << "\n";

    if (a.nf.empty() || a.eps_percent.empty()) usage_error("--nf and --eps need at least one value");
    if (a.eval_points < 2) throw InvalidRange("--eval-points must be at least 2");
    SweepOptions options;
    options.n_f_values = a.nf;
    options.epsilon_values.clear();
    for (const double e : a.eps_percent) options.epsilon_values.push_back(e / 100.0);
    options.base.omega_min = a.wmin;
    options.base.omega_max = a.wmax;
    options.base.max_points = a.max_points;
    options.eval_points = static_cast<std::size_t>(a.eval_points);
    for (const int n : options.n_f_values)
        for (const double e : options.epsilon_values) {
            CloeConfig c = options.base;
            c.n_f = n;
            c.epsilon = e;
            c.validate();
        }
    options.threads = thread_cap();
    const auto models = load_models(a.models_dir);

    const auto records = sweep(models, options);
    with_path(a.out, [&] { write_sweep_csv(records, a.out); });

    const auto s = summarize(records);
    out << "records: " << s.records << " (failed " << s.failures << ", exact " << s.exact << ") -> " << a.out
        << "\n";
    out << "median ratio: " << (s.median_ratio ? num(*s.median_ratio) : std::string("n/a")) << "\n";
    out << "win fraction: " << (s.win_fraction ? num(*s.win_fraction) : std::string("n/a")) << "\n";
    for (const auto& [e, m] : s.median_e_cloe_by_epsilon)
        out << "median e_cloe at eps=" << num(e * 100.0) << "%: " << num(m) << "\n";
    for (const auto& r : records)
        if (r.failed()) err << "warning: " << r.model_id << " nf=" << r.n_f << " eps=" << num(r.epsilon) << ": "
                            << r.termination << "\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Constructive Loewner interpolation of frequency-response data", "cloe"};
    app.require_subcommand(1);

    GenerateArgs gen_args;
    ReduceArgs reduce_args;
    EvalArgs eval_args;
    SweepArgs sweep_args;
    auto* gen = app.add_subcommand("generate", "Write a seeded modal state-space model");
    add_generate(*gen, gen_args);
    auto* reduce = app.add_subcommand("reduce", "Build an interpolant with CLOE");
    add_reduce(*reduce, reduce_args);
    auto* eval = app.add_subcommand("eval", "Tabulate the frequency response of a model or interpolant");
    add_eval(*eval, eval_args);
    auto* sw = app.add_subcommand("sweep", "Compare CLOE with a coarse logarithmic grid over a model set");
    add_sweep(*sw, sweep_args);

    std::vector<const char*> argv{"cloe"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_args, out);
        if (reduce->parsed()) return cmd_reduce(reduce_args, out, err);
        if (eval->parsed()) return cmd_eval(eval_args, out, err);
        return cmd_sweep(sweep_args, out, err);
    } catch (const CliFailure& f) {
        err << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        err << "error: " << error_kind(e) << ": " << e.what() << "\n";
        return is_usage(e) ? kExitUsage : kExitFailure;
    }
}

} // namespace cloe
