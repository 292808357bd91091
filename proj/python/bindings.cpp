#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cloe/bench.hpp"
#include "cloe/errors.hpp"
#include "cloe/io.hpp"

namespace py = pybind11;
using namespace cloe;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

// (n, m, p) complex array from a list of responses.
ComplexArray stack(const std::vector<CMatrix>& responses, Eigen::Index m, Eigen::Index p)
{
    ComplexArray out({static_cast<py::ssize_t>(responses.size()), static_cast<py::ssize_t>(m),
                      static_cast<py::ssize_t>(p)});
    auto view = out.mutable_unchecked<3>();
    for (std::size_t k = 0; k < responses.size(); ++k)
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                view(static_cast<py::ssize_t>(k), i, j) = responses[k](i, j);
    return out;
}

std::vector<FrequencySample> to_samples(const std::vector<double>& omegas, const ComplexArray& responses)
{
    if (responses.ndim() != 3 || responses.shape(0) != static_cast<py::ssize_t>(omegas.size()))
        throw DimensionMismatch("responses must have shape (len(omegas), m, p)");
    const auto view = responses.unchecked<3>();
    std::vector<FrequencySample> out;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        CMatrix r(responses.shape(1), responses.shape(2));
        for (Eigen::Index i = 0; i < r.rows(); ++i)
            for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = view(static_cast<py::ssize_t>(k), i, j);
        out.push_back({omegas[k], r});
    }
    return out;
}

template <class Fn>
ComplexArray evaluate_many(const std::vector<double>& omegas, Eigen::Index m, Eigen::Index p, Fn&& fn)
{
    std::vector<CMatrix> values;
    values.reserve(omegas.size());
    for (const double w : omegas) values.push_back(fn(w));
    return stack(values, m, p);
}

py::dict record_to_dict(const ComparisonRecord& r)
{
    py::dict d;
    d["model"] = r.model_id;
    d["n"] = r.n;
    d["m"] = r.m;
    d["p"] = r.p;
    d["nf"] = r.n_f;
    d["epsilon"] = r.epsilon;
    d["r_cloe"] = r.r_cloe;
    d["e_cloe"] = r.e_cloe;
    d["e_coarse"] = r.e_coarse;
    d["ratio"] = r.ratio ? py::cast(*r.ratio) : py::none();
    d["exact"] = r.exact;
    d["oracle_calls"] = r.oracle_calls;
    d["termination"] = r.termination;
    d["wall_time"] = r.wall_time;
    return d;
}

} // namespace

PYBIND11_MODULE(_cloe, m)
{
    m.doc() = "Constructive Loewner interpolation of frequency-response data";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<SingularPencil>(m, "SingularPencil", error.ptr());
    py::register_exception<InvalidRange>(m, "InvalidRange", error.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<DuplicateFrequency>(m, "DuplicateFrequency", error.ptr());
    py::register_exception<InsufficientData>(m, "InsufficientData", error.ptr());
    py::register_exception<CoincidentPoints>(m, "CoincidentPoints", error.ptr());
    py::register_exception<NotConjugateClosed>(m, "NotConjugateClosed", error.ptr());
    py::register_exception<RankZero>(m, "RankZero", error.ptr());
    py::register_exception<GridExhausted>(m, "GridExhausted", error.ptr());
    py::register_exception<ZeroDenominator>(m, "ZeroDenominator", error.ptr());
    py::register_exception<BudgetTooSmall>(m, "BudgetTooSmall", error.ptr());

    py::class_<StateSpaceModel>(m, "StateSpaceModel")
        .def(py::init([](const Matrix& A, const Matrix& B, const Matrix& C, std::optional<Matrix> E,
                         std::optional<Matrix> D) { return StateSpaceModel(A, B, C, std::move(E), std::move(D)); }),
             py::arg("A"), py::arg("B"), py::arg("C"), py::arg("E") = py::none(), py::arg("D") = py::none())
        .def_static("constant", &StateSpaceModel::constant, py::arg("D"))
        .def_property_readonly("E", &StateSpaceModel::E)
        .def_property_readonly("A", &StateSpaceModel::A)
        .def_property_readonly("B", &StateSpaceModel::B)
        .def_property_readonly("C", &StateSpaceModel::C)
        .def_property_readonly("D", &StateSpaceModel::D)
        .def_property_readonly("order", &StateSpaceModel::order)
        .def_property_readonly("outputs", &StateSpaceModel::outputs)
        .def_property_readonly("inputs", &StateSpaceModel::inputs)
        .def("response", [](const StateSpaceModel& g, double w) { return evaluate_transfer(g, w); },
             py::arg("omega"), "Transfer matrix at s = j*omega")
        .def(
            "responses",
            [](const StateSpaceModel& g, const std::vector<double>& omegas) {
                return evaluate_many(omegas, g.outputs(), g.inputs(), [&](double w) { return evaluate_transfer(g, w); });
            },
            py::arg("omegas"), "Stacked responses with shape (len(omegas), outputs, inputs)")
        .def("__eq__", [](const StateSpaceModel& a, const StateSpaceModel& b) { return a == b; })
        .def("__repr__", [](const StateSpaceModel& g) {
            return "<StateSpaceModel n=" + std::to_string(g.order()) + " outputs=" + std::to_string(g.outputs()) +
                   " inputs=" + std::to_string(g.inputs()) + ">";
        });

    py::class_<Interpolant>(m, "Interpolant")
        .def_readonly("E", &Interpolant::E)
        .def_readonly("A", &Interpolant::A)
        .def_readonly("B", &Interpolant::B)
        .def_readonly("C", &Interpolant::C)
        .def_readonly("D", &Interpolant::D)
        .def_readonly("interpolation_set", &Interpolant::interpolation_set)
        .def_readonly("sv_row", &Interpolant::sv_row)
        .def_readonly("sv_col", &Interpolant::sv_col)
        .def_readonly("rank_tol", &Interpolant::rank_tol)
        .def_readonly("is_real", &Interpolant::is_real)
        .def_property_readonly("order", &Interpolant::order)
        .def_property_readonly("outputs", &Interpolant::outputs)
        .def_property_readonly("inputs", &Interpolant::inputs)
        .def("response", [](const Interpolant& h, double w) { return evaluate_interpolant(h, w); }, py::arg("omega"))
        .def(
            "responses",
            [](const Interpolant& h, const std::vector<double>& omegas) {
                return evaluate_many(omegas, h.outputs(), h.inputs(),
                                     [&](double w) { return evaluate_interpolant(h, w); });
            },
            py::arg("omegas"))
        .def("to_model", &to_model)
        .def("to_json", [](const Interpolant& h) { return interpolant_to_json(h).dump(); })
        .def("__repr__", [](const Interpolant& h) {
            return "<Interpolant order=" + std::to_string(h.order()) +
                   " points=" + std::to_string(h.interpolation_set.size()) + ">";
        });

    py::class_<CloeConfig>(m, "CloeConfig")
        .def(py::init([](double omega_min, double omega_max, int max_points, double epsilon, int n_f,
                         int points_per_iteration, int guard_cells, double rank_tol) {
                 CloeConfig c;
                 c.omega_min = omega_min;
                 c.omega_max = omega_max;
                 c.max_points = max_points;
                 c.epsilon = epsilon;
                 c.n_f = n_f;
                 c.points_per_iteration = points_per_iteration;
                 c.guard_cells = guard_cells;
                 c.rank_tol = rank_tol;
                 return c;
             }),
             py::arg("omega_min") = 1e-3, py::arg("omega_max") = 1e3, py::arg("max_points") = 40,
             py::arg("epsilon") = 0.05, py::arg("n_f") = 400, py::arg("points_per_iteration") = 2,
             py::arg("guard_cells") = 2, py::arg("rank_tol") = kDefaultRankTol)
        .def_readwrite("omega_min", &CloeConfig::omega_min)
        .def_readwrite("omega_max", &CloeConfig::omega_max)
        .def_readwrite("max_points", &CloeConfig::max_points)
        .def_readwrite("epsilon", &CloeConfig::epsilon)
        .def_readwrite("n_f", &CloeConfig::n_f)
        .def_readwrite("points_per_iteration", &CloeConfig::points_per_iteration)
        .def_readwrite("guard_cells", &CloeConfig::guard_cells)
        .def_readwrite("rank_tol", &CloeConfig::rank_tol)
        .def("validate", &CloeConfig::validate);

    m.def("log_grid", [](double lo, double hi, std::size_t n) { return log_grid(lo, hi, n).points(); },
          py::arg("omega_min"), py::arg("omega_max"), py::arg("n"));
    m.def(
        "generate_modal_model",
        [](std::uint64_t seed, int n_modes, std::pair<double, double> freq_range,
           std::pair<double, double> damping_range, std::pair<double, double> gain_range, int outputs, int inputs) {
            ModalModelSpec spec;
            spec.seed = seed;
            spec.n_modes = n_modes;
            spec.freq_range = freq_range;
            spec.damping_range = damping_range;
            spec.gain_range = gain_range;
            spec.m = outputs;
            spec.p = inputs;
            return generate_modal_model(spec);
        },
        py::arg("seed") = 1, py::arg("n_modes") = 3, py::arg("freq_range") = std::pair{0.1, 10.0},
        py::arg("damping_range") = std::pair{0.01, 0.1}, py::arg("gain_range") = std::pair{-1.0, 1.0},
        py::arg("outputs") = 1, py::arg("inputs") = 1);
    m.def("read_model", &read_model, py::arg("path"));
    m.def("write_model", &write_model, py::arg("model"), py::arg("path"));

    m.def(
        "interpolate",
        [](const std::vector<double>& omegas, const ComplexArray& responses, double rank_tol) {
            return interpolate(to_samples(omegas, responses), rank_tol);
        },
        py::arg("omegas"), py::arg("responses"), py::arg("rank_tol") = kDefaultRankTol,
        "Loewner interpolant of samples; responses has shape (len(omegas), outputs, inputs)");

    m.def(
        "_run_cloe",
        [](const StateSpaceModel& g, const CloeConfig& config) {
            ModelOracle oracle(g);
            auto result = run_cloe(oracle, config);
            return py::make_tuple(std::move(result.interpolant), trace_to_json(result.trace).dump(),
                                  oracle.call_count());
        },
        py::arg("model"), py::arg("config"));
    m.def(
        "_run_cloe_samples",
        [](const std::vector<double>& omegas, const ComplexArray& responses, const CloeConfig& config) {
            TabulatedOracle oracle(to_samples(omegas, responses));
            auto result = run_cloe(oracle, config);
            return py::make_tuple(std::move(result.interpolant), trace_to_json(result.trace).dump(),
                                  oracle.call_count());
        },
        py::arg("omegas"), py::arg("responses"), py::arg("config"));

    m.def(
        "linf_relative_error",
        [](const StateSpaceModel& g, const Interpolant& h, const std::vector<double>& grid) {
            return linf_relative_error(g, h, FrequencyGrid(grid));
        },
        py::arg("model"), py::arg("interpolant"), py::arg("grid"));
    m.def(
        "coarse_loewner",
        [](const StateSpaceModel& g, int r, double omega_min, double omega_max, double rank_tol) {
            ModelOracle oracle(g);
            return coarse_loewner(oracle, r, omega_min, omega_max, rank_tol);
        },
        py::arg("model"), py::arg("r"), py::arg("omega_min") = 1e-3, py::arg("omega_max") = 1e3,
        py::arg("rank_tol") = kDefaultRankTol);
    m.def(
        "run_comparison",
        [](const StateSpaceModel& g, const CloeConfig& config, std::string model_id, std::size_t eval_points) {
            const auto grid = log_grid(config.omega_min, config.omega_max, eval_points);
            return record_to_dict(run_comparison(model_id, g, config, grid));
        },
        py::arg("model"), py::arg("config"), py::arg("model_id") = "model", py::arg("eval_points") = 2000);
    m.def("seeded_suite", [] {
        py::list out;
        for (auto& s : seeded_suite()) out.append(py::make_tuple(s.id, s.model));
        return out;
    });
    m.def(
        "sweep",
        [](const std::vector<std::pair<std::string, StateSpaceModel>>& models, std::vector<int> n_f_values,
           std::vector<double> epsilon_values, int max_points, std::size_t eval_points, unsigned threads) {
            std::vector<SuiteModel> suite;
            for (const auto& [id, g] : models) suite.push_back({id, g});
            SweepOptions options;
            options.n_f_values = std::move(n_f_values);
            options.epsilon_values = std::move(epsilon_values);
            options.base.max_points = max_points;
            options.eval_points = eval_points;
            options.threads = threads;
            std::vector<ComparisonRecord> records;
            {
                py::gil_scoped_release release;
                records = sweep(suite, options);
            }
            py::list out;
            for (const auto& r : records) out.append(record_to_dict(r));
            return py::make_tuple(out, format_sweep_csv(records));
        },
        py::arg("models"), py::arg("n_f_values") = std::vector<int>{200, 300, 400, 500},
        py::arg("epsilon_values") = std::vector<double>{0.01, 0.05, 0.10, 0.30}, py::arg("max_points") = 50,
        py::arg("eval_points") = 2000, py::arg("threads") = 0);
}
