#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "cloe/bench.hpp"
#include "cloe/errors.hpp"

using namespace cloe;
using namespace cloe::testing;

TEST_CASE("linf_relative_error on constructed pairs")
{
    const auto grid = log_grid(1e-2, 1e2, 200);
    const auto g = second_order_resonance();
    const ResponseFn truth = [&](double w) { return evaluate_transfer(g, w); };

    CHECK(linf_relative_error(truth, truth, grid) <= 1e-8);
    const ResponseFn zero = [](double) { return CMatrix::Zero(1, 1).eval(); };
    CHECK(std::abs(linf_relative_error(truth, zero, grid) - 1.0) <= 1e-15);

    // Max gain 2 at grid[3], deviation 1 there and 0.5 elsewhere.
    const ResponseFn bump = [&](double w) {
        return CMatrix::Constant(1, 1, w == grid[3] ? Complex(2.0, 0.0) : Complex(1.0, 0.0)).eval();
    };
    const ResponseFn off = [&](double w) {
        return CMatrix::Constant(1, 1, w == grid[3] ? Complex(1.0, 0.0) : Complex(1.5, 0.0)).eval();
    };
    CHECK(std::abs(linf_relative_error(bump, off, grid) - 0.5) <= 1e-15);

    CHECK_THROWS_AS(linf_relative_error(zero, truth, grid), ZeroDenominator);
}

TEST_CASE("coarse_loewner recovers a first-order lag from two points")
{
    ModelOracle oracle(first_order_lag());
    const auto h = coarse_loewner(oracle, 2, 1e-3, 1e3);
    CHECK(oracle.call_count() == 2);
    CHECK(h.order() == 1);
    CHECK(linf_relative_error(first_order_lag(), h, log_grid(1e-3, 1e3, 2000)) <= 1e-8);
}

TEST_CASE("coarse_loewner on a constant model")
{
    Matrix D(1, 2);
    D << 3, -1;
    ModelOracle oracle(StateSpaceModel::constant(D));
    const auto h = coarse_loewner(oracle, 4, 1e-3, 1e3);
    CHECK(h.order() == 0);
    CHECK(max_abs(evaluate_interpolant(h, 7.0) - D.cast<Complex>()) <= 1e-15);
}

TEST_CASE("exact recovery scores below 1e-8 for orders up to 8")
{
    for (int n = 1; n <= 8; ++n) {
        const auto g = random_minimal_model(500 + static_cast<std::uint64_t>(n), n, 1 + n % 2, 1 + n % 3);
        ModelOracle oracle(g);
        const auto h = coarse_loewner(oracle, 2 * n + 2, 0.05, 20.0);
        CAPTURE(n);
        CHECK(linf_relative_error(g, h, log_grid(0.05, 20.0, 500)) <= 1e-8);
    }
}

TEST_CASE("run_comparison on an order-1 model")
{
    CloeConfig config;
    config.epsilon = 0.01;
    const auto rec = run_comparison("lag", first_order_lag(), config, default_eval_grid(config));
    CHECK(rec.model_id == "lag");
    CHECK(rec.n == 1);
    CHECK(rec.e_cloe <= 1e-8);
    CHECK(rec.e_coarse <= 1e-8);
    CHECK(rec.r_cloe == rec.oracle_calls);
    CHECK(rec.coarse_calls == rec.oracle_calls);
    CHECK(rec.termination == "converged");
    CHECK(rec.ratio.has_value() == (rec.e_cloe > 0.0));
    CHECK(rec.exact == (rec.e_cloe < kExactThreshold));
}

TEST_CASE("run_comparison is fair on a resonant MIMO model")
{
    ModalModelSpec spec;
    spec.seed = 5;
    spec.n_modes = 4;
    spec.m = 2;
    spec.p = 2;
    spec.freq_range = {1e-2, 1e2};
    CloeConfig config;
    config.max_points = 12;
    const auto rec = run_comparison("m", generate_modal_model(spec), config, default_eval_grid(config));
    CHECK(rec.coarse_calls == rec.oracle_calls);
    CHECK(rec.r_cloe == rec.oracle_calls);
    CHECK(rec.e_cloe >= 0.0);
    CHECK(rec.e_coarse >= 0.0);
    if (rec.ratio) CHECK(*rec.ratio == doctest::Approx(rec.e_coarse / rec.e_cloe).epsilon(1e-15));
}

TEST_CASE("run_comparison errors carry the model id")
{
    CloeConfig config;
    try {
        run_comparison("zero-model", StateSpaceModel::constant(Matrix::Zero(1, 1)), config, default_eval_grid(config));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("zero-model") != std::string::npos);
    }
}

TEST_CASE("seeded suite layout")
{
    const auto suite = seeded_suite();
    REQUIRE(suite.size() == 12);
    bool siso = false;
    bool mimo = false;
    for (const auto& s : suite) {
        CHECK(s.model.order() >= 4);
        CHECK(s.model.order() <= 20);
        (s.model.inputs() == 1 && s.model.outputs() == 1 ? siso : mimo) = true;
    }
    CHECK(siso);
    CHECK(mimo);
    const auto again = seeded_suite();
    for (std::size_t i = 0; i < suite.size(); ++i) {
        CHECK(again[i].id == suite[i].id);
        CHECK(again[i].model == suite[i].model);
    }
}

TEST_CASE("sweep covers the product in order and is deterministic")
{
    const auto suite = seeded_suite();
    const std::vector<SuiteModel> models{suite[0], suite[6]};
    SweepOptions options;
    options.n_f_values = {200, 300};
    options.epsilon_values = {0.05, 0.3};
    options.eval_points = 300;
    options.threads = 2;
    const auto a = sweep(models, options);
    REQUIRE(a.size() == 8);
    std::size_t i = 0;
    for (const auto& m : models)
        for (const int nf : options.n_f_values)
            for (const double eps : options.epsilon_values) {
                CHECK(a[i].model_id == m.id);
                CHECK(a[i].n_f == nf);
                CHECK(a[i].epsilon == eps);
                CHECK(a[i].coarse_calls == a[i].oracle_calls);
                ++i;
            }
    options.threads = 1;
    const auto b = sweep(models, options);
    CHECK(format_sweep_csv(a) == format_sweep_csv(b));

    const auto csv = format_sweep_csv(a);
    CHECK(csv.rfind(sweep_csv_header() + "\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("sweep records failures and carries on")
{
    const std::vector<SuiteModel> models{{"zero", StateSpaceModel::constant(Matrix::Zero(1, 1))},
                                         {"lag", first_order_lag()}};
    SweepOptions options;
    options.n_f_values = {200};
    options.epsilon_values = {0.05};
    options.eval_points = 200;
    const auto recs = sweep(models, options);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].failed());
    CHECK_FALSE(recs[1].failed());
    const auto csv = format_sweep_csv(recs);
    const auto line = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
    CHECK(std::count(line.begin(), line.end(), ',') == 11);

    const auto s = summarize(recs);
    CHECK(s.records == 2);
    CHECK(s.failures == 1);
}

TEST_CASE("summarize excludes exact rows")
{
    auto row = [](double e_cloe, double e_coarse, double eps) {
        ComparisonRecord r;
        r.epsilon = eps;
        r.e_cloe = e_cloe;
        r.e_coarse = e_coarse;
        r.exact = e_cloe < kExactThreshold;
        if (e_cloe > 0) r.ratio = e_coarse / e_cloe;
        r.termination = "converged";
        return r;
    };
    const std::vector<ComparisonRecord> recs{row(0.1, 0.2, 0.01), row(0.2, 0.1, 0.01), row(0.1, 0.4, 0.3),
                                             row(1e-14, 1.0, 0.3)};
    const auto s = summarize(recs);
    CHECK(s.exact == 1);
    REQUIRE(s.median_ratio);
    CHECK(*s.median_ratio == doctest::Approx(2.0));
    REQUIRE(s.win_fraction);
    CHECK(*s.win_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(s.median_e_cloe_by_epsilon.at(0.01) == doctest::Approx(0.15));
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0}) == 2.5);
}
