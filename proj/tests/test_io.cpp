#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#include "cloe/errors.hpp"
#include "cloe/io.hpp"

using namespace cloe;
using namespace cloe::testing;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "cloe_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream(path) << text;
}

} // namespace

TEST_CASE("model files round-trip exactly")
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        ModalModelSpec spec;
        spec.seed = seed;
        spec.n_modes = static_cast<int>(seed);
        spec.m = 1 + static_cast<int>(seed % 3);
        spec.p = 1 + static_cast<int>(seed % 2);
        const auto g = generate_modal_model(spec);
        const auto path = scratch("model.json");
        write_model(g, path);
        CHECK(read_model(path) == g);
    }
    Matrix D(2, 2);
    D << 2, 0, 0, 3;
    const auto constant = StateSpaceModel::constant(D);
    write_model(constant, scratch("constant.json"));
    CHECK(read_model(scratch("constant.json")) == constant);
}

TEST_CASE("model file defaults and errors")
{
    const auto path = scratch("lag.json");
    write_file(path, R"({"n": 1, "m": 1, "p": 1, "A": [[-1]], "B": [[1]], "C": [[1]]})");
    const auto g = read_model(path);
    CHECK(g.E() == Matrix::Identity(1, 1));
    CHECK(g.D() == Matrix::Zero(1, 1));

    write_file(path, R"({"n": 2, "m": 1, "p": 1, "A": [[-1, 0], [0, -2]], "B": [[1]], "C": [[1, 1]]})");
    CHECK_THROWS_AS(read_model(path), DimensionMismatch);

    write_file(path, R"({"n": 2, "m": 1, "p": 1, "A": [[-1, 0], [0, -2]], "B": [[1], [1]], "C": [[1, 1, 1]]})");
    CHECK_THROWS_AS(read_model(path), DimensionMismatch);

    write_file(path, R"({"n": 1, "m": 1, "p": 1, "A": [["x"]], "B": [[1]], "C": [[1]]})");
    try {
        read_model(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.field() == "A");
    }

    write_file(path, R"({"n": 1, "m": 1, "p": 1, "B": [[1]], "C": [[1]]})");
    CHECK_THROWS_AS(read_model(path), ParseError);

    write_file(path, "{\n  \"n\": 1,\n  \"m\": 1\n  \"p\": 1\n}\n");
    try {
        read_model(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("sample CSV layout runs row then column")
{
    CHECK(sample_header(2, 2) == "omega,re_1_1,im_1_1,re_1_2,im_1_2,re_2_1,im_2_1,re_2_2,im_2_2");
    CHECK(sample_header(1, 1, true) == "omega,re_1_1,im_1_1,sigma_max");

    CMatrix r(2, 2);
    r << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
    const std::string text = format_samples({{0.5, r}});
    CHECK(text == "omega,re_1_1,im_1_1,re_1_2,im_1_2,re_2_1,im_2_1,re_2_2,im_2_2\n0.5,1,2,3,4,5,6,7,8\n");
}

TEST_CASE("sample CSV round-trip")
{
    ModalModelSpec spec;
    spec.seed = 9;
    spec.n_modes = 3;
    spec.m = 2;
    spec.p = 3;
    const auto g = generate_modal_model(spec);
    const auto samples = sample_response(g, log_grid(1e-2, 1e2, 25));
    const auto path = scratch("samples.csv");
    write_samples(samples, path, true);
    const auto table = read_samples(path);
    CHECK(table.m == 2);
    CHECK(table.p == 3);
    REQUIRE(table.samples.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(table.samples[i].omega == samples[i].omega);
        CHECK(table.samples[i].response == samples[i].response);
    }
}

TEST_CASE("sample CSV errors name the row")
{
    try {
        parse_samples("omega,re_1_1,im_1_1\n1,2,3\n2,oops,3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.field() == "re_1_1");
    }
    CHECK_THROWS_AS(parse_samples("omega,re_1_1,im_1_1\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_samples("freq,re_1_1,im_1_1\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_samples("omega,im_1_1,re_1_1\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_samples("omega,re_1_1,im_1_1\n-1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_samples(""), ParseError);
}
