#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cloe/lti.hpp"

namespace cloe {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Model file: {"n","m","p","A","B","C"} plus optional "E" and "D";
/// matrices are row-major nested arrays.
nlohmann::json model_to_json(const StateSpaceModel& model);
StateSpaceModel model_from_json(const nlohmann::json& doc);

StateSpaceModel read_model(const std::filesystem::path& path);
void write_model(const StateSpaceModel& model, const std::filesystem::path& path);

/// Parses text as JSON, mapping syntax errors to ParseError with a line number.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

struct SampleTable {
    Eigen::Index m = 0;
    Eigen::Index p = 0;
    std::vector<FrequencySample> samples;
};

/// Column names "omega,re_1_1,im_1_1,re_1_2,..." with (i, j) running row
/// then column. With `with_norm` a trailing "sigma_max" column is added.
std::string sample_header(Eigen::Index m, Eigen::Index p, bool with_norm = false);

/// Sample CSV. Rows keep file order; a trailing sigma_max column is accepted and ignored.
SampleTable read_samples(const std::filesystem::path& path);
SampleTable parse_samples(const std::string& text);
void write_samples(const std::vector<FrequencySample>& samples, const std::filesystem::path& path,
                   bool with_norm = false);
std::string format_samples(const std::vector<FrequencySample>& samples, bool with_norm = false);

} // namespace cloe
