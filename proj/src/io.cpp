#include "cloe/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cloe/errors.hpp"

namespace cloe {

namespace {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::string& text, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::size_t line_of(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

json matrix_to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& doc, const char* field, Eigen::Index rows, Eigen::Index cols)
{
    if (!doc.is_array()) throw ParseError("expected an array of rows", 0, field);
    if (static_cast<Eigen::Index>(doc.size()) != rows)
        throw DimensionMismatch(std::string(field) + " has " + std::to_string(doc.size()) + " rows, expected " +
                                std::to_string(rows));
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = doc[static_cast<std::size_t>(r)];
        if (!row.is_array()) throw ParseError("row " + std::to_string(r + 1) + " is not an array", 0, field);
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw DimensionMismatch(std::string(field) + " row " + std::to_string(r + 1) + " has " +
                                    std::to_string(row.size()) + " columns, expected " + std::to_string(cols));
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number())
                throw ParseError("entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ") is not a number",
                                 0, field);
            out(r, c) = v.get<double>();
        }
    }
    return out;
}

Eigen::Index dimension_field(const json& doc, const char* field, bool allow_zero)
{
    if (!doc.contains(field)) throw ParseError("missing required field", 0, field);
    const json& v = doc.at(field);
    if (!v.is_number_integer()) throw ParseError("expected an integer", 0, field);
    const auto value = v.get<long long>();
    if (value < (allow_zero ? 0 : 1)) throw ParseError("dimension out of range", 0, field);
    return static_cast<Eigen::Index>(value);
}

bool parse_number(std::string_view token, double& out)
{
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
        token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

json model_to_json(const StateSpaceModel& model)
{
    json doc;
    doc["n"] = model.order();
    doc["m"] = model.outputs();
    doc["p"] = model.inputs();
    doc["E"] = matrix_to_json(model.E());
    doc["A"] = matrix_to_json(model.A());
    doc["B"] = matrix_to_json(model.B());
    doc["C"] = matrix_to_json(model.C());
    doc["D"] = matrix_to_json(model.D());
    return doc;
}

StateSpaceModel model_from_json(const json& doc)
{
    if (!doc.is_object()) throw ParseError("model file must hold a JSON object");
    const auto n = dimension_field(doc, "n", true);
    const auto m = dimension_field(doc, "m", false);
    const auto p = dimension_field(doc, "p", false);
    auto required = [&](const char* field) -> const json& {
        if (!doc.contains(field)) throw ParseError("missing required field", 0, field);
        return doc.at(field);
    };
    Matrix A = matrix_from_json(required("A"), "A", n, n);
    Matrix B = matrix_from_json(required("B"), "B", n, p);
    Matrix C = matrix_from_json(required("C"), "C", m, n);
    std::optional<Matrix> E;
    std::optional<Matrix> D;
    if (doc.contains("E") && !doc.at("E").is_null()) E = matrix_from_json(doc.at("E"), "E", n, n);
    if (doc.contains("D") && !doc.at("D").is_null()) D = matrix_from_json(doc.at("D"), "D", m, p);
    if (n == 0) return StateSpaceModel::constant(D ? std::move(*D) : Matrix::Zero(m, p));
    return StateSpaceModel(std::move(A), std::move(B), std::move(C), std::move(E), std::move(D));
}

json parse_json_text(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_of(text, e.byte > 0 ? e.byte - 1 : 0));
    }
}

json read_json_file(const std::filesystem::path& path)
{
    return parse_json_text(read_text(path));
}

void write_json_file(const json& doc, const std::filesystem::path& path)
{
    write_text(doc.dump(2) + "\n", path);
}

StateSpaceModel read_model(const std::filesystem::path& path)
{
    const json doc = read_json_file(path);
    try {
        return model_from_json(doc);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

void write_model(const StateSpaceModel& model, const std::filesystem::path& path)
{
    write_json_file(model_to_json(model), path);
}

std::string sample_header(Eigen::Index m, Eigen::Index p, bool with_norm)
{
    std::string out = "omega";
    for (Eigen::Index i = 1; i <= m; ++i)
        for (Eigen::Index j = 1; j <= p; ++j) {
            const auto idx = std::to_string(i) + "_" + std::to_string(j);
            out += ",re_" + idx + ",im_" + idx;
        }
    if (with_norm) out += ",sigma_max";
    return out;
}

std::string format_samples(const std::vector<FrequencySample>& samples, bool with_norm)
{
    if (samples.empty()) throw InvalidRange("no samples to write");
    const auto m = samples.front().response.rows();
    const auto p = samples.front().response.cols();
    std::string out = sample_header(m, p, with_norm) + "\n";
    for (const auto& s : samples) {
        if (s.response.rows() != m || s.response.cols() != p)
            throw DimensionMismatch("sample responses have inconsistent dimensions");
        out += format_double(s.omega);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < p; ++j) {
                out += "," + format_double(s.response(i, j).real());
                out += "," + format_double(s.response(i, j).imag());
            }
        if (with_norm) out += "," + format_double(spectral_norm(s.response));
        out += "\n";
    }
    return out;
}

void write_samples(const std::vector<FrequencySample>& samples, const std::filesystem::path& path, bool with_norm)
{
    write_text(format_samples(samples, with_norm), path);
}

SampleTable parse_samples(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header_line = line;
            break;
        }
    }
    if (header_line.empty()) throw ParseError("sample file is empty");
    header = split(header_line);
    for (auto& h : header) h = trim(h);
    bool with_norm = !header.empty() && header.back() == "sigma_max";
    const std::size_t value_cols = header.size() - 1 - (with_norm ? 1 : 0);
    if (header.empty() || header.front() != "omega") throw ParseError("header must start with 'omega'", line_no, "omega");
    if (value_cols == 0 || value_cols % 2 != 0) throw ParseError("header must hold re/im column pairs", line_no);

    // Infer m, p from the last column name and require the canonical layout.
    const std::string last(header[value_cols]);
    Eigen::Index m = 0;
    Eigen::Index p = 0;
    if (std::sscanf(last.c_str(), "im_%td_%td", &m, &p) != 2 || m < 1 || p < 1)
        throw ParseError("cannot read dimensions from column '" + last + "'", line_no, last);
    if (static_cast<std::size_t>(2 * m * p) != value_cols) throw ParseError("column count does not match m x p", line_no);
    if (sample_header(m, p, with_norm) != header_line.substr(0, header_line.find_last_not_of(" \t\r") + 1)) {
        const auto expected = split(sample_header(m, p, with_norm));
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] != expected[c])
                throw ParseError("unexpected column name", line_no, std::string(header[c]));
    }

    SampleTable table;
    table.m = m;
    table.p = p;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        FrequencySample s;
        if (!parse_number(fields[0], s.omega) || !std::isfinite(s.omega) || s.omega < 0.0)
            throw ParseError("invalid frequency", line_no, "omega");
        s.response.resize(m, p);
        std::size_t col = 1;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < p; ++j) {
                double re = 0.0;
                double im = 0.0;
                if (!parse_number(fields[col], re)) throw ParseError("invalid number", line_no, std::string(header[col]));
                if (!parse_number(fields[col + 1], im))
                    throw ParseError("invalid number", line_no, std::string(header[col + 1]));
                s.response(i, j) = Complex(re, im);
                col += 2;
            }
        table.samples.push_back(std::move(s));
    }
    if (table.samples.empty()) throw ParseError("sample file has no data rows", line_no);
    return table;
}

SampleTable read_samples(const std::filesystem::path& path)
{
    return parse_samples(read_text(path));
}

} // namespace cloe
