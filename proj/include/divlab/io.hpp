#pragma once

#include "markov.hpp"
#include "quantum.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace divlab {

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& tok, double& out) {
    std::string t = trim(tok);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

inline Mat rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw input_error("matrix has no rows");
    const std::size_t cols = rows[0].size();
    Mat M(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw input_error("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                                      " entries, expected " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j) M(i, j) = rows[i][j];
    }
    return M;
}

inline Mat json_real_matrix(const nlohmann::json& j) {
    if (!j.is_array()) throw input_error("matrix must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw input_error("matrix rows must be arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw input_error("matrix entries must be numbers");
            r.push_back(v.get<double>());
        }
        rows.push_back(std::move(r));
    }
    return rows_to_matrix(rows);
}

inline bool looks_like_json(const std::string& text) {
    std::string t = trim(text);
    return !t.empty() && (t[0] == '{' || t[0] == '[');
}

}  // namespace detail

// Row-major CSV with optional '#' comments and an optional non-numeric header row.
inline Mat parse_csv_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ls, cell, ',')) {
            double v;
            if (!detail::parse_number(cell, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw input_error("line " + std::to_string(lineno) + ": non-numeric entry");
        }
        first = false;
        rows.push_back(std::move(row));
    }
    return detail::rows_to_matrix(rows);
}

// CSV, or JSON {"matrix": [[...]]}.
inline Mat parse_real_matrix_text(const std::string& text) {
    if (!detail::looks_like_json(text)) return parse_csv_matrix(text);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed JSON: ") + e.what());
    }
    if (j.is_object()) {
        if (!j.contains("matrix")) throw input_error("JSON object lacks a \"matrix\" field");
        return detail::json_real_matrix(j["matrix"]);
    }
    return detail::json_real_matrix(j);
}

// Column-stochastic check at 1e-8.
inline Channel parse_matrix_text(const std::string& text) {
    Mat M = parse_real_matrix_text(text);
    try {
        return Channel(M, 1e-8);
    } catch (const domain_error& e) {
        throw input_error(std::string("not a stochastic matrix: ") + e.what());
    }
}

inline Channel parse_matrix(const std::string& path) { return parse_matrix_text(read_file(path)); }

inline std::string serialize_matrix_csv(const Mat& M) {
    std::string out;
    char buf[40];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            if (j) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

// Complex matrix from {"re": [[..]], "im": [[..]]}, nested [re, im] pairs, or a real matrix.
inline CMat json_complex_matrix(const nlohmann::json& j) {
    if (j.is_object()) {
        if (j.contains("re")) {
            Mat re = detail::json_real_matrix(j["re"]);
            Mat im = j.contains("im") ? detail::json_real_matrix(j["im"]) : Mat::Zero(re.rows(), re.cols());
            if (im.rows() != re.rows() || im.cols() != re.cols()) throw input_error("re and im parts differ in shape");
            CMat out(re.rows(), re.cols());
            out.real() = re;
            out.imag() = im;
            return out;
        }
        if (j.contains("matrix")) return json_complex_matrix(j["matrix"]);
        throw input_error("complex matrix object needs \"re\"/\"im\" or \"matrix\"");
    }
    if (!j.is_array() || j.empty()) throw input_error("complex matrix must be a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array()) throw input_error("complex matrix rows must be arrays");
    const std::size_t cols = j[0].size();
    CMat out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw input_error("complex matrix rows differ in length");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& v = j[r][c];
            if (v.is_number())
                out(r, c) = v.get<double>();
            else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
                out(r, c) = cplx(v[0].get<double>(), v[1].get<double>());
            else
                throw input_error("complex entries must be numbers or [re, im] pairs");
        }
    }
    return out;
}

inline nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("malformed JSON: ") + e.what());
    }
}

inline DensityMatrix parse_state_text(const std::string& text) {
    CMat m = detail::looks_like_json(text) ? json_complex_matrix(parse_json_text(text))
                                            : CMat(parse_csv_matrix(text).cast<cplx>());
    try {
        return DensityMatrix(m);
    } catch (const domain_error& e) {
        throw input_error(std::string("not a density matrix: ") + e.what());
    }
}

inline DensityMatrix parse_state(const std::string& path) { return parse_state_text(read_file(path)); }

// {"kraus": [op, ...]} or a bare list of operators; each op in any complex-matrix form.
inline KrausChannel parse_kraus_text(const std::string& text) {
    nlohmann::json j = parse_json_text(text);
    const nlohmann::json* list = &j;
    if (j.is_object()) {
        if (!j.contains("kraus")) throw input_error("channel JSON lacks a \"kraus\" field");
        list = &j["kraus"];
    }
    if (!list->is_array() || list->empty()) throw input_error("Kraus list must be a non-empty array");
    std::vector<CMat> ks;
    for (const auto& op : *list) ks.push_back(json_complex_matrix(op));
    try {
        return KrausChannel(std::move(ks));
    } catch (const domain_error& e) {
        throw input_error(std::string("not a channel: ") + e.what());
    }
}

inline KrausChannel parse_kraus(const std::string& path) { return parse_kraus_text(read_file(path)); }

// Comma-separated list of reals.
inline Vec parse_vector(const std::string& text) {
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        double v;
        if (!detail::parse_number(cell, v)) throw input_error("vector entry '" + detail::trim(cell) + "' is not a number");
        xs.push_back(v);
    }
    if (xs.empty()) throw input_error("empty vector");
    return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

}  // namespace divlab
