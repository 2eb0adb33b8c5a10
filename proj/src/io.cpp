#include "hiernm/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hiernm {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
        if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            throw std::invalid_argument("not a number: '+" + std::string(s) + "'");
        }
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) {
            break;
        }
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
        out.back().pop_back();
    }
    return out;
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        os << (i ? "," : "") << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_double(row[i]);
        }
        os << '\n';
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("empty CSV");
    }
    t.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != t.header.size()) {
            throw std::runtime_error("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(t.header.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            row.push_back(parse_double(c));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable columns_table(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) {
        throw std::invalid_argument("columns_table: names and columns differ in count");
    }
    CsvTable t;
    t.header = names;
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != n) {
            throw std::invalid_argument("columns_table: ragged columns");
        }
    }
    t.rows.assign(n, std::vector<double>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            t.rows[i][j] = columns[j][i];
        }
    }
    return t;
}

CsvTable sweep_table(const PhaseDiagram& pd) {
    CsvTable t;
    t.header.push_back("kappa/lambda");
    for (double l : pd.lambda_axis) {
        t.header.push_back(format_double(l));
    }
    for (std::size_t i = 0; i < pd.kappa_axis.size(); ++i) {
        std::vector<double> row{pd.kappa_axis[i]};
        row.insert(row.end(), pd.nm_grid[i].begin(), pd.nm_grid[i].end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable threshold_table(const std::vector<ThresholdPoint>& curve) {
    CsvTable t;
    t.header = {"lambda", "kappa_t", "half_width", "below_floor"};
    for (const auto& p : curve) {
        t.rows.push_back({p.lambda, p.kappa_t, p.half_width, p.below_floor ? 1.0 : 0.0});
    }
    return t;
}

PhaseDiagram phase_diagram_from_table(const CsvTable& table) {
    if (table.header.size() < 2) {
        throw std::runtime_error("sweep CSV needs at least one lambda column");
    }
    PhaseDiagram pd;
    for (std::size_t j = 1; j < table.header.size(); ++j) {
        pd.lambda_axis.push_back(parse_double(table.header[j]));
    }
    for (const auto& row : table.rows) {
        pd.kappa_axis.push_back(row.front());
        pd.nm_grid.emplace_back(row.begin() + 1, row.end());
    }
    return pd;
}

nlohmann::json json_number(double x) {
    if (std::isnan(x)) {
        return nullptr;
    }
    if (std::isinf(x)) {
        return format_double(x);
    }
    return x;
}

nlohmann::json table_json(const CsvTable& table) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        auto col = nlohmann::json::array();
        for (const auto& row : table.rows) {
            col.push_back(json_number(row[j]));
        }
        out[table.header[j]] = std::move(col);
    }
    return out;
}

nlohmann::json sweep_json(const PhaseDiagram& pd) {
    nlohmann::json out;
    out["kappa_axis"] = nlohmann::json::array();
    for (double k : pd.kappa_axis) {
        out["kappa_axis"].push_back(json_number(k));
    }
    out["lambda_axis"] = nlohmann::json::array();
    for (double l : pd.lambda_axis) {
        out["lambda_axis"].push_back(json_number(l));
    }
    out["nm_grid"] = nlohmann::json::array();
    for (const auto& row : pd.nm_grid) {
        auto r = nlohmann::json::array();
        for (double v : row) {
            r.push_back(json_number(v));
        }
        out["nm_grid"].push_back(std::move(r));
    }
    out["threshold_curve"] = nlohmann::json::array();
    for (const auto& p : pd.threshold_curve) {
        out["threshold_curve"].push_back({{"lambda", json_number(p.lambda)},
                                          {"kappa_t", json_number(p.kappa_t)},
                                          {"half_width", json_number(p.half_width)},
                                          {"below_floor", p.below_floor}});
    }
    out["diagnostics"] = pd.diagnostics;
    return out;
}

std::string threshold_path(const std::string& out_path) {
    constexpr std::string_view ext = ".csv";
    if (out_path.size() > ext.size() && out_path.compare(out_path.size() - ext.size(), ext.size(), ext) == 0) {
        return out_path.substr(0, out_path.size() - ext.size()) + "_threshold.csv";
    }
    return out_path + "_threshold.csv";
}

}  // namespace hiernm
