// CSV and JSON output. Numbers are written with 17 significant digits and no locale,
// so every value read back is bit-identical to the one written.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hiernm/phase_map.hpp"

namespace hiernm {

std::string format_double(double x);

/// Accepts anything format_double produces, plus "+inf"/"infinity". Throws std::invalid_argument.
double parse_double(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

/// Columns named by `names`, one per entry of `columns` (all the same length).
CsvTable columns_table(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns);

/// Header "kappa/lambda,<lambda...>", then one row per kappa.
CsvTable sweep_table(const PhaseDiagram& pd);
/// lambda,kappa_t,half_width,below_floor
CsvTable threshold_table(const std::vector<ThresholdPoint>& curve);
/// Inverse of sweep_table (threshold curve and diagnostics are not part of it).
PhaseDiagram phase_diagram_from_table(const CsvTable& table);

/// inf and -inf become strings, NaN becomes null.
nlohmann::json json_number(double x);
nlohmann::json table_json(const CsvTable& table);
nlohmann::json sweep_json(const PhaseDiagram& pd);

/// "<base>_threshold.csv" for "<base>.csv", otherwise path + "_threshold.csv".
std::string threshold_path(const std::string& out_path);

}  // namespace hiernm
