// Command-line front end.
//
//   hiernm gfunc|trace-distance|nm|threshold|sweep|verify [options]
//
// Exit codes: 0 success, 1 computation or I/O error, 2 usage error.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hiernm/model.hpp"
#include "hiernm/propagator.hpp"

namespace hiernm {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { gfunc, trace_distance, nm, threshold, sweep, verify, help };
enum class Format { csv, json };

struct AxisSpec {
    double a{0.0};
    double b{0.0};
    int n{1};
};

struct RunConfig {
    Command command{Command::help};
    PhysParams params{};
    double t_max = 50.0;
    double dt = 1e-3;
    std::optional<std::string> output_path;
    Format format = Format::csv;
    Model model = Model::hierarchical;
    double horizon = 200.0;
    unsigned jobs = 1;

    // threshold
    double tol = 1e-4;
    std::optional<std::pair<double, double>> bracket;

    // sweep
    AxisSpec kappa_range{0.0, 1.0, 21};
    AxisSpec lambda_range{0.05, 100.0, 25};
    bool lambda_log = true;
    bool inf_column = true;

    // trace-distance
    std::array<double, 3> bloch1{1.0, 0.0, 0.0};
    std::array<double, 3> bloch2{-1.0, 0.0, 0.0};

    std::string help_text;
};

/// Parses arguments (without the program name). Throws UsageError on anything invalid.
/// `--help` yields Command::help with help_text filled in.
RunConfig parse_args(const std::vector<std::string>& args);

/// Runs a parsed config. Result files go to output_path or, if unset, to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with every error mapped to its exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hiernm
