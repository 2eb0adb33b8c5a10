#include "hiernm/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hiernm/errors.hpp"
#include "hiernm/io.hpp"
#include "hiernm/nm_measure.hpp"
#include "hiernm/oracle.hpp"
#include "hiernm/phase_map.hpp"

namespace hiernm {

namespace {

constexpr double kVerifyTol = 1e-6;

std::vector<std::string> split_colon(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(':', start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double number(const std::string& flag, const std::string& text) {
    try {
        const double v = parse_double(text);
        if (std::isnan(v)) {
            throw std::invalid_argument("nan");
        }
        return v;
    } catch (const std::invalid_argument&) {
        throw UsageError(flag + ": not a number: '" + text + "'");
    }
}

double finite_positive(const std::string& flag, const std::string& text) {
    const double v = number(flag, text);
    if (!std::isfinite(v) || v <= 0.0) {
        throw UsageError(flag + " must be finite and > 0");
    }
    return v;
}

int integer(const std::string& flag, const std::string& text) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw UsageError(flag + ": not an integer: '" + text + "'");
    }
    return v;
}

AxisSpec axis(const std::string& flag, const std::string& text) {
    const auto parts = split_colon(text);
    if (parts.size() != 3) {
        throw UsageError(flag + " expects a:b:n");
    }
    AxisSpec ax{number(flag, parts[0]), number(flag, parts[1]), integer(flag, parts[2])};
    if (!std::isfinite(ax.a) || !std::isfinite(ax.b) || ax.n < 1 || (ax.n > 1 && !(ax.b > ax.a)) ||
        (ax.n == 1 && ax.a != ax.b)) {
        throw UsageError(flag + ": need finite a < b and n >= 1 (a == b when n == 1)");
    }
    if (ax.n > 100000) {
        throw UsageError(flag + ": n too large");
    }
    return ax;
}

std::array<double, 3> bloch(const std::string& flag, const std::string& text) {
    const auto parts = split_colon(text);
    if (parts.size() != 3) {
        throw UsageError(flag + " expects x:y:z");
    }
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) {
        v[i] = number(flag, parts[i]);
        if (!std::isfinite(v[i])) {
            throw UsageError(flag + ": components must be finite");
        }
    }
    if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] > 1.0 + kPositivityTol) {
        throw UsageError(flag + ": Bloch vector longer than 1");
    }
    return v;
}

unsigned jobs_value(const std::string& source, const std::string& text) {
    const int j = integer(source, text);
    if (j < 1 || j > 1024) {
        throw UsageError(source + " must be in [1, 1024]");
    }
    return static_cast<unsigned>(j);
}

struct Raw {
    std::string kappa, lambda, gamma, tmax, dt, out, format, model, horizon, jobs, tol, bracket;
    std::string kappa_range, lambda_range, bloch1, bloch2;
    bool log = false;
    bool inf_column = false;
};

enum Flag : unsigned {
    kKappa = 1u << 0,
    kLambda = 1u << 1,
    kTime = 1u << 2,
    kModel = 1u << 3,
    kHorizon = 1u << 4,
    kThreshold = 1u << 5,
    kSweep = 1u << 6,
    kPair = 1u << 7,
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& about, unsigned flags, Raw& raw) {
    auto* sub = app.add_subcommand(name, about);
    if (flags & kKappa) {
        sub->add_option("--kappa", raw.kappa, "qubit-cavity coupling (units of gamma)")->required();
    }
    if (flags & kLambda) {
        sub->add_option("--lambda", raw.lambda, "reservoir spectral width, or inf")->required();
    }
    sub->add_option("--gamma", raw.gamma, "reservoir coupling scale (default 1)");
    if (flags & kTime) {
        sub->add_option("--tmax", raw.tmax, "end time (default 50)");
        sub->add_option("--dt", raw.dt, "time step (default 1e-3)");
    }
    if (flags & kModel) {
        sub->add_option("--model", raw.model, "hierarchical (default) or direct");
    }
    if (flags & kHorizon) {
        sub->add_option("--horizon", raw.horizon, "longest evolution time for NM (default 200)");
    }
    if (flags & kThreshold) {
        sub->add_option("--tol", raw.tol, "threshold bracket width (default 1e-4)");
    }
    if ((flags & kThreshold) && !(flags & kSweep)) {
        sub->add_option("--bracket", raw.bracket, "initial bracket lo:hi (no auto-expansion)");
    }
    if (flags & kSweep) {
        sub->add_option("--kappa-range", raw.kappa_range, "a:b:n linear kappa grid (default 0:1:21)");
        sub->add_option("--lambda-range", raw.lambda_range, "a:b:n lambda grid (default 0.05:100:25 log, plus inf)");
        sub->add_flag("--log", raw.log, "log-spaced lambda grid");
        sub->add_flag("--inf-column", raw.inf_column, "append lambda = inf");
        sub->add_option("--jobs", raw.jobs, "worker threads (default HIERNM_JOBS or 1)");
    }
    if (flags & kPair) {
        sub->add_option("--bloch1", raw.bloch1, "first initial state x:y:z (default 1:0:0)");
        sub->add_option("--bloch2", raw.bloch2, "second initial state x:y:z (default -1:0:0)");
    }
    sub->add_option("--out", raw.out, "output file (default stdout)");
    sub->add_option("--format", raw.format, "csv (default) or json");
    return sub;
}

void fill(RunConfig& c, const Raw& raw) {
    const double kappa = raw.kappa.empty() ? 0.0 : number("--kappa", raw.kappa);
    const double lambda = raw.lambda.empty() ? 1.0 : number("--lambda", raw.lambda);
    const double gamma = raw.gamma.empty() ? 1.0 : number("--gamma", raw.gamma);
    try {
        c.params = make_params(kappa, lambda, gamma);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!raw.tmax.empty()) {
        c.t_max = finite_positive("--tmax", raw.tmax);
    }
    if (!raw.dt.empty()) {
        c.dt = finite_positive("--dt", raw.dt);
    }
    if (c.dt >= c.t_max) {
        throw UsageError("--dt must be smaller than --tmax");
    }
    if (c.t_max / c.dt > 1e8) {
        throw UsageError("--tmax / --dt exceeds 1e8 samples");
    }
    if (!raw.out.empty()) {
        c.output_path = raw.out;
    }
    if (!raw.format.empty()) {
        if (raw.format == "csv") {
            c.format = Format::csv;
        } else if (raw.format == "json") {
            c.format = Format::json;
        } else {
            throw UsageError("--format must be csv or json");
        }
    }
    if (!raw.model.empty()) {
        if (raw.model == "hierarchical") {
            c.model = Model::hierarchical;
        } else if (raw.model == "direct") {
            c.model = Model::direct;
        } else {
            throw UsageError("--model must be hierarchical or direct");
        }
    }
    if (c.model == Model::direct && std::isinf(c.params.lambda)) {
        throw UsageError("--model direct needs a finite --lambda");
    }
    if (!raw.horizon.empty()) {
        c.horizon = finite_positive("--horizon", raw.horizon);
    }
    if (!raw.tol.empty()) {
        c.tol = finite_positive("--tol", raw.tol);
    }
    if (!raw.bracket.empty()) {
        const auto parts = split_colon(raw.bracket);
        if (parts.size() != 2) {
            throw UsageError("--bracket expects lo:hi");
        }
        const double lo = number("--bracket", parts[0]);
        const double hi = number("--bracket", parts[1]);
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || !(hi > lo)) {
            throw UsageError("--bracket needs finite 0 <= lo < hi");
        }
        c.bracket = std::make_pair(lo, hi);
    }
    if (const char* env = std::getenv("HIERNM_JOBS"); env != nullptr && *env != '\0') {
        c.jobs = jobs_value("HIERNM_JOBS", env);
    }
    if (!raw.jobs.empty()) {
        c.jobs = jobs_value("--jobs", raw.jobs);
    }
    if (!raw.kappa_range.empty()) {
        c.kappa_range = axis("--kappa-range", raw.kappa_range);
        if (c.kappa_range.a < 0.0) {
            throw UsageError("--kappa-range must be >= 0");
        }
    }
    if (!raw.lambda_range.empty()) {
        c.lambda_range = axis("--lambda-range", raw.lambda_range);
        c.lambda_log = raw.log;
        c.inf_column = raw.inf_column;
        if (!(c.lambda_range.a > 0.0)) {
            throw UsageError("--lambda-range must be > 0");
        }
    } else if (raw.log || raw.inf_column) {
        throw UsageError("--log and --inf-column need --lambda-range");
    }
    if (!raw.bloch1.empty()) {
        c.bloch1 = bloch("--bloch1", raw.bloch1);
    }
    if (!raw.bloch2.empty()) {
        c.bloch2 = bloch("--bloch2", raw.bloch2);
    }
}

// Writes through fn to the configured file, or to `out`.
void emit(const RunConfig& c, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
    if (!c.output_path) {
        fn(out);
        return;
    }
    std::ofstream f(*c.output_path);
    if (!f) {
        throw std::runtime_error("cannot open '" + *c.output_path + "' for writing");
    }
    fn(f);
    f.close();
    if (!f) {
        throw std::runtime_error("write to '" + *c.output_path + "' failed");
    }
}

void emit_table(const RunConfig& c, std::ostream& out, const CsvTable& t) {
    emit(c, out, [&](std::ostream& os) {
        if (c.format == Format::json) {
            os << table_json(t).dump() << '\n';
        } else {
            write_csv(os, t);
        }
    });
}

// Key/value report: "key,value" lines for csv, one object for json.
class Report {
public:
    void add(const std::string& key, double v) {
        lines_.push_back(key + "," + format_double(v));
        json_[key] = json_number(v);
    }
    void add(const std::string& key, const std::string& v) {
        lines_.push_back(key + "," + v);
        json_[key] = v;
    }
    void add_flag(const std::string& key, bool v) {
        lines_.push_back(key + "," + (v ? "true" : "false"));
        json_[key] = v;
    }
    void add_line(const std::string& line) { lines_.push_back(line); }
    nlohmann::json& json() { return json_; }

    void write(const RunConfig& c, std::ostream& out) const {
        emit(c, out, [&](std::ostream& os) {
            if (c.format == Format::json) {
                os << json_.dump() << '\n';
            } else {
                for (const auto& l : lines_) {
                    os << l << '\n';
                }
            }
        });
    }

private:
    std::vector<std::string> lines_;
    nlohmann::json json_ = nlohmann::json::object();
};

int run_gfunc(const RunConfig& c, std::ostream& out) {
    const TimeGrid grid(c.t_max, c.dt);
    const auto modes = propagator_modes(c.params, c.model);
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        g[i] = g_of_t(modes, grid.time(i));
    }
    emit_table(c, out, columns_table({"t", "G"}, {grid.times(), g}));
    return 0;
}

int run_trace_distance(const RunConfig& c, std::ostream& out) {
    const TimeGrid grid(c.t_max, c.dt);
    const auto modes = propagator_modes(c.params, c.model);
    const auto r1 = DensityMatrix2::from_bloch(c.bloch1[0], c.bloch1[1], c.bloch1[2]);
    const auto r2 = DensityMatrix2::from_bloch(c.bloch2[0], c.bloch2[1], c.bloch2[2]);
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = g_of_t(modes, grid.time(i));
        d[i] = trace_distance(evolve_qubit(r1, g), evolve_qubit(r2, g));
    }
    emit_table(c, out, columns_table({"t", "D"}, {grid.times(), d}));
    return 0;
}

int run_nm(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto r = nm_optimal_pair(c.params, c.horizon, c.model);
    const bool monotone = is_markovian(c.params, c.model);
    Report rep;
    rep.add("kappa", c.params.kappa);
    rep.add("lambda", c.params.lambda);
    rep.add("nm", r.nm_value);
    rep.add("classification", r.markovian ? "markovian" : "non-markovian");
    rep.add_flag("g_monotone", monotone);
    rep.add("horizon", r.horizon);
    rep.add("truncation_bound", r.truncation_bound);
    rep.add("rises", static_cast<double>(r.rises.size()));
    auto rises = nlohmann::json::array();
    for (const auto& x : r.rises) {
        rep.add_line("rise," + format_double(x.t_start) + "," + format_double(x.t_end) + "," + format_double(x.gain));
        rises.push_back({{"t_start", x.t_start}, {"t_end", x.t_end}, {"gain", x.gain}});
    }
    rep.json()["rises"] = std::move(rises);
    if (r.warning) {
        err << "warning: " << *r.warning << '\n';
        rep.json()["warning"] = *r.warning;
    }
    rep.write(c, out);
    return 0;
}

int run_threshold(const RunConfig& c, std::ostream& out, std::ostream& err) {
    ThresholdOptions to;
    to.bracket = c.bracket;
    to.tol = c.tol;
    to.gamma = c.params.gamma;
    to.model = c.model;
    const auto t = threshold_kappa(c.params.lambda, to);
    Report rep;
    rep.add("lambda", c.params.lambda);
    rep.add("kappa_t", t.kappa);
    rep.add("half_width", t.half_width);
    rep.add_flag("below_floor", t.below_floor);
    if (t.below_floor) {
        err << "note: non-Markovian for every kappa down to " << format_double(t.hi) << "; kappa_T lies below it\n";
    }
    rep.write(c, out);
    return 0;
}

int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto kappa = make_axis(c.kappa_range.a, c.kappa_range.b, c.kappa_range.n, false);
    auto lambda = make_axis(c.lambda_range.a, c.lambda_range.b, c.lambda_range.n, c.lambda_log);
    if (c.inf_column) {
        lambda.push_back(kInfinite);
    }
    SweepOptions so;
    so.horizon = c.horizon;
    so.jobs = c.jobs;
    so.gamma = c.params.gamma;
    so.model = c.model;
    so.threshold_tol = c.tol;
    if (c.model == Model::direct && c.inf_column) {
        throw UsageError("--model direct cannot use the inf column");
    }
    const auto pd = sweep(kappa, lambda, so);
    for (const auto& d : pd.diagnostics) {
        err << "diagnostic: " << d << '\n';
    }
    if (c.format == Format::json) {
        emit(c, out, [&](std::ostream& os) { os << sweep_json(pd).dump() << '\n'; });
        return 0;
    }
    const auto grid = sweep_table(pd);
    const auto curve = threshold_table(pd.threshold_curve);
    if (!c.output_path) {
        write_csv(out, grid);
        out << '\n';
        write_csv(out, curve);
        return 0;
    }
    emit(c, out, [&](std::ostream& os) { write_csv(os, grid); });
    RunConfig side = c;
    side.output_path = threshold_path(*c.output_path);
    emit(side, out, [&](std::ostream& os) { write_csv(os, curve); });
    return 0;
}

int run_verify(const RunConfig& c, std::ostream& out) {
    const TimeGrid grid(c.t_max, c.dt);
    const auto modes = propagator_modes(c.params);
    const auto amps = integrate(c.params, grid);
    double worst = 0.0;
    double t_worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dev = std::abs(amps[i] - cplx(g_of_t(modes, grid.time(i)), 0.0));
        if (dev > worst) {
            worst = dev;
            t_worst = grid.time(i);
        }
    }
    const bool ok = worst < kVerifyTol;
    Report rep;
    rep.add("kappa", c.params.kappa);
    rep.add("lambda", c.params.lambda);
    rep.add("dt", grid.dt());
    rep.add("max_deviation", worst);
    rep.add("t_at_max", t_worst);
    rep.add("tolerance", kVerifyTol);
    rep.add("status", ok ? "pass" : "fail");
    rep.write(c, out);
    return ok ? 0 : 1;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Non-Markovian dynamics of a qubit in a cavity coupled to a Lorentzian reservoir", "hiernm"};
    app.require_subcommand(1);
    Raw raw;
    auto* gfunc = add_command(app, "gfunc", "write t,G", kKappa | kLambda | kTime | kModel, raw);
    auto* td = add_command(app, "trace-distance", "write t,D for a pair of initial states",
                           kKappa | kLambda | kTime | kModel | kPair, raw);
    auto* nm = add_command(app, "nm", "non-Markovianity of the optimal pair", kKappa | kLambda | kModel | kHorizon, raw);
    auto* thr = add_command(app, "threshold", "kappa_T at one lambda", kLambda | kModel | kThreshold, raw);
    auto* sw = add_command(app, "sweep", "NM over a (kappa, lambda) grid plus the threshold curve",
                           kModel | kHorizon | kThreshold | kSweep, raw);
    auto* ver = add_command(app, "verify", "analytic G against the brute-force integrator", kKappa | kLambda | kTime, raw);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    RunConfig c;
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream o, e2;
        app.exit(e, o, e2);
        c.command = Command::help;
        c.help_text = o.str();
        return c;
    } catch (const CLI::CallForAllHelp& e) {
        std::ostringstream o, e2;
        app.exit(e, o, e2);
        c.command = Command::help;
        c.help_text = o.str();
        return c;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const std::pair<CLI::App*, Command> table[] = {{gfunc, Command::gfunc}, {td, Command::trace_distance},
                                                   {nm, Command::nm},       {thr, Command::threshold},
                                                   {sw, Command::sweep},    {ver, Command::verify}};
    for (const auto& [sub, cmd] : table) {
        if (sub->parsed()) {
            c.command = cmd;
        }
    }
    fill(c, raw);
    return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    switch (config.command) {
        case Command::help:
            out << config.help_text;
            return 0;
        case Command::gfunc:
            return run_gfunc(config, out);
        case Command::trace_distance:
            return run_trace_distance(config, out);
        case Command::nm:
            return run_nm(config, out, err);
        case Command::threshold:
            return run_threshold(config, out, err);
        case Command::sweep:
            return run_sweep(config, out, err);
        case Command::verify:
            return run_verify(config, out);
    }
    return 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    try {
        c = parse_args(args);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun 'hiernm --help' for usage\n";
        return 2;
    }
    try {
        return run(c, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hiernm
