#include "fbsde/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "fbsde/oracle.hpp"
#include "fbsde/simulate.hpp"
#include "fbsde/solver.hpp"

namespace fbsde {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key, "expected a real number, got '" + text + "'");
}

std::uint64_t parse_count(const std::string& key, const std::string& text, bool allow_zero) {
    // Accepts plain integers and integral scientific forms such as 1e5.
    const double v = parse_real(key, text);
    if (v != std::floor(v) || v < 0.0 || v > 9007199254740992.0 || (!allow_zero && v == 0.0)) {
        throw ConfigError(key, allow_zero ? "expected a non-negative integer"
                                          : "expected a positive integer");
    }
    if (text.find_first_of(".eE") == std::string::npos) {
        return std::stoull(text);
    }
    return static_cast<std::uint64_t>(v);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text, bool allow_zero) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(key, "empty list entry");
        out.push_back(static_cast<T>(parse_count(key, item, allow_zero)));
    }
    if (out.empty()) throw ConfigError(key, "sweep list must not be empty");
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + text + "'");
}

std::set<std::string> all_parameter_names() {
    std::set<std::string> names;
    for (const char* problem : {"call", "put", "arctan", "custom"}) {
        for (auto& n : parameter_names(problem)) names.insert(n);
    }
    return names;
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string{};
}

struct SweepPoint {
    std::size_t paths;
    std::size_t steps;
    std::size_t k;
    std::uint64_t seed;
};

std::vector<SweepPoint> sweep_points(const RunConfig& c) {
    const auto pick = [](const auto& list, auto scalar) {
        using T = decltype(scalar);
        return list.empty() ? std::vector<T>{scalar} : std::vector<T>(list.begin(), list.end());
    };
    std::vector<SweepPoint> points;
    for (auto m : pick(c.sweep.paths, c.paths)) {
        for (auto n : pick(c.sweep.steps, c.steps)) {
            for (auto k : pick(c.sweep.k, c.k)) {
                for (auto s : pick(c.sweep.seeds, c.seed)) {
                    points.push_back({m, n, k, s});
                }
            }
        }
    }
    return points;
}

void fill_errors(double hat, double ref, std::optional<double>& abs_err,
                 std::optional<double>& log_err, std::string& mode) {
    const double err = std::abs(hat - ref);
    abs_err = err;
    if (ref != 0.0) {
        log_err = std::log10(err / std::abs(ref));
        mode = "rel";
    } else {
        log_err = std::log10(err);
        mode = "abs";
    }
}

ReportRow make_row(const RunConfig& config, const SweepPoint& point, const SolverResult& result,
                   const std::optional<ReferenceValue>& ref) {
    ReportRow row;
    row.scheme = to_string(result.scheme);
    row.problem = config.problem.name;
    row.paths = point.paths;
    row.steps = point.steps;
    row.k = point.k;
    row.family = to_string(config.family);
    row.seed = point.seed;
    row.y0_hat = result.y0;
    row.z0_hat = result.z0;
    if (ref) {
        row.y0_ref = ref->y0_ref;
        row.z0_ref = ref->z0_ref;
        fill_errors(result.y0, ref->y0_ref, row.abs_err_y, row.log10_rel_err_y, row.error_mode_y);
        fill_errors(result.z0, ref->z0_ref, row.abs_err_z, row.log10_rel_err_z, row.error_mode_z);
    }
    row.max_condition = result.max_condition();
    if (config.timing) row.runtime_ms = result.runtime_ms;
    return row;
}

std::vector<ReportRow> run_point(const RunConfig& config, const FbsdeProblem& problem,
                                 const std::optional<ReferenceValue>& ref,
                                 const SweepPoint& point, std::size_t workers) {
    const TimeGrid grid = make_uniform_grid(problem.horizon, point.steps);
    const BasisSet basis(config.family, point.k, problem, grid);
    const PathEnsemble paths = simulate_paths(problem, grid, point.paths, point.seed, workers);

    std::vector<ReportRow> rows;
    if (config.scheme != SchemeChoice::now) {
        const auto result = solve_regress_later(problem, grid, basis, paths, {config.ridge});
        rows.push_back(make_row(config, point, result, ref));
    }
    if (config.scheme != SchemeChoice::later) {
        const auto result = solve_regress_now(problem, grid, basis, paths,
                                              {config.ridge, config.picard_iters,
                                               config.picard_tol});
        rows.push_back(make_row(config, point, result, ref));
    }
    return rows;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "problem") {
        try {
            parameter_names(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
        c.problem.name = value;
    } else if (key == "scheme") {
        if (value == "later") c.scheme = SchemeChoice::later;
        else if (value == "now") c.scheme = SchemeChoice::now;
        else if (value == "both") c.scheme = SchemeChoice::both;
        else throw ConfigError(key, "expected later, now or both");
    } else if (key == "paths") {
        c.paths = parse_count(key, value, false);
    } else if (key == "steps") {
        c.steps = parse_count(key, value, false);
    } else if (key == "k") {
        c.k = parse_count(key, value, false);
    } else if (key == "family") {
        try {
            c.family = parse_family(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
    } else if (key == "seed") {
        c.seed = parse_count(key, value, true);
    } else if (key == "ridge") {
        c.ridge = parse_real(key, value);
        if (c.ridge < 0.0) throw ConfigError(key, "ridge must be non-negative");
    } else if (key == "picard_iters") {
        c.picard_iters = static_cast<int>(parse_count(key, value, false));
    } else if (key == "picard_tol") {
        c.picard_tol = parse_real(key, value);
        if (!(c.picard_tol > 0.0)) throw ConfigError(key, "picard_tol must be positive");
    } else if (key == "timing") {
        c.timing = parse_bool(key, value);
    } else if (key == "out") {
        if (value.empty()) throw ConfigError(key, "output path must not be empty");
        c.output_path = value;
    } else if (key == "sweep_paths") {
        c.sweep.paths = parse_list<std::size_t>(key, value, false);
    } else if (key == "sweep_steps") {
        c.sweep.steps = parse_list<std::size_t>(key, value, false);
    } else if (key == "sweep_k") {
        c.sweep.k = parse_list<std::size_t>(key, value, false);
    } else if (key == "sweep_seeds") {
        c.sweep.seeds = parse_list<std::uint64_t>(key, value, true);
    } else if (all_parameter_names().count(key)) {
        c.problem.parameters[key] = parse_real(key, value);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(trim(line), "expected key=value");
        }
        apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    return parse_config(in, std::move(base));
}

void finalize_config(RunConfig& c) {
    std::vector<std::string> allowed;
    try {
        allowed = parameter_names(c.problem.name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("problem", e.what());
    }
    for (const auto& [key, value] : c.problem.parameters) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(key, "not a parameter of problem '" + c.problem.name + "'");
        }
    }
    for (const auto& [key, value] : default_parameters(c.problem.name)) {
        c.problem.parameters.try_emplace(key, value);
    }
    try {
        make_problem(c.problem);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("problem", e.what());
    }
    for (auto k : c.sweep.k.empty() ? std::vector<std::size_t>{c.k} : c.sweep.k) {
        if (k - 1 > BasisSet::kMaxDegree) {
            throw ConfigError(c.sweep.k.empty() ? "k" : "sweep_k", "basis size above 31");
        }
    }
}

std::string csv_header() {
    return "scheme,problem,M,N,k,family,seed,y0_hat,z0_hat,y0_ref,z0_ref,abs_err_y,abs_err_z,"
           "log10_rel_err_y,log10_rel_err_z,max_condition,runtime_ms,err_mode_y,err_mode_z";
}

std::string csv_line(const ReportRow& r) {
    std::ostringstream os;
    os << r.scheme << ',' << r.problem << ',' << r.paths << ',' << r.steps << ',' << r.k << ','
       << r.family << ',' << r.seed << ',' << format_real(r.y0_hat) << ','
       << format_real(r.z0_hat) << ',' << format_optional(r.y0_ref) << ','
       << format_optional(r.z0_ref) << ',' << format_optional(r.abs_err_y) << ','
       << format_optional(r.abs_err_z) << ',' << format_optional(r.log10_rel_err_y) << ','
       << format_optional(r.log10_rel_err_z) << ',' << format_real(r.max_condition) << ','
       << format_optional(r.runtime_ms) << ',' << r.error_mode_y << ',' << r.error_mode_z;
    return os.str();
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_line(r) << '\n';
}

std::vector<ReportRow> run(const RunConfig& input, std::size_t workers) {
    RunConfig config = input;
    finalize_config(config);
    const FbsdeProblem problem = make_problem(config.problem);
    std::optional<ReferenceValue> ref;
    if (ReferenceValue r; catalog_reference(config.problem, r)) ref = r;

    const auto points = sweep_points(config);
    if (workers == 0) workers = default_workers();
    // Points run concurrently with serial simulation inside, or one point uses every worker.
    const std::size_t inner_workers = points.size() > 1 ? 1 : workers;
    std::vector<std::vector<ReportRow>> per_point(points.size());
    parallel_chunks(points.size(), std::min(workers, points.size()),
                    [&](std::size_t first, std::size_t last) {
                        for (std::size_t p = first; p < last; ++p) {
                            per_point[p] = run_point(config, problem, ref, points[p],
                                                     inner_workers);
                        }
                    });

    std::vector<ReportRow> rows;
    for (auto& block : per_point) {
        rows.insert(rows.end(), block.begin(), block.end());
    }
    return rows;
}

std::vector<ReportRow> compare_schemes(RunConfig config, std::size_t workers) {
    config.scheme = SchemeChoice::both;
    return run(config, workers);
}

std::vector<ReportRow> run_to_file(const RunConfig& config, std::size_t workers) {
    auto rows = run(config, workers);
    std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write report to '" + config.output_path + "'");
    }
    write_csv(out, rows);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing report to '" + config.output_path + "'");
    }
    return rows;
}

}  // namespace fbsde
