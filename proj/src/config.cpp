#include "geopid/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "geopid/builtins.hpp"
#include "geopid/errors.hpp"
#include "geopid/report.hpp"

namespace geopid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Split at commas outside parentheses.
std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    int depth = 0;
    std::string current;
    for (char c : value) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    const std::string last = trim(current);
    if (!last.empty() || !out.empty()) out.push_back(last);
    return out;
}

double to_double(const std::string& s, int line, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": key '" + key +
                             "': expected a number, got '" + s + "'",
                         line);
    }
    if (trim(s.substr(used)).size() != 0) {
        throw ParseError("line " + std::to_string(line) + ": key '" + key +
                             "': trailing characters after number '" + s + "'",
                         line);
    }
    return v;
}

Eigen::VectorXd to_vector(const std::string& s, int line, const std::string& key) {
    const std::vector<std::string> items = split_list(s);
    Eigen::VectorXd v(static_cast<int>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
        v[static_cast<int>(i)] = to_double(items[i], line, key);
    }
    return v;
}

struct Entry {
    std::string key;
    std::string value;
    int line;
};

struct RawConfig {
    // section -> entries, in file order
    std::vector<std::pair<std::string, Entry>> entries;

    const Entry* find(const std::string& section, const std::string& key) const {
        for (const auto& [sec, e] : entries) {
            if (sec == section && e.key == key) return &e;
        }
        return nullptr;
    }
};

RawConfig tokenize_config(const std::string& text) {
    RawConfig raw;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("line " + std::to_string(line_no) +
                                     ": unterminated section header",
                                 line_no);
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(line_no) +
                                 ": expected 'key = value'",
                             line_no);
        }
        if (section.empty()) {
            throw ParseError("line " + std::to_string(line_no) +
                                 ": key outside of any [section]",
                             line_no);
        }
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (e.key.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty key", line_no);
        }
        raw.entries.emplace_back(section, std::move(e));
    }
    return raw;
}

void check_expression(const std::string& text, const std::vector<std::string>& vars,
                      int line, const std::string& key) {
    try {
        Expression::parse(text, vars);
    } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line) + ": key '" + key + "': " +
                             e.what(),
                         line, e.column());
    }
}

[[noreturn]] void fail_key(const Entry& e, const std::string& message) {
    throw ParseError("line " + std::to_string(e.line) + ": key '" + e.key + "': " +
                         message,
                     e.line);
}

} // namespace

bool operator==(const SystemConfig& a, const SystemConfig& b) {
    const auto veq = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return x.size() == y.size() && x == y;
    };
    return a.name == b.name && a.dimension == b.dimension && a.topology == b.topology &&
           a.vars == b.vars && a.metric_identity == b.metric_identity &&
           a.metric_rows == b.metric_rows && a.basis_cols == b.basis_cols &&
           a.morse_value == b.morse_value &&
           a.morse_differential == b.morse_differential && veq(a.minimum, b.minimum) &&
           a.gains.kp == b.gains.kp && a.gains.kd == b.gains.kd &&
           a.gains.ki == b.gains.ki && a.kappa == b.kappa && veq(a.x0, b.x0) &&
           veq(a.u0, b.u0) && veq(a.w0, b.w0) && a.dt == b.dt && a.t_end == b.t_end &&
           a.region.bounds == b.region.bounds && a.region.samples == b.region.samples &&
           a.lambda_ref == b.lambda_ref && a.mu_ref == b.mu_ref;
}

SystemConfig parse_config(const std::string& text) {
    const RawConfig raw = tokenize_config(text);
    SystemConfig cfg;

    // ---- [system] ----
    std::vector<std::pair<int, std::vector<std::string>>> basis_cols_found;
    std::vector<std::pair<int, std::vector<std::string>>> metric_rows_found;
    for (const auto& [section, e] : raw.entries) {
        if (section != "system") continue;
        if (e.key == "name") {
            cfg.name = e.value;
        } else if (e.key == "dim") {
            cfg.dimension = static_cast<int>(to_double(e.value, e.line, e.key));
        } else if (e.key == "topology") {
            for (const std::string& t : split_list(e.value)) {
                if (t == "linear") {
                    cfg.topology.push_back(Topology::kLinear);
                } else if (t == "angular") {
                    cfg.topology.push_back(Topology::kAngular);
                } else {
                    fail_key(e, "topology entries must be 'linear' or 'angular'");
                }
            }
        } else if (e.key == "vars") {
            cfg.vars = split_list(e.value);
        } else if (e.key == "metric") {
            if (e.value != "identity") {
                fail_key(e, "metric must be 'identity' or given row-wise as metric.rowI");
            }
            cfg.metric_identity = true;
        } else if (e.key.rfind("metric.row", 0) == 0) {
            const int idx = static_cast<int>(
                to_double(e.key.substr(std::string("metric.row").size()), e.line, e.key));
            if (static_cast<int>(metric_rows_found.size()) != idx) {
                fail_key(e, "metric rows must appear in order starting at row0");
            }
            metric_rows_found.emplace_back(e.line, split_list(e.value));
            cfg.metric_identity = false;
        } else if (e.key.rfind("basis.col", 0) == 0) {
            const int idx = static_cast<int>(
                to_double(e.key.substr(std::string("basis.col").size()), e.line, e.key));
            if (static_cast<int>(basis_cols_found.size()) != idx) {
                fail_key(e, "basis columns must appear in order starting at col0");
            }
            basis_cols_found.emplace_back(e.line, split_list(e.value));
        } else {
            fail_key(e, "unknown key in [system]");
        }
    }

    // ---- [morse] ----
    int morse_line = 0;
    for (const auto& [section, e] : raw.entries) {
        if (section != "morse") continue;
        if (e.key == "value") {
            cfg.morse_value = e.value;
            morse_line = e.line;
        } else if (e.key == "differential") {
            cfg.morse_differential = split_list(e.value);
        } else if (e.key == "minimum") {
            cfg.minimum = to_vector(e.value, e.line, e.key);
        } else if (e.key == "lambda_ref") {
            cfg.lambda_ref = to_double(e.value, e.line, e.key);
        } else if (e.key == "mu_ref") {
            cfg.mu_ref = to_double(e.value, e.line, e.key);
        } else {
            fail_key(e, "unknown key in [morse]");
        }
    }

    // ---- [gains] ----
    for (const auto& [section, e] : raw.entries) {
        if (section != "gains") continue;
        if (e.key == "kp") {
            cfg.gains.kp = to_double(e.value, e.line, e.key);
        } else if (e.key == "kd") {
            cfg.gains.kd = to_double(e.value, e.line, e.key);
        } else if (e.key == "ki") {
            cfg.gains.ki = to_double(e.value, e.line, e.key);
        } else if (e.key == "kappa") {
            cfg.kappa = to_double(e.value, e.line, e.key);
        } else {
            fail_key(e, "unknown key in [gains]");
        }
    }

    // ---- [sim] ----
    for (const auto& [section, e] : raw.entries) {
        if (section != "sim") continue;
        if (e.key == "dt") {
            cfg.dt = to_double(e.value, e.line, e.key);
        } else if (e.key == "t_end") {
            cfg.t_end = to_double(e.value, e.line, e.key);
        } else if (e.key == "x0") {
            cfg.x0 = to_vector(e.value, e.line, e.key);
        } else if (e.key == "u0") {
            cfg.u0 = to_vector(e.value, e.line, e.key);
        } else if (e.key == "w0") {
            cfg.w0 = to_vector(e.value, e.line, e.key);
        } else {
            fail_key(e, "unknown key in [sim]");
        }
    }

    // ---- structural validation before touching [region] ----
    const int n = cfg.dimension;
    if (n < 1) {
        throw ParseError("[system] dim must be a positive integer");
    }
    if (static_cast<int>(cfg.topology.size()) != n) {
        throw ParseError("[system] topology must list one entry per dimension");
    }
    if (static_cast<int>(cfg.vars.size()) != n) {
        throw ParseError("[system] vars must list one name per dimension");
    }
    for (const auto& [line, row] : metric_rows_found) {
        if (static_cast<int>(row.size()) != n) {
            throw ParseError("line " + std::to_string(line) +
                                 ": metric row needs one entry per dimension",
                             line);
        }
        for (const std::string& entry : row) check_expression(entry, cfg.vars, line, "metric");
        cfg.metric_rows.push_back(row);
    }
    if (!cfg.metric_identity && static_cast<int>(cfg.metric_rows.size()) != n) {
        throw ParseError("[system] metric rows are incomplete");
    }
    if (basis_cols_found.empty()) {
        throw ParseError("[system] needs at least basis.col0");
    }
    for (const auto& [line, col] : basis_cols_found) {
        if (static_cast<int>(col.size()) != n) {
            throw ParseError("line " + std::to_string(line) +
                                 ": basis column needs one entry per dimension",
                             line);
        }
        for (const std::string& entry : col) check_expression(entry, cfg.vars, line, "basis");
        cfg.basis_cols.push_back(col);
    }
    if (cfg.rank() > n) {
        throw ParseError("[system] basis has more columns than the dimension");
    }

    if (cfg.morse_value.empty()) {
        throw ParseError("[morse] value is required");
    }
    check_expression(cfg.morse_value, cfg.vars, morse_line, "value");
    if (!cfg.morse_differential.empty()) {
        if (static_cast<int>(cfg.morse_differential.size()) != n) {
            throw ParseError("[morse] differential needs one entry per dimension");
        }
        for (const std::string& d : cfg.morse_differential) {
            check_expression(d, cfg.vars, morse_line, "differential");
        }
    }
    if (cfg.minimum.size() == 0) cfg.minimum = Eigen::VectorXd::Zero(n);
    if (cfg.minimum.size() != n) {
        throw ParseError("[morse] minimum has the wrong dimension");
    }

    if (cfg.x0.size() == 0) cfg.x0 = Eigen::VectorXd::Zero(n);
    if (cfg.u0.size() == 0) cfg.u0 = Eigen::VectorXd::Zero(cfg.rank());
    if (cfg.w0.size() == 0) cfg.w0 = Eigen::VectorXd::Zero(cfg.rank());
    if (cfg.x0.size() != n || cfg.u0.size() != cfg.rank() || cfg.w0.size() != cfg.rank()) {
        throw ParseError("[sim] x0/u0/w0 have the wrong dimensions");
    }
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) {
        throw ParseError("[sim] dt and t_end must be positive");
    }
    if (cfg.gains.kp < 0.0 || cfg.gains.kd < 0.0 || cfg.gains.ki < 0.0) {
        throw ParseError("[gains] gains must be nonnegative");
    }

    // ---- [region] ---- (defaults: linear [-2, 2], angular [0, 2*pi), 9 samples)
    cfg.region.bounds.assign(static_cast<std::size_t>(n), {-2.0, 2.0});
    cfg.region.samples.assign(static_cast<std::size_t>(n), 9);
    for (int i = 0; i < n; ++i) {
        if (cfg.topology[static_cast<std::size_t>(i)] == Topology::kAngular) {
            cfg.region.bounds[static_cast<std::size_t>(i)] = {0.0, kTwoPi};
        }
    }
    for (const auto& [section, e] : raw.entries) {
        if (section != "region") continue;
        if (e.key == "samples") {
            const Eigen::VectorXd v = to_vector(e.value, e.line, e.key);
            if (v.size() != n) fail_key(e, "needs one sample count per dimension");
            for (int i = 0; i < n; ++i) {
                cfg.region.samples[static_cast<std::size_t>(i)] = static_cast<int>(v[i]);
            }
            continue;
        }
        const auto var = std::find(cfg.vars.begin(), cfg.vars.end(), e.key);
        if (var == cfg.vars.end()) {
            fail_key(e, "region keys must be variable names or 'samples'");
        }
        const Eigen::VectorXd v = to_vector(e.value, e.line, e.key);
        if (v.size() != 2) fail_key(e, "bounds need exactly 'lo, hi'");
        cfg.region.bounds[static_cast<std::size_t>(var - cfg.vars.begin())] = {v[0], v[1]};
    }
    cfg.region.validate(cfg.topology);

    // Final invariant probe: the config must compile and satisfy the
    // constraint-module invariants at x0.
    compile(cfg);
    return cfg;
}

std::string serialize_config(const SystemConfig& cfg) {
    std::ostringstream out;
    const auto join = [](const std::vector<std::string>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ", ";
            s += items[i];
        }
        return s;
    };
    const auto join_vec = [](const Eigen::VectorXd& v) {
        std::string s;
        for (int i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += format_double(v[i]);
        }
        return s;
    };

    out << "[system]\n";
    out << "name = " << cfg.name << "\n";
    out << "dim = " << cfg.dimension << "\n";
    out << "topology = ";
    for (std::size_t i = 0; i < cfg.topology.size(); ++i) {
        if (i) out << ", ";
        out << (cfg.topology[i] == Topology::kAngular ? "angular" : "linear");
    }
    out << "\n";
    out << "vars = " << join(cfg.vars) << "\n";
    if (cfg.metric_identity) {
        out << "metric = identity\n";
    } else {
        for (std::size_t i = 0; i < cfg.metric_rows.size(); ++i) {
            out << "metric.row" << i << " = " << join(cfg.metric_rows[i]) << "\n";
        }
    }
    for (std::size_t j = 0; j < cfg.basis_cols.size(); ++j) {
        out << "basis.col" << j << " = " << join(cfg.basis_cols[j]) << "\n";
    }

    out << "\n[morse]\n";
    out << "value = " << cfg.morse_value << "\n";
    if (!cfg.morse_differential.empty()) {
        out << "differential = " << join(cfg.morse_differential) << "\n";
    }
    out << "minimum = " << join_vec(cfg.minimum) << "\n";
    if (cfg.lambda_ref) out << "lambda_ref = " << format_double(*cfg.lambda_ref) << "\n";
    if (cfg.mu_ref) out << "mu_ref = " << format_double(*cfg.mu_ref) << "\n";

    out << "\n[gains]\n";
    out << "kp = " << format_double(cfg.gains.kp) << "\n";
    out << "kd = " << format_double(cfg.gains.kd) << "\n";
    out << "ki = " << format_double(cfg.gains.ki) << "\n";
    out << "kappa = " << format_double(cfg.kappa) << "\n";

    out << "\n[sim]\n";
    out << "dt = " << format_double(cfg.dt) << "\n";
    out << "t_end = " << format_double(cfg.t_end) << "\n";
    out << "x0 = " << join_vec(cfg.x0) << "\n";
    out << "u0 = " << join_vec(cfg.u0) << "\n";
    out << "w0 = " << join_vec(cfg.w0) << "\n";

    out << "\n[region]\n";
    for (std::size_t i = 0; i < cfg.vars.size(); ++i) {
        out << cfg.vars[i] << " = " << format_double(cfg.region.bounds[i].first) << ", "
            << format_double(cfg.region.bounds[i].second) << "\n";
    }
    out << "samples = ";
    for (std::size_t i = 0; i < cfg.region.samples.size(); ++i) {
        if (i) out << ", ";
        out << cfg.region.samples[i];
    }
    out << "\n";
    return out.str();
}

namespace {

std::vector<std::vector<Expression>> parse_matrix(
    const std::vector<std::vector<std::string>>& rows,
    const std::vector<std::string>& vars) {
    std::vector<std::vector<Expression>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<Expression> parsed;
        parsed.reserve(row.size());
        for (const auto& entry : row) parsed.push_back(Expression::parse(entry, vars));
        out.push_back(std::move(parsed));
    }
    return out;
}

bool all_constant(const std::vector<std::vector<Expression>>& m) {
    for (const auto& row : m) {
        for (const auto& e : row) {
            if (!e.is_constant()) return false;
        }
    }
    return true;
}

} // namespace

CompiledSystem compile(const SystemConfig& cfg) {
    const int n = cfg.dimension;
    const int k = cfg.rank();

    MetricField metric = MetricField::identity(n);
    if (!cfg.metric_identity) {
        auto rows = parse_matrix(cfg.metric_rows, cfg.vars);
        if (all_constant(rows)) {
            Eigen::MatrixXd m(n, n);
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                                  .eval(zero);
                }
            }
            metric = MetricField::constant(m);
        } else {
            metric = MetricField(n, [rows, n](const ChartPoint& g) {
                Eigen::MatrixXd m(n, n);
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        m(i, j) = rows[static_cast<std::size_t>(i)]
                                      [static_cast<std::size_t>(j)]
                                          .eval(g.coords());
                    }
                }
                return m;
            });
        }
    }

    auto cols = parse_matrix(cfg.basis_cols, cfg.vars);
    DistributionField::PartialsFn partials = nullptr;
    if (all_constant(cols)) {
        partials = [n, k](const ChartPoint&) {
            return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n),
                                                Eigen::MatrixXd::Zero(n, k));
        };
    }
    DistributionField dist(
        n, k,
        [cols, n, k](const ChartPoint& g) {
            Eigen::MatrixXd b(n, k);
            for (int j = 0; j < k; ++j) {
                for (int i = 0; i < n; ++i) {
                    b(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]
                                  .eval(g.coords());
                }
            }
            return b;
        },
        std::move(partials));

    const Expression value = Expression::parse(cfg.morse_value, cfg.vars);
    MorseSpec::DifferentialFn differential = nullptr;
    if (!cfg.morse_differential.empty()) {
        std::vector<Expression> dv;
        dv.reserve(cfg.morse_differential.size());
        for (const auto& d : cfg.morse_differential) {
            dv.push_back(Expression::parse(d, cfg.vars));
        }
        differential = [dv, n](const ChartPoint& g) {
            Eigen::VectorXd out(n);
            for (int i = 0; i < n; ++i) {
                out[i] = dv[static_cast<std::size_t>(i)].eval(g.coords());
            }
            return CotangentCoord(std::move(out));
        };
    }

    CompiledSystem compiled{
        cfg.name,
        cfg.vars,
        MechanicalSystem{cfg.name, cfg.topology, std::move(metric), std::move(dist)},
        MorseSpec([value](const ChartPoint& g) { return value.eval(g.coords()); },
                  ChartPoint(cfg.minimum, cfg.topology), std::move(differential)),
        ClosedLoopState{ChartPoint(cfg.x0, cfg.topology), cfg.u0, cfg.w0},
        cfg.gains,
        cfg.kappa,
        cfg.dt,
        cfg.t_end,
        cfg.region,
        cfg.lambda_ref,
        cfg.mu_ref};

    // Constraint-module invariants must hold at the initial state.
    projectors(compiled.system.metric, compiled.system.dist, compiled.initial.g);
    return compiled;
}

namespace {

struct BuiltinSpec {
    std::string base;
    double radius = 1.5; // circle-particle
    int dim = 1;         // euclidean
};

BuiltinSpec parse_builtin_spec(const std::string& spec) {
    BuiltinSpec b;
    const auto colon = spec.find(':');
    b.base = colon == std::string::npos ? spec : spec.substr(0, colon);
    if (colon != std::string::npos) {
        const std::string param = spec.substr(colon + 1);
        const auto eq = param.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("builtin parameter must look like name=value: " + spec);
        }
        const std::string key = trim(param.substr(0, eq));
        const std::string value = trim(param.substr(eq + 1));
        if (b.base == "circle-particle" && key == "r") {
            b.radius = to_double(value, 0, key);
            if (!(b.radius > 0.0)) {
                throw ParameterError("circle-particle radius must be positive");
            }
        } else if (b.base == "euclidean" && key == "n") {
            b.dim = static_cast<int>(to_double(value, 0, key));
            if (b.dim < 1) {
                throw ParameterError("euclidean dimension must be at least 1");
            }
        } else {
            throw ParameterError("unknown builtin parameter '" + key + "' for " + b.base);
        }
    }
    return b;
}

std::vector<std::string> euclidean_vars(int n) {
    if (n == 1) return {"x"};
    std::vector<std::string> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return v;
}

} // namespace

bool is_builtin(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string base = colon == std::string::npos ? spec : spec.substr(0, colon);
    return base == "unicycle" || base == "circle-particle" || base == "euclidean";
}

std::vector<std::string> builtin_names() {
    return {"unicycle", "circle-particle", "euclidean"};
}

SystemConfig builtin_config(const std::string& spec) {
    const BuiltinSpec b = parse_builtin_spec(spec);
    SystemConfig cfg;
    cfg.name = b.base;

    if (b.base == "unicycle") {
        cfg.dimension = 3;
        cfg.topology = {Topology::kLinear, Topology::kLinear, Topology::kAngular};
        cfg.vars = {"x", "y", "theta"};
        cfg.metric_identity = true;
        cfg.basis_cols = {{"0", "0", "1"}, {"cos(theta)", "sin(theta)", "0"}};
        cfg.morse_value = "0.5*(x^2 + y^2) + 1 - cos(theta)";
        cfg.morse_differential = {"x", "y", "sin(theta)"};
        cfg.minimum = Eigen::Vector3d::Zero();
        cfg.gains = Gains{20.0, 2.0, 0.5};
        cfg.kappa = 1.0;
        cfg.x0 = Eigen::Vector3d(1.0, -0.1, 0.6);
        cfg.u0 = Eigen::Vector2d::Zero();
        cfg.w0 = Eigen::Vector2d::Zero();
        cfg.dt = 1e-3;
        cfg.t_end = 120.0;
        cfg.region =
            SamplingRegion::box({{-2.0, 2.0}, {-2.0, 2.0}, {0.0, kTwoPi}}, {9, 9, 12});
        cfg.lambda_ref = 4.0;
        cfg.mu_ref = 1.0;
        return cfg;
    }

    if (b.base == "circle-particle") {
        const std::string r = format_double(b.radius);
        cfg.dimension = 2;
        cfg.topology = linear_topology(2);
        cfg.vars = {"x", "y"};
        cfg.metric_identity = true;
        cfg.basis_cols = {{"-y", "x"}};
        cfg.morse_value = "0.5*((x - " + r + ")^2 + y^2)";
        cfg.morse_differential = {"x - " + r, "y"};
        cfg.minimum = Eigen::Vector2d(b.radius, 0.0);
        cfg.gains = Gains{3.0, 1.0, 0.5};
        cfg.kappa = 1.0;
        cfg.x0 = Eigen::Vector2d(b.radius * std::cos(1.0), b.radius * std::sin(1.0));
        cfg.u0 = Eigen::VectorXd::Zero(1);
        cfg.w0 = Eigen::VectorXd::Zero(1);
        cfg.dt = 1e-3;
        cfg.t_end = 60.0;
        cfg.region = SamplingRegion::box(
            {{0.3 * b.radius, 1.7 * b.radius}, {-0.7 * b.radius, 0.7 * b.radius}}, {9, 9});
        return cfg;
    }

    if (b.base == "euclidean") {
        const int n = b.dim;
        cfg.dimension = n;
        cfg.topology = linear_topology(n);
        cfg.vars = euclidean_vars(n);
        cfg.metric_identity = true;
        for (int j = 0; j < n; ++j) {
            std::vector<std::string> col(static_cast<std::size_t>(n), "0");
            col[static_cast<std::size_t>(j)] = "1";
            cfg.basis_cols.push_back(std::move(col));
        }
        std::string value = "0.5*(";
        for (int i = 0; i < n; ++i) {
            if (i) value += " + ";
            value += cfg.vars[static_cast<std::size_t>(i)] + "^2";
        }
        value += ")";
        cfg.morse_value = value;
        cfg.morse_differential = cfg.vars;
        cfg.minimum = Eigen::VectorXd::Zero(n);
        cfg.gains = Gains{3.0, 1.0, 0.5};
        cfg.kappa = 1.0;
        cfg.x0 = Eigen::VectorXd::Ones(n);
        cfg.u0 = Eigen::VectorXd::Zero(n);
        cfg.w0 = Eigen::VectorXd::Zero(n);
        cfg.dt = 1e-3;
        cfg.t_end = 60.0;
        cfg.region.bounds.assign(static_cast<std::size_t>(n), {-2.0, 2.0});
        cfg.region.samples.assign(static_cast<std::size_t>(n), n <= 2 ? 21 : 9);
        return cfg;
    }

    throw ParameterError("unknown builtin '" + spec + "'");
}

CompiledSystem builtin_compiled(const std::string& spec) {
    const BuiltinSpec b = parse_builtin_spec(spec);
    const SystemConfig cfg = builtin_config(spec);

    MechanicalSystem sys = b.base == "unicycle"       ? builtin::unicycle_system()
                           : b.base == "circle-particle"
                               ? builtin::circle_particle_system(1.0)
                               : builtin::euclidean_system(b.dim);
    MorseSpec morse = b.base == "unicycle" ? builtin::unicycle_morse()
                      : b.base == "circle-particle"
                          ? builtin::circle_particle_morse(b.radius)
                          : builtin::euclidean_morse(b.dim, Eigen::VectorXd::Zero(b.dim));

    return CompiledSystem{cfg.name,
                          cfg.vars,
                          std::move(sys),
                          std::move(morse),
                          ClosedLoopState{ChartPoint(cfg.x0, cfg.topology), cfg.u0, cfg.w0},
                          cfg.gains,
                          cfg.kappa,
                          cfg.dt,
                          cfg.t_end,
                          cfg.region,
                          cfg.lambda_ref,
                          cfg.mu_ref};
}

} // namespace geopid
