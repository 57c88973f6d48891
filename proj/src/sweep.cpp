#include "ripple/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "ripple/error.hpp"

namespace ripple {

using nlohmann::json;

std::string_view to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::Chern: return "chern";
        case Experiment::Fidelity: return "fidelity";
        case Experiment::Curvature: return "curvature";
        case Experiment::Ramp: return "ramp";
        case Experiment::Validate: return "validate";
    }
    return "unknown";
}

std::string_view to_string(GridAxis a) noexcept {
    switch (a) {
        case GridAxis::D2Ratio: return "d2_ratio";
        case GridAxis::Theta: return "theta";
        case GridAxis::RampTime: return "ramp_time";
    }
    return "unknown";
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& key, const std::string& value, const std::pair<const char*, Enum> (&table)[N]) {
    for (const auto& [name, e] : table) {
        if (value == name) return e;
    }
    config_error("unknown value '" + value + "' for " + key);
}

constexpr std::pair<const char*, Experiment> kExperiments[] = {
    {"chern", Experiment::Chern},         {"fidelity", Experiment::Fidelity}, {"curvature", Experiment::Curvature},
    {"ramp", Experiment::Ramp},           {"validate", Experiment::Validate},
};
constexpr std::pair<const char*, GridAxis> kAxes[] = {
    {"d2_ratio", GridAxis::D2Ratio}, {"theta", GridAxis::Theta}, {"ramp_time", GridAxis::RampTime}};
constexpr std::pair<const char*, Units> kUnits[] = {{"dimensionless", Units::Dimensionless},
                                                    {"2pi_mhz", Units::TwoPiMHz}};
constexpr std::pair<const char*, OutputFormat> kFormats[] = {{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};
constexpr std::pair<const char*, Smoothing> kSmoothing[] = {{"linear", Smoothing::Linear},
                                                            {"sin2_edges", Smoothing::SinSquaredEdges}};
constexpr std::pair<const char*, ChernSource> kChernSources[] = {{"analytic", ChernSource::Analytic},
                                                                 {"dynamic", ChernSource::Dynamic}};

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            config_error("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class Enum, std::size_t N>
void read_enum(const json& obj, const char* key, Enum& out, const std::pair<const char*, Enum> (&table)[N]) {
    if (!obj.contains(key)) return;
    std::string s;
    read(obj, key, s);
    out = parse_enum(key, s, table);
}

template <class Enum, std::size_t N>
const char* enum_name(Enum e, const std::pair<const char*, Enum> (&table)[N]) {
    for (const auto& [name, v] : table) {
        if (v == e) return name;
    }
    return "unknown";
}

}  // namespace

std::vector<double> Grid::values() const {
    std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        out[i] = i + 1 == count ? max : min + (max - min) * i / (count - 1);
    }
    return out;
}

DriveParams SweepSpec::base() const {
    DriveParams p;
    p.delta1 = 1.0;
    p.omega1 = omega1 / delta1;
    p.delta2 = d2_ratio;
    p.phi = protocol.phi;
    return p;
}

void SweepSpec::validate() const {
    if (!(delta1 > 0.0) || !std::isfinite(delta1)) config_error("delta1 must be positive");
    if (!(omega1 > 0.0) || !std::isfinite(omega1)) config_error("omega1 must be positive");
    if (workers < 1) config_error("workers must be >= 1");
    if (!std::isfinite(d2_ratio)) config_error("d2_ratio must be finite");
    try {
        protocol.validate();
    } catch (const Error& e) {
        config_error(std::string("protocol: ") + e.what());
    }
    if (experiment == Experiment::Ramp || experiment == Experiment::Validate) return;

    if (grid.count < 2) config_error("grid.count must be >= 2");
    if (!(grid.min < grid.max)) config_error("grid.min must be < grid.max");
    const bool axis_ok = (experiment == Experiment::Chern && grid.axis == GridAxis::D2Ratio) ||
                         (experiment == Experiment::Fidelity &&
                          (grid.axis == GridAxis::D2Ratio || grid.axis == GridAxis::RampTime)) ||
                         (experiment == Experiment::Curvature && grid.axis == GridAxis::Theta);
    if (!axis_ok) {
        config_error("grid axis '" + std::string(to_string(grid.axis)) + "' does not apply to experiment '" +
                     std::string(to_string(experiment)) + "'");
    }
    if (grid.axis == GridAxis::Theta && (grid.min < 0.0 || grid.max > kPi)) config_error("theta grid outside [0, pi]");
    if (grid.axis == GridAxis::RampTime && !(grid.min > 0.0)) config_error("ramp_time grid must be positive");
    if (experiment == Experiment::Chern && chern_source == ChernSource::Analytic &&
        (nodes < kMinChernNodes || nodes % 2 == 0)) {
        config_error("nodes must be odd and >= 101");
    }
}

json SweepSpec::to_json() const {
    json protocol_json = {{"total_time", protocol.total_time},
                          {"steps", protocol.steps},
                          {"smoothing", enum_name(protocol.smoothing, kSmoothing)},
                          {"theta_start", protocol.theta_start},
                          {"theta_end", protocol.theta_end},
                          {"phi", protocol.phi}};
    if (protocol.smoothing == Smoothing::SinSquaredEdges) protocol_json["edge_fraction"] = protocol.edge_fraction;
    return {{"delta1", delta1},
            {"omega1", omega1},
            {"units", enum_name(units, kUnits)},
            {"experiment", enum_name(experiment, kExperiments)},
            {"grid", {{"axis", enum_name(grid.axis, kAxes)}, {"min", grid.min}, {"max", grid.max}, {"count", grid.count}}},
            {"protocol", protocol_json},
            {"output", {{"path", output_path}, {"format", enum_name(format, kFormats)}}},
            {"workers", workers},
            {"d2_ratio", d2_ratio},
            {"nodes", nodes},
            {"method", enum_name(chern_source, kChernSources)}};
}

SweepSpec parse_spec(const json& doc) {
    if (!doc.is_object()) config_error("config must be a JSON object");
    reject_unknown(doc,
                   {"delta1", "omega1", "units", "experiment", "grid", "protocol", "output", "workers", "d2_ratio",
                    "nodes", "method"},
                   "config");
    SweepSpec spec;
    read(doc, "delta1", spec.delta1);
    read(doc, "omega1", spec.omega1);
    read_enum(doc, "units", spec.units, kUnits);
    read_enum(doc, "experiment", spec.experiment, kExperiments);
    read(doc, "workers", spec.workers);
    read(doc, "d2_ratio", spec.d2_ratio);
    read(doc, "nodes", spec.nodes);
    read_enum(doc, "method", spec.chern_source, kChernSources);

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        if (!g.is_object()) config_error("grid must be an object");
        reject_unknown(g, {"axis", "min", "max", "count"}, "grid");
        read_enum(g, "axis", spec.grid.axis, kAxes);
        read(g, "min", spec.grid.min);
        read(g, "max", spec.grid.max);
        read(g, "count", spec.grid.count);
    } else if (spec.experiment == Experiment::Curvature) {
        spec.grid = {GridAxis::Theta, 0.0, kPi, 181};
    }
    if (doc.contains("protocol")) {
        const json& p = doc.at("protocol");
        if (!p.is_object()) config_error("protocol must be an object");
        reject_unknown(p, {"total_time", "steps", "smoothing", "edge_fraction", "theta_start", "theta_end", "phi"},
                       "protocol");
        read(p, "total_time", spec.protocol.total_time);
        read(p, "steps", spec.protocol.steps);
        read_enum(p, "smoothing", spec.protocol.smoothing, kSmoothing);
        read(p, "edge_fraction", spec.protocol.edge_fraction);
        read(p, "theta_start", spec.protocol.theta_start);
        read(p, "theta_end", spec.protocol.theta_end);
        read(p, "phi", spec.protocol.phi);
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (!o.is_object()) config_error("output must be an object");
        reject_unknown(o, {"path", "format"}, "output");
        read(o, "path", spec.output_path);
        read_enum(o, "format", spec.format, kFormats);
    }
    return spec;
}

SweepSpec parse_spec_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_spec(doc);
}

SweepSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

bool SweepResult::has_errors() const {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
}

std::vector<std::string> columns_for(Experiment e, GridAxis axis) {
    switch (e) {
        case Experiment::Chern: return {"d2_ratio", "chern", "est_error"};
        case Experiment::Fidelity: return {std::string(to_string(axis)), "fidelity"};
        case Experiment::Curvature: return {"theta", "F_closed", "F_spectral", "F_dynamic"};
        case Experiment::Ramp: return {"t", "theta", "re_a", "im_a", "re_b", "im_b", "sigma_y"};
        case Experiment::Validate: break;
    }
    return {};
}

namespace {

std::string describe(const std::exception& e) { return e.what(); }

// Static block partition: worker w owns [w n / W, (w + 1) n / W). Each slot
// is written by exactly one thread, so output order never depends on W.
void for_each_index(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    const auto w = static_cast<std::size_t>(std::clamp<long long>(workers, 1, static_cast<long long>(std::max<std::size_t>(n, 1))));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t begin = k * n / w;
        const std::size_t end = (k + 1) * n / w;
        pool.emplace_back([begin, end, &body] {
            for (std::size_t i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

SweepRow error_row(std::size_t columns, double grid_value, const std::string& error) {
    SweepRow row;
    row.values.assign(columns, std::nullopt);
    row.values[0] = grid_value;
    row.error = error;
    return row;
}

SweepRow chern_row(const SweepSpec& spec, double ratio) {
    const DriveParams base = spec.base();
    const ChernResult r = spec.chern_source == ChernSource::Analytic
                              ? chern_number(1.0, ratio, base.omega1, ChernMethod::ClosedForm, spec.nodes)
                              : dynamic_chern_number(base, ratio, spec.protocol);
    return {{ratio, r.chern, r.est_error}, {}};
}

SweepRow fidelity_row(const SweepSpec& spec, double value) {
    const DriveParams base = spec.base();
    if (spec.grid.axis == GridAxis::RampTime) {
        RampProtocol protocol = spec.protocol;
        const double dt = spec.protocol.dt();
        protocol.total_time = value;
        protocol.steps = std::max(kMinRampSteps, static_cast<int>(std::llround(value / dt)));
        return {{value, fidelity_experiment(base, spec.d2_ratio, protocol)}, {}};
    }
    return {{value, fidelity_experiment(base, value, spec.protocol)}, {}};
}

SweepResult run_ramp(const SweepSpec& spec, SweepResult result) {
    try {
        const Trajectory traj = evolve_ramp(spec.protocol, spec.base());
        result.rows.reserve(traj.samples.size());
        for (const auto& s : traj.samples) {
            result.rows.push_back(
                {{s.t, s.theta, s.state.a.real(), s.state.a.imag(), s.state.b.real(), s.state.b.imag(), s.sigma_y},
                 {}});
        }
    } catch (const std::exception& e) {
        result.rows.push_back(error_row(result.columns.size(), 0.0, describe(e)));
    }
    return result;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    spec.validate();
    if (spec.experiment == Experiment::Validate) {
        config_error("the validate experiment is run by the validator, not the sweep engine");
    }

    SweepResult result;
    result.columns = columns_for(spec.experiment, spec.grid.axis);
    result.spec_echo = spec.to_json();

    if (spec.experiment == Experiment::Ramp) {
        result = run_ramp(spec, std::move(result));
    } else {
        const std::vector<double> grid = spec.grid.values();
        const std::size_t ncol = result.columns.size();

        std::vector<CurvatureSample> dynamic;
        std::string dynamic_error;
        if (spec.experiment == Experiment::Curvature) {
            try {
                dynamic = extract_curvature_dynamic(evolve_ramp(spec.protocol, spec.base()));
            } catch (const std::exception& e) {
                dynamic_error = "F_dynamic: " + describe(e);
            }
        }

        result.rows.resize(grid.size());
        for_each_index(grid.size(), spec.workers, [&](std::size_t i) {
            const double x = grid[i];
            try {
                switch (spec.experiment) {
                    case Experiment::Chern: result.rows[i] = chern_row(spec, x); break;
                    case Experiment::Fidelity: result.rows[i] = fidelity_row(spec, x); break;
                    case Experiment::Curvature: {
                        SweepRow row = error_row(ncol, x, {});
                        const DriveParams p = spec.base().with_theta(x);
                        row.values[1] = curvature_closed_form(p).value;
                        std::vector<std::string> errors;
                        try {
                            row.values[2] = curvature_spectral(p).value;
                        } catch (const Error& e) {
                            errors.push_back(std::string("F_spectral: ") + e.what());
                        }
                        const double lo = std::min(spec.protocol.theta_start, spec.protocol.theta_end);
                        const double hi = std::max(spec.protocol.theta_start, spec.protocol.theta_end);
                        if (!dynamic.empty() && x >= lo && x <= hi) {
                            row.values[3] = interpolate_curvature(dynamic, x);
                        } else if (!dynamic_error.empty()) {
                            errors.push_back(dynamic_error);
                        }
                        for (std::size_t k = 0; k < errors.size(); ++k) row.error += (k ? "; " : "") + errors[k];
                        result.rows[i] = std::move(row);
                        break;
                    }
                    default: break;
                }
            } catch (const std::exception& e) {
                result.rows[i] = error_row(ncol, x, describe(e));
            }
        });
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_csv(const SweepResult& result) {
    const bool with_errors = result.has_errors();
    std::string out;
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
        if (c) out += ',';
        out += result.columns[c];
    }
    if (with_errors) out += ",error";
    out += '\n';
    for (const auto& row : result.rows) {
        for (std::size_t c = 0; c < row.values.size(); ++c) {
            if (c) out += ',';
            if (row.values[c]) out += format_number(*row.values[c]);
        }
        if (with_errors) out += ',' + csv_escape(row.error);
        out += '\n';
    }
    return out;
}

json to_json(const SweepResult& result) {
    json rows = json::array();
    for (const auto& row : result.rows) {
        json r = json::object();
        for (std::size_t c = 0; c < result.columns.size(); ++c) {
            const auto& v = row.values[c];
            r[result.columns[c]] = v && std::isfinite(*v) ? json(*v) : json(nullptr);
        }
        if (!row.error.empty()) r["error"] = row.error;
        rows.push_back(std::move(r));
    }
    return {{"engine_version", result.engine_version},
            {"spec", result.spec_echo},
            {"wall_seconds", result.wall_seconds},
            {"columns", result.columns},
            {"rows", std::move(rows)}};
}

namespace {

// Metadata goes through nlohmann; data rows are printed by hand so numbers
// keep the same %.17g rendering as the CSV.
std::string json_text(const SweepResult& result) {
    json meta = {{"engine_version", result.engine_version},
                 {"spec", result.spec_echo},
                 {"wall_seconds", result.wall_seconds},
                 {"columns", result.columns}};
    std::string out = meta.dump(2);
    out.pop_back();  // closing brace
    while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
    out += ",\n  \"rows\": [";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        out += i ? ",\n    {" : "\n    {";
        for (std::size_t c = 0; c < result.columns.size(); ++c) {
            if (c) out += ", ";
            out += json(result.columns[c]).dump() + ": ";
            const auto& v = row.values[c];
            out += v && std::isfinite(*v) ? format_number(*v) : "null";
        }
        if (!row.error.empty()) out += ", \"error\": " + json(row.error).dump();
        out += '}';
    }
    out += result.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

}  // namespace

std::string render(const SweepResult& result, OutputFormat format) {
    return format == OutputFormat::Csv ? to_csv(result) : json_text(result);
}

void emit(const SweepResult& result, OutputFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << render(result, format);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

}  // namespace ripple
