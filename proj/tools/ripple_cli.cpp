// ripple: Berry curvature, Chern number and fidelity sweeps for the driven qubit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ripple/error.hpp"
#include "ripple/sweep.hpp"
#include "ripple/validation.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfigError = 2, kIoError = 3 };

struct Overrides {
    std::string config;
    std::string out;
    std::string format;
    std::optional<int> workers;
    std::optional<double> d2_ratio;
    std::optional<double> ramp_time;
    std::optional<int> steps;
    std::optional<int> nodes;
    std::string method;
    std::optional<double> min, max;
    std::optional<int> count;
    bool inject_sign_flip = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--out", o.out, "output file (default: config output.path, else stdout)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers", o.workers, "parallel workers")->check(CLI::PositiveNumber);
}

void add_physics(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--d2-ratio", o.d2_ratio, "delta2 / delta1 for fixed-ratio runs");
    cmd->add_option("--ramp-time", o.ramp_time, "ramp duration in units of 1/delta1 (step size is kept)");
    cmd->add_option("--steps", o.steps, "propagation steps");
}

void add_grid(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--min", o.min, "grid minimum");
    cmd->add_option("--max", o.max, "grid maximum");
    cmd->add_option("--count", o.count, "grid points");
}

ripple::SweepSpec build_spec(const std::string& experiment, const Overrides& o) {
    using namespace ripple;
    SweepSpec spec = o.config.empty() ? parse_spec(nlohmann::json{{"experiment", experiment}}) : load_spec(o.config);
    spec.experiment = parse_spec(nlohmann::json{{"experiment", experiment}}).experiment;
    if (spec.experiment == Experiment::Curvature && spec.grid.axis != GridAxis::Theta) {
        spec.grid = parse_spec(nlohmann::json{{"experiment", "curvature"}}).grid;
    }
    if (!o.format.empty()) spec.format = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (o.workers) spec.workers = *o.workers;
    if (o.d2_ratio) spec.d2_ratio = *o.d2_ratio;
    if (o.ramp_time) {
        const double dt = spec.protocol.dt();
        spec.protocol.total_time = *o.ramp_time;
        spec.protocol.steps = std::max(kMinRampSteps, static_cast<int>(std::llround(*o.ramp_time / dt)));
    }
    if (o.steps) spec.protocol.steps = *o.steps;
    if (o.nodes) spec.nodes = *o.nodes;
    if (!o.method.empty()) spec.chern_source = o.method == "dynamic" ? ChernSource::Dynamic : ChernSource::Analytic;
    if (o.min) spec.grid.min = *o.min;
    if (o.max) spec.grid.max = *o.max;
    if (o.count) spec.grid.count = *o.count;
    if (!o.out.empty()) spec.output_path = o.out;
    return spec;
}

int run_experiment(const std::string& experiment, const Overrides& o) {
    const ripple::SweepSpec spec = build_spec(experiment, o);
    const ripple::SweepResult result = ripple::run_sweep(spec);
    if (spec.output_path.empty() || spec.output_path == "-") {
        std::cout << ripple::render(result, spec.format);
    } else {
        ripple::emit(result, spec.format, spec.output_path);
        std::fprintf(stderr, "wrote %zu rows to %s (%.2f s)\n", result.rows.size(), spec.output_path.c_str(),
                     result.wall_seconds);
    }
    return kOk;
}

int run_validate(const Overrides& o) {
    ripple::ValidationOptions options;
    options.inject_sign_flip = o.inject_sign_flip;
    if (o.nodes) options.chern_nodes = *o.nodes;
    const ripple::ValidationReport report = ripple::run_validation(options);
    const std::string text = report.to_text();
    std::cout << text;
    if (!o.out.empty()) {
        std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
        if (!out) throw ripple::Error(ripple::ErrorCode::IoError, "cannot open " + o.out + " for writing");
        out << (o.format == "json" ? report.to_json().dump(2) + "\n" : text);
        if (!out) throw ripple::Error(ripple::ErrorCode::IoError, "write to " + o.out + " failed");
    }
    return report.passed() ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berry curvature, Chern number and fidelity sweeps for a driven qubit"};
    app.set_version_flag("--version", std::string(ripple::kEngineVersion));
    app.require_subcommand(1);

    Overrides o;
    auto* curvature = app.add_subcommand("curvature", "closed-form, spectral and dynamic curvature over theta");
    auto* chern = app.add_subcommand("chern", "Chern number versus delta2 / delta1");
    auto* fidelity = app.add_subcommand("fidelity-sweep", "superposition fidelity after the theta ramp");
    auto* ramp = app.add_subcommand("ramp", "single ramp trajectory");
    auto* validate = app.add_subcommand("validate", "run every cross-check and report pass/fail");

    for (auto* cmd : {curvature, chern, fidelity, ramp}) {
        add_common(cmd, o);
        add_physics(cmd, o);
    }
    for (auto* cmd : {curvature, chern, fidelity}) add_grid(cmd, o);
    chern->add_option("--nodes", o.nodes, "Simpson nodes (odd, >= 101)");
    chern->add_option("--method", o.method, "analytic or dynamic")->check(CLI::IsMember({"analytic", "dynamic"}));
    validate->add_option("--out", o.out, "also write the report here");
    validate->add_option("--format", o.format, "report format for --out")->check(CLI::IsMember({"text", "json"}));
    validate->add_option("--nodes", o.nodes, "Chern quadrature nodes");
    validate->add_flag("--inject-sign-flip", o.inject_sign_flip)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (validate->parsed()) return run_validate(o);
        if (curvature->parsed()) return run_experiment("curvature", o);
        if (chern->parsed()) return run_experiment("chern", o);
        if (fidelity->parsed()) return run_experiment("fidelity", o);
        return run_experiment("ramp", o);
    } catch (const ripple::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == ripple::ErrorCode::IoError ? kIoError : kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
}
