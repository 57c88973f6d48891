#pragma once

// Sweep configuration, deterministic parallel execution and CSV/JSON output.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ripple/berry_geometry.hpp"
#include "ripple/ramp_dynamics.hpp"

namespace ripple {

inline constexpr std::string_view kEngineVersion = "ripple 0.1.0";

enum class Experiment { Chern, Fidelity, Curvature, Ramp, Validate };
enum class GridAxis { D2Ratio, Theta, RampTime };
enum class Units { Dimensionless, TwoPiMHz };
enum class OutputFormat { Csv, Json };
enum class ChernSource { Analytic, Dynamic };

std::string_view to_string(Experiment e) noexcept;
std::string_view to_string(GridAxis a) noexcept;

struct Grid {
    GridAxis axis = GridAxis::D2Ratio;
    double min = 0.0;
    double max = 2.0;
    int count = 81;

    // count points, endpoints included, min + i (max - min) / (count - 1).
    std::vector<double> values() const;
};

struct SweepSpec {
    double delta1 = 30.0;  // 2 pi MHz by default, i.e. 6 pi x 10 MHz
    double omega1 = 15.0;
    Units units = Units::TwoPiMHz;
    Experiment experiment = Experiment::Chern;
    Grid grid;
    RampProtocol protocol;
    double d2_ratio = 0.0;  // fixed ratio for curvature, ramp and ramp_time sweeps
    int nodes = kDefaultChernNodes;
    ChernSource chern_source = ChernSource::Analytic;
    std::string output_path;
    OutputFormat format = OutputFormat::Csv;
    int workers = 1;

    // Internal parameters: delta1 = 1, omega1 in units of delta1.
    DriveParams base() const;

    // Throws Error{ConfigError}.
    void validate() const;
    nlohmann::json to_json() const;
};

// Missing keys keep their defaults; unknown keys or wrong types throw
// Error{ConfigError}.
SweepSpec parse_spec(const nlohmann::json& doc);
SweepSpec parse_spec_text(std::string_view text);
// Error{IoError} if the file cannot be read.
SweepSpec load_spec(const std::string& path);

struct SweepRow {
    // One entry per column; nullopt prints as an empty field.
    std::vector<std::optional<double>> values;
    std::string error;
};

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
    nlohmann::json spec_echo;
    std::string engine_version{kEngineVersion};
    double wall_seconds = 0.0;

    bool has_errors() const;
};

// Column names for an experiment/axis pair, e.g. d2_ratio,chern,est_error.
std::vector<std::string> columns_for(Experiment e, GridAxis axis);

// One row per grid point (per trajectory sample for Ramp), in grid order
// for any worker count. Per-point failures become error rows.
SweepResult run_sweep(const SweepSpec& spec);

// %.17g
std::string format_number(double v);

std::string to_csv(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);

// File contents emit() would write.
std::string render(const SweepResult& result, OutputFormat format);

// Writes to `path`; throws Error{IoError}.
void emit(const SweepResult& result, OutputFormat format, const std::string& path);

}  // namespace ripple
