#pragma once

// Cross-module oracle checks behind the `validate` subcommand.

#include <string>
#include <vector>

#include "json.hpp"
#include "ripple/berry_geometry.hpp"

namespace ripple {

struct ValidationOptions {
    // Flips the sign of the dynamic curvature readout; the response
    // linearity check must then fail.
    bool inject_sign_flip = false;
    // Quadrature nodes for the Chern quantization check. Counts below the
    // library minimum are still integrated so the degraded error shows up.
    int chern_nodes = kDefaultChernNodes;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    double wall_seconds = 0.0;

    bool passed() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace ripple
