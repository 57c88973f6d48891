#pragma once

// Berry curvature of the driven qubit on the (theta, phi) sphere: the
// spectral (sum-over-states) route, the closed form, the Wilson-loop phase
// and the Chern-number quadrature.

#include <span>
#include <string_view>

#include "ripple/spin_model.hpp"

namespace ripple {

enum class CurvatureMethod { Spectral, ClosedForm, Dynamic };

std::string_view to_string(CurvatureMethod m) noexcept;

enum class Level { Ground, Excited };

struct CurvatureSample {
    double theta = 0.0;
    double value = 0.0;
    CurvatureMethod method = CurvatureMethod::ClosedForm;
};

struct ChernResult {
    double d2_ratio = 0.0;
    double chern = 0.0;
    int quadrature_nodes = 0;
    double est_error = 0.0;
};

struct LoopPhase {
    double theta = 0.0;
    double gamma = 0.0;  // [0, 2 pi)
};

inline constexpr double kSpectralGapFloor = 1e-9;
inline constexpr int kDefaultChernNodes = 2001;
inline constexpr int kMinChernNodes = 101;
inline constexpr int kDefaultLoopNodes = 1 << 16;

// F_theta_phi from the matrix elements of the analytic parameter derivatives:
//   F_n = -2 Im <n|dH/dtheta|m><m|dH/dphi|n> / (E_m - E_n)^2,  m != n.
// Throws Error{NearDegeneracy} when the gap is at most 1e-9.
CurvatureSample curvature_spectral(const DriveParams& p, Level level = Level::Ground);

// Ground-state curvature
//   F = omega1^2 sin(theta) (delta1 + delta2 cos(theta)) / (2 |d|^3),
// total: at the removable point |d| -> 0 returns delta1 / (4 omega1).
CurvatureSample curvature_closed_form(const DriveParams& p);

// Ground-state geometric phase around the phi loop at fixed theta, from the
// phase of the product of neighbouring overlaps.
LoopPhase berry_phase_loop(const DriveParams& p, int nodes = kDefaultLoopNodes);

// Integral of the closed-form curvature over [theta_a, theta_b].
double curvature_flux(const DriveParams& base, double theta_a, double theta_b, int nodes = kDefaultChernNodes);

enum class ChernMethod { ClosedForm, Spectral };

// C1 = int_0^pi F dtheta by composite Simpson on `nodes` (odd, >= 101)
// points. est_error is the change when the node count is doubled.
ChernResult chern_number(double delta1, double delta2, double omega1, ChernMethod method = ChernMethod::ClosedForm,
                         int nodes = kDefaultChernNodes);

// Simpson integral of curvature samples on a uniform theta grid (any
// provenance, dynamic samples included).
double integrate_curvature(std::span<const CurvatureSample> samples);

// Wrap an angle into [0, 2 pi) / (-pi, pi].
double wrap_two_pi(double angle);
double wrap_pi(double angle);

}  // namespace ripple
