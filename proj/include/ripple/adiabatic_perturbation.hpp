#pragma once

// First-order adiabatic perturbation theory for a linear theta ramp. Used as
// an oracle against the exact evolution in ramp_dynamics.
//
// Amplitudes are quoted in the co-moving frame: a1 = <1|psi> / <0|psi> with
// the gauge-fixed instantaneous eigenvectors, which strips the ground-state
// dynamical phase. To first order in the velocity v = d theta / dt
//
//   a1 = -i v [ M(theta_f) / g(theta_f)^2 - M(theta_i) / g(theta_i)^2 e^{-i theta10} ]
//
// with M = <1|dH/dtheta|0>, g = E1 - E0 and theta10 the accumulated phase
// difference between the two levels.

#include <span>
#include <string>
#include <vector>

#include "ripple/ramp_dynamics.hpp"
#include "ripple/spin_model.hpp"

namespace ripple {

inline constexpr double kPerturbationGapFloor = 1e-6;

struct PerturbationResult {
    Complex amplitude_a1;          // endpoint term at the slowest velocity
    double phase_theta10 = 0.0;    // at the slowest velocity
    double predicted_force = 0.0;  // at the slowest velocity, theta_final
    double order_estimate = 0.0;   // fitted exponent of residual vs velocity
    bool reliable = true;
    std::string warning;

    std::vector<double> velocities;
    std::vector<double> residuals;  // |a1_exact - a1_first_order|
    std::vector<double> gap_times;  // min gap * ramp duration per velocity
};

struct AccumulatedPhase {
    double dynamical = 0.0;  // int (E1 - E0) dt
    double geometric = 0.0;  // int (A1 - A0) dtheta
    double total = 0.0;      // dynamical - geometric
    double max_connection_difference = 0.0;
};

// Endpoint ("simple") form -i v M(theta_f) / g(theta_f)^2. Linear ramps only.
// Throws Error{GapClosure} if the gap drops below 1e-6 along the ramp.
Complex first_order_amplitude(const DriveParams& base, const RampProtocol& protocol);

// Both boundary terms, the initial one carrying e^{-i theta10}.
Complex boundary_amplitude(const DriveParams& base, const RampProtocol& protocol);

// theta10 from theta_start up to theta_final, with the Berry connections
// A_n = i <n|d_theta n> evaluated from neighbouring overlaps.
AccumulatedPhase accumulated_phase(const DriveParams& base, const RampProtocol& protocol, double theta_final);

// Berry connection A_n = i <n|d_theta n> of the gauge-fixed eigenvector.
double theta_connection(const DriveParams& p, Level level, double step = 1e-5);

// F_phi = -<0|dH/dphi|0> - v F_theta_phi to first order.
double predicted_force(const DriveParams& p, double velocity);

// <1|psi> / <0|psi> at sample k (defaults to the last sample).
Complex exact_amplitude(const Trajectory& traj);
Complex exact_amplitude(const Trajectory& traj, std::size_t k);

struct ScalingOptions {
    double theta_start = 0.0;
    double theta_final = 0.5 * kPi;
    double dt = 0.01;
};

// Runs one exact ramp per velocity and fits log(residual) against
// log(velocity). Needs >= 3 distinct velocities (Error{InsufficientPoints}).
PerturbationResult scaling_report(const DriveParams& base, std::span<const double> velocities,
                                  const ScalingOptions& options = {});

}  // namespace ripple
