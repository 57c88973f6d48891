#pragma once

// Time evolution of the driven qubit while theta is ramped, the
// linear-response readout of the curvature from the generalized force, and
// the superposition-fidelity experiment.

#include <string_view>
#include <vector>

#include "ripple/berry_geometry.hpp"
#include "ripple/spin_model.hpp"

namespace ripple {

enum class Smoothing { Linear, SinSquaredEdges };

std::string_view to_string(Smoothing s) noexcept;

struct RampProtocol {
    double theta_start = 0.0;
    double theta_end = kPi;
    double total_time = 2000.0;  // units of 1/delta1
    int steps = 20000;
    double phi = 0.0;
    Smoothing smoothing = Smoothing::Linear;
    // Fraction of total_time spent accelerating (and again decelerating)
    // for SinSquaredEdges; in (0, 0.5].
    double edge_fraction = 0.1;

    static RampProtocol linear(double theta_start, double theta_end, double total_time, int steps);

    // theta as a function of the elapsed fraction s = t / total_time.
    double theta_at_fraction(double s) const;
    double theta_at(double t) const;
    // d theta / dt; the plateau value for SinSquaredEdges.
    double velocity() const;
    double dt() const { return total_time / steps; }

    // Throws Error{InvalidParams}.
    void validate() const;
};

inline constexpr int kMinRampSteps = 100;

struct TrajectorySample {
    double t = 0.0;
    double theta = 0.0;
    QubitState state;
    double sigma_y = 0.0;
};

struct Trajectory {
    DriveParams base;  // theta and phi are overridden by the protocol
    RampProtocol protocol;
    std::vector<TrajectorySample> samples;
    // Set when some step had |d| dt > pi/4.
    bool step_too_large = false;

    const TrajectorySample& final() const { return samples.back(); }
    DriveParams params_at(std::size_t k) const;
};

// exp(-i H dt) applied exactly: cos(|d| dt/2) - i sin(|d| dt/2) d^.sigma.
QubitState step_propagator(const QubitState& s, const Hamiltonian2& h, double dt);

// Accuracy warning for the piecewise-constant approximation.
bool step_too_large(const Hamiltonian2& h, double dt);

QubitState ground_state(const DriveParams& p);

// Starts in the ground state of H(theta_start) and steps with H frozen at the
// midpoint theta of each step. Records steps + 1 samples (t = 0 included).
// Throws Error{DegenerateStart} if the initial gap is below 1e-9.
Trajectory evolve_ramp(const RampProtocol& protocol, const DriveParams& base);

// Validation-only oracle: classic RK4 on i dpsi/dt = H(t) psi with the
// continuous schedule theta(t), `refinement` substeps per protocol step and
// renormalization after each substep. Samples align with evolve_ramp.
Trajectory reference_evolve(const RampProtocol& protocol, const DriveParams& base, int refinement = 10);

struct ExtractionOptions {
    // Full window width in samples; 0 picks one local Larmor period,
    // 2 pi / (gap dt), at every sample.
    double window_samples = 0.0;
    // Fault-injection hook for the validator; flips the readout sign.
    bool flip_sign = false;
};

// Generalized force F_phi = -<psi|dH/dphi|psi> per sample, averaged over
// the window (trapezoid over the linear interpolant, window clipped
// symmetrically at the ends of the trajectory).
std::vector<double> windowed_force(const Trajectory& traj, const ExtractionOptions& options = {});

// F_theta_phi = <dH/dphi> / theta_t = -F_phi / theta_t per sample.
// Requires a Linear ramp; throws Error{ZeroVelocity} if theta_t == 0.
std::vector<CurvatureSample> extract_curvature_dynamic(const Trajectory& traj,
                                                       const ExtractionOptions& options = {});

// Linear interpolation of a sample sequence (uniform in theta) at theta.
double interpolate_curvature(std::span<const CurvatureSample> samples, double theta);

// Ramp theta over [0, pi] with the given protocol, read out the curvature
// dynamically and integrate it. Throws Error{NearDegeneracy} if the gap
// closes anywhere on the ramp.
ChernResult dynamic_chern_number(const DriveParams& base, double d2_ratio, const RampProtocol& protocol,
                                 const ExtractionOptions& options = {});

enum class Integrator { ExactStep, Reference };

// (|g> + |e>) / sqrt 2 in the bare basis.
QubitState superposition_target();

double fidelity(const QubitState& target, const QubitState& state);

// f = |<psi_target|psi(T)>|^2 after ramping theta 0 -> pi with
// delta2 = d2_ratio * delta1.
double fidelity_experiment(const DriveParams& base, double d2_ratio, const RampProtocol& protocol,
                           Integrator integrator = Integrator::ExactStep);

// |<0(theta_end)|psi(T)>|^2
double final_ground_population(const Trajectory& traj);

}  // namespace ripple
