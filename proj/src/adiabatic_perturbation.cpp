#include "ripple/adiabatic_perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ripple/berry_geometry.hpp"
#include "ripple/error.hpp"
#include "ripple/quadrature.hpp"

namespace ripple {

namespace {

constexpr int kGapProbeNodes = 2049;
constexpr int kPhaseNodes = 2001;

DriveParams at(const DriveParams& base, const RampProtocol& protocol, double theta) {
    DriveParams p = base;
    p.theta = theta;
    p.phi = protocol.phi;
    return p;
}

void require_linear(const RampProtocol& protocol) {
    protocol.validate();
    if (protocol.smoothing != Smoothing::Linear) {
        throw Error(ErrorCode::InvalidParams, "first-order theory is evaluated for linear ramps");
    }
    if (!(protocol.total_time > 0.0)) {
        throw Error(ErrorCode::InvalidParams, "sudden quench is outside the perturbative regime");
    }
}

// Smallest gap along the ramp; throws GapClosure below the floor.
double min_gap_on_ramp(const DriveParams& base, const RampProtocol& protocol) {
    double lowest = gap(at(base, protocol, protocol.theta_end));
    for (int i = 0; i < kGapProbeNodes; ++i) {
        const double s = static_cast<double>(i) / (kGapProbeNodes - 1);
        lowest = std::min(lowest, gap(at(base, protocol, protocol.theta_at_fraction(s))));
    }
    if (lowest < kPerturbationGapFloor) {
        throw Error(ErrorCode::GapClosure, "gap " + std::to_string(lowest) + " along the ramp invalidates the expansion");
    }
    return lowest;
}

// M / g^2 with M = <1|dH/dtheta|0>
Complex coupling_over_gap2(const DriveParams& p) {
    const EigenSystem es = eigensystem(build_hamiltonian(p));
    const Complex m = d_theta_hamiltonian(p).element(es.v1, es.v0);
    const double g = es.gap();
    return m / (g * g);
}

const Complex kMinusI(0.0, -1.0);

}  // namespace

Complex first_order_amplitude(const DriveParams& base, const RampProtocol& protocol) {
    require_linear(protocol);
    min_gap_on_ramp(base, protocol);
    return kMinusI * protocol.velocity() * coupling_over_gap2(at(base, protocol, protocol.theta_end));
}

Complex boundary_amplitude(const DriveParams& base, const RampProtocol& protocol) {
    require_linear(protocol);
    min_gap_on_ramp(base, protocol);
    const double v = protocol.velocity();
    const double theta10 = accumulated_phase(base, protocol, protocol.theta_end).total;
    const Complex final_term = coupling_over_gap2(at(base, protocol, protocol.theta_end));
    const Complex initial_term = coupling_over_gap2(at(base, protocol, protocol.theta_start));
    return kMinusI * v * (final_term - initial_term * std::polar(1.0, -theta10));
}

double theta_connection(const DriveParams& p, Level level, double step) {
    validate(p);
    const double lo = std::max(0.0, p.theta - step);
    const double hi = std::min(kPi, p.theta + step);
    auto vec = [&](double t) {
        const EigenSystem es = eigensystem(build_hamiltonian(p.with_theta(t)));
        return level == Level::Ground ? es.v0 : es.v1;
    };
    return -std::arg(inner(vec(lo), vec(hi))) / (hi - lo);
}

AccumulatedPhase accumulated_phase(const DriveParams& base, const RampProtocol& protocol, double theta_final) {
    require_linear(protocol);
    const double lo = std::min(protocol.theta_start, protocol.theta_end);
    const double hi = std::max(protocol.theta_start, protocol.theta_end);
    if (theta_final < lo || theta_final > hi) {
        throw Error(ErrorCode::InvalidParams, "theta_final outside the ramp");
    }
    AccumulatedPhase out;
    if (theta_final == protocol.theta_start) return out;
    min_gap_on_ramp(base, protocol);

    const double v = protocol.velocity();
    out.dynamical = simpson([&](double t) { return gap(at(base, protocol, t)); }, protocol.theta_start, theta_final,
                            kPhaseNodes) /
                    v;
    auto connection_difference = [&](double t) {
        const DriveParams p = at(base, protocol, t);
        const double diff = theta_connection(p, Level::Excited) - theta_connection(p, Level::Ground);
        out.max_connection_difference = std::max(out.max_connection_difference, std::abs(diff));
        return diff;
    };
    out.geometric = simpson(connection_difference, protocol.theta_start, theta_final, kPhaseNodes);
    out.total = out.dynamical - out.geometric;
    return out;
}

double predicted_force(const DriveParams& p, double velocity) {
    validate(p);
    if (gap(p) < kPerturbationGapFloor) throw Error(ErrorCode::GapClosure, "gap too small at theta");
    const EigenSystem es = eigensystem(build_hamiltonian(p));
    const double born_oppenheimer = -d_phi_hamiltonian(p).expectation(es.v0);
    return born_oppenheimer - velocity * curvature_closed_form(p).value;
}

Complex exact_amplitude(const Trajectory& traj) { return exact_amplitude(traj, traj.samples.size() - 1); }

Complex exact_amplitude(const Trajectory& traj, std::size_t k) {
    const EigenSystem es = eigensystem(build_hamiltonian(traj.params_at(k)));
    const QubitState& psi = traj.samples[k].state;
    return inner(es.v1, psi) / inner(es.v0, psi);
}

PerturbationResult scaling_report(const DriveParams& base, std::span<const double> velocities,
                                  const ScalingOptions& options) {
    std::vector<double> distinct;
    for (double v : velocities) {
        if (!(v > 0.0)) throw Error(ErrorCode::InvalidParams, "velocities must be positive");
        const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                      [&](double d) { return std::abs(d - v) <= 1e-12 * std::max(d, v); });
        if (!seen) distinct.push_back(v);
    }
    if (distinct.size() < 3) {
        throw Error(ErrorCode::InsufficientPoints, "scaling fit needs at least 3 distinct velocities");
    }
    if (!(options.dt > 0.0)) throw Error(ErrorCode::InvalidParams, "dt must be positive");

    PerturbationResult out;
    const double span = std::abs(options.theta_final - options.theta_start);
    double slowest = distinct.front();
    for (double v : distinct) {
        const double total_time = span / v;
        const int steps = std::max(kMinRampSteps, static_cast<int>(std::ceil(total_time / options.dt)));
        const RampProtocol protocol =
            RampProtocol::linear(options.theta_start, options.theta_final, total_time, steps);
        const double min_gap = min_gap_on_ramp(base, protocol);
        const Trajectory traj = evolve_ramp(protocol, base);
        out.velocities.push_back(v);
        out.residuals.push_back(std::abs(exact_amplitude(traj) - boundary_amplitude(base, protocol)));
        out.gap_times.push_back(min_gap * total_time);
        slowest = std::min(slowest, v);
    }

    // least squares slope of log(residual) on log(velocity)
    const double n = static_cast<double>(out.velocities.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < out.velocities.size(); ++i) {
        const double x = std::log(out.velocities[i]);
        const double y = std::log(std::max(out.residuals[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.order_estimate = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    const RampProtocol slow = RampProtocol::linear(options.theta_start, options.theta_final, span / slowest,
                                                   std::max(kMinRampSteps, static_cast<int>(std::ceil(span / slowest / options.dt))));
    out.amplitude_a1 = first_order_amplitude(base, slow);
    out.phase_theta10 = accumulated_phase(base, slow, options.theta_final).total;
    DriveParams final_point = base;
    final_point.theta = options.theta_final;
    out.predicted_force = predicted_force(final_point, slow.velocity());

    const double min_gap_time = *std::min_element(out.gap_times.begin(), out.gap_times.end());
    if (min_gap_time < 1.0) {
        out.reliable = false;
        out.warning = "far from adiabatic: min gap * T = " + std::to_string(min_gap_time);
    }
    if (out.order_estimate < 1.5 || out.order_estimate > 2.5) {
        out.reliable = false;
        if (!out.warning.empty()) out.warning += "; ";
        out.warning += "fitted order " + std::to_string(out.order_estimate) + " outside [1.5, 2.5]";
    }
    return out;
}

}  // namespace ripple
