#include "ripple/ramp_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ripple/error.hpp"

namespace ripple {

std::string_view to_string(Smoothing s) noexcept {
    switch (s) {
        case Smoothing::Linear: return "linear";
        case Smoothing::SinSquaredEdges: return "sin2_edges";
    }
    return "unknown";
}

RampProtocol RampProtocol::linear(double theta_start, double theta_end, double total_time, int steps) {
    RampProtocol p;
    p.theta_start = theta_start;
    p.theta_end = theta_end;
    p.total_time = total_time;
    p.steps = steps;
    return p;
}

namespace {

// Integral of sin^2(pi x / (2 f)) from 0 to x, x in [0, f].
double edge_integral(double x, double f) { return 0.5 * x - f / kTwoPi * std::sin(kPi * x / f); }

}  // namespace

double RampProtocol::theta_at_fraction(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    const double span = theta_end - theta_start;
    if (smoothing == Smoothing::Linear) return theta_start + span * s;

    const double f = edge_fraction;
    double w = 0.0;
    if (s < f) {
        w = edge_integral(s, f);
    } else if (s <= 1.0 - f) {
        w = 0.5 * f + (s - f);
    } else {
        w = (1.0 - f) - edge_integral(1.0 - s, f);
    }
    return theta_start + span * w / (1.0 - f);
}

double RampProtocol::theta_at(double t) const {
    if (total_time <= 0.0) return t > 0.0 ? theta_end : theta_start;
    return theta_at_fraction(t / total_time);
}

double RampProtocol::velocity() const {
    const double span = theta_end - theta_start;
    if (smoothing == Smoothing::Linear) return span / total_time;
    return span / (total_time * (1.0 - edge_fraction));
}

void RampProtocol::validate() const {
    if (steps < kMinRampSteps) {
        throw Error(ErrorCode::InvalidParams, "ramp needs at least 100 steps, got " + std::to_string(steps));
    }
    if (!(total_time >= 0.0) || !std::isfinite(total_time)) {
        throw Error(ErrorCode::InvalidParams, "total_time must be finite and non-negative");
    }
    auto in_range = [](double t) { return t >= 0.0 && t <= kPi; };
    if (!in_range(theta_start) || !in_range(theta_end)) {
        throw Error(ErrorCode::InvalidParams, "ramp endpoints must lie in [0, pi]");
    }
    if (!(phi >= 0.0 && phi < kTwoPi)) throw Error(ErrorCode::InvalidParams, "phi outside [0, 2pi)");
    if (smoothing == Smoothing::SinSquaredEdges && !(edge_fraction > 0.0 && edge_fraction <= 0.5)) {
        throw Error(ErrorCode::InvalidParams, "edge_fraction must be in (0, 0.5]");
    }
}

DriveParams Trajectory::params_at(std::size_t k) const {
    DriveParams p = base;
    p.theta = samples[k].theta;
    p.phi = protocol.phi;
    return p;
}

QubitState step_propagator(const QubitState& s, const Hamiltonian2& h, double dt) {
    if (dt < 0.0) throw Error(ErrorCode::InvalidParams, "negative time step");
    if (dt == 0.0) return s;
    const BlochVector d = to_bloch(h);
    const double r = d.norm();
    const double shift = 0.5 * (h.h00 + h.h11).real();
    const Complex global = std::polar(1.0, -shift * dt);
    if (r == 0.0) return {global * s.a, global * s.b};

    const double c = std::cos(0.5 * r * dt);
    const double sn = std::sin(0.5 * r * dt) / r;
    const Complex u00(c, -sn * d.dz);
    const Complex u11(c, sn * d.dz);
    const Complex u01(-sn * d.dy, -sn * d.dx);
    const Complex u10(sn * d.dy, -sn * d.dx);
    return {global * (u00 * s.a + u01 * s.b), global * (u10 * s.a + u11 * s.b)};
}

bool step_too_large(const Hamiltonian2& h, double dt) { return to_bloch(h).norm() * dt > 0.25 * kPi; }

QubitState ground_state(const DriveParams& p) { return eigensystem(build_hamiltonian(p)).v0; }

namespace {

DriveParams start_params(const RampProtocol& protocol, const DriveParams& base) {
    protocol.validate();
    DriveParams p = base;
    p.theta = protocol.theta_start;
    p.phi = protocol.phi;
    validate(p);
    if (gap(p) < kSpectralGapFloor) {
        throw Error(ErrorCode::DegenerateStart, "gap vanishes at theta_start = " + std::to_string(p.theta));
    }
    return p;
}

TrajectorySample make_sample(double t, double theta, const QubitState& s) { return {t, theta, s, expect_sigma_y(s)}; }

}  // namespace

Trajectory evolve_ramp(const RampProtocol& protocol, const DriveParams& base) {
    DriveParams p = start_params(protocol, base);
    Trajectory traj{p, protocol, {}, false};
    traj.samples.reserve(static_cast<std::size_t>(protocol.steps) + 1);

    QubitState state = ground_state(p);
    const double dt = protocol.dt();
    const double inv_steps = 1.0 / protocol.steps;
    traj.samples.push_back(make_sample(0.0, protocol.theta_start, state));
    for (int k = 0; k < protocol.steps; ++k) {
        p.theta = protocol.theta_at_fraction((k + 0.5) * inv_steps);
        const Hamiltonian2 h = build_hamiltonian(p);
        if (!traj.step_too_large && step_too_large(h, dt)) traj.step_too_large = true;
        state = step_propagator(state, h, dt);
        traj.samples.push_back(make_sample((k + 1) * dt, protocol.theta_at_fraction((k + 1) * inv_steps), state));
    }
    return traj;
}

Trajectory reference_evolve(const RampProtocol& protocol, const DriveParams& base, int refinement) {
    if (refinement < 1) throw Error(ErrorCode::InvalidParams, "refinement must be >= 1");
    DriveParams p = start_params(protocol, base);
    Trajectory traj{p, protocol, {}, false};
    traj.samples.reserve(static_cast<std::size_t>(protocol.steps) + 1);

    QubitState psi = ground_state(p);
    const double dt = protocol.dt();
    const double h = dt / refinement;
    auto rhs = [&](double t, const QubitState& s) {
        p.theta = protocol.theta_at(t);
        const QubitState hs = build_hamiltonian(p).apply(s);
        return QubitState{Complex(hs.a.imag(), -hs.a.real()), Complex(hs.b.imag(), -hs.b.real())};
    };
    auto axpy = [](const QubitState& x, double a, const QubitState& y) {
        return QubitState{x.a + a * y.a, x.b + a * y.b};
    };

    traj.samples.push_back(make_sample(0.0, protocol.theta_start, psi));
    const long long total = static_cast<long long>(protocol.steps) * refinement;
    for (long long j = 0; j < total; ++j) {
        const double t = static_cast<double>(j) * h;
        const QubitState k1 = rhs(t, psi);
        const QubitState k2 = rhs(t + 0.5 * h, axpy(psi, 0.5 * h, k1));
        const QubitState k3 = rhs(t + 0.5 * h, axpy(psi, 0.5 * h, k2));
        const QubitState k4 = rhs(t + h, axpy(psi, h, k3));
        psi.a += h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
        psi.b += h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
        psi = psi.normalized();
        if ((j + 1) % refinement == 0) {
            const long long k = (j + 1) / refinement;
            traj.samples.push_back(make_sample(static_cast<double>(k) * dt,
                                               protocol.theta_at_fraction(static_cast<double>(k) / protocol.steps),
                                               psi));
        }
    }
    return traj;
}

std::vector<double> windowed_force(const Trajectory& traj, const ExtractionOptions& options) {
    const std::size_t n = traj.samples.size();
    std::vector<double> force(n);
    for (std::size_t k = 0; k < n; ++k) {
        force[k] = -d_phi_hamiltonian(traj.params_at(k)).expectation(traj.samples[k].state);
    }
    if (n < 2) return force;

    // cumulative[j] = integral of the linear interpolant over [0, j] (sample units)
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) cumulative[j] = cumulative[j - 1] + 0.5 * (force[j - 1] + force[j]);
    auto integral_to = [&](double u) {
        const auto j = std::min(static_cast<std::size_t>(u), n - 1);
        const double frac = u - static_cast<double>(j);
        if (frac <= 0.0 || j + 1 >= n) return cumulative[j];
        return cumulative[j] + force[j] * frac + 0.5 * (force[j + 1] - force[j]) * frac * frac;
    };

    const double dt = traj.protocol.dt();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double half = 0.5 * options.window_samples;
        if (options.window_samples <= 0.0) {
            const double g = gap(traj.params_at(k));
            half = (g > 0.0 && dt > 0.0) ? kPi / (g * dt) : static_cast<double>(n);
        }
        const double kd = static_cast<double>(k);
        half = std::min({half, kd, static_cast<double>(n - 1) - kd});
        out[k] = half <= 0.0 ? force[k] : (integral_to(kd + half) - integral_to(kd - half)) / (2.0 * half);
    }
    return out;
}

std::vector<CurvatureSample> extract_curvature_dynamic(const Trajectory& traj, const ExtractionOptions& options) {
    const RampProtocol& protocol = traj.protocol;
    if (protocol.smoothing != Smoothing::Linear) {
        throw Error(ErrorCode::InvalidParams, "dynamic readout needs a linear ramp");
    }
    if (!(protocol.total_time > 0.0)) throw Error(ErrorCode::InvalidParams, "dynamic readout needs total_time > 0");
    const double velocity = protocol.velocity();
    if (velocity == 0.0) throw Error(ErrorCode::ZeroVelocity, "theta is not ramped");

    const std::vector<double> force = windowed_force(traj, options);
    const double sign = options.flip_sign ? 1.0 : -1.0;
    std::vector<CurvatureSample> out;
    out.reserve(force.size());
    for (std::size_t k = 0; k < force.size(); ++k) {
        out.push_back({traj.samples[k].theta, sign * force[k] / velocity, CurvatureMethod::Dynamic});
    }
    return out;
}

double interpolate_curvature(std::span<const CurvatureSample> samples, double theta) {
    if (samples.size() < 2) throw Error(ErrorCode::InsufficientPoints, "need at least two samples");
    const double t0 = samples.front().theta;
    const double h = (samples.back().theta - t0) / static_cast<double>(samples.size() - 1);
    if (h == 0.0) throw Error(ErrorCode::InvalidParams, "samples do not span a theta range");
    const double u = std::clamp((theta - t0) / h, 0.0, static_cast<double>(samples.size() - 1));
    const auto j = std::min(static_cast<std::size_t>(u), samples.size() - 2);
    const double frac = u - static_cast<double>(j);
    return samples[j].value + frac * (samples[j + 1].value - samples[j].value);
}

ChernResult dynamic_chern_number(const DriveParams& base, double d2_ratio, const RampProtocol& protocol,
                                 const ExtractionOptions& options) {
    RampProtocol full = protocol;
    full.theta_start = 0.0;
    full.theta_end = kPi;
    DriveParams p = base;
    p.delta2 = d2_ratio * base.delta1;

    const Trajectory traj = evolve_ramp(full, p);
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        if (gap(traj.params_at(k)) < kSpectralGapFloor) {
            throw Error(ErrorCode::NearDegeneracy,
                        "gap closes on the ramp at theta = " + std::to_string(traj.samples[k].theta));
        }
    }
    const std::vector<CurvatureSample> samples = extract_curvature_dynamic(traj, options);

    std::vector<CurvatureSample> coarse;
    coarse.reserve(samples.size() / 2 + 1);
    for (std::size_t k = 0; k < samples.size(); k += 2) coarse.push_back(samples[k]);

    ChernResult out;
    out.d2_ratio = d2_ratio;
    out.quadrature_nodes = static_cast<int>(samples.size());
    out.chern = integrate_curvature(samples);
    if (coarse.back().theta == samples.back().theta && coarse.size() >= 2) {
        out.est_error = std::abs(integrate_curvature(coarse) - out.chern);
    }
    return out;
}

QubitState superposition_target() {
    const double r = 1.0 / std::sqrt(2.0);
    return {Complex(r, 0.0), Complex(r, 0.0)};
}

double fidelity(const QubitState& target, const QubitState& state) { return std::norm(inner(target, state)); }

double fidelity_experiment(const DriveParams& base, double d2_ratio, const RampProtocol& protocol,
                           Integrator integrator) {
    if (protocol.theta_start != 0.0 || std::abs(protocol.theta_end - kPi) > 1e-12) {
        throw Error(ErrorCode::InvalidParams, "fidelity experiment ramps theta from 0 to pi");
    }
    DriveParams p = base;
    p.delta2 = d2_ratio * base.delta1;
    const Trajectory traj =
        integrator == Integrator::ExactStep ? evolve_ramp(protocol, p) : reference_evolve(protocol, p);
    return std::clamp(fidelity(superposition_target(), traj.final().state), 0.0, 1.0);
}

double final_ground_population(const Trajectory& traj) {
    const QubitState g = ground_state(traj.params_at(traj.samples.size() - 1));
    return std::norm(inner(g, traj.final().state));
}

}  // namespace ripple
