#include "ripple/berry_geometry.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ripple/error.hpp"
#include "ripple/quadrature.hpp"

namespace ripple {

std::string_view to_string(CurvatureMethod m) noexcept {
    switch (m) {
        case CurvatureMethod::Spectral: return "spectral";
        case CurvatureMethod::ClosedForm: return "closed_form";
        case CurvatureMethod::Dynamic: return "dynamic";
    }
    return "unknown";
}

double wrap_two_pi(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double wrap_pi(double angle) {
    double r = wrap_two_pi(angle);
    if (r > kPi) r -= kTwoPi;
    return r;
}

CurvatureSample curvature_spectral(const DriveParams& p, Level level) {
    const Hamiltonian2 h = build_hamiltonian(p);
    const double g = gap(p);
    if (g <= kSpectralGapFloor) {
        throw Error(ErrorCode::NearDegeneracy, "gap " + std::to_string(g) + " too small for the spectral formula");
    }
    const EigenSystem es = eigensystem(h);
    const Hamiltonian2 dth = d_theta_hamiltonian(p);
    const Hamiltonian2 dph = d_phi_hamiltonian(p);

    const QubitState& n = level == Level::Ground ? es.v0 : es.v1;
    const QubitState& m = level == Level::Ground ? es.v1 : es.v0;
    const Complex product = dth.element(n, m) * dph.element(m, n);
    const double split = es.e1 - es.e0;
    return {p.theta, -2.0 * product.imag() / (split * split), CurvatureMethod::Spectral};
}

CurvatureSample curvature_closed_form(const DriveParams& p) {
    validate(p);
    if (p.omega1 == 0.0) return {p.theta, 0.0, CurvatureMethod::ClosedForm};

    // Half-angle forms: delta1 + delta2 cos = (delta1 - delta2) + 2 delta2 cos^2(theta/2)
    // keeps full relative precision next to the gap-closing point.
    const double half_cos = p.theta > 0.5 * kPi ? std::sin(0.5 * (kPi - p.theta)) : std::cos(0.5 * p.theta);
    const double c2 = half_cos * half_cos;
    const double factor = (p.delta1 - p.delta2) + 2.0 * p.delta2 * c2;
    const double detuning = (p.delta2 - p.delta1) + 2.0 * p.delta1 * c2;
    const double rabi = p.omega1 * sin_theta(p.theta);
    const double r = std::hypot(detuning, rabi);

    const bool on_line = std::abs(p.delta2 - p.delta1) <= kDegeneracyTol * p.delta1 ||
                         std::abs(p.delta2 + p.delta1) <= kDegeneracyTol * p.delta1;
    if (r <= kSpectralGapFloor * p.delta1 && on_line) {
        return {p.theta, p.delta1 / (4.0 * p.omega1), CurvatureMethod::ClosedForm};
    }
    const double value = p.omega1 * rabi * factor / (2.0 * r * r * r);
    return {p.theta, value, CurvatureMethod::ClosedForm};
}

LoopPhase berry_phase_loop(const DriveParams& p, int nodes) {
    validate(p);
    if (nodes < 3) throw Error(ErrorCode::InvalidParams, "loop needs at least 3 nodes");
    const double g = gap(p);
    if (g <= kSpectralGapFloor) {
        throw Error(ErrorCode::NearDegeneracy, "gap closes on the loop at theta = " + std::to_string(p.theta));
    }
    const double step = kTwoPi / nodes;
    const QubitState first = eigensystem(build_hamiltonian(p.with_phi(0.0))).v0;
    QubitState prev = first;
    Complex product(1.0, 0.0);
    for (int k = 1; k <= nodes; ++k) {
        const QubitState next = k == nodes ? first : eigensystem(build_hamiltonian(p.with_phi(step * k))).v0;
        product *= inner(prev, next);
        product /= std::abs(product);
        prev = next;
    }
    return {p.theta, wrap_two_pi(-std::arg(product))};
}

double curvature_flux(const DriveParams& base, double theta_a, double theta_b, int nodes) {
    if (nodes < 3) throw Error(ErrorCode::InvalidParams, "flux quadrature needs at least 3 nodes");
    return simpson([&](double t) { return curvature_closed_form(base.with_theta(t)).value; }, theta_a, theta_b,
                   static_cast<std::size_t>(nodes));
}

namespace {

double chern_quadrature(const DriveParams& base, ChernMethod method, int nodes) {
    auto integrand = [&](double t) {
        const DriveParams p = base.with_theta(t);
        if (method == ChernMethod::Spectral && gap(p) > kSpectralGapFloor) return curvature_spectral(p).value;
        return curvature_closed_form(p).value;
    };
    return simpson(integrand, 0.0, kPi, static_cast<std::size_t>(nodes));
}

}  // namespace

ChernResult chern_number(double delta1, double delta2, double omega1, ChernMethod method, int nodes) {
    if (!(omega1 > 0.0)) throw Error(ErrorCode::InvalidParams, "omega1 must be positive");
    if (nodes < kMinChernNodes || nodes % 2 == 0) {
        throw Error(ErrorCode::InvalidParams, "nodes must be odd and >= 101, got " + std::to_string(nodes));
    }
    DriveParams base;
    base.delta1 = delta1;
    base.delta2 = delta2;
    base.omega1 = omega1;
    validate(base);

    ChernResult out;
    out.d2_ratio = delta2 / delta1;
    out.quadrature_nodes = nodes;
    out.chern = chern_quadrature(base, method, nodes);
    out.est_error = std::abs(chern_quadrature(base, method, 2 * nodes - 1) - out.chern);
    return out;
}

double integrate_curvature(std::span<const CurvatureSample> samples) {
    if (samples.size() < 2) throw Error(ErrorCode::InsufficientPoints, "need at least two curvature samples");
    const double h = (samples.back().theta - samples.front().theta) / static_cast<double>(samples.size() - 1);
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) values.push_back(s.value);
    return simpson(values, h);
}

}  // namespace ripple
