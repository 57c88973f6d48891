#include "ripple/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ripple/error.hpp"

namespace ripple {

double sin_theta(double theta) {
    // Reflect about pi/2 so that theta == pi gives exactly zero.
    return theta > 0.5 * kPi ? std::sin(kPi - theta) : std::sin(theta);
}

double DriveParams::detuning() const { return delta1 * std::cos(theta) + delta2; }

double DriveParams::rabi() const { return omega1 * sin_theta(theta); }

void validate(const DriveParams& p) {
    if (!(p.delta1 > 0.0) || !std::isfinite(p.delta1)) {
        throw Error(ErrorCode::InvalidParams, "delta1 must be positive, got " + std::to_string(p.delta1));
    }
    if (!(p.omega1 >= 0.0) || !std::isfinite(p.omega1)) {
        throw Error(ErrorCode::InvalidParams, "omega1 must be non-negative");
    }
    if (!std::isfinite(p.delta2)) {
        throw Error(ErrorCode::InvalidParams, "delta2 must be finite");
    }
    if (!(p.theta >= 0.0 && p.theta <= kPi)) {
        throw Error(ErrorCode::InvalidParams, "theta outside [0, pi]: " + std::to_string(p.theta));
    }
    if (!(p.phi >= 0.0 && p.phi < kTwoPi)) {
        throw Error(ErrorCode::InvalidParams, "phi outside [0, 2pi): " + std::to_string(p.phi));
    }
}

double QubitState::norm() const { return std::sqrt(std::norm(a) + std::norm(b)); }

QubitState QubitState::normalized() const {
    const double n = norm();
    return {a / n, b / n};
}

Complex inner(const QubitState& lhs, const QubitState& rhs) {
    return std::conj(lhs.a) * rhs.a + std::conj(lhs.b) * rhs.b;
}

QubitState Hamiltonian2::apply(const QubitState& s) const {
    return {h00 * s.a + h01 * s.b, h10 * s.a + h11 * s.b};
}

double Hamiltonian2::expectation(const QubitState& s) const { return element(s, s).real(); }

Complex Hamiltonian2::element(const QubitState& l, const QubitState& r) const {
    return inner(l, apply(r));
}

double Hamiltonian2::hermiticity_defect() const {
    return std::max({std::abs(h00.imag()), std::abs(h11.imag()), std::abs(h01 - std::conj(h10))});
}

double BlochVector::norm() const { return std::sqrt(dx * dx + dy * dy + dz * dz); }

std::string_view to_string(Monopole m) noexcept {
    switch (m) {
        case Monopole::Inside: return "Inside";
        case Monopole::OnSurface: return "OnSurface";
        case Monopole::Outside: return "Outside";
    }
    return "Unknown";
}

Hamiltonian2 build_hamiltonian(const DriveParams& p) {
    validate(p);
    const double detuning = p.detuning();
    const double rabi = p.rabi();
    const Complex drive = 0.5 * rabi * std::polar(1.0, -p.phi);
    return {Complex(0.5 * detuning, 0.0), drive, std::conj(drive), Complex(-0.5 * detuning, 0.0)};
}

BlochVector bloch_vector(const DriveParams& p) {
    validate(p);
    const double rabi = p.rabi();
    return {rabi * std::cos(p.phi), rabi * std::sin(p.phi), p.detuning()};
}

Hamiltonian2 to_hamiltonian(const BlochVector& d) {
    return {Complex(0.5 * d.dz, 0.0), Complex(0.5 * d.dx, -0.5 * d.dy), Complex(0.5 * d.dx, 0.5 * d.dy),
            Complex(-0.5 * d.dz, 0.0)};
}

BlochVector to_bloch(const Hamiltonian2& h) {
    return {(h.h10 + h.h01).real(), (h.h10 - h.h01).imag(), (h.h00 - h.h11).real()};
}

namespace {

QubitState fix_gauge(QubitState v) {
    v = v.normalized();
    if (std::abs(v.b) >= 1e-12) {
        const double mag = std::abs(v.b);
        v.a *= std::conj(v.b) / mag;
        v.b = Complex(mag, 0.0);
    } else {
        const double mag = std::abs(v.a);
        v.b *= std::conj(v.a) / mag;
        v.a = Complex(mag, 0.0);
    }
    return v;
}

// Null vector of (H - lambda) for a 2x2 Hermitian traceless H = d.sigma/2,
// taken from whichever row gives the larger (better conditioned) candidate.
QubitState null_vector(const BlochVector& d, double r, bool upper) {
    const Complex minus(d.dx, -d.dy);
    const Complex plus(d.dx, d.dy);
    if (!upper) {
        // lambda = -r/2
        if (d.dz >= 0.0) return {-minus, Complex(d.dz + r, 0.0)};
        return {Complex(r - d.dz, 0.0), -plus};
    }
    // lambda = +r/2
    if (d.dz >= 0.0) return {Complex(r + d.dz, 0.0), plus};
    return {minus, Complex(r - d.dz, 0.0)};
}

}  // namespace

EigenSystem eigensystem(const Hamiltonian2& h) {
    const double shift = 0.5 * (h.h00 + h.h11).real();
    const BlochVector d = to_bloch(h);
    const double r = d.norm();
    if (r < kDegeneracyTol) {
        throw Error(ErrorCode::DegenerateInput, "levels are degenerate (|d| = " + std::to_string(r) + ")");
    }
    EigenSystem es;
    es.e0 = shift - 0.5 * r;
    es.e1 = shift + 0.5 * r;
    es.v0 = fix_gauge(null_vector(d, r, false));
    es.v1 = fix_gauge(null_vector(d, r, true));
    return es;
}

double gap(const DriveParams& p) { return std::hypot(p.detuning(), p.rabi()); }

Hamiltonian2 d_theta_hamiltonian(const DriveParams& p) {
    validate(p);
    const double d_detuning = -p.delta1 * sin_theta(p.theta);
    const double d_rabi = p.omega1 * std::cos(p.theta);
    const Complex drive = 0.5 * d_rabi * std::polar(1.0, -p.phi);
    return {Complex(0.5 * d_detuning, 0.0), drive, std::conj(drive), Complex(-0.5 * d_detuning, 0.0)};
}

Hamiltonian2 d_phi_hamiltonian(const DriveParams& p) {
    validate(p);
    // d/dphi of (W/2) e^{-i phi} is -i (W/2) e^{-i phi}
    const Complex drive = Complex(0.0, -0.5 * p.rabi()) * std::polar(1.0, -p.phi);
    return {Complex(0.0, 0.0), drive, std::conj(drive), Complex(0.0, 0.0)};
}

Monopole monopole_classification(double delta1, double delta2, double omega1) {
    if (!(delta1 > 0.0)) throw Error(ErrorCode::InvalidParams, "delta1 must be positive");
    if (!(omega1 > 0.0)) {
        throw Error(ErrorCode::InvalidParams, "omega1 must be positive (manifold collapses to a line)");
    }
    if (std::abs(delta2 - delta1) <= kDegeneracyTol * delta1) return Monopole::OnSurface;
    return delta2 < delta1 ? Monopole::Inside : Monopole::Outside;
}

namespace pauli {
Hamiltonian2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
Hamiltonian2 x() { return {0.0, 1.0, 1.0, 0.0}; }
Hamiltonian2 y() { return {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}; }
Hamiltonian2 z() { return {1.0, 0.0, 0.0, -1.0}; }
}  // namespace pauli

double expect_sigma_x(const QubitState& s) { return 2.0 * (std::conj(s.a) * s.b).real(); }

double expect_sigma_y(const QubitState& s) { return 2.0 * (std::conj(s.a) * s.b).imag(); }

double expect_sigma_z(const QubitState& s) { return std::norm(s.a) - std::norm(s.b); }

}  // namespace ripple
