#pragma once

// Driven two-level Hamiltonian on the (theta, phi) manifold.
//
//   H = 1/2 [[ D,           W e^{-i phi} ],
//            [ W e^{i phi}, -D           ]]
//
// with D = delta1 cos(theta) + delta2 and W = omega1 sin(theta). All
// frequencies are dimensionless (delta1 is normally the unit) and hbar = 1.

#include <complex>
#include <string_view>

namespace ripple {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Below this Bloch-vector length (relative to delta1) the two levels are
// treated as degenerate.
inline constexpr double kDegeneracyTol = 1e-12;

// sin(theta) evaluated so that it vanishes exactly at theta = pi.
double sin_theta(double theta);

struct DriveParams {
    double delta1 = 1.0;
    double delta2 = 0.0;
    double omega1 = 0.5;
    double theta = 0.0;
    double phi = 0.0;

    double detuning() const;  // delta1 cos(theta) + delta2
    double rabi() const;      // omega1 sin(theta)

    DriveParams with_theta(double t) const {
        DriveParams p = *this;
        p.theta = t;
        return p;
    }
    DriveParams with_phi(double f) const {
        DriveParams p = *this;
        p.phi = f;
        return p;
    }
};

// Throws Error{InvalidParams} unless delta1 > 0, omega1 >= 0,
// theta in [0, pi] and phi in [0, 2 pi).
void validate(const DriveParams& p);

// Pure state (a, b) in the bare basis; |e> = (1, 0), |g> = (0, 1).
struct QubitState {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};

    double norm() const;
    QubitState normalized() const;
};

// <lhs|rhs>
Complex inner(const QubitState& lhs, const QubitState& rhs);

struct Hamiltonian2 {
    Complex h00, h01, h10, h11;

    QubitState apply(const QubitState& s) const;
    // <s|H|s>, real for Hermitian H.
    double expectation(const QubitState& s) const;
    // <l|H|r>
    Complex element(const QubitState& l, const QubitState& r) const;
    double hermiticity_defect() const;
};

struct BlochVector {
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;

    double norm() const;
};

struct EigenSystem {
    double e0 = 0.0;
    double e1 = 0.0;
    QubitState v0;
    QubitState v1;

    double gap() const { return e1 - e0; }
};

enum class Monopole { Inside, OnSurface, Outside };

std::string_view to_string(Monopole m) noexcept;

Hamiltonian2 build_hamiltonian(const DriveParams& p);
BlochVector bloch_vector(const DriveParams& p);

// H = 1/2 d.sigma and back. The Hamiltonian form assumes zero trace.
Hamiltonian2 to_hamiltonian(const BlochVector& d);
BlochVector to_bloch(const Hamiltonian2& h);

// Energies sorted ascending. Each eigenvector is phase-fixed so that its
// second component is real and non-negative; if that component is smaller
// than 1e-12 in magnitude the first component is made real non-negative.
// Throws Error{DegenerateInput} when |d| < kDegeneracyTol.
EigenSystem eigensystem(const Hamiltonian2& h);

double gap(const DriveParams& p);

// Analytic parameter derivatives of build_hamiltonian.
Hamiltonian2 d_theta_hamiltonian(const DriveParams& p);
Hamiltonian2 d_phi_hamiltonian(const DriveParams& p);

// Position of the degeneracy (theta = pi, delta2 = delta1) relative to the
// closed surface swept by theta in [0, pi], phi in [0, 2 pi).
Monopole monopole_classification(double delta1, double delta2, double omega1);

namespace pauli {
Hamiltonian2 identity();
Hamiltonian2 x();
Hamiltonian2 y();
Hamiltonian2 z();
}  // namespace pauli

double expect_sigma_x(const QubitState& s);
double expect_sigma_y(const QubitState& s);
double expect_sigma_z(const QubitState& s);

}  // namespace ripple
