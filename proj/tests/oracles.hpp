#pragma once

// Reference formulas that do not go through the library's eigen-solver or
// quadrature. Tests compare library output against these.

#include <cmath>
#include <complex>

namespace oracle {

using cd = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

struct Vec3 {
    double x, y, z;
};

inline Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }

inline Vec3 bloch(double d1, double d2, double o1, double theta, double phi) {
    const double w = o1 * std::sin(theta);
    return {w * std::cos(phi), w * std::sin(phi), d1 * std::cos(theta) + d2};
}

// Half the solid-angle density swept by d: d . (d_theta d x d_phi d) / (2 |d|^3).
inline double triple_product_curvature(double d1, double d2, double o1, double theta) {
    const Vec3 d = bloch(d1, d2, o1, theta, 0.0);
    const Vec3 dt{o1 * std::cos(theta), 0.0, -d1 * std::sin(theta)};
    const Vec3 dp{0.0, o1 * std::sin(theta), 0.0};
    const double n = length(d);
    return 0.5 * dot(d, cross(dt, dp)) / (n * n * n);
}

// Ground state of 1/2 d.sigma from the polar angles of d, any gauge.
struct Spinor {
    cd a, b;
};
inline Spinor ground(double d1, double d2, double o1, double theta, double phi) {
    const Vec3 d = bloch(d1, d2, o1, theta, phi);
    const double alpha = std::acos(d.z / length(d));
    const double beta = std::atan2(d.y, d.x);
    return {std::sin(0.5 * alpha), -std::polar(1.0, beta) * std::cos(0.5 * alpha)};
}
inline cd overlap(Spinor l, Spinor r) { return std::conj(l.a) * r.a + std::conj(l.b) * r.b; }

// Gauge-invariant plaquette estimate of the ground-state curvature.
inline double plaquette_curvature(double d1, double d2, double o1, double theta, double h = 1e-4) {
    const Spinor a = ground(d1, d2, o1, theta + 0.5 * h, 0.0);
    const Spinor b = ground(d1, d2, o1, theta + 0.5 * h, h);
    const Spinor c = ground(d1, d2, o1, theta - 0.5 * h, h);
    const Spinor d = ground(d1, d2, o1, theta - 0.5 * h, 0.0);
    return -std::arg(overlap(a, b) * overlap(b, c) * overlap(c, d) * overlap(d, a)) / (h * h);
}

// Loop phase from the solid angle under the loop: pi (1 - dz/|d|), in [0, 2 pi).
inline double solid_angle_phase(double d1, double d2, double o1, double theta) {
    const Vec3 d = bloch(d1, d2, o1, theta, 0.0);
    const double g = pi * (1.0 - d.z / length(d));
    return std::fmod(g, 2.0 * pi);
}

// Chern number as the flux through the cap between the poles of the
// d-surface: (cos alpha(0) - cos alpha(pi)) / 2. The removable point counts
// as a half.
inline double chern(double d1, double d2) {
    auto cos_alpha = [](double dz) { return dz > 0 ? 1.0 : (dz < 0 ? -1.0 : 0.0); };
    return 0.5 * (cos_alpha(d1 + d2) - cos_alpha(d2 - d1));
}

// Two-level unitary exp(-i H t) for static H = 1/2 d.sigma applied to (a, b),
// written out in components.
inline Spinor evolve_static(Vec3 d, Spinor s, double t) {
    const double n = length(d);
    const double c = std::cos(0.5 * n * t);
    const double sn = n > 0 ? std::sin(0.5 * n * t) / n : 0.5 * t;
    const cd i(0.0, 1.0);
    return {c * s.a - i * sn * (d.z * s.a + cd(d.x, -d.y) * s.b),
            c * s.b - i * sn * (cd(d.x, d.y) * s.a - d.z * s.b)};
}

}  // namespace oracle
