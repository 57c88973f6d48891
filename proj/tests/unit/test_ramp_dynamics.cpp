#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ripple/error.hpp"
#include "ripple/ramp_dynamics.hpp"

using namespace ripple;
using doctest::Approx;

namespace {

DriveParams params(double d2, double o1) {
    DriveParams p;
    p.delta2 = d2;
    p.omega1 = o1;
    return p;
}

double distance(const QubitState& x, const QubitState& y) {
    return std::sqrt(std::norm(x.a - y.a) + std::norm(x.b - y.b));
}

QubitState to_state(const oracle::Spinor& s) { return {s.a, s.b}; }

// Fixed-step RK4 of i psi' = H(theta(t)) psi, independent of reference_evolve.
QubitState rk4(const RampProtocol& protocol, const DriveParams& base, QubitState psi, int substeps) {
    const double h = protocol.total_time / (static_cast<double>(protocol.steps) * substeps);
    auto f = [&](double t, const QubitState& s) {
        const oracle::Vec3 d = oracle::bloch(base.delta1, base.delta2, base.omega1, protocol.theta_at(t), protocol.phi);
        const oracle::Spinor hs{0.5 * (d.z * s.a + Complex(d.x, -d.y) * s.b),
                                0.5 * (Complex(d.x, d.y) * s.a - d.z * s.b)};
        const Complex mi(0.0, -1.0);
        return QubitState{mi * hs.a, mi * hs.b};
    };
    auto add = [](const QubitState& x, double c, const QubitState& y) {
        return QubitState{x.a + c * y.a, x.b + c * y.b};
    };
    const long n = static_cast<long>(protocol.steps) * substeps;
    for (long k = 0; k < n; ++k) {
        const double t = k * h;
        const QubitState k1 = f(t, psi);
        const QubitState k2 = f(t + 0.5 * h, add(psi, 0.5 * h, k1));
        const QubitState k3 = f(t + 0.5 * h, add(psi, 0.5 * h, k2));
        const QubitState k4 = f(t + h, add(psi, h, k3));
        psi.a += h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
        psi.b += h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    }
    return psi;
}

double dynamic_f_at(const DriveParams& base, double total_time, int steps, double theta) {
    const Trajectory traj = evolve_ramp(RampProtocol::linear(0.0, kPi, total_time, steps), base);
    return interpolate_curvature(extract_curvature_dynamic(traj), theta);
}

}  // namespace

TEST_CASE("step_propagator examples") {
    std::mt19937 rng(7);
    std::normal_distribution<double> n;
    const QubitState s = QubitState{Complex(n(rng), n(rng)), Complex(n(rng), n(rng))}.normalized();
    const Hamiltonian2 h = build_hamiltonian(params(0.3, 0.5).with_theta(1.0));
    const QubitState same = step_propagator(s, h, 0.0);
    CHECK(same.a == s.a);
    CHECK(same.b == s.b);

    const Hamiltonian2 diag{0.5, 0.0, 0.0, -0.5};
    const QubitState out = step_propagator({1.0, 0.0}, diag, kPi);
    CHECK(std::abs(out.a - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(out.b) < 1e-15);

    CHECK_THROWS_AS(step_propagator(s, h, -1.0), Error);
    CHECK(step_too_large(h, 10.0));
    CHECK_FALSE(step_too_large(h, 0.1));
}

TEST_CASE("step_propagator matches the closed-form static evolution") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const oracle::Vec3 d{u(rng), u(rng), u(rng)};
        const oracle::Spinor s{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
        const double t = 3.0 * (u(rng) + 1.0);
        const QubitState got = step_propagator(to_state(s), to_hamiltonian({d.x, d.y, d.z}), t);
        CHECK(distance(got, to_state(oracle::evolve_static(d, s, t))) <= 1e-13);
    }
}

TEST_CASE("midpoint stepping from a random state tracks fine RK4") {
    std::mt19937 rng(3);
    std::normal_distribution<double> n;
    const QubitState start = QubitState{Complex(n(rng), n(rng)), Complex(n(rng), n(rng))}.normalized();
    const DriveParams base = params(0.5, 0.5);
    auto midpoint_error = [&](double total_time, int steps) {
        const RampProtocol protocol = RampProtocol::linear(0.0, kPi, total_time, steps);
        QubitState psi = start;
        for (int k = 0; k < steps; ++k) {
            DriveParams p = base;
            p.theta = protocol.theta_at_fraction((k + 0.5) / steps);
            psi = step_propagator(psi, build_hamiltonian(p), protocol.dt());
        }
        return distance(psi, rk4(protocol, base, start, 10));
    };
    // The scheme is second order in dt, so 1e-8 needs a short ramp at 1e4 steps.
    CHECK(midpoint_error(5.0, 10000) <= 1e-8);
    const double coarse = midpoint_error(200.0, 10000);
    const double fine = midpoint_error(200.0, 20000);
    CHECK(coarse / fine == Approx(4.0).epsilon(0.05));
}

TEST_CASE("ramp protocol shapes") {
    const RampProtocol lin = RampProtocol::linear(0.2, 2.0, 100.0, 1000);
    CHECK(lin.velocity() == Approx(0.018));
    CHECK(lin.theta_at(50.0) == Approx(1.1));
    CHECK(lin.dt() == Approx(0.1));

    RampProtocol smooth = RampProtocol::linear(0.0, kPi, 100.0, 1000);
    smooth.smoothing = Smoothing::SinSquaredEdges;
    smooth.edge_fraction = 0.2;
    CHECK(smooth.theta_at_fraction(0.0) == 0.0);
    CHECK(smooth.theta_at_fraction(1.0) == Approx(kPi));
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = smooth.theta_at_fraction(i / 1000.0);
        CHECK(t >= prev);
        prev = t;
    }
    // plateau slope
    const double slope = (smooth.theta_at(60.0) - smooth.theta_at(40.0)) / 20.0;
    CHECK(slope == Approx(smooth.velocity()).epsilon(1e-12));
    // starts with zero velocity
    CHECK(smooth.theta_at(0.01) < 1e-4 * smooth.velocity());

    RampProtocol bad = lin;
    bad.steps = 99;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = lin;
    bad.theta_end = 3.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = smooth;
    bad.edge_fraction = 0.6;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("evolve_ramp trajectory invariants") {
    const RampProtocol protocol = RampProtocol::linear(0.0, kPi, 200.0, 2000);
    const Trajectory traj = evolve_ramp(protocol, params(0.5, 0.5));
    REQUIRE(traj.samples.size() == 2001);
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.final().t == Approx(200.0));
    CHECK(traj.final().theta == Approx(kPi));
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        CHECK(traj.samples[k].t > traj.samples[k - 1].t);
        CHECK(traj.samples[k].t - traj.samples[k - 1].t == Approx(0.1).epsilon(1e-9));
        CHECK(std::abs(traj.samples[k].state.norm() - 1.0) <= 1e-10);
        CHECK(traj.samples[k].sigma_y == Approx(expect_sigma_y(traj.samples[k].state)));
    }
    CHECK_FALSE(traj.step_too_large);
    // starts in the ground state of H(0)
    CHECK(std::abs(traj.samples.front().state.b) == Approx(1.0));
}

TEST_CASE("evolve_ramp examples") {
    const Trajectory slow = evolve_ramp(RampProtocol{}, params(0.0, 0.5));
    CHECK(final_ground_population(slow) >= 0.99);

    const RampProtocol sudden = RampProtocol::linear(0.0, kPi, 0.0, 100);
    const Trajectory quench = evolve_ramp(sudden, params(0.0, 0.5));
    CHECK(distance(quench.final().state, quench.samples.front().state) <= 1e-6);

    const RampProtocol frozen = RampProtocol::linear(1.0, 1.0, 500.0, 5000);
    const Trajectory still = evolve_ramp(frozen, params(0.3, 0.5));
    for (const auto& s : still.samples) CHECK(std::abs(s.sigma_y - still.samples.front().sigma_y) <= 1e-10);

    DriveParams degenerate = params(-1.0, 0.5);
    try {
        evolve_ramp(RampProtocol{}, degenerate);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateStart);
    }
}

TEST_CASE("unitarity over 1e6 steps") {
    const Trajectory traj = evolve_ramp(RampProtocol::linear(0.0, kPi, 1e5, 1000000), params(0.5, 0.5));
    double drift = 0.0;
    for (const auto& s : traj.samples) drift = std::max(drift, std::abs(s.state.norm() - 1.0));
    CHECK(drift <= 1e-10);
}

TEST_CASE("adiabatic theorem: ground population grows with ramp time") {
    for (double r : {0.0, 0.5, 2.0}) {
        double prev = 0.0;
        for (double t : {250.0, 500.0, 1000.0, 2000.0, 4000.0}) {
            const Trajectory traj = evolve_ramp(RampProtocol::linear(0.0, kPi, t, static_cast<int>(t * 10)), params(r, 0.5));
            const double pop = final_ground_population(traj);
            CHECK(pop >= prev - 1e-3);
            prev = pop;
        }
        CHECK(prev == Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("reference_evolve examples") {
    const RampProtocol protocol;
    for (double r : {0.0, 1.0, 2.0}) {
        const Trajectory a = evolve_ramp(protocol, params(r, 0.5));
        const Trajectory b = reference_evolve(protocol, params(r, 0.5));
        REQUIRE(a.samples.size() == b.samples.size());
        CHECK(std::abs(fidelity(superposition_target(), a.final().state) -
                       fidelity(superposition_target(), b.final().state)) <= 1e-6);
    }

    const Trajectory long_run = reference_evolve(RampProtocol::linear(0.0, kPi, 1e4, 100000), params(0.5, 0.5), 1);
    double drift = 0.0;
    for (const auto& s : long_run.samples) drift = std::max(drift, std::abs(s.state.norm() - 1.0));
    CHECK(drift < 1e-8);

    // frozen theta: only the dynamical phase e^{+i |d| t / 2} on the ground state
    const DriveParams p = params(0.3, 0.5);
    const Trajectory still = reference_evolve(RampProtocol::linear(1.2, 1.2, 300.0, 3000), p);
    const double g = gap(p.with_theta(1.2));
    const QubitState& s0 = still.samples.front().state;
    const Complex phase = std::polar(1.0, 0.5 * g * 300.0);
    CHECK(distance(still.final().state, QubitState{phase * s0.a, phase * s0.b}) <= 1e-9);
}

TEST_CASE("extract_curvature_dynamic examples") {
    const DriveParams sphere = params(0.0, 1.0);
    const Trajectory traj = evolve_ramp(RampProtocol::linear(0.0, kPi, 2000.0, 20000), sphere);
    const std::vector<CurvatureSample> f = extract_curvature_dynamic(traj);
    REQUIRE(f.size() == traj.samples.size());
    CHECK(f[0].method == CurvatureMethod::Dynamic);
    CHECK(std::abs(interpolate_curvature(f, kPi / 2) - 0.5) <= 0.05);
    CHECK(std::abs(f.front().value) <= 1e-3);
    CHECK(std::abs(interpolate_curvature(f, 0.01)) <= 0.01);

    ExtractionOptions flipped;
    flipped.flip_sign = true;
    CHECK(interpolate_curvature(extract_curvature_dynamic(traj, flipped), kPi / 2) ==
          Approx(-interpolate_curvature(f, kPi / 2)));

    const std::vector<double> force = windowed_force(traj);
    CHECK(force[force.size() / 2] == Approx(-traj.protocol.velocity() * 0.5).epsilon(1e-2));
}

TEST_CASE("readout error falls as the square of the ramp velocity") {
    // Small steps so the time-discretization floor stays far below the
    // velocity-dependent error. <sigma_y> is odd in theta_t for a real
    // Hamiltonian, so the leading error of F is O(theta_t^2).
    const DriveParams sphere = params(0.0, 1.0);
    const double e1 = std::abs(dynamic_f_at(sphere, 100.0, 20000, kPi / 2) - 0.5);
    const double e2 = std::abs(dynamic_f_at(sphere, 200.0, 40000, kPi / 2) - 0.5);
    const double ratio = e1 / e2;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("response linearity at theta = pi / 2") {
    const DriveParams sphere = params(0.0, 1.0);
    std::vector<double> f;
    for (double t : {2000.0, 4000.0, 8000.0}) f.push_back(dynamic_f_at(sphere, t, static_cast<int>(t * 10), kPi / 2));
    for (double v : f) CHECK(v == Approx(f.back()).epsilon(0.10));
    CHECK(f.back() == Approx(0.5).epsilon(0.05));
}

TEST_CASE("extraction preconditions") {
    const Trajectory frozen = evolve_ramp(RampProtocol::linear(1.0, 1.0, 100.0, 1000), params(0.0, 1.0));
    try {
        extract_curvature_dynamic(frozen);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroVelocity);
    }
    RampProtocol smooth = RampProtocol::linear(0.0, kPi, 100.0, 1000);
    smooth.smoothing = Smoothing::SinSquaredEdges;
    CHECK_THROWS_AS(extract_curvature_dynamic(evolve_ramp(smooth, params(0.0, 1.0))), Error);
}

TEST_CASE("dynamic chern number") {
    for (double r : {0.0, 0.5, 1.5, 2.0}) {
        const ChernResult c = dynamic_chern_number(params(0.0, 0.5), r, RampProtocol{});
        CHECK(std::abs(c.chern - oracle::chern(1.0, r)) <= 0.1);
        CHECK(c.d2_ratio == r);
    }
    try {
        dynamic_chern_number(params(0.0, 0.5), 1.0, RampProtocol{});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NearDegeneracy);
    }
}

TEST_CASE("fidelity experiment") {
    CHECK(superposition_target().norm() == Approx(1.0));
    CHECK(fidelity(superposition_target(), superposition_target()) == Approx(1.0));
    const DriveParams base = params(0.0, 0.5);
    CHECK(std::abs(fidelity_experiment(base, 0.0, RampProtocol{}) - 0.5) < 0.05);
    CHECK(std::abs(fidelity_experiment(base, 2.0, RampProtocol{}) - 0.5) < 0.05);
    const double at_transition = fidelity_experiment(base, 1.0, RampProtocol{});
    CHECK(at_transition >= 0.0);
    CHECK(at_transition <= 1.0);
    CHECK(std::abs(at_transition - 0.5) >= 0.2);
    CHECK_THROWS_AS(fidelity_experiment(base, 0.0, RampProtocol::linear(0.0, 1.0, 100.0, 1000)), Error);
}
