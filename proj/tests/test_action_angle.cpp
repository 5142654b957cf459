#include "doctest.h"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <random>

#include "shellvp/action_angle.hpp"
#include "shellvp/quadrature.hpp"

using namespace shellvp;

namespace {

const PolytropeModel& kepler()
{
    static PolytropeModel m = build_kepler(PolytropeParams{});
    return m;
}

const PolytropeModel& sc()
{
    static PolytropeModel m = [] {
        PolytropeParams p;
        p.eta = 0.01;
        SelfConsistentOptions o;
        o.n_radial = 1024;
        return build_selfconsistent(p, o);
    }();
    return m;
}

double T0(double E) { return PI / std::sqrt(2.0) * std::pow(-E, -1.5); }

}  // namespace

TEST_CASE("kepler period, turning points")
{
    const auto& m = kepler();
    CHECK(period(m, {-0.25, 1.0}) == doctest::Approx(8 * PI / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(period(m, {-0.4, 1.0}) == doctest::Approx(T0(-0.4)).epsilon(1e-10));
    CHECK(period(m, {-0.25, 1.7}) == doctest::Approx(T0(-0.25)).epsilon(1e-10));
    auto tp = turning_points(m, {-0.25, 1.0});
    CHECK(tp.rm == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-13));
    CHECK(tp.rp == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-13));
    // near trapping both roots approach r_L
    auto g = orbit_geometry(m, {-0.5 + 1e-12, 1.0});
    CHECK(g.harmonic);
    CHECK(std::abs(g.rm - 1) < 1e-5);
    CHECK(std::abs(g.rp - 1) < 1e-5);
    CHECK(g.T == doctest::Approx(2 * PI));
    CHECK_THROWS_AS(turning_points(m, {-0.6, 1.0}), GeometryError);
}

TEST_CASE("self-consistent turning points against bisection")
{
    const auto& m = sc();
    double L = 1.0, E = -0.3;
    auto tp = turning_points(m, {E, L});
    auto bisect = [&](double a, double b) {
        double fa = m.psi(a, L) - E;
        for (int k = 0; k < 200; ++k) {
            double c = 0.5 * (a + b), fc = m.psi(c, L) - E;
            if ((fc > 0) == (fa > 0)) {
                a = c;
                fa = fc;
            } else {
                b = c;
            }
        }
        return 0.5 * (a + b);
    };
    double rL = minimum_point(m, L).rL;
    CHECK(std::abs(tp.rm - bisect(0.1, rL)) < 1e-10);
    CHECK(std::abs(tp.rp - bisect(rL, 10.0)) < 1e-10);
}

TEST_CASE("area: harmonic limit, derivative equals period, kepler direct quadrature")
{
    const auto& m = sc();
    double L = 1.3;
    auto mp = minimum_point(m, L);
    double gap = 1e-6;
    double A = area(m, {mp.Emin + gap, L});
    CHECK(A / gap == doctest::Approx(TWO_PI / std::sqrt(mp.alpha)).epsilon(1e-4));
    for (double E : {-0.28, -0.3, -0.36}) {
        double h = 1e-4;
        double dA = (area(m, {E + h, L}) - area(m, {E - h, L})) / (2 * h);
        CHECK(dA == doctest::Approx(period(m, {E, L})).epsilon(1e-6));
    }
    // kepler: closed-form integrand, plain Gauss-Legendre after r = c - d cos t
    const auto& k = kepler();
    double E = -0.3;
    L = 1.2;
    auto tp = turning_points(k, {E, L});
    auto gl = gauss_legendre(200, 0.0, PI);
    double c = 0.5 * (tp.rm + tp.rp), d = 0.5 * (tp.rp - tp.rm), s = 0;
    for (int i = 0; i < gl.size(); ++i) {
        double r = c - d * std::cos(gl.x[i]);
        double v = 2 * (E + 1.0 / r - L / (2 * r * r));
        s += gl.w[i] * std::sqrt(std::max(v, 0.0)) * d * std::sin(gl.x[i]);
    }
    CHECK(area(k, {E, L}) == doctest::Approx(2 * s).epsilon(1e-9));
}

TEST_CASE("angle: symmetry, turning points, ODE clock")
{
    const auto& m = kepler();
    OrbitPoint I{-0.3, 1.2};
    auto tp = turning_points(m, I);
    CHECK(angle(m, tp.rp, 0.0, I.L) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(angle(m, tp.rm, 0.0, I.L) == doctest::Approx(0.0));
    double r = 1.5;
    double w = std::sqrt(2 * (I.E - m.psi(r, I.L)));
    double th = angle(m, r, w, I.L);
    CHECK(angle(m, r, -w, I.L) == doctest::Approx(1 - th).epsilon(1e-14));
    CHECK_THROWS_AS(angle(m, -1.0, 0.0, 1.0), DomainError);

    // independent clock: integrate the ODE in (r, w) with RK4 at tiny steps until r crosses 1.5
    auto g = orbit_geometry(m, I);
    double x = g.rm, v = 0, t = 0, dt = g.T / 400000;
    auto acc = [&](double rr) { return -m.dpsi(rr, I.L); };
    while (true) {
        double k1x = v, k1v = acc(x);
        double k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x);
        double k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x);
        double k4x = v + dt * k3v, k4v = acc(x + dt * k3x);
        double xn = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
        double vn = v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        if (xn >= r) {
            double frac = (r - x) / (xn - x);
            t += frac * dt;
            break;
        }
        x = xn;
        v = vn;
        t += dt;
    }
    CHECK(std::abs(t / g.T - th) < 1e-7);
}

TEST_CASE("orbit position: round trip, energy conservation, additivity")
{
    for (const PolytropeModel* mp : {&kepler(), &sc()}) {
        const auto& m = *mp;
        OrbitPoint I{-0.3, 1.2};
        auto g = orbit_geometry(m, I);
        auto p0 = orbit_position(m, 0.0, I);
        CHECK(p0.first == g.rm);
        auto ph = orbit_position(m, 0.5, I);
        CHECK(std::abs(ph.first - g.rp) < 1e-9);
        CHECK(std::abs(ph.second) < 1e-9);
        for (double th : {0.1, 0.37, 0.5, 0.73, 0.99}) {
            auto [r, w] = orbit_position(m, th, g);
            CHECK(std::abs(0.5 * w * w + m.psi(r, I.L) - I.E) < 1e-9);
            CHECK(std::abs(angle(m, r, w, I.L) - th) < 1e-7);
        }
        std::vector<double> rs(32), ws(32);
        sample_orbit(m, g, 32, rs.data(), ws.data());
        for (int k : {3, 16, 29}) {
            auto [r, w] = orbit_position(m, k / 32.0, g);
            CHECK(std::abs(rs[k] - r) < 1e-10);
            CHECK(std::abs(ws[k] - w) < 1e-10);
        }
    }
    // flow for time s advances theta by s*omega
    const auto& m = sc();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int n = 0; n < 10; ++n) {
        double L = 1.05 + 0.8 * U(rng);
        double emin = minimum_point(m, L).Emin;
        double E = emin + (m.E0 - emin) * (0.05 + 0.9 * U(rng));
        auto g = orbit_geometry(m, {E, L});
        double th0 = U(rng), s = 30 * U(rng);
        auto a = orbit_position(m, th0, g);
        auto b = orbit_position(m, th0 + s / g.T, g);
        double dth = angle(m, b.first, b.second, L) - angle(m, a.first, a.second, L);
        double expect = s / g.T;
        double diff = dth - expect;
        diff -= std::round(diff);
        CHECK(std::abs(diff) < 1e-6);
    }
}

TEST_CASE("chart: frequency bounds, monotonicity, interpolation")
{
    const auto& m = kepler();
    ActionChart ch(m, {65, 33});
    double wmin = std::sqrt(2.0) * std::pow(0.25, 1.5) / PI;
    double wmax = std::sqrt(2.0) * std::pow(0.5, 1.5) / PI;
    CHECK(ch.omega_min() == doctest::Approx(wmin).epsilon(1e-10));
    CHECK(ch.omega_max() == doctest::Approx(wmax).epsilon(1e-10));
    CHECK(ch.lambda_min() == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-10));
    CHECK(ch.omega_monotone());
    CHECK(ch.c0() > 0);
    CHECK(ch.interp_T(-0.33, 1.4) == doctest::Approx(T0(-0.33)).epsilon(1e-6));

    const auto& s = sc();
    ActionChart cs(s, {65, 33});
    CHECK(cs.omega_monotone());
    MESSAGE("c0 = " << cs.c0() << ", omega range " << cs.omega_min() << " " << cs.omega_max());
    CHECK(cs.interp_omega(-0.3, 1.2) == doctest::Approx(frequency(s, {-0.3, 1.2})).epsilon(1e-6));
}

TEST_CASE("frequency derivatives")
{
    const auto& m = kepler();
    auto d = frequency_derivatives(m, {-0.3, 1.2});
    // omega = sqrt2 (-E)^{3/2} / pi
    CHECK(d.dE == doctest::Approx(-1.5 * std::sqrt(2.0) * std::sqrt(0.3) / PI).epsilon(1e-7));
    CHECK(std::abs(d.dL) < 1e-8);
}
