#include "doctest.h"

#include <cmath>
#include <random>

#include "shellvp/foliation.hpp"

using namespace shellvp;

namespace {

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

}  // namespace

TEST_CASE("kepler foliation")
{
    auto m = build_kepler(PolytropeParams{});
    double R = 1.5, L = 1.2;
    double E = m.psi(R, L);
    auto p = to_yz(m, R, {E, L});
    CHECK(p.z == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(std::sqrt(2.0) * std::pow(-E, 1.5) / PI).epsilon(1e-10));
    CHECK_THROWS_AS(to_yz(m, R, {E - 0.01, L}), GeometryError);
    // jacobian = -omega'/(2R^2)
    auto d = frequency_derivatives(m, {-0.3, 1.2});
    CHECK(std::abs(d.dL) < 1e-8);
    CHECK(jacobian(m, R, {-0.3, 1.2}) == doctest::Approx(-d.dE / (2 * R * R)).epsilon(1e-8));
    CHECK(L_R(m, 1.7) == doctest::Approx(1.7));
}

TEST_CASE("round trip and jacobian against finite differences")
{
    const auto& m = sc();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int n = 0; n < 12; ++n) {
        double R = m.Rmin + (m.Rmax - m.Rmin) * (0.1 + 0.8 * U(rng));
        double Ea = m.psi(R, m.params.L0);
        double E = Ea + (m.E0 - Ea) * (0.1 + 0.8 * U(rng));
        double Lhyp = zline_L(m, R, 0.0, E);
        double L = m.params.L0 + (Lhyp - m.params.L0) * (0.1 + 0.8 * U(rng));
        auto p = to_yz(m, R, {E, L});
        auto I = from_yz(m, R, p.y, p.z);
        CHECK(std::abs(I.E - E) < 1e-9);
        CHECK(std::abs(I.L - L) < 1e-9);
        // forward map finite differences
        double h = 1e-5;
        auto f = [&](double e, double l) { return to_yz(m, R, {e, l}); };
        auto pe = f(E + h, L), me = f(E - h, L), pl = f(E, L + h), ml = f(E, L - h);
        double yE = (pe.y - me.y) / (2 * h), zE = (pe.z - me.z) / (2 * h);
        double yL = (pl.y - ml.y) / (2 * h), zL = (pl.z - ml.z) / (2 * h);
        double det = yE * zL - yL * zE;
        double jac = jacobian(m, R, {E, L});
        CHECK(jac > 0);
        CHECK(det == doctest::Approx(jac).epsilon(1e-4));
    }
}

TEST_CASE("jacobian positivity on a 64x64 sweep")
{
    const auto& m = sc();
    int bad = 0;
    double jmin = 1e300;
    for (int a = 0; a < 64; ++a) {
        double R = m.Rmin + (m.Rmax - m.Rmin) * (a + 0.5) / 64;
        double Ea = m.psi(R, m.params.L0);
        for (int b = 0; b < 64; ++b) {
            double E = Ea + (m.E0 - Ea) * (b + 0.5) / 64;
            double L = 0.5 * (m.params.L0 + zline_L(m, R, 0.0, E));
            double j = jacobian(m, R, {E, L});
            jmin = std::min(jmin, j);
            bad += !(j > 0);
        }
    }
    MESSAGE("min jacobian " << jmin);
    CHECK(bad == 0);
}

TEST_CASE("|L - L_R| follows the square-root law")
{
    const auto& m = sc();
    double R = 1.4;
    double LR = L_R(m, R);
    // points on J_R approaching the trapping point (E_min^{L_R}, L_R)
    double emin = minimum_point(m, LR).Emin;
    std::vector<double> xs, ys;
    for (int k = 0; k < 12; ++k) {
        double gap = std::pow(10.0, -7 + 0.4 * k);
        // largest |L - L_R| with E = emin + gap and E >= Psi_L(R)
        auto f = [&](double L) { return emin + gap - m.psi(R, L); };
        double lo = LR, hi = LR + 1.0;
        for (int i = 0; i < 200; ++i) {
            double c = 0.5 * (lo + hi);
            (f(c) >= 0 ? lo : hi) = c;
        }
        double egap = emin + gap - minimum_point(m, lo).Emin;
        xs.push_back(std::log(egap));
        ys.push_back(std::log(lo - LR));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += sqr(xs[i] - mx);
    }
    CHECK(sxy / sxx == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("q vanishes on the vacuum boundary and z-lines end there")
{
    const auto& m = sc();
    double R = 1.8, z = 0.01;
    auto [lo, hi] = zline_energy_range(m, R, z);
    CHECK(zline_L(m, R, z, lo) == doctest::Approx(m.params.L0).epsilon(1e-12));
    CHECK(weight_q(m, R, {lo, zline_L(m, R, z, lo)}) == 0);
    CHECK(weight_q(m, R, {hi, zline_L(m, R, z, hi)}) == 0);
    double mid = 0.5 * (lo + hi);
    CHECK(weight_q(m, R, {mid, zline_L(m, R, z, mid)}) > 0);
    // q ~ (E0-E)^{mu-1} near E0 along the line
    double q1 = weight_q(m, R, {hi - 1e-3, zline_L(m, R, z, hi - 1e-3)});
    double q2 = weight_q(m, R, {hi - 5e-4, zline_L(m, R, z, hi - 5e-4)});
    CHECK(std::log(q1 / q2) / std::log(2.0) == doctest::Approx(m.params.mu - 1).epsilon(0.02));
}
