#include "doctest.h"

#include <cmath>

#include "shellvp/initial_data.hpp"
#include "shellvp/linearized.hpp"
#include "shellvp/transport.hpp"

using namespace shellvp;

namespace {

PolytropeModel model(double eta)
{
    PolytropeParams p;
    p.eta = eta;
    SelfConsistentOptions o;
    o.n_radial = 1024;
    return build_selfconsistent(p, o);
}

const PolytropeModel& sc()
{
    static PolytropeModel m = model(0.01);
    return m;
}

LinearizedSetup small(Coupling c = Coupling::filon)
{
    LinearizedSetup s;
    s.grid = {13, 49, 12, 3.0};
    s.M_max = 4;
    s.coupling = c;
    return s;
}

double max_force_diff(const RunOutput& a, const ForceSeries& b)
{
    double d = 0;
    for (std::size_t k = 0; k < a.force.size(); ++k)
        for (std::size_t j = 0; j < a.radii.size(); ++j) d = std::max(d, std::abs(a.force[k][j] - b.force[k][j]));
    return d;
}

}  // namespace

TEST_CASE("linearized: eta = 0 reproduces pure transport")
{
    auto m0 = model(0.0);
    LinearizedSystem sys(m0, small());
    auto f0 = sys.project(make_initial_data("smooth", m0).f);
    auto s = initial_state(sys, f0);
    double dt = sys.dt_default();
    for (int k = 0; k < 25; ++k) s = step(sys, s, dt);
    std::vector<double> om;
    for (int i = 0; i < sys.n_nodes(); ++i) om.push_back(sys.omega(i));
    auto pure = evolve_pure_transport(f0, om, s.t);
    auto f = field_of(sys, s);
    double e = 0;
    for (std::size_t k = 0; k < f.c.size(); ++k) e = std::max(e, std::abs(f.c[k] - pure.c[k]));
    CHECK(e < 1e-14);
}

TEST_CASE("linearized: rhs structure")
{
    LinearizedSystem sys(sc(), small());
    auto f0 = sys.project(make_initial_data("odd", sc()).f);
    auto d = sys.rhs(f0);
    auto U = sys.potential_modes(f0);
    for (int i = 0; i < sys.n_nodes(); i += 37)
        for (int mm = 1; mm <= sys.M(); ++mm) {
            cplx expect = cplx(0, -TWO_PI * mm * sys.omega(i)) * (f0.at(i, mm) + sys.eta() * U.at(i, mm));
            CHECK(std::abs(d.at(i, mm) - expect) <= 1e-15 * (1 + std::abs(expect)));
            CHECK(d.get(i, -mm) == std::conj(d.at(i, mm)));
        }
    // synthesized samples carry no orbit average
    auto s = sys.synthesize(f0);
    int n = sys.setup().n_theta;
    double worst = 0;
    for (int i = 0; i < sys.n_nodes(); ++i) {
        double a = 0;
        for (int k = 0; k < n; ++k) a += s[i * n + k];
        worst = std::max(worst, std::abs(a / n));
    }
    CHECK(worst < 1e-15);
}

TEST_CASE("linearized: filon and kernel potentials agree")
{
    LinearizedSystem a(sc(), small(Coupling::filon));
    LinearizedSystem b(sc(), small(Coupling::kernel));
    auto f0 = a.project(make_initial_data("smooth", sc()).f);
    auto Ua = a.potential_modes(f0);
    auto Ub = b.potential_modes(f0);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < Ua.c.size(); ++k) {
        num = std::max(num, std::abs(Ua.c[k] - Ub.c[k]));
        den = std::max(den, std::abs(Ub.c[k]));
    }
    MESSAGE("potential mismatch " << num / den);
    CHECK(den > 0);
    CHECK(num < 0.02 * den);
    // the kernel form is exactly symmetric: <g, U_f> = <f, U_g>
    auto g0 = b.project(make_initial_data("odd", sc()).f);
    auto sf = b.synthesize(f0), sg = b.synthesize(g0);
    auto uf = b.potential_samples(f0), ug = b.potential_samples(g0);
    int n = b.setup().n_theta;
    double x = 0, y = 0;
    for (std::size_t j = 0; j < sf.size(); ++j) {
        x += b.weight(static_cast<int>(j / n)) * sg[j] * uf[j];
        y += b.weight(static_cast<int>(j / n)) * sf[j] * ug[j];
    }
    CHECK(x == doctest::Approx(y).epsilon(1e-12));
    CHECK(b.antonov_norm(f0) < b.weighted_norm(f0));
    CHECK(b.antonov_norm(f0) > 0.9 * b.weighted_norm(f0));
}

TEST_CASE("linearized: conservation over a short run")
{
    for (auto c : {Coupling::filon, Coupling::kernel}) {
        LinearizedSystem sys(sc(), small(c));
        auto f0 = sys.project(make_initial_data("smooth", sc()).f);
        RunOptions o;
        o.t_end = 30;
        auto r = run(sys, f0, o);
        MESSAGE("drift " << r.antonov_drift());
        CHECK(r.antonov_drift() < 1e-7);
        for (double z : r.zero_mode) CHECK(z == 0.0);
        for (double mval : r.mass) CHECK(std::abs(mval) < 1e-10 * std::sqrt(r.antonov.front()));
        CHECK(r.force_times.size() == r.force.size());
    }
}

TEST_CASE("linearized: stability limit")
{
    LinearizedSystem sys(sc(), small());
    auto f0 = sys.project(make_initial_data("smooth", sc()).f);
    CHECK(sys.dt_default() < sys.dt_limit());
    CHECK_THROWS_AS(step(sys, initial_state(sys, f0), 1.01 * sys.dt_limit()), ConfigError);
    RunOptions o;
    o.t_end = 10;
    o.dt = 2 * sys.dt_limit();
    CHECK_THROWS_AS(run(sys, f0, o), ConfigError);
}

TEST_CASE("linearized: force deviation from pure transport is linear in eta")
{
    std::vector<double> d;
    for (double eta : {0.01, 0.005}) {
        auto m = model(eta);
        LinearizedSystem sys(m, small());
        auto f0 = sys.project(make_initial_data("smooth", m).f);
        RunOptions o;
        o.t_end = 12;
        auto r = run(sys, f0, o);
        d.push_back(max_force_diff(r, transport_force_series(sys.grid(), f0, r.force_times)));
    }
    MESSAGE("deviation ratio " << d[0] / d[1]);
    CHECK(d[0] / d[1] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("spectral gap check on synthetic tones")
{
    std::vector<double> t, hi, lo;
    for (int k = 0; k <= 800; ++k) {
        t.push_back(0.25 * k);
        hi.push_back(std::cos(0.5 * t.back()) + 0.3 * std::sin(1.7 * t.back()));
        lo.push_back(std::cos(0.1 * t.back()));
    }
    double lmin = std::sqrt(2.0) / 4;
    auto a = spectral_gap_check(t, hi, lmin);
    auto b = spectral_gap_check(t, lo, lmin);
    CHECK(a.fraction < 1e-4);
    CHECK(b.fraction > 0.99);
    CHECK(a.cut == doctest::Approx(0.9 * lmin));
}

TEST_CASE("scattering profile needs both snapshots")
{
    LinearizedSystem sys(sc(), small());
    auto f0 = sys.project(make_initial_data("smooth", sc()).f);
    RunOptions o;
    o.t_end = 8;
    o.snapshot_times = {2, 4, 8};
    auto r = run(sys, f0, o);
    CHECK(r.snapshots.size() == 3);
    auto p = scattering_profile(sys, r, {2, 4});
    CHECK(p.size() == 2);
    CHECK(p[0] > 0);
    CHECK_THROWS_AS(scattering_profile(sys, r, {3}), DomainError);
}
