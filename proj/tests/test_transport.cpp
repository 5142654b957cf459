#include "doctest.h"

#include <cmath>

#include "shellvp/transport.hpp"

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

struct Setup {
    ShellGrid grid;
    ModeField f0;
    std::vector<double> omega;
};

const Setup& setup()
{
    static Setup s = [] {
        Setup s;
        s.grid = ShellGrid(sc(), {13, 49, 12, 3.0});
        auto cache = OrbitCache::build(sc(), s.grid.points(), 32);
        s.f0 = analyze(cache, make_initial_data("smooth", sc()).f, 8);
        for (const auto& nd : s.grid.nodes()) s.omega.push_back(nd.omega);
        return s;
    }();
    return s;
}

}  // namespace

TEST_CASE("pure transport: identity, modulus, periodicity")
{
    const auto& s = setup();
    auto f = evolve_pure_transport(s.f0, s.omega, 0.0);
    for (std::size_t k = 0; k < f.c.size(); ++k) CHECK(f.c[k] == s.f0.c[k]);
    auto g = evolve_pure_transport(s.f0, s.omega, 37.3);
    for (std::size_t k = 0; k < f.c.size(); ++k) CHECK(std::abs(std::abs(g.c[k]) - std::abs(s.f0.c[k])) < 1e-15);
    int node = s.grid.n_nodes() / 3;
    double T = s.grid.nodes()[node].T;
    auto h = evolve_pure_transport(s.f0, s.omega, 3 * T);
    for (int m = 1; m <= s.f0.M; ++m) CHECK(std::abs(h.at(node, m) - s.f0.at(node, m)) < 1e-12 * (1 + std::abs(s.f0.at(node, m))));
    CHECK_THROWS_AS(evolve_pure_transport(s.f0, s.omega, -1.0), DomainError);
}

TEST_CASE("pure transport: weighted norm conserved")
{
    const auto& s = setup();
    double n0 = transport_norm(s.grid, s.f0);
    CHECK(n0 > 0);
    for (double t : {1.0, 50.0, 400.0})
        CHECK(transport_norm(s.grid, evolve_pure_transport(s.f0, s.omega, t)) == doctest::Approx(n0).epsilon(1e-13));
}

TEST_CASE("force series: consistent with direct synthesis, zero for (E,L) data")
{
    const auto& s = setup();
    std::vector<double> times{0.0, 3.0, 17.5};
    auto fs = transport_force_series(s.grid, s.f0, times);
    REQUIRE(fs.force.size() == 3);
    for (std::size_t k = 0; k < times.size(); ++k) {
        auto F = s.grid.force(s.f0, times[k]);
        double mx = 0;
        for (std::size_t j = 0; j < F.size(); ++j) {
            CHECK(F[j] == fs.force[k][j]);
            mx = std::max(mx, std::abs(F[j]));
        }
        CHECK(fs.sup[k] == doctest::Approx(mx));
    }
    auto F0 = s.grid.static_force(s.f0);
    for (std::size_t j = 0; j < F0.size(); ++j) CHECK(F0[j] == doctest::Approx(fs.force[0][j]).epsilon(1e-12));
    // a short rotation is still resolved by the non-oscillatory column rule
    auto F1 = s.grid.static_force(evolve_pure_transport(s.f0, s.omega, 0.5));
    auto G1 = s.grid.force(s.f0, 0.5);
    double scale = 0;
    for (double v : G1) scale = std::max(scale, std::abs(v));
    for (std::size_t j = 0; j < F1.size(); ++j) CHECK(std::abs(F1[j] - G1[j]) < 1e-4 * scale);
    auto cache = OrbitCache::build(sc(), s.grid.points(), 32);
    auto el = analyze(cache, make_initial_data("el", sc()).f, 8);
    auto z = transport_force_series(s.grid, el, {0.0, 10.0});
    for (double v : z.sup) CHECK(v < 1e-14);
}

TEST_CASE("decay fit on synthetic traces")
{
    std::vector<double> t, a, b;
    for (double x = 0; x <= 260; x += 0.25) {
        t.push_back(x);
        a.push_back(3 * std::pow(1 + x, -2.0));
        b.push_back(std::pow(1 + x, -3.0) * (1.05 + std::cos(0.9 * x)));
    }
    DecayFitOptions o;
    auto fa = fit_decay_rate(t, a, o);
    CHECK(!fa.envelope);
    CHECK(fa.exponent == doctest::Approx(2.0).epsilon(1e-10));
    o.half_window = 4;
    auto fb = fit_decay_rate(t, b, o);
    CHECK(fb.envelope);
    CHECK(fb.exponent == doctest::Approx(3.0).epsilon(0.02));
    auto g = geometric_times(20, 200, 1.15);
    CHECK(g.front() == 20.0);
    CHECK(g.back() <= 200.0);
    CHECK(g.back() * 1.15 > 200.0);
    std::vector<double> neg(t.size(), -1.0);
    CHECK_THROWS_AS(fit_decay_rate(t, neg, {}), DomainError);
}

TEST_CASE("decay exponent grows with steady-state smoothness")
{
    TransportSetup st;
    st.grid = {17, 61, 12, 3.0};
    st.M_max = 8;
    st.n_theta = 32;
    PolytropeParams p;
    p.eta = 0.01;
    auto m1 = build_selfconsistent(p);
    p.mu = 4.5;
    p.nu = 3;
    auto m2 = build_selfconsistent(p);
    auto r1 = run_transport(m1, make_initial_data("smooth", m1), st);
    auto r2 = run_transport(m2, make_initial_data("smooth", m2), st);
    MESSAGE("exponents " << r1.fit.exponent << " " << r2.fit.exponent);
    CHECK(r1.predicted_K == 2.0);
    CHECK(r2.predicted_K == 3.0);
    CHECK(r2.fit.exponent > r1.fit.exponent);
    CHECK(std::abs(r1.norm_end - r1.norm0) <= 1e-13 * r1.norm0);
}
