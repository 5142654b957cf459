#include "doctest.h"

#include <cmath>

#include "shellvp/initial_data.hpp"
#include "shellvp/resolvent.hpp"
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

ResolventGridSpec small()
{
    ResolventGridSpec s;
    s.n_radial = 9;
    s.n_z = 8;
    s.n_y = 37;
    s.M_max = 4;
    return s;
}

double sup(const std::vector<cplx>& v)
{
    double s = 0;
    for (auto& x : v) s = std::max(s, std::abs(x));
    return s;
}

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

}  // namespace

TEST_CASE("plemelj: 1D model against the analytic Hilbert transform")
{
    // independent principal value by subtraction and Gauss-Legendre
    auto g = [](double y) { return 1 / (1 + y * y); };
    for (double x : {0.0, 0.3, 1.0, -2.0}) {
        double Y = 400;
        auto gl = gauss_legendre(400, 0.0, 1.0);
        double pv = 0;
        for (int k = 0; k < gl.size(); ++k) {
            // y = x +- s, s = Y u^2
            double u = gl.x[k], s = Y * u * u, ds = 2 * Y * u * gl.w[k];
            pv += (g(x - s) - g(x + s)) / s * ds;
        }
        pv /= PI;
        CHECK(pv == doctest::Approx(x / (1 + x * x)).epsilon(1e-5));
        auto a = plemelj_model_check(x, 1e-3), b = plemelj_model_check(x, 5e-4);
        CHECK(std::abs(a.limit.imag() - 0.5 * pv) < 1e-5);
        CHECK(a.error <= 1e-3);
        CHECK(a.error / b.error == doctest::Approx(2.0).epsilon(0.25));
    }
}

TEST_CASE("plemelj: jump identity for constant data")
{
    // int [1/(y - s+) - 1/(y - s-)] dy -> 2 pi i for s inside the interval
    std::vector<double> y;
    for (int k = 0; k <= 300; ++k) y.push_back(-1 + 2.0 * k / 300);
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        auto wp = plemelj_log_weights(y, cplx(0.1, eps));
        auto wm = plemelj_log_weights(y, cplx(0.1, -eps));
        cplx s = 0;
        for (std::size_t k = 0; k < y.size(); ++k) s += wp[k] - wm[k];
        double err = std::abs(s - cplx(0, TWO_PI));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("resolvent grid and near-resonant set")
{
    const auto& m = sc();
    ResolventGrid g(m, small());
    CHECK(g.omega_min() > 0);
    CHECK(g.omega_max() > g.omega_min());
    for (int j = 0; j < g.radial().size(); ++j) {
        auto [l0, l1] = g.shell_lines(j);
        for (int l = l0; l < l1; ++l) {
            auto& ln = g.lines()[l];
            for (int k = ln.n0 + 1; k < ln.n1; ++k) CHECK(g.nodes()[k].y >= g.nodes()[k - 1].y);
        }
    }
    double lmin = TWO_PI * g.omega_min();
    double mu = default_mu_tilde(g.omega_min(), g.omega_max());
    CHECK(near_resonant_set(g.omega_min(), g.omega_max(), 0.5 * lmin, mu, 8).empty());
    auto r = near_resonant_set(g.omega_min(), g.omega_max(), 1.01 * lmin, mu, 8);
    CHECK(!r.empty());
    for (int k : r) CHECK(std::abs(k) == 1);
    CHECK(near_resonant_set(g.omega_min(), g.omega_max(), 2 * TWO_PI * 8 * g.omega_max(), mu, 8).empty());
}

TEST_CASE("solve_F: structure and symmetries")
{
    const auto& m = sc();
    ResolventGrid g(m, small());
    auto f0 = g.project(make_initial_data("smooth", m).f);
    double lam = 1.3 * TWO_PI * g.omega_min();

    auto a = solve_F(g, f0, {lam, 1e-2, 1});
    CHECK(a.contraction < 0.2);
    CHECK(std::abs(a.U.back()) == 0.0);
    CHECK(sup(a.U) > 0);

    // U^sign(-lambda) = conj U^sign(lambda)
    auto b = solve_F(g, f0, {-lam, 1e-2, 1});
    double e = 0;
    for (std::size_t k = 0; k < a.U.size(); ++k) e = std::max(e, std::abs(b.U[k] - std::conj(a.U[k])));
    CHECK(e < 1e-10 * sup(a.U));

    // coupling vanishes at eta = 0
    auto m0 = model(0.0);
    ResolventGrid g0(m0, small());
    auto z = solve_F(g0, g0.project(make_initial_data("smooth", m0).f), {lam, 1e-2, 1});
    CHECK(z.iterations <= 2);
    CHECK(sup(z.force_K) == 0.0);

    // the coupling scales with eta
    auto m1 = model(0.005);
    ResolventGrid g1(m1, small());
    auto h = solve_F(g1, g1.project(make_initial_data("smooth", m1).f), {lam, 1e-2, 1});
    double ratio = a.op_norm / h.op_norm;
    MESSAGE("op norm " << a.op_norm << " ratio " << ratio);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("solve_F: gap frequencies are regular as eps -> 0")
{
    const auto& m = sc();
    ResolventGrid g(m, small());
    auto f0 = g.project(make_initial_data("smooth", m).f);
    double lam = 0.5 * TWO_PI * g.omega_min();
    auto a = solve_F(g, f0, {lam, 1e-2, 1});
    auto b = solve_F(g, f0, {lam, 5e-3, 1});
    CHECK(sup_diff(a.U, b.U) < 0.05 * sup(b.U));
    // no resonance: the jump across the axis closes linearly in eps
    double j1 = sup_diff(a.U, solve_F(g, f0, {lam, 1e-2, -1}).U);
    double j2 = sup_diff(b.U, solve_F(g, f0, {lam, 5e-3, -1}).U);
    MESSAGE("jump " << j1 << " " << j2);
    CHECK(j1 / j2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("stone: source part reproduces pure transport")
{
    const auto& m = sc();
    auto spec = small();
    ResolventGrid g(m, spec);
    auto d = make_initial_data("smooth", m);
    auto f0 = g.project(d.f);
    std::vector<double> ts{0, 3, 8};
    StoneOptions so;
    so.eps_schedule = {8e-2, 4e-2};
    auto st = stone_reconstruct(g, f0, ts, so);

    ShellGrid sg(m, {spec.n_radial, 97, 24, 3.0});
    auto h = analyze(OrbitCache::build(m, sg.points(), 4 * spec.M_max), d.f, spec.M_max);
    auto pt = transport_force_series(sg, h, ts);
    for (std::size_t a = 0; a < ts.size(); ++a) {
        double e = 0, s = 0, c = 0;
        for (std::size_t j = 0; j < st.radii.size(); ++j) {
            e = std::max(e, std::abs(pt.force[a][j] - st.source[a][j]));
            s = std::max(s, std::abs(pt.force[a][j]));
            c = std::max(c, std::abs(st.coupling[a][j]));
        }
        MESSAGE("t " << ts[a] << " rel " << e / s << " coupling/sup " << c / s);
        CHECK(e < 0.02 * s);
        CHECK(c < 1e-2 * s);
    }
}
