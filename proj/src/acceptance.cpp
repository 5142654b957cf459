#include "shellvp/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include "shellvp/action_angle.hpp"
#include "shellvp/initial_data.hpp"
#include "shellvp/linearized.hpp"
#include "shellvp/resolvent.hpp"
#include "shellvp/transport.hpp"

namespace shellvp {

namespace {

std::string fmt(double v, int prec = 4)
{
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

struct Context {
    std::uint64_t seed = 1;

    const PolytropeModel& model(double mu, double nu, double eta)
    {
        for (auto& m : models)
            if (m->params.mu == mu && m->params.nu == nu && m->params.eta == eta) return *m;
        PolytropeParams p;
        p.mu = mu;
        p.nu = nu;
        p.eta = eta;
        models.push_back(std::make_unique<PolytropeModel>(build_selfconsistent(p)));
        return *models.back();
    }

    // eta = 0.01, (3.5, 2), smooth data, t in [0, 200]
    struct Evolution {
        std::unique_ptr<LinearizedSystem> sys;
        ModeField f0;
        RunOutput out;
    };
    const Evolution& evolution()
    {
        if (evo.sys) return evo;
        const auto& m = model(3.5, 2, 0.01);
        LinearizedSetup s;
        s.grid = {13, 49, 12, 3.0};
        s.M_max = 8;
        evo.sys = std::make_unique<LinearizedSystem>(m, s);
        evo.f0 = evo.sys->project(make_initial_data("smooth", m).f);
        RunOptions o;
        o.t_end = 200;
        o.dt = 1.0 / std::ceil(1.0 / evo.sys->dt_default());
        o.force_every = o.dt;
        evo.out = run(*evo.sys, evo.f0, o);
        return evo;
    }

    std::vector<std::unique_ptr<PolytropeModel>> models;
    Evolution evo;
};

double max_abs(const std::vector<double>& v)
{
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// 1. Kepler period, turning points and circular radius against closed forms
CriterionResult kepler_analytics(Context& ctx)
{
    PolytropeParams p;
    auto m = build_kepler(p);
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    double eT = 0, eR = 0, eL = 0;
    for (int k = 0; k < 20; ++k) {
        double L = p.L0 + u(rng) * 1.0;
        double Emin = -p.M * p.M / (2 * L);
        double E = Emin + u(rng) * (p.kappa - Emin);
        auto g = orbit_geometry(m, {E, L});
        double T0 = PI / std::sqrt(2.0) * p.M * std::pow(-E, -1.5);
        double disc = std::sqrt(p.M * p.M + 2 * E * L);
        double rm = (p.M - disc) / (-2 * E), rp = (p.M + disc) / (-2 * E);
        eT = std::max(eT, std::abs(g.T - T0) / T0);
        eR = std::max({eR, std::abs(g.rm - rm), std::abs(g.rp - rp)});
        eL = std::max(eL, std::abs(g.rL - L / p.M));
    }
    bool pass = eT <= 1e-8 && eR <= 1e-10 && eL <= 1e-10;
    return {1, "kepler analytics", pass,
            "period rel " + fmt(eT) + " (<=1e-8), turning points " + fmt(eR) + " (<=1e-10), r_L " + fmt(eL) + " (<=1e-10)"};
}

// 2. Fourier coefficients of the orbit indicator 1{r(theta) <= R}: crossings located by bisection on the
//    orbit clock, then exact integration of e^{-2 pi i m theta} over the inside intervals
CriterionResult greens_identity(Context& ctx)
{
    const auto& m = ctx.model(3.5, 2, 0.01);
    std::mt19937_64 rng(ctx.seed + 1);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    double err = 0;
    int samples = 0;
    while (samples < 12) {
        double L = m.params.L0 + u(rng) * 0.8 * (m.Lmax - m.params.L0);
        auto mp = minimum_point(m, L);
        if (!(mp.Emin < m.E0)) continue;
        OrbitPoint I{mp.Emin + u(rng) * (m.E0 - mp.Emin), L};
        auto g = orbit_geometry(m, I);
        double R = g.rm + u(rng) * (g.rp - g.rm);
        auto inside = [&](double th) { return orbit_position(m, th, g).first <= R; };
        const int n = 256;
        std::vector<double> cross;
        for (int k = 0; k < n; ++k) {
            double a = double(k) / n, b = double(k + 1) / n;
            if (inside(a) == inside(b)) continue;
            bool ia = inside(a);
            for (int it = 0; it < 60; ++it) {
                double c = 0.5 * (a + b);
                (inside(c) == ia ? a : b) = c;
            }
            cross.push_back(0.5 * (a + b));
        }
        // intervals where the indicator is 1, starting from theta = 0
        std::vector<double> edges{0.0};
        edges.insert(edges.end(), cross.begin(), cross.end());
        edges.push_back(1.0);
        for (int mode = -16; mode <= 16; ++mode) {
            if (!mode) continue;
            cplx c = 0;
            bool in = inside(0.0);
            for (std::size_t s = 0; s + 1 < edges.size(); ++s, in = !in) {
                if (!in) continue;
                double a = edges[s], b = edges[s + 1];
                c += (std::polar(1.0, -TWO_PI * mode * b) - std::polar(1.0, -TWO_PI * mode * a)) / cplx(0, -TWO_PI * mode);
            }
            err = std::max(err, std::abs(c - greens_mode(m, R, mode, I)));
        }
        ++samples;
    }
    return {2, "green's identity", err <= 1e-6, "max abs error " + fmt(err) + " over 12 (R, I), |m| <= 16 (<=1e-6)"};
}

// 3. central differences of the area against the period on the chart interior
CriterionResult area_derivative(Context& ctx)
{
    const auto& m = ctx.model(3.5, 2, 0.01);
    ActionChart ch(m, {33, 17});
    double err = 0;
    int count = 0;
    for (int j = 2; j < ch.nL() - 2; j += 2)
        for (int i = 2; i < ch.nE() - 2; i += 3) {
            double E = ch.E(i, j), L = ch.L_node(j);
            double h = 1e-4 * (m.E0 - ch.Emin_node(j));
            double dA = (area(m, {E + h, L}) - area(m, {E - h, L})) / (2 * h);
            err = std::max(err, std::abs(dA - ch.T(i, j)) / ch.T(i, j));
            ++count;
        }
    return {3, "dA/dE = T", err <= 1e-4, "max rel error " + fmt(err) + " at " + std::to_string(count) + " interior nodes (<=1e-4)"};
}

// 4. log |f(m)| against log gap near trapping
CriterionResult mode_scaling(Context& ctx)
{
    const auto& m = ctx.model(3.5, 2, 0.01);
    std::vector<double> gaps;
    for (int i = 0; i < 9; ++i) gaps.push_back(std::pow(10.0, -6 + 0.5 * i));
    auto cache = OrbitCache::build(m, slice_points(m, 1.3, gaps), 64);
    auto mf = analyze(cache, make_initial_data("smooth", m).f, 4);
    bool pass = true;
    std::string d = "slopes";
    for (int k = 1; k <= 4; ++k) {
        double s = mode_scaling_exponent(mf, gaps, k).slope;
        pass = pass && std::abs(s - 0.5 * k) <= 0.1;
        d += " m=" + std::to_string(k) + ":" + fmt(s);
    }
    return {4, "mode scaling", pass, d + " (target |m|/2 +- 0.1)"};
}

// 5. envelope exponents of the pure-transport force
CriterionResult transport_exponents(Context& ctx)
{
    struct Case {
        double mu, nu;
        const char* data;
        double lo, hi;
    };
    const Case cases[] = {{3.5, 2, "smooth", 1.7, 2.3}, {4.5, 3, "smooth", 2.6, 3.4}, {4.5, 3, "k1", 0.7, 1.3}};
    TransportSetup st;
    st.grid = {17, 61, 12, 3.0};
    st.M_max = 8;
    st.n_theta = 32;
    bool pass = true;
    std::string d;
    for (const auto& c : cases) {
        const auto& m = ctx.model(c.mu, c.nu, 0.01);
        auto r = run_transport(m, make_initial_data(c.data, m), st);
        bool ok = r.fit.exponent >= c.lo && r.fit.exponent <= c.hi;
        pass = pass && ok;
        d += (d.empty() ? "" : "; ") + std::string("(") + fmt(c.mu, 2) + "," + fmt(c.nu, 2) + "," + c.data + ") " +
             fmt(r.fit.exponent) + " in [" + fmt(c.lo, 2) + "," + fmt(c.hi, 2) + "]" + (ok ? "" : " no");
    }
    return {5, "pure-transport decay exponents", pass, d};
}

// 6. conservation and decay of the full linearized flow
CriterionResult linearized_run(Context& ctx)
{
    const auto& e = ctx.evolution();
    const auto& o = e.out;
    double drift = o.antonov_drift();
    double z = max_abs(o.zero_mode);
    double mass = max_abs(o.mass);
    auto pure = transport_force_series(e.sys->grid(), e.f0, o.force_times);
    double Tmax = 1 / e.sys->omega_min();
    DecayFitOptions fo;
    fo.half_window = 0.5 * Tmax;
    auto fl = fit_decay_rate(o.force_times, o.sup, fo);
    auto fp = fit_decay_rate(pure.times, pure.sup, fo);
    bool pass = drift <= 1e-6 && z == 0.0 && mass <= 1e-10 && std::abs(fl.exponent - fp.exponent) <= 0.3;
    return {6, "linearized run", pass,
            "antonov drift " + fmt(drift) + " (<=1e-6), m=0 channel " + fmt(z) + " (==0), mass " + fmt(mass) +
                " (<=1e-10), exponent " + fmt(fl.exponent) + " vs pure transport " + fmt(fp.exponent) + " (+-0.3)"};
}

// 7. power inside the gap of the force signal at three interior radii
CriterionResult spectral_gap(Context& ctx)
{
    auto kep = build_kepler(PolytropeParams{});
    double lk = ActionChart(kep, {65, 33}).lambda_min();
    double lk_exact = std::sqrt(2.0) / 4;
    const auto& e = ctx.evolution();
    double lmin = ActionChart(e.sys->model(), {65, 33}).lambda_min();
    const auto& o = e.out;
    int nr = static_cast<int>(o.radii.size());
    double worst = 0;
    std::string d;
    for (int j : {nr / 4, nr / 2, (3 * nr) / 4}) {
        std::vector<double> sig;
        for (const auto& F : o.force) sig.push_back(F[j]);
        auto g = spectral_gap_check(o.force_times, sig, lmin, 0.9);
        worst = std::max(worst, g.fraction);
        d += " R=" + fmt(o.radii[j]) + ":" + fmt(g.fraction);
    }
    bool pass = worst <= 0.02 && std::abs(lk - lk_exact) <= 1e-8;
    return {7, "spectral gap", pass,
            "kepler lambda_min " + fmt(lk, 8) + " (sqrt2/4), model lambda_min " + fmt(lmin) + ", in-gap power" + d + " (<=0.02)"};
}

// 8. Plemelj limit against the Hilbert transform of 1/(1+y^2)
CriterionResult plemelj_limit(Context&)
{
    auto g = [](double y) { return 1 / (1 + y * y); };
    auto gl = gauss_legendre(400, 0.0, 1.0);
    double worst = 0, rlo = 1e300, rhi = 0, pv_err = 0;
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.0}) {
        // principal value by symmetric subtraction
        double Y = 400, pv = 0;
        for (int k = 0; k < gl.size(); ++k) {
            double uu = gl.x[k], s = Y * uu * uu;
            pv += (g(x - s) - g(x + s)) / s * 2 * Y * uu * gl.w[k];
        }
        pv /= PI;
        auto a = plemelj_model_check(x, 1e-3), b = plemelj_model_check(x, 5e-4);
        pv_err = std::max(pv_err, std::abs(2 * a.limit.imag() - pv));
        worst = std::max(worst, a.error);
        rlo = std::min(rlo, a.error / b.error);
        rhi = std::max(rhi, a.error / b.error);
    }
    bool pass = worst <= 1e-3 && rlo >= 1.5 && rhi <= 2.5 && pv_err <= 1e-5;
    return {8, "plemelj limit", pass,
            "max error " + fmt(worst) + " at eps=1e-3 (<=1e-3), eps/(eps/2) ratio in [" + fmt(rlo) + "," + fmt(rhi) +
                "] ([1.5,2.5]), PV oracle gap " + fmt(pv_err)};
}

ResolventGridSpec resolvent_spec() { return {13, 12, 49, 8, 0}; }

// 9. Neumann contraction over 40 lambdas, and its scaling with eta
CriterionResult invertibility(Context& ctx)
{
    double worst[2] = {0, 0}, opn[2] = {0, 0};
    double etas[2] = {0.01, 0.005};
    for (int k = 0; k < 2; ++k) {
        const auto& m = ctx.model(3.5, 2, etas[k]);
        ResolventGrid g(m, resolvent_spec());
        auto f0 = g.project(make_initial_data("smooth", m).f);
        auto lams = lambda_grid(TWO_PI * g.omega_min(), TWO_PI * g.M() * g.omega_max(), 20);
        for (double l : lams) {
            auto s = solve_F(g, f0, {l, 1e-2, 1});
            worst[k] = std::max(worst[k], s.contraction);
            opn[k] = std::max(opn[k], s.op_norm);
        }
    }
    double ratio = worst[0] / worst[1];
    bool pass = worst[0] <= 0.2 && std::abs(ratio - 2) <= 0.5;
    return {9, "invertibility of F", pass,
            "max contraction " + fmt(worst[0]) + " over 40 lambdas (<=0.2), eta-halving ratio " + fmt(ratio) +
                " (2 +- 25%), operator norm ratio " + fmt(opn[0] / opn[1])};
}

// 10. |lambda| ||U^+-|| and |lambda|^2 ||U^+ - U^-|| across lambda and under eps halving
CriterionResult resolvent_bounds(Context& ctx)
{
    const auto& m = ctx.model(3.5, 2, 0.01);
    ResolventGrid g(m, resolvent_spec());
    auto f0 = g.project(make_initial_data("smooth", m).f);
    auto lams = lambda_grid(TWO_PI * g.omega_min(), TWO_PI * g.M() * g.omega_max(), 20);
    auto r = resolvent_bound_sweep(g, f0, lams, 1e-2);
    bool pass = r.growth_slope <= 0.1 && r.diff_growth_slope <= 0.1 && r.eps_ratio <= 1.2;
    return {10, "resolvent bound trends", pass,
            "log-log slopes " + fmt(r.growth_slope) + ", " + fmt(r.diff_growth_slope) + " (<=0.1), sup ratio eps/2 vs eps " +
                fmt(r.eps_ratio) + " (<=1.2)"};
}

// 11. lambda-integral force against the time-domain run
CriterionResult stone(Context& ctx)
{
    const auto& e = ctx.evolution();
    const auto& m = e.sys->model();
    ResolventGrid g(m, resolvent_spec());
    auto f0 = g.project(make_initial_data("smooth", m).f);
    std::vector<double> ts{5, 20};
    auto st = stone_reconstruct(g, f0, ts);
    const auto& o = e.out;
    auto pure = transport_force_series(e.sys->grid(), e.f0, ts);
    bool pass = true;
    std::string d;
    for (std::size_t a = 0; a < ts.size(); ++a) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < o.force_times.size(); ++i)
            if (std::abs(o.force_times[i] - ts[a]) < std::abs(o.force_times[k] - ts[a])) k = i;
        double sup = 0, err = 0, cs = 0, ce = 0;
        for (std::size_t j = 0; j < st.radii.size(); ++j) {
            double direct = o.force[k][j];
            sup = std::max(sup, std::abs(direct));
            err = std::max(err, std::abs(st.source[a][j] + st.coupling[a][j] - direct));
            double cd = direct - pure.force[a][j];
            cs = std::max(cs, std::abs(cd));
            ce = std::max(ce, std::abs(st.coupling[a][j] - cd));
        }
        pass = pass && err <= 0.05 * sup;
        d += (d.empty() ? "" : "; ") + std::string("t=") + fmt(ts[a], 3) + " rel " + fmt(err / sup) +
             " (<=0.05), coupling part rel " + fmt(ce / cs);
    }
    return {11, "stone reconstruction", pass, d};
}

// 12. ||g(2t) - g(t)|| decreasing for a K = 3 configuration
CriterionResult scattering(Context& ctx)
{
    const auto& m = ctx.model(4.5, 3, 0.01);
    LinearizedSetup s;
    s.grid = {13, 49, 12, 3.0};
    s.M_max = 8;
    LinearizedSystem sys(m, s);
    auto f0 = sys.project(make_initial_data("smooth", m).f);
    std::vector<double> ts{10, 20, 40, 80};
    RunOptions o;
    o.t_end = 160;
    o.force_every = 10;
    o.diag_every = 10;
    o.snapshot_times = {10, 20, 40, 80, 160};
    auto out = run(sys, f0, o);
    auto p = scattering_profile(sys, out, ts);
    bool pass = true;
    std::string d = "K=" + std::to_string(m.Kdefault) + ", increments";
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k) pass = pass && p[k] < p[k - 1];
        d += " " + fmt(p[k]);
    }
    pass = pass && m.Kdefault >= 3;
    return {12, "scattering cauchy property", pass, d + " (strictly decreasing)"};
}

// 13. |Res(lambda)| / |lambda| and min |m| / |lambda|: constants fitted on the lower half of the sweep,
//     confirmed on the upper half within a factor 1.5
CriterionResult resonant_set(Context& ctx)
{
    const auto& m = ctx.model(3.5, 2, 0.01);
    ActionChart ch(m, {65, 33});
    double wmin = ch.omega_min(), wmax = ch.omega_max();
    double mu = default_mu_tilde(wmin, wmax);
    const int M = 256;
    auto lams = geometric_times(1.01 * ch.lambda_min(), TWO_PI * 64 * wmax, 1.05);
    std::size_t half = lams.size() / 2;
    double C0 = 0, c = 1e300;
    bool pass = true, empty = false;
    double worstC = 0, worstc = 1e300;
    for (std::size_t k = 0; k < lams.size(); ++k) {
        auto set = near_resonant_set(wmin, wmax, lams[k], mu, M);
        if (set.empty()) {
            empty = true;
            continue;
        }
        int mn = M;
        for (int v : set) mn = std::min(mn, std::abs(v));
        double a = set.size() / lams[k], b = mn / lams[k];
        if (k < half) {
            C0 = std::max(C0, a);
            c = std::min(c, b);
        } else {
            worstC = std::max(worstC, a);
            worstc = std::min(worstc, b);
        }
    }
    double c_bound = 1 / (TWO_PI * (wmax + mu * wmin));
    pass = !empty && c > 0 && worstC <= 1.5 * C0 && worstc >= c / 1.5 && std::min(c, worstc) >= c_bound;
    return {13, "near-resonant set", pass,
            std::to_string(lams.size()) + " lambdas: |Res|/|lambda| fitted C0 " + fmt(C0) + ", held-out max " + fmt(worstC) +
                "; min|m|/|lambda| fitted c " + fmt(c) + ", held-out min " + fmt(worstc) + ", bound " + fmt(c_bound)};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out, const AcceptanceOptions& opt)
{
    using Fn = CriterionResult (*)(Context&);
    const Fn all[] = {kepler_analytics, greens_identity, area_derivative, mode_scaling, transport_exponents,
                      linearized_run,   spectral_gap,    plemelj_limit,   invertibility, resolvent_bounds,
                      stone,            scattering,      resonant_set};
    Context ctx;
    ctx.seed = opt.seed;
    std::vector<CriterionResult> results;
    for (int id = 1; id <= 13; ++id) {
        if (!opt.only.empty() && !opt.only.count(id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = all[id - 1](ctx);
        } catch (const std::exception& e) {
            r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail << " [" << fmt(r.seconds, 3)
            << " s]" << std::endl;
        results.push_back(r);
    }
    return results;
}

}  // namespace shellvp
