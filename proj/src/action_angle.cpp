#include "shellvp/action_angle.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include "shellvp/quadrature.hpp"

namespace shellvp {

namespace {

const Rule& gl_rule(int n)
{
    static const Rule r64 = gauss_legendre(64, 0.0, 1.0);
    static const Rule r128 = gauss_legendre(128, 0.0, 1.0);
    static const Rule r256 = gauss_legendre(256, 0.0, 1.0);
    switch (n) {
    case 64: return r64;
    case 128: return r128;
    default: return r256;
    }
}

// int_0^{phi_end} F(phi) dphi with r = rm + D sin^2 phi, doubling until converged
template <class F>
double sin2_integral(double phi_end, F f, const char* what)
{
    double prev = 0;
    for (int n = 64; n <= 256; n *= 2) {
        const Rule& g = gl_rule(n);
        double s = 0;
        for (int k = 0; k < n; ++k) s += g.w[k] * f(phi_end * g.x[k]);
        s *= phi_end;
        if (n > 64 && std::abs(s - prev) <= 1e-10 * std::abs(s)) return s;
        prev = s;
    }
    if (!std::isfinite(prev)) throw NumericalError(std::string(what) + ": non-finite quadrature");
    return prev;
}

double root(const PolytropeModel& m, const OrbitGeometry& g, double lo, double hi)
{
    auto f = [&](double r) { return psi_above_min(m, g, r) - g.gap(); };
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw GeometryError("turning point not bracketed");
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), it);
    return 0.5 * (r.first + r.second);
}

void check_point(const PolytropeModel& m, OrbitPoint I)
{
    if (!(I.L > 0)) throw DomainError("orbit point: L must be positive");
    if (!(I.E < 0)) throw DomainError("orbit point: E must be negative");
    (void)m;
}

}  // namespace

double psi_above_min(const PolytropeModel& m, const OrbitGeometry& g, double r)
{
    double d = r - g.rL;
    double k = g.L * d * d / (2 * r * r * g.rL * g.rL);
    if (!m.kepler()) k += m.U(r) - g.U_rL - g.dU_rL * d * g.rL / r;
    return k;
}

double kinetic(const PolytropeModel& m, const OrbitGeometry& g, double r) { return g.gap() - psi_above_min(m, g, r); }

OrbitGeometry orbit_geometry(const PolytropeModel& m, OrbitPoint I)
{
    check_point(m, I);
    OrbitGeometry g;
    g.E = I.E;
    g.L = I.L;
    auto mp = minimum_point(m, I.L);
    g.rL = mp.rL;
    g.Emin = mp.Emin;
    g.alpha = mp.alpha;
    g.U_rL = m.U(mp.rL);
    g.dU_rL = m.dU(mp.rL);
    double gap = I.E - mp.Emin;
    if (gap <= 0) {
        if (gap > -1e-14 * std::abs(I.E)) gap = 0;
        else throw GeometryError("degenerate orbit: E <= E_min^L");
    }
    if (gap < HARMONIC_CUTOFF) {
        double a = std::sqrt(2 * gap / mp.alpha);
        g.harmonic = true;
        g.rm = mp.rL - a;
        g.rp = mp.rL + a;
        g.T = TWO_PI / std::sqrt(mp.alpha);
        return g;
    }
    double a = std::sqrt(2 * gap / mp.alpha);
    double lo = mp.rL - 1.5 * a;
    if (lo <= 0) lo = 0.5 * mp.rL;
    for (int k = 0; kinetic(m, g, lo) > 0; ++k) {
        lo *= 0.5;
        if (k > 200) throw GeometryError("inner turning point: bracket failure");
    }
    double hi = mp.rL + 1.5 * a;
    for (double k = 1.5; kinetic(m, g, hi) > 0; k *= 2) {
        hi = mp.rL + k * a;
        if (k > 1e8) throw GeometryError("outer turning point: orbit unbound");
    }
    g.rm = root(m, g, lo, mp.rL);
    g.rp = root(m, g, mp.rL, hi);
    double D = g.rp - g.rm;
    auto f = [&](double phi) {
        double s = std::sin(phi), co = std::cos(phi);
        double r = g.rm + D * s * s;
        double k = 2 * kinetic(m, g, r);
        if (k <= 0) return 0.0;
        return 2 * D * s * co / std::sqrt(k);
    };
    g.T = 2 * sin2_integral(0.5 * PI, f, "period");
    return g;
}

TurningPoints turning_points(const PolytropeModel& m, OrbitPoint I)
{
    auto g = orbit_geometry(m, I);
    if (g.gap() <= 0) throw GeometryError("degenerate orbit: E <= E_min^L");
    return {g.rm, g.rp};
}

double period(const PolytropeModel& m, OrbitPoint I) { return orbit_geometry(m, I).T; }

double frequency(const PolytropeModel& m, OrbitPoint I) { return 1.0 / period(m, I); }

double orbit_area(const PolytropeModel& m, const OrbitGeometry& g)
{
    if (g.harmonic) return TWO_PI * g.gap() / std::sqrt(g.alpha);
    double D = g.rp - g.rm;
    auto f = [&](double phi) {
        double s = std::sin(phi), co = std::cos(phi);
        double r = g.rm + D * s * s;
        double k = 2 * kinetic(m, g, r);
        if (k <= 0) return 0.0;
        return 2 * D * s * co * std::sqrt(k);
    };
    return 2 * sin2_integral(0.5 * PI, f, "area");
}

double area(const PolytropeModel& m, OrbitPoint I) { return orbit_area(m, orbit_geometry(m, I)); }

double angle_at_radius(const PolytropeModel& m, const OrbitGeometry& g, double R)
{
    if (R <= g.rm) return 0.0;
    if (R >= g.rp) return 0.5;
    if (g.harmonic) {
        double a = 0.5 * (g.rp - g.rm);
        double c = std::clamp((g.rL - R) / a, -1.0, 1.0);
        return std::acos(c) / TWO_PI;
    }
    double D = g.rp - g.rm;
    double phiR = std::asin(std::sqrt(std::clamp((R - g.rm) / D, 0.0, 1.0)));
    auto f = [&](double phi) {
        double s = std::sin(phi), co = std::cos(phi);
        double r = g.rm + D * s * s;
        double k = 2 * kinetic(m, g, r);
        if (k <= 0) return 0.0;
        return 2 * D * s * co / std::sqrt(k);
    };
    double th = sin2_integral(phiR, f, "angle") / g.T;
    return std::clamp(th, 0.0, 0.5);
}

double angle(const PolytropeModel& m, double r, double w, double L)
{
    if (!(r > 0)) throw DomainError("angle: r must be positive");
    double E = 0.5 * w * w + m.psi(r, L);
    auto g = orbit_geometry(m, {E, L});
    double tol = 1e-9 * std::max(1.0, g.rp);
    if (r < g.rm - tol || r > g.rp + tol) throw DomainError("angle: r outside [r-, r+]");
    double th = angle_at_radius(m, g, r);
    if (w < 0) th = 1.0 - th;
    if (th >= 1.0) th -= 1.0;
    return th;
}

namespace {

using state_t = std::array<double, 2>;

struct OrbitRhs {
    const PolytropeModel* m;
    double L, rL;
    void operator()(const state_t& x, state_t& dx, double) const
    {
        dx[0] = x[1];
        dx[1] = -m->dpsi(rL + x[0], L);
    }
};

}  // namespace

void sample_orbit(const PolytropeModel& m, const OrbitGeometry& g, int n, double* r, double* w)
{
    if (n < 2 || n % 2) throw DomainError("sample_orbit: n must be even");
    if (g.harmonic) {
        double a = 0.5 * (g.rp - g.rm);
        for (int k = 0; k < n; ++k) {
            double ph = TWO_PI * k / n;
            r[k] = g.rL - a * std::cos(ph);
            w[k] = a * TWO_PI / g.T * std::sin(ph);
        }
        return;
    }
    namespace ode = boost::numeric::odeint;
    OrbitRhs rhs{&m, g.L, g.rL};
    state_t x{g.rm - g.rL, 0.0};
    std::vector<double> times(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) times[k] = g.T * k / n;
    double scale = g.rp - g.rm;
    auto stepper = ode::make_controlled(1e-13 * scale, 1e-13, ode::runge_kutta_fehlberg78<state_t>());
    int k = 0;
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), g.T / (8.0 * n),
                         [&](const state_t& s, double) {
                             r[k] = g.rL + s[0];
                             w[k] = s[1];
                             ++k;
                         });
    r[0] = g.rm;
    w[0] = 0;
    r[n / 2] = g.rp;
    w[n / 2] = 0;
    for (int j = n / 2 + 1; j < n; ++j) {
        r[j] = r[n - j];
        w[j] = -w[n - j];
    }
}

std::pair<double, double> orbit_position(const PolytropeModel& m, double theta, const OrbitGeometry& g)
{
    theta -= std::floor(theta);
    bool second = theta > 0.5;
    double th = second ? 1.0 - theta : theta;
    double r, w;
    if (g.harmonic) {
        double a = 0.5 * (g.rp - g.rm);
        r = g.rL - a * std::cos(TWO_PI * th);
        w = a * TWO_PI / g.T * std::sin(TWO_PI * th);
    } else if (th == 0) {
        r = g.rm;
        w = 0;
    } else {
        namespace ode = boost::numeric::odeint;
        OrbitRhs rhs{&m, g.L, g.rL};
        state_t x{g.rm - g.rL, 0.0};
        double scale = g.rp - g.rm;
        auto stepper = ode::make_controlled(1e-13 * scale, 1e-13, ode::runge_kutta_fehlberg78<state_t>());
        std::size_t steps = ode::integrate_adaptive(stepper, rhs, x, 0.0, th * g.T, g.T / 64.0);
        if (steps > 1000000) throw NumericalError("orbit_position: integrator failure");
        r = g.rL + x[0];
        w = x[1];
    }
    if (second) w = -w;
    return {r, w};
}

std::pair<double, double> orbit_position(const PolytropeModel& m, double theta, OrbitPoint I)
{
    return orbit_position(m, theta, orbit_geometry(m, I));
}

FrequencyDerivatives frequency_derivatives(const PolytropeModel& m, OrbitPoint I)
{
    FrequencyDerivatives d;
    auto g = orbit_geometry(m, I);
    d.omega = g.omega();
    auto om = [&](double E, double L) { return frequency(m, {E, L}); };
    double hE = 2.5e-5 * std::max(std::abs(m.E0 - minimum_point(m, m.params.L0).Emin), 1e-3);
    double gap = g.gap();
    if (gap > 2.5 * hE) {
        d.dE = (om(I.E - 2 * hE, I.L) - 8 * om(I.E - hE, I.L) + 8 * om(I.E + hE, I.L) - om(I.E + 2 * hE, I.L)) /
               (12 * hE);
    } else {
        double h = hE;
        d.dE = (-25 * d.omega + 48 * om(I.E + h, I.L) - 36 * om(I.E + 2 * h, I.L) + 16 * om(I.E + 3 * h, I.L) -
                3 * om(I.E + 4 * h, I.L)) /
               (12 * h);
    }
    double hL = 1e-4 * I.L;
    double emin_hi = minimum_point(m, I.L + 2 * hL).Emin;
    if (I.E - emin_hi > 1e-3 * hL) {
        d.dL = (om(I.E, I.L - 2 * hL) - 8 * om(I.E, I.L - hL) + 8 * om(I.E, I.L + hL) - om(I.E, I.L + 2 * hL)) /
               (12 * hL);
    } else {
        double h = -hL;
        d.dL = (-25 * d.omega + 48 * om(I.E, I.L + h) - 36 * om(I.E, I.L + 2 * h) + 16 * om(I.E, I.L + 3 * h) -
                3 * om(I.E, I.L + 4 * h)) /
               (12 * h);
    }
    return d;
}

ActionChart::ActionChart(const PolytropeModel& m, const ChartSpec& spec) : model_(&m), nE_(spec.n_E), nL_(spec.n_L)
{
    if (nE_ < 4 || nL_ < 4) throw DomainError("ActionChart: grid too small");
    s_.resize(nE_);
    L_.resize(nL_);
    Emin_.resize(nL_);
    for (int i = 0; i < nE_; ++i) s_[i] = 0.5 * (1 - std::cos(PI * i / (nE_ - 1)));
    for (int j = 0; j < nL_; ++j) {
        L_[j] = m.params.L0 + (m.Lmax - m.params.L0) * 0.5 * (1 - std::cos(PI * j / (nL_ - 1)));
        Emin_[j] = minimum_point(m, L_[j]).Emin;
    }
    Emin_.back() = std::min(Emin_.back(), m.E0);
    std::size_t n = static_cast<std::size_t>(nE_) * nL_;
    rm_.resize(n);
    rp_.resize(n);
    T_.resize(n);
    A_.resize(n);
    parallel_for(n, [&](std::size_t k) {
        int i = static_cast<int>(k % nE_), j = static_cast<int>(k / nE_);
        double E = this->E(i, j);
        auto g = orbit_geometry(m, {E, L_[j]});
        rm_[k] = g.rm;
        rp_[k] = g.rp;
        T_[k] = g.T;
        A_[k] = orbit_area(m, g);
    });
    omega_min_ = 1.0 / *std::max_element(T_.begin(), T_.end());
    omega_max_ = 1.0 / *std::min_element(T_.begin(), T_.end());
    monotone_ = true;
    c0_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nL_; ++j) {
        double span = m.E0 - Emin_[j];
        if (span <= 1e-12) continue;
        for (int i = 0; i + 1 < nE_; ++i) {
            double d = (omega(i + 1, j) - omega(i, j)) / ((s_[i + 1] - s_[i]) * span);
            if (!(d < 0)) monotone_ = false;
            c0_ = std::min(c0_, -d);
        }
    }
}

double ActionChart::interp(const std::vector<double>& f, double E, double L) const
{
    const auto& m = *model_;
    double emin = minimum_point(m, L).Emin;
    double span = m.E0 - emin;
    double s = span > 1e-14 ? (E - emin) / span : 0.0;
    auto stencil = [](const std::vector<double>& x, double v, int& i0, std::array<double, 4>& w) {
        int n = static_cast<int>(x.size());
        int i = static_cast<int>(std::upper_bound(x.begin(), x.end(), v) - x.begin()) - 2;
        i0 = std::clamp(i, 0, n - 4);
        for (int a = 0; a < 4; ++a) {
            double p = 1;
            for (int b = 0; b < 4; ++b)
                if (b != a) p *= (v - x[i0 + b]) / (x[i0 + a] - x[i0 + b]);
            w[a] = p;
        }
    };
    int is, jl;
    std::array<double, 4> ws, wl;
    stencil(s_, s, is, ws);
    stencil(L_, L, jl, wl);
    double v = 0;
    for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a) v += wl[b] * ws[a] * f[idx(is + a, jl + b)];
    return v;
}

double ActionChart::interp_T(double E, double L) const { return interp(T_, E, L); }
double ActionChart::interp_A(double E, double L) const { return interp(A_, E, L); }
double ActionChart::interp_omega(double E, double L) const { return 1.0 / interp(T_, E, L); }

nlohmann::json ActionChart::to_json() const
{
    return nlohmann::json{{"n_E", nE_},   {"n_L", nL_},         {"s", s_},
                          {"L", L_},      {"Emin", Emin_},      {"r_minus", rm_},
                          {"r_plus", rp_}, {"T", T_},           {"A", A_},
                          {"omega_min", omega_min_}, {"omega_max", omega_max_}, {"c0", c0_}};
}

}  // namespace shellvp
