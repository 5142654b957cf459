#include "shellvp/steady_state.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "shellvp/quadrature.hpp"

namespace shellvp {

namespace {

template <class F>
double bracket_root(F f, double lo, double hi, const char* what)
{
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw GeometryError(std::string(what) + ": root not bracketed");
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), it);
    return 0.5 * (r.first + r.second);
}

double kepler_r(double M, double E, double L, int sign)
{
    return (-M + sign * std::sqrt(M * M + 2 * E * L)) / (2 * E);
}

}  // namespace

void PolytropeParams::validate() const
{
    if (!(mu > 2)) throw DomainError("mu must exceed 2 (E:SS2)");
    if (!(nu > 1)) throw DomainError("nu must exceed 1 (E:SS2)");
    if (!(M > 0)) throw DomainError("M must be positive");
    if (!(L0 > 0)) throw DomainError("L0 must be positive");
    if (!(eta >= 0)) throw DomainError("eta must be non-negative");
    if (eta > eta_max) throw DomainError("eta exceeds eta_max");
    double kmin = -std::pow(2.0, -2.0 / 3.0) * M * M / (2 * L0);
    if (!(kappa < 0 && kappa > kmin))
        throw DomainError("kappa outside the single-gap window (E:NOGAP)");
    if (M * M + 2 * kappa * L0 < 0) throw DomainError("M^2 + 2 kappa L0 < 0");
    if (regularity_N(mu, nu) < 4) throw DomainError("regularity index N < 4");
}

RadialTable::RadialTable(std::vector<double> r, std::vector<double> u, std::vector<double> du,
                         std::vector<double> d2u, double exterior_c)
    : r_(std::move(r)), u_(std::move(u)), du_(std::move(du)), d2u_(std::move(d2u)), c_(exterior_c)
{
    if (r_.size() < 2 || u_.size() != r_.size() || du_.size() != r_.size() || d2u_.size() != r_.size())
        throw DomainError("RadialTable: inconsistent arrays");
}

void RadialTable::eval(double r, double& f, double& df, double& d2f) const
{
    if (r <= r_.front()) {
        f = u_.front();
        df = d2f = 0;
        return;
    }
    if (r >= r_.back()) {
        f = c_ / r;
        df = -c_ / (r * r);
        d2f = 2 * c_ / (r * r * r);
        return;
    }
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - r_.begin()) - 1;
    double h = r_[i + 1] - r_[i];
    double t = (r - r_[i]) / h;
    double a0 = u_[i], a1 = h * du_[i], a2 = 0.5 * h * h * d2u_[i];
    double A = u_[i + 1] - a0 - a1 - a2;
    double B = h * du_[i + 1] - a1 - 2 * a2;
    double C = h * h * d2u_[i + 1] - 2 * a2;
    double a3 = 10 * A - 4 * B + 0.5 * C;
    double a4 = -15 * A + 7 * B - C;
    double a5 = 6 * A - 3 * B + 0.5 * C;
    f = a0 + t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
    df = (a1 + t * (2 * a2 + t * (3 * a3 + t * (4 * a4 + t * 5 * a5)))) / h;
    d2f = (2 * a2 + t * (6 * a3 + t * (12 * a4 + t * 20 * a5))) / (h * h);
}

double RadialTable::value(double r) const
{
    double f, d, d2;
    eval(r, f, d, d2);
    return f;
}
double RadialTable::deriv(double r) const
{
    double f, d, d2;
    eval(r, f, d, d2);
    return d;
}
double RadialTable::deriv2(double r) const
{
    double f, d, d2;
    eval(r, f, d, d2);
    return d2;
}

double PolytropeModel::U(double r) const { return kepler() ? 0.0 : U_table.value(r); }
double PolytropeModel::dU(double r) const { return kepler() ? 0.0 : U_table.deriv(r); }
double PolytropeModel::d2U(double r) const { return kepler() ? 0.0 : U_table.deriv2(r); }

double PolytropeModel::psi(double r, double L) const { return U(r) - params.M / r + L / (2 * r * r); }
double PolytropeModel::dpsi(double r, double L) const
{
    return dU(r) + params.M / (r * r) - L / (r * r * r);
}
double PolytropeModel::d2psi(double r, double L) const
{
    return d2U(r) - 2 * params.M / (r * r * r) + 3 * L / (r * r * r * r);
}

double PolytropeModel::density(double r) const
{
    double X = E0 - psi(r, params.L0);
    if (X <= 0 || params.eta == 0) return 0;
    return params.eta * c_munu * std::pow(r, 2 * params.nu) * std::pow(X, params.mu + params.nu + 1.5);
}

double PolytropeModel::mass() const { return kepler() ? 0.0 : -U_table.exterior_c(); }

double PolytropeModel::phi_shape(double E, double L) const
{
    if (E >= E0 || L <= params.L0) return 0;
    return std::pow(E0 - E, params.mu) * std::pow(L - params.L0, params.nu);
}

double PolytropeModel::dphi_shape(double E, double L) const
{
    if (E >= E0 || L <= params.L0) return 0;
    return -params.mu * std::pow(E0 - E, params.mu - 1) * std::pow(L - params.L0, params.nu);
}

double PolytropeModel::L_of_rL(double R) const { return R * R * R * dU(R) + params.M * R; }

double effective_potential(const PolytropeModel& m, double r, double L)
{
    if (!(r > 0)) throw DomainError("effective_potential: r must be positive");
    return m.psi(r, L);
}

MinimumPoint minimum_point(const PolytropeModel& m, double L)
{
    if (!(L > 0)) throw DomainError("minimum_point: L must be positive");
    MinimumPoint mp;
    if (m.kepler()) {
        mp.rL = L / m.params.M;
    } else {
        auto f = [&](double r) { return m.dpsi(r, L); };
        double hi = L / m.params.M;
        double lo = 0.5 * hi;
        for (int k = 0; k < 60 && f(lo) > 0; ++k) lo *= 0.5;
        if (f(hi) < 0) {
            for (int k = 0; k < 60 && f(hi) < 0; ++k) hi *= 1.5;
        }
        mp.rL = bracket_root(f, lo, hi, "minimum_point");
    }
    mp.Emin = m.psi(mp.rL, L);
    mp.alpha = m.d2psi(mp.rL, L);
    if (!(mp.alpha > 0)) throw GeometryError("minimum_point: degenerate minimum");
    return mp;
}

double density_constant(double mu, double nu)
{
    return PI * std::pow(2.0, nu + 1.5) * std::beta(mu + 1, nu + 1) * std::beta(0.5, mu + nu + 2);
}

int regularity_N(double mu, double nu)
{
    double s = mu + nu + 1.5;
    return static_cast<int>(std::ceil(s)) - 1;
}

int decay_index_K(double mu, double nu, double k)
{
    return static_cast<int>(std::floor(std::min({mu - 1, nu, k}) + 1e-12));
}

namespace {

void fill_common(PolytropeModel& m)
{
    m.N = regularity_N(m.params.mu, m.params.nu);
    m.Kdefault = decay_index_K(m.params.mu, m.params.nu, std::numeric_limits<double>::infinity());
    m.c_munu = density_constant(m.params.mu, m.params.nu);
}

// support of Psi_{L0} <= E0 for the potential currently in m
void find_support(PolytropeModel& m)
{
    double L0 = m.params.L0;
    auto mp = minimum_point(m, L0);
    if (mp.Emin >= m.E0) throw GeometryError("degenerate state: empty support (E0 <= min Psi_L0)");
    auto f = [&](double r) { return m.psi(r, L0) - m.E0; };
    double lo = mp.rL;
    while (f(lo) < 0) lo *= 0.5;
    double hi = mp.rL;
    while (f(hi) < 0) hi *= 1.5;
    m.Rmin = bracket_root(f, lo, mp.rL, "support inner edge");
    m.Rmax = bracket_root(f, mp.rL, hi, "support outer edge");
}

// L_max: the L whose minimum energy equals E0
void find_Lmax(PolytropeModel& m)
{
    if (m.kepler()) {
        m.Lmax = -m.params.M * m.params.M / (2 * m.params.kappa);
        return;
    }
    auto emin = [&](double R) { return m.psi(R, m.L_of_rL(R)) - m.E0; };
    double lo = minimum_point(m, m.params.L0).rL;
    double hi = lo;
    while (emin(hi) < 0) hi *= 1.5;
    double R = bracket_root(emin, lo, hi, "L_max");
    m.Lmax = m.L_of_rL(R);
}

struct PoissonResult {
    std::vector<double> r, u, du, d2u;
    double mass;
};

// one radial Poisson solve on [Rmin, Rmax] with the density of the current model
PoissonResult poisson(const PolytropeModel& m, int n)
{
    PoissonResult out;
    out.r.resize(n);
    for (int i = 0; i < n; ++i)
        out.r[i] = m.Rmin + (m.Rmax - m.Rmin) * 0.5 * (1 - std::cos(PI * i / (n - 1)));
    out.r.front() = m.Rmin;
    out.r.back() = m.Rmax;
    static const Rule gl = gauss_legendre(8, 0.0, 1.0);
    std::vector<double> menc(n, 0.0), tail(n, 0.0), rho(n);
    for (int i = 0; i < n; ++i) rho[i] = m.density(out.r[i]);
    std::vector<double> cm(n - 1), ct(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        double a = out.r[i], h = out.r[i + 1] - a, sm = 0, st = 0;
        for (int k = 0; k < gl.size(); ++k) {
            double s = a + h * gl.x[k];
            double rs = m.density(s);
            sm += gl.w[k] * 4 * PI * s * s * rs;
            st += gl.w[k] * 4 * PI * s * rs;
        }
        cm[i] = sm * h;
        ct[i] = st * h;
    }
    for (int i = 1; i < n; ++i) menc[i] = menc[i - 1] + cm[i - 1];
    for (int i = n - 2; i >= 0; --i) tail[i] = tail[i + 1] + ct[i];
    out.mass = menc.back();
    out.u.resize(n);
    out.du.resize(n);
    out.d2u.resize(n);
    for (int i = 0; i < n; ++i) {
        double r = out.r[i];
        out.u[i] = -menc[i] / r - tail[i];
        out.du[i] = menc[i] / (r * r);
        out.d2u[i] = 4 * PI * rho[i] - 2 * out.du[i] / r;
    }
    return out;
}

}  // namespace

PolytropeModel build_kepler(const PolytropeParams& p)
{
    if (p.eta != 0) throw DomainError("build_kepler requires eta == 0");
    p.validate();
    PolytropeModel m;
    m.params = p;
    fill_common(m);
    m.E0 = p.kappa;
    m.Lmax = -p.M * p.M / (2 * p.kappa);
    m.Rmin = kepler_r(p.M, p.kappa, p.L0, +1);
    m.Rmax = kepler_r(p.M, p.kappa, p.L0, -1);
    return m;
}

PolytropeModel build_selfconsistent(const PolytropeParams& p, const SelfConsistentOptions& opt)
{
    p.validate();
    if (p.eta == 0) return build_kepler(p);
    if (!(opt.tol > 0)) throw DomainError("build_selfconsistent: tol must be positive");
    if (opt.n_radial < 16) throw DomainError("build_selfconsistent: n_radial too small");
    PolytropeModel m;
    m.params = p;
    fill_common(m);
    double prev_diff = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        m.E0 = p.kappa + m.U(0.0);
        find_support(m);
        PoissonResult pr = poisson(m, opt.n_radial);
        double diff = 0;
        for (std::size_t i = 0; i < pr.r.size(); ++i) diff = std::max(diff, std::abs(pr.u[i] - m.U(pr.r[i])));
        diff = std::max(diff, std::abs(pr.u.front() - m.U(0.0)));
        if (opt.relaxation != 1.0 && !m.kepler()) {
            double w = opt.relaxation;
            for (std::size_t i = 0; i < pr.r.size(); ++i) {
                pr.u[i] = w * pr.u[i] + (1 - w) * m.U(pr.r[i]);
                pr.du[i] = w * pr.du[i] + (1 - w) * m.dU(pr.r[i]);
                pr.d2u[i] = w * pr.d2u[i] + (1 - w) * m.d2U(pr.r[i]);
            }
            pr.mass = w * pr.mass + (1 - w) * m.mass();
        }
        m.U_table = RadialTable(pr.r, pr.u, pr.du, pr.d2u, -pr.mass);
        if (it > 1 && prev_diff > 0) m.contraction = diff / prev_diff;
        prev_diff = diff;
        m.iterations = it;
        m.last_update = diff;
        if (!std::isfinite(diff)) throw NumericalError("build_selfconsistent: non-finite iterate");
        if (diff < opt.tol) {
            m.E0 = p.kappa + m.U(0.0);
            find_support(m);
            find_Lmax(m);
            return m;
        }
    }
    throw NumericalError("build_selfconsistent: no convergence after " + std::to_string(opt.max_iter) +
                         " iterations, contraction estimate " + std::to_string(m.contraction));
}

double selfconsistency_residual(const PolytropeModel& m)
{
    if (m.kepler()) return 0;
    PoissonResult pr = poisson(m, static_cast<int>(m.U_table.r().size()));
    double d = 0;
    for (std::size_t i = 0; i < pr.r.size(); ++i) d = std::max(d, std::abs(pr.u[i] - m.U(pr.r[i])));
    return d;
}

void to_json(nlohmann::json& j, const PolytropeParams& p)
{
    j = nlohmann::json{{"mu", p.mu},       {"nu", p.nu}, {"eta", p.eta},          {"kappa", p.kappa},
                       {"M", p.M},         {"L0", p.L0}, {"eta_max", p.eta_max}};
}

void from_json(const nlohmann::json& j, PolytropeParams& p)
{
    static const char* keys[] = {"mu", "nu", "eta", "kappa", "M", "L0", "eta_max"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto k : keys) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown key: model." + it.key());
    }
    p.mu = j.value("mu", p.mu);
    p.nu = j.value("nu", p.nu);
    p.eta = j.value("eta", p.eta);
    p.kappa = j.value("kappa", p.kappa);
    p.M = j.value("M", p.M);
    p.L0 = j.value("L0", p.L0);
    p.eta_max = j.value("eta_max", p.eta_max);
}

void to_json(nlohmann::json& j, const PolytropeModel& m)
{
    j = nlohmann::json{{"params", m.params}, {"E0", m.E0},         {"Lmax", m.Lmax},
                       {"Rmin", m.Rmin},     {"Rmax", m.Rmax},     {"N", m.N},
                       {"Kdefault", m.Kdefault}, {"c_munu", m.c_munu}, {"iterations", m.iterations},
                       {"contraction", m.contraction}, {"last_update", m.last_update}};
    if (!m.kepler()) {
        j["U_table"] = {{"r", m.U_table.r()},     {"u", m.U_table.u()},
                        {"du", m.U_table.du()},   {"d2u", m.U_table.d2u()},
                        {"exterior_c", m.U_table.exterior_c()}};
    }
}

void from_json(const nlohmann::json& j, PolytropeModel& m)
{
    m.params = j.at("params").get<PolytropeParams>();
    m.E0 = j.at("E0");
    m.Lmax = j.at("Lmax");
    m.Rmin = j.at("Rmin");
    m.Rmax = j.at("Rmax");
    m.N = j.at("N");
    m.Kdefault = j.at("Kdefault");
    m.c_munu = j.at("c_munu");
    m.iterations = j.value("iterations", 0);
    m.contraction = j.value("contraction", 0.0);
    m.last_update = j.value("last_update", 0.0);
    if (j.contains("U_table")) {
        const auto& t = j["U_table"];
        m.U_table = RadialTable(t.at("r").get<std::vector<double>>(), t.at("u").get<std::vector<double>>(),
                                t.at("du").get<std::vector<double>>(), t.at("d2u").get<std::vector<double>>(),
                                t.at("exterior_c").get<double>());
    } else {
        m.U_table = RadialTable();
    }
}

}  // namespace shellvp
