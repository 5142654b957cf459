#include "shellvp/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "shellvp/foliation.hpp"

namespace shellvp {

ResolventGrid::ResolventGrid(const PolytropeModel& m, const ResolventGridSpec& spec) : model_(&m), spec_(spec)
{
    if (spec_.M_max < 1) throw ConfigError("resolvent: M_max must be positive");
    if (spec_.n_y < 3 || spec_.n_z < 1 || spec_.n_radial < 3) throw ConfigError("resolvent: grid too small");
    if (spec_.n_theta == 0) spec_.n_theta = 4 * spec_.M_max;
    radial_ = ChebGrid(m.Rmin, m.Rmax, spec_.n_radial);
    auto gv = gauss_legendre(spec_.n_z, 0.0, 1.0);
    const double L0 = m.params.L0;
    shell_first_.push_back(0);
    for (int j = 0; j < radial_.size(); ++j) {
        double R = radial_.node(j);
        double Ea = m.psi(R, L0);
        double zmax = m.E0 - Ea;
        if (zmax > 1e-12 * std::abs(m.E0)) {
            for (int k = 0; k < gv.size(); ++k) {
                Line ln;
                ln.shell = j;
                ln.z = zmax * sqr(gv.x[k]);
                ln.wz = gv.w[k] * 2 * zmax * gv.x[k];
                ln.n0 = static_cast<int>(nodes_.size());
                double lo = Ea + ln.z;
                for (int l = 0; l < spec_.n_y; ++l) {
                    Node nd;
                    nd.E = lo + (m.E0 - lo) * l / (spec_.n_y - 1);
                    nd.L = zline_L(m, R, ln.z, nd.E);
                    nodes_.push_back(nd);
                }
                ln.n1 = static_cast<int>(nodes_.size());
                lines_.push_back(ln);
            }
        }
        shell_first_.push_back(static_cast<int>(lines_.size()));
    }
    std::vector<int> shell_of(nodes_.size());
    for (const auto& ln : lines_)
        for (int i = ln.n0; i < ln.n1; ++i) shell_of[i] = ln.shell;
    parallel_for(nodes_.size(), [&](std::size_t i) {
        auto& nd = nodes_[i];
        double R = radial_.node(shell_of[i]);
        auto g = orbit_geometry(m, {nd.E, nd.L});
        nd.T = g.T;
        nd.y = 1.0 / g.T;
        nd.theta = angle_at_radius(m, g, R);
        double dphi = std::abs(m.dphi_shape(nd.E, nd.L));
        if (dphi > 0) {
            double J = jacobian(R, frequency_derivatives(m, {nd.E, nd.L}));
            if (!(J > 0)) throw GeometryError("resolvent grid: P_R omega is not sign-definite");
            nd.q = dphi / J;
        }
    });
    for (const auto& ln : lines_) {
        std::sort(nodes_.begin() + ln.n0, nodes_.begin() + ln.n1, [](const Node& a, const Node& b) { return a.y < b.y; });
        for (int i = ln.n0 + 1; i < ln.n1; ++i)
            if (!(nodes_[i].y > nodes_[i - 1].y)) throw NumericalError("resolvent grid: frequency not monotone on a z-line");
    }
    omega_min_ = 1e300;
    for (const auto& nd : nodes_) {
        omega_min_ = std::min(omega_min_, nd.y);
        omega_max_ = std::max(omega_max_, nd.y);
    }
    std::vector<OrbitPoint> pts(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) pts[i] = {nodes_[i].E, nodes_[i].L};
    cache_ = OrbitCache::build(m, pts, spec_.n_theta);
    proj_ = radial_projection(cache_, radial_, M());
    sinm_.resize(nodes_.size() * M());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (int mm = 1; mm <= M(); ++mm) sinm_[i * M() + mm - 1] = std::sin(TWO_PI * mm * nodes_[i].theta);
}

double ResolventGrid::sin_m(int node, int m) const
{
    double s = sinm_[static_cast<std::size_t>(node) * M() + std::abs(m) - 1];
    return m > 0 ? s : -s;
}

const cplx* ResolventGrid::projection_row(int node, int m) const
{
    const int nr = radial_.size();
    return &proj_[(static_cast<std::size_t>(node) * (M() + 1) + m) * nr];
}

cplx ResolventGrid::project_profile(int node, int m, const std::vector<cplx>& U) const
{
    const cplx* p = projection_row(node, std::abs(m));
    cplx s = 0;
    for (std::size_t j = 0; j < U.size(); ++j) s += (m >= 0 ? p[j] : std::conj(p[j])) * U[j];
    return s;
}

ModeField ResolventGrid::project(const PhaseFunction& f0, const AnalyzeOptions& opt) const
{
    return analyze(cache_, f0, M(), opt);
}

namespace {

cplx singular_point(const SpectralPoint& sp, int m)
{
    return -cplx(sp.lambda, sp.sign * sp.epsilon) / (TWO_PI * m);
}

std::vector<double> line_y(const ResolventGrid& g, const ResolventGrid::Line& ln)
{
    std::vector<double> y;
    for (int i = ln.n0; i < ln.n1; ++i) y.push_back(g.nodes()[i].y);
    return y;
}

}  // namespace

cplx plemelj(const ResolventGrid& g, int shell, int m, const SpectralPoint& sp, const std::vector<cplx>& values)
{
    if (m == 0) throw DomainError("plemelj: m must be nonzero");
    if (!(sp.epsilon > 0)) throw DomainError("plemelj: epsilon must be positive");
    if (static_cast<int>(values.size()) != g.n_nodes()) throw DomainError("plemelj: one value per grid node");
    cplx s = singular_point(sp, m), out = 0;
    std::vector<cplx> W;
    auto [a, b] = g.shell_lines(shell);
    for (int k = a; k < b; ++k) {
        const auto& ln = g.lines()[k];
        plemelj_log_weights(line_y(g, ln), s, W);
        cplx acc = 0;
        for (int i = ln.n0; i < ln.n1; ++i) acc += W[i - ln.n0] * values[i];
        out += ln.wz * acc;
    }
    return out;
}

PlemeljCheck plemelj_model_check(double x, double eps, int n, double Y)
{
    if (!(eps > 0) || n < 3) throw DomainError("plemelj_model_check: need eps > 0 and n >= 3");
    // sinh-stretched nodes, dense near x
    double a = 0.02, u0 = std::asinh((-Y - x) / a), u1 = std::asinh((Y - x) / a);
    std::vector<double> y(n);
    for (int k = 0; k < n; ++k) y[k] = x + a * std::sinh(u0 + (u1 - u0) * k / (n - 1));
    auto W = plemelj_log_weights(y, cplx(x, eps));
    cplx s = 0;
    for (int k = 0; k < n; ++k) s += W[k] / (1 + y[k] * y[k]);
    PlemeljCheck c;
    c.value = s / cplx(0, TWO_PI);
    double g = 1 / (1 + x * x);
    c.limit = 0.5 * cplx(g, x * g);
    c.error = std::abs(c.value - c.limit);
    return c;
}

double default_mu_tilde(double omega_min, double omega_max) { return 0.5 * omega_min / omega_max; }

std::vector<int> near_resonant_set(double omega_min, double omega_max, double lambda, double mu_tilde, int M_max)
{
    std::vector<int> out;
    double tol = mu_tilde * omega_min;
    for (int m = -M_max; m <= M_max; ++m) {
        if (m == 0) continue;
        double x = -lambda / (TWO_PI * m);
        double d = x < omega_min ? omega_min - x : (x > omega_max ? x - omega_max : 0.0);
        if (d < tol) out.push_back(m);
    }
    return out;
}

namespace {

struct Assembly {
    std::vector<cplx> F_src;  // source force per shell
    std::vector<cplx> B;      // [j * nr + j'] coupling force rows
};

// F_src(R) = (2/R^2) sum_m (1/m^2) Pl[q T S_m (-i f0_m)],  F_K[V](R) = sum_j' B_{R j'} V_j'
Assembly assemble(const ResolventGrid& g, const ModeField& f0, const SpectralPoint& sp)
{
    const int nr = g.radial().size(), M = g.M();
    const double eta = g.model().params.eta;
    Assembly A;
    A.F_src.assign(nr, cplx(0));
    A.B.assign(static_cast<std::size_t>(nr) * nr, cplx(0));
    parallel_for(nr, [&](std::size_t j) {
        auto [a, b] = g.shell_lines(static_cast<int>(j));
        if (a == b) return;
        double R = g.radial().node(static_cast<int>(j));
        std::vector<cplx> W;
        cplx fs = 0;
        cplx* Bj = &A.B[j * nr];
        for (int k = a; k < b; ++k) {
            const auto& ln = g.lines()[k];
            auto y = line_y(g, ln);
            for (int m = -M; m <= M; ++m) {
                if (m == 0) continue;
                plemelj_log_weights(y, singular_point(sp, m), W);
                const cplx* P = nullptr;
                for (int i = ln.n0; i < ln.n1; ++i) {
                    const auto& nd = g.nodes()[i];
                    if (nd.q == 0) continue;
                    cplx a_ = W[i - ln.n0] * (ln.wz * nd.q * g.sin_m(i, m));
                    fs += a_ * (nd.T / double(m * m)) * cplx(0, -1) * f0.get(i, m);
                    P = g.projection_row(i, std::abs(m));
                    cplx c = a_ / double(m);
                    if (m > 0)
                        for (int jj = 0; jj < nr; ++jj) Bj[jj] += c * P[jj];
                    else
                        for (int jj = 0; jj < nr; ++jj) Bj[jj] += c * std::conj(P[jj]);
                }
            }
        }
        A.F_src[j] = 2.0 / (R * R) * fs;
        for (int jj = 0; jj < nr; ++jj) Bj[jj] *= -4 * PI * eta / (R * R);
    });
    return A;
}

std::vector<cplx> tail(const ChebGrid& g, const std::vector<cplx>& f)
{
    auto t = g.tail_integral(f);
    for (auto& v : t) v = -v;
    return t;
}

double sup(const std::vector<cplx>& v)
{
    double s = 0;
    for (const auto& x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

SourceTerm source_term(const ResolventGrid& g, const ModeField& f0, const SpectralPoint& sp)
{
    if (!(sp.epsilon > 0)) throw DomainError("source_term: epsilon must be positive");
    auto A = assemble(g, f0, sp);
    return {A.F_src, tail(g.radial(), A.F_src)};
}

ResolventSolution solve_F(const ResolventGrid& g, const ModeField& f0, const SpectralPoint& sp, const SolveOptions& opt)
{
    if (!(sp.epsilon > 0)) throw DomainError("solve_F: epsilon must be positive");
    if (f0.n != g.n_nodes() || f0.M != g.M()) throw DomainError("solve_F: field does not live on this grid");
    const int nr = g.radial().size();
    auto A = assemble(g, f0, sp);
    const auto& C = g.radial().tail_matrix();
    // K = -C B
    std::vector<cplx> K(static_cast<std::size_t>(nr) * nr, cplx(0));
    for (int i = 0; i < nr; ++i)
        for (int l = 0; l < nr; ++l) {
            double c = C[i * nr + l];
            if (c == 0) continue;
            for (int jj = 0; jj < nr; ++jj) K[i * nr + jj] -= c * A.B[l * nr + jj];
        }
    ResolventSolution s;
    s.sp = sp;
    s.force_src = A.F_src;
    auto Usrc = tail(g.radial(), A.F_src);
    for (int i = 0; i < nr; ++i) {
        double row = 0;
        for (int jj = 0; jj < nr; ++jj) row += std::abs(K[i * nr + jj]);
        s.op_norm = std::max(s.op_norm, row);
    }
    auto apply = [&](const std::vector<cplx>& V) {
        std::vector<cplx> out(nr, cplx(0));
        for (int i = 0; i < nr; ++i)
            for (int jj = 0; jj < nr; ++jj) out[i] += K[i * nr + jj] * V[jj];
        return out;
    };
    std::vector<cplx> U = Usrc;
    double prev = 0, scale = std::max(sup(Usrc), 1e-300);
    for (int it = 1; it <= opt.max_iter; ++it) {
        auto KU = apply(U);
        std::vector<cplx> next(nr);
        for (int i = 0; i < nr; ++i) next[i] = Usrc[i] + KU[i];
        double upd = 0;
        for (int i = 0; i < nr; ++i) upd = std::max(upd, std::abs(next[i] - U[i]));
        U = std::move(next);
        s.iterations = it;
        if (prev > 0 && upd > 0) s.contraction = upd / prev;
        if (s.contraction >= 1)
            throw NumericalError("solve_F: Neumann iteration does not contract (factor " + std::to_string(s.contraction) +
                                 ", ||K|| = " + std::to_string(s.op_norm) +
                                 ", eta = " + std::to_string(g.model().params.eta) + ")");
        if (upd <= opt.tol * scale) break;
        prev = upd;
    }
    s.U = U;
    s.force_K.assign(nr, cplx(0));
    for (int i = 0; i < nr; ++i)
        for (int jj = 0; jj < nr; ++jj) s.force_K[i] += A.B[i * nr + jj] * U[jj];
    return s;
}

std::vector<double> lambda_grid(double lambda_min, double lambda_cut, int n_per_side)
{
    if (!(lambda_min > 0) || !(lambda_cut > lambda_min) || n_per_side < 2)
        throw DomainError("lambda_grid: need 0 < lambda_min < lambda_cut and two points per side");
    std::vector<double> pos(n_per_side);
    double r = std::pow(lambda_cut / lambda_min, 1.0 / (n_per_side - 1));
    for (int k = 0; k < n_per_side; ++k) pos[k] = lambda_min * std::pow(r, k);
    pos.back() = lambda_cut;
    std::vector<double> out;
    for (int k = n_per_side - 1; k >= 0; --k) out.push_back(-pos[k]);
    for (double v : pos) out.push_back(v);
    return out;
}

BoundReport resolvent_bound_sweep(const ResolventGrid& g, const ModeField& f0, const std::vector<double>& lambdas,
                                  double epsilon)
{
    BoundReport rep;
    const std::size_t n = lambdas.size();
    std::vector<BoundRow> rows(2 * n);
    parallel_for(2 * n, [&](std::size_t k) {
        double lam = lambdas[k % n];
        double eps = k < n ? epsilon : 0.5 * epsilon;
        auto p = solve_F(g, f0, {lam, eps, 1});
        auto q = solve_F(g, f0, {lam, eps, -1});
        std::vector<cplx> d(p.U.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = p.U[i] - q.U[i];
        BoundRow r;
        r.lambda = lam;
        r.epsilon = eps;
        r.plus = std::abs(lam) * sup(p.U);
        r.minus = std::abs(lam) * sup(q.U);
        r.diff = lam * lam * sup(d);
        r.contraction = std::max(p.contraction, q.contraction);
        rows[k] = r;
    });
    rep.rows = rows;
    std::vector<double> x, y1, y2;
    double s1[2] = {0, 0}, s2[2] = {0, 0};
    for (std::size_t k = 0; k < 2 * n; ++k) {
        const auto& r = rows[k];
        int e = k < n ? 0 : 1;
        s1[e] = std::max({s1[e], r.plus, r.minus});
        s2[e] = std::max(s2[e], r.diff);
        rep.max_contraction = std::max(rep.max_contraction, r.contraction);
        if (e == 0) {
            x.push_back(std::abs(r.lambda));
            y1.push_back(std::max(r.plus, r.minus));
            y2.push_back(std::max(r.diff, 1e-300));
        }
    }
    rep.growth_slope = fit_loglog(x, y1).slope;
    rep.diff_growth_slope = fit_loglog(x, y2).slope;
    rep.eps_ratio = std::max(s1[1] / s1[0], s2[1] / s2[0]);
    return rep;
}

StoneResult stone_reconstruct(const ResolventGrid& g, const ModeField& f0, const std::vector<double>& times,
                              const StoneOptions& opt)
{
    if (opt.eps_schedule.empty()) throw ConfigError("stone_reconstruct: empty epsilon schedule");
    for (std::size_t k = 1; k < opt.eps_schedule.size(); ++k)
        if (!(opt.eps_schedule[k] < opt.eps_schedule[k - 1]))
            throw ConfigError("stone_reconstruct: epsilon schedule must be decreasing");
    const int nr = g.radial().size();
    StoneResult res;
    res.times = times;
    res.radii = g.radial().nodes();
    for (double eps : opt.eps_schedule) {
        double cut = opt.lambda_cut > 0 ? opt.lambda_cut : TWO_PI * g.M() * g.omega_max() + 20 * eps;
        int P = static_cast<int>(std::ceil(2 * cut / (opt.spacing * eps) / 3));
        int N = 3 * P + 1;
        auto lam = linspace(-cut, cut, N);
        std::vector<cplx> Gk(static_cast<std::size_t>(N) * nr), Gs(Gk.size());
        parallel_for(N, [&](std::size_t k) {
            auto a = solve_F(g, f0, {lam[k], eps, -1});
            auto b = solve_F(g, f0, {lam[k], eps, 1});
            for (int j = 0; j < nr; ++j) {
                Gk[k * nr + j] = a.force_K[j] - b.force_K[j];
                Gs[k * nr + j] = a.force_src[j] - b.force_src[j];
            }
        });
        FilonLine line(lam);
        std::vector<std::vector<double>> ck, cs;
        std::vector<cplx> W;
        for (double t : times) {
            line.weights(-t, W);
            std::vector<double> a(nr), b(nr);
            double fac = std::exp(eps * t) / TWO_PI;
            for (int j = 0; j < nr; ++j) {
                cplx x = 0, y = 0;
                for (int k = 0; k < N; ++k) {
                    x += W[k] * Gk[static_cast<std::size_t>(k) * nr + j];
                    y += W[k] * Gs[static_cast<std::size_t>(k) * nr + j];
                }
                a[j] = fac * x.real();
                b[j] = fac * y.real();
            }
            ck.push_back(a);
            cs.push_back(b);
        }
        res.coupling_by_eps.push_back(ck);
        res.source_by_eps.push_back(cs);
    }
    std::size_t E = opt.eps_schedule.size();
    res.coupling = res.coupling_by_eps.back();
    res.source = res.source_by_eps.back();
    if (E >= 2) {
        double r = std::sqrt(opt.eps_schedule[E - 2] / opt.eps_schedule[E - 1]);
        for (std::size_t t = 0; t < times.size(); ++t)
            for (int j = 0; j < nr; ++j) {
                res.coupling[t][j] = (r * res.coupling_by_eps[E - 1][t][j] - res.coupling_by_eps[E - 2][t][j]) / (r - 1);
                res.source[t][j] = (r * res.source_by_eps[E - 1][t][j] - res.source_by_eps[E - 2][t][j]) / (r - 1);
            }
    }
    return res;
}

}  // namespace shellvp
