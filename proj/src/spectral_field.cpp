#include "shellvp/spectral_field.hpp"

#include <algorithm>
#include <cmath>

namespace shellvp {

OrbitCache OrbitCache::build(const PolytropeModel& m, const std::vector<OrbitPoint>& pts, int n_theta)
{
    if (n_theta < 4 || n_theta % 2) throw DomainError("OrbitCache: n_theta must be even and >= 4");
    OrbitCache c;
    c.n_theta = n_theta;
    c.geo.resize(pts.size());
    c.r.resize(pts.size() * n_theta);
    c.w.resize(pts.size() * n_theta);
    parallel_for(pts.size(), [&](std::size_t i) {
        c.geo[i] = orbit_geometry(m, pts[i]);
        sample_orbit(m, c.geo[i], n_theta, c.r.data() + i * n_theta, c.w.data() + i * n_theta);
    });
    return c;
}

ModeField analyze(const OrbitCache& cache, const PhaseFunction& f0, int M_max, const AnalyzeOptions& opt)
{
    int n = cache.n_theta;
    if (M_max < 1) throw DomainError("analyze: M_max must be positive");
    if (n < 4 * M_max) throw DomainError("analyze: n_theta must be at least 4 M_max");
    ModeField out(cache.size(), M_max);
    std::vector<double> m0(cache.size());
    std::vector<cplx> tw(n);
    for (int k = 0; k < n; ++k) tw[k] = std::polar(1.0, -TWO_PI * k / n);
    parallel_for(cache.size(), [&](std::size_t i) {
        const double* r = cache.r_of(static_cast<int>(i));
        const double* w = cache.w_of(static_cast<int>(i));
        double L = cache.geo[i].L;
        std::vector<double> f(n);
        double mean = 0;
        for (int k = 0; k < n; ++k) {
            f[k] = f0(r[k], w[k], L);
            mean += f[k];
        }
        mean /= n;
        m0[i] = std::abs(mean);
        for (int k = 0; k < n; ++k) f[k] -= mean;
        for (int m = 1; m <= M_max; ++m) {
            cplx s = 0;
            for (int k = 0; k < n; ++k) s += f[k] * tw[(static_cast<long>(m) * k) % n];
            out.at(static_cast<int>(i), m) = s / double(n);
        }
    });
    out.m0_max = m0.empty() ? 0 : *std::max_element(m0.begin(), m0.end());
    if (opt.strict && out.m0_max > opt.m0_tol)
        throw DomainError("analyze: initial data not orthogonal to functions of (E,L) (E:FINORTH), |f(0)| = " +
                          std::to_string(out.m0_max));
    return out;
}

double greens_mode(const PolytropeModel& m, double R, int mode, OrbitPoint I)
{
    if (mode == 0) throw DomainError("greens_mode: m must be nonzero");
    if (I.E < m.psi(R, I.L)) return 0.0;
    auto g = orbit_geometry(m, I);
    double th = angle_at_radius(m, g, R);
    return std::sin(TWO_PI * mode * th) / (PI * mode);
}

double RadialProfile::operator()(double R) const
{
    if (R >= grid.b()) return exterior_c / R;
    if (R <= grid.a()) return values.front();
    return grid.interp(values, R);
}

RadialProfile potential_from_force(const ChebGrid& grid, const std::vector<double>& force, double exterior_c)
{
    RadialProfile p;
    p.grid = grid;
    p.exterior_c = exterior_c;
    auto tail = grid.tail_integral(force);
    p.values.resize(force.size());
    for (std::size_t i = 0; i < force.size(); ++i) p.values[i] = -tail[i] + exterior_c / grid.b();
    return p;
}

ShellGrid::ShellGrid(const PolytropeModel& m, const ShellGridSpec& spec) : model_(&m), spec_(spec)
{
    if (spec.n_columns < 4 || (spec.n_columns - 1) % 3) throw DomainError("ShellGrid: n_columns must be 3P+1");
    if (spec.n_L < 2) throw DomainError("ShellGrid: n_L too small");
    radial_ = ChebGrid(m.Rmin, m.Rmax, spec.n_radial);
    const double L0 = m.params.L0;
    const int C = spec.n_columns;
    auto w38 = three_eighths_weights(C);
    auto gv = gauss_legendre(spec.n_L, 0.0, 1.0);

    struct Pending {
        int shell, column;
        double v, wv;
    };
    std::vector<Pending> pend;
    for (int j = 0; j < radial_.size(); ++j) {
        double R = radial_.node(j);
        Shell sh;
        sh.R = R;
        double Ea = std::min(m.psi(R, L0), m.E0);
        sh.c0 = static_cast<int>(columns_.size());
        for (int c = 0; c < C; ++c) {
            double u = double(c) / (C - 1);
            Column col;
            col.shell = j;
            col.E = Ea + (m.E0 - Ea) * graded(u, spec.grading);
            if (c == C - 1) col.E = m.E0;
            col.wE = w38[c] * (m.E0 - Ea) * graded_deriv(u, spec.grading);
            columns_.push_back(col);
        }
        sh.c1 = static_cast<int>(columns_.size());
        shells_.push_back(std::move(sh));
    }
    // column frequencies along L = L0
    parallel_for(columns_.size(), [&](std::size_t c) {
        auto d = frequency_derivatives(m, {columns_[c].E, L0});
        columns_[c].y = d.omega;
        columns_[c].dEdy = d.dE != 0 ? 1.0 / std::abs(d.dE) : 0.0;
    });
    for (int j = 0; j < n_shells(); ++j) {
        auto& sh = shells_[j];
        double R = sh.R;
        double Ea = columns_[sh.c0].E;
        bool degenerate = m.E0 - Ea <= 1e-14;
        std::vector<double> y;
        for (int c = sh.c1 - 1; c >= sh.c0; --c) y.push_back(columns_[c].y);
        for (std::size_t k = 1; k < y.size(); ++k)
            if (!degenerate && !(y[k] > y[k - 1])) throw NumericalError("ShellGrid: column frequencies not monotone");
        if (!degenerate) sh.filon = FilonLine(y);
        for (int c = sh.c0; c < sh.c1; ++c) {
            auto& col = columns_[c];
            col.n0 = static_cast<int>(pend.size());
            double Lhyp = 2 * R * R * (col.E - m.U(R) + m.params.M / R);
            bool empty = degenerate || c == sh.c0 || c == sh.c1 - 1 || Lhyp <= L0;
            if (!empty)
                for (int k = 0; k < gv.size(); ++k) pend.push_back({j, c, gv.x[k], gv.w[k]});
            col.n1 = static_cast<int>(pend.size());
        }
    }
    nodes_.resize(pend.size());
    sinm_.assign(pend.size() * M_cap_, 0.0);
    parallel_for(pend.size(), [&](std::size_t i) {
        const auto& p = pend[i];
        const auto& col = columns_[p.column];
        double R = shells_[p.shell].R;
        double Lhyp = 2 * R * R * (col.E - m.U(R) + m.params.M / R);
        double span = Lhyp - L0;
        Node nd;
        nd.column = p.column;
        nd.E = col.E;
        nd.L = Lhyp - span * p.v * p.v;
        auto g = orbit_geometry(m, {nd.E, nd.L});
        nd.T = g.T;
        nd.omega = 1.0 / g.T;
        nd.theta = angle_at_radius(m, g, R);
        nd.dphi = std::abs(m.dphi_shape(nd.E, nd.L));
        double dL = p.wv * 2 * span * p.v;
        nd.wforce = dL * nd.dphi * nd.T;
        // dL / sqrt(2z) with z = span v^2 / (2R^2)
        double dw = p.wv * 2 * R * std::sqrt(span);
        nd.wps = 2 * radial_.weights()[p.shell] * col.wE * dw;
        nodes_[i] = nd;
        for (int mm = 1; mm <= M_cap_; ++mm) sinm_[i * M_cap_ + mm - 1] = std::sin(TWO_PI * mm * nd.theta);
    });
}

std::vector<OrbitPoint> ShellGrid::points() const
{
    std::vector<OrbitPoint> p(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) p[i] = {nodes_[i].E, nodes_[i].L};
    return p;
}

double ShellGrid::force_at(int j, const ModeField& a, double t, int m_lo) const
{
    const auto& sh = shells_[j];
    if (sh.filon.size() == 0) return 0.0;
    if (a.M > M_cap_) throw DomainError("ShellGrid: M_max above the cached mode cap");
    const int C = sh.c1 - sh.c0;
    const int M = a.M;
    // H[c][m] = sum over column nodes
    std::vector<cplx> H(static_cast<std::size_t>(C) * M, cplx(0));
    for (int c = 0; c < C; ++c) {
        const auto& col = columns_[sh.c0 + c];
        for (int i = col.n0; i < col.n1; ++i) {
            const auto& nd = nodes_[i];
            cplx ph = std::polar(1.0, -TWO_PI * (nd.omega - col.y) * t), p = 1;
            const double* sm = &sinm_[static_cast<std::size_t>(i) * M_cap_];
            const cplx* ai = &a.c[static_cast<std::size_t>(i) * M];
            for (int m = 1; m <= M; ++m) {
                p *= ph;
                if (m >= m_lo) H[c * M + m - 1] += nd.wforce * sm[m - 1] * ai[m - 1] * p;
            }
        }
    }
    double F = 0;
    std::vector<cplx> W;
    for (int m = std::max(1, m_lo); m <= M; ++m) {
        sh.filon.weights(TWO_PI * m * t, W);
        cplx s = 0;
        for (int c = 0; c < C; ++c) s += W[C - 1 - c] * columns_[sh.c0 + c].dEdy * H[c * M + m - 1];
        F += 2.0 / m * s.real();
    }
    return 4 * PI / (sh.R * sh.R) * F;
}

std::vector<double> ShellGrid::force(const ModeField& a, double t, int m_lo) const
{
    if (a.n != n_nodes()) throw DomainError("ShellGrid::force: field does not live on this grid");
    std::vector<double> F(shells_.size());
    parallel_for(shells_.size(), [&](std::size_t j) { F[j] = force_at(static_cast<int>(j), a, t, m_lo); });
    return F;
}

double ShellGrid::phase_space_sum(const std::vector<double>& G) const
{
    double s = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += nodes_[i].wps * G[i];
    return s;
}

std::vector<cplx> radial_projection(const OrbitCache& cache, const ChebGrid& grid, int M)
{
    const int n = cache.n_theta, nr = grid.size();
    std::vector<cplx> tw(n);
    for (int k = 0; k < n; ++k) tw[k] = std::polar(1.0, -TWO_PI * k / n);
    std::vector<cplx> P(static_cast<std::size_t>(cache.size()) * (M + 1) * nr, cplx(0));
    parallel_for(cache.size(), [&](std::size_t i) {
        const double* r = cache.r_of(static_cast<int>(i));
        cplx* p = &P[i * (M + 1) * nr];
        for (int k = 0; k < n; ++k) {
            auto row = grid.interp_row(std::clamp(r[k], grid.a(), grid.b()));
            for (int mm = 0; mm <= M; ++mm) {
                cplx e = tw[(static_cast<long>(mm) * k) % n] / double(n);
                for (int j = 0; j < nr; ++j) p[mm * nr + j] += e * row[j];
            }
        }
    });
    return P;
}

std::vector<OrbitPoint> slice_points(const PolytropeModel& m, double L, const std::vector<double>& gaps)
{
    double emin = minimum_point(m, L).Emin;
    std::vector<OrbitPoint> p;
    for (double g : gaps) p.push_back({emin + g, L});
    return p;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw DomainError("fit_loglog: need at least two points");
    double mx = 0, my = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += sqr(lx[i] - mx);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rr = 0;
    for (std::size_t i = 0; i < n; ++i) rr += sqr(ly[i] - f.intercept - f.slope * lx[i]);
    f.residual = std::sqrt(rr / n);
    return f;
}

SlopeFit mode_scaling_exponent(const ModeField& f, const std::vector<double>& gaps, int mode)
{
    std::vector<double> mag(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) mag[i] = std::abs(f.get(static_cast<int>(i), mode));
    return fit_loglog(gaps, mag);
}

}  // namespace shellvp
