#include "shellvp/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shellvp {

LinearizedSystem::LinearizedSystem(const PolytropeModel& m, const LinearizedSetup& setup)
    : model_(&m), setup_(setup), grid_(m, setup.grid)
{
    if (setup_.M_max < 1) throw ConfigError("linearized: M_max must be positive");
    if (setup_.n_theta == 0) setup_.n_theta = 4 * setup_.M_max;
    if (!(setup_.dt_fraction > 0)) throw ConfigError("linearized: dt_fraction must be positive");
    cache_ = OrbitCache::build(m, grid_.points(), setup_.n_theta);
    const int n = setup_.n_theta, M = setup_.M_max, N = n_nodes();
    weight_.resize(N);
    omega_min_ = 1e300;
    for (int i = 0; i < N; ++i) {
        const auto& nd = grid_.nodes()[i];
        weight_[i] = nd.wps * nd.dphi;
        omega_max_ = std::max(omega_max_, nd.omega);
        omega_min_ = std::min(omega_min_, nd.omega);
    }
    order_.resize(cache_.r.size());
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return cache_.r[a] < cache_.r[b]; });
    cos_.resize(static_cast<std::size_t>(n) * M);
    sin_.resize(cos_.size());
    for (int k = 0; k < n; ++k)
        for (int mm = 1; mm <= M; ++mm) {
            double a = TWO_PI * ((static_cast<long>(mm) * k) % n) / n;
            cos_[k * M + mm - 1] = std::cos(a);
            sin_[k * M + mm - 1] = std::sin(a);
        }
    if (setup_.coupling == Coupling::filon) proj_ = radial_projection(cache_, grid_.radial(), M);
}

ModeField LinearizedSystem::project(const PhaseFunction& f0, const AnalyzeOptions& opt) const
{
    return analyze(cache_, f0, M(), opt);
}

std::vector<double> LinearizedSystem::synthesize(const ModeField& f) const
{
    const int n = setup_.n_theta, M = this->M();
    if (f.M != M || f.n != n_nodes()) throw DomainError("linearized: mode field shape mismatch");
    std::vector<double> s(static_cast<std::size_t>(n_nodes()) * n);
    parallel_for(n_nodes(), [&](std::size_t i) {
        const cplx* c = &f.c[i * M];
        double* out = &s[i * n];
        for (int k = 0; k < n; ++k) {
            const double* cs = &cos_[k * M];
            const double* sn = &sin_[k * M];
            double v = 0;
            for (int mm = 0; mm < M; ++mm) v += c[mm].real() * cs[mm] - c[mm].imag() * sn[mm];
            out[k] = 2 * v;
        }
    });
    return s;
}

std::vector<double> LinearizedSystem::potential_samples(const ModeField& f) const
{
    const int n = setup_.n_theta;
    auto s = synthesize(f);
    const std::size_t S = s.size();
    std::vector<double> q(S);
    for (std::size_t j = 0; j < S; ++j) q[j] = weight_[j / n] * s[j] / n;
    // U(r) = -4 pi^2 [ (1/r) sum_{r' <= r} q + sum_{r' > r} q / r' ]
    std::vector<double> U(S);
    double inner = 0;
    std::vector<double> acc(S);
    for (std::size_t a = 0; a < S; ++a) {
        inner += q[order_[a]];
        acc[a] = inner;
    }
    double outer = 0;
    for (std::size_t a = S; a-- > 0;) {
        std::uint32_t j = order_[a];
        double r = cache_.r[j];
        U[j] = -4 * PI * PI * (acc[a] / r + outer);
        outer += q[j] / r;
    }
    return U;
}

RadialProfile LinearizedSystem::potential_profile(const ModeField& g, double t) const
{
    return potential_from_force(grid_.radial(), grid_.force(g, t), 0.0);
}

ModeField LinearizedSystem::potential_modes(const ModeField& g, double t, double* u0) const
{
    const int n = setup_.n_theta, M = this->M();
    ModeField out(n_nodes(), M);
    std::vector<double> mean(n_nodes());
    if (setup_.coupling == Coupling::filon) {
        auto U = potential_profile(g, t).values;
        const int nr = static_cast<int>(U.size());
        parallel_for(n_nodes(), [&](std::size_t i) {
            const cplx* P = &proj_[i * (M + 1) * nr];
            for (int mm = 0; mm <= M; ++mm) {
                cplx s = 0;
                for (int j = 0; j < nr; ++j) s += P[mm * nr + j] * U[j];
                if (mm == 0)
                    mean[i] = std::abs(s);
                else
                    out.at(static_cast<int>(i), mm) = s;
            }
        });
    } else {
        auto U = potential_samples(t == 0 ? g : rotate(*this, g, t));
        parallel_for(n_nodes(), [&](std::size_t i) {
            const double* u = &U[i * n];
            cplx* c = &out.c[i * M];
            double m0 = 0;
            for (int k = 0; k < n; ++k) {
                m0 += u[k];
                const double* cs = &cos_[k * M];
                const double* sn = &sin_[k * M];
                for (int mm = 0; mm < M; ++mm) c[mm] += cplx(u[k] * cs[mm], -u[k] * sn[mm]);
            }
            for (int mm = 0; mm < M; ++mm) c[mm] /= double(n);
            mean[i] = std::abs(m0 / n);
        });
    }
    if (u0) *u0 = mean.empty() ? 0 : *std::max_element(mean.begin(), mean.end());
    return out;
}

ModeField LinearizedSystem::rhs(const ModeField& f) const
{
    auto U = potential_modes(f);
    const double eta = this->eta();
    ModeField d(n_nodes(), M());
    for (int i = 0; i < n_nodes(); ++i)
        for (int mm = 1; mm <= M(); ++mm)
            d.at(i, mm) = cplx(0, -TWO_PI * mm * omega(i)) * (f.at(i, mm) + eta * U.at(i, mm));
    return d;
}

double LinearizedSystem::weighted_norm(const ModeField& f) const
{
    double s = 0;
    for (int i = 0; i < n_nodes(); ++i) {
        double a = 0;
        for (int mm = 1; mm <= M(); ++mm) a += std::norm(f.at(i, mm));
        s += weight_[i] * 2 * a;
    }
    return s;
}

double LinearizedSystem::antonov_norm(const ModeField& g, double t) const
{
    auto f = t == 0 ? g : rotate(*this, g, t);
    auto U = potential_modes(g, t);
    double cross = 0;
    for (int i = 0; i < n_nodes(); ++i) {
        double a = 0;
        for (int mm = 1; mm <= M(); ++mm) a += 2 * (std::conj(f.at(i, mm)) * U.at(i, mm)).real();
        cross += weight_[i] * a;
    }
    return weighted_norm(f) + eta() * cross;
}

double LinearizedSystem::mass(const ModeField& g, double t) const
{
    const int n = setup_.n_theta;
    auto s = synthesize(t == 0 ? g : rotate(*this, g, t));
    double a = 0;
    for (std::size_t j = 0; j < s.size(); ++j) a += weight_[j / n] * s[j];
    return 4 * PI * PI * a / n;
}

double LinearizedSystem::dt_default() const { return setup_.dt_fraction / (M() * omega_max_); }

double LinearizedSystem::dt_limit() const { return 2.8 / (TWO_PI * M() * omega_max_); }

ModeField rotate(const LinearizedSystem& sys, const ModeField& g, double t)
{
    ModeField f = g;
    for (int i = 0; i < g.n; ++i) {
        cplx ph = std::polar(1.0, -TWO_PI * sys.omega(i) * t), p = 1;
        for (int mm = 1; mm <= g.M; ++mm) {
            p *= ph;
            f.at(i, mm) *= p;
        }
    }
    return f;
}

ModeField field_of(const LinearizedSystem& sys, const SimState& s) { return rotate(sys, s.g, s.t); }

SimState initial_state(const LinearizedSystem& sys, const ModeField& f0)
{
    if (f0.M != sys.M() || f0.n != sys.n_nodes()) throw DomainError("linearized: initial field shape mismatch");
    return {0.0, f0, std::vector<cplx>(sys.n_nodes(), cplx(0))};
}

namespace {

// dg/dt = exp(2 pi i m omega t) (-2 pi i m omega eta U hat(f)), f = exp(-2 pi i m omega t) g
ModeField interaction_rhs(const LinearizedSystem& sys, const ModeField& g, double t)
{
    auto U = sys.potential_modes(g, t);
    const double eta = sys.eta();
    for (int i = 0; i < g.n; ++i) {
        double om = sys.omega(i);
        cplx ph = std::polar(1.0, TWO_PI * om * t), p = 1;
        for (int mm = 1; mm <= g.M; ++mm) {
            p *= ph;
            U.at(i, mm) = p * cplx(0, -TWO_PI * mm * om * eta) * U.at(i, mm);
        }
    }
    return U;
}

void axpy(ModeField& y, double a, const ModeField& x)
{
    for (std::size_t k = 0; k < y.c.size(); ++k) y.c[k] += a * x.c[k];
}

}  // namespace

SimState step(const LinearizedSystem& sys, const SimState& s, double dt)
{
    if (!(dt > 0) || dt > sys.dt_limit())
        throw ConfigError("linearized: dt = " + std::to_string(dt) + " violates the stability limit " +
                          std::to_string(sys.dt_limit()));
    auto k1 = interaction_rhs(sys, s.g, s.t);
    ModeField y = s.g;
    axpy(y, 0.5 * dt, k1);
    auto k2 = interaction_rhs(sys, y, s.t + 0.5 * dt);
    y = s.g;
    axpy(y, 0.5 * dt, k2);
    auto k3 = interaction_rhs(sys, y, s.t + 0.5 * dt);
    y = s.g;
    axpy(y, dt, k3);
    auto k4 = interaction_rhs(sys, y, s.t + dt);
    SimState out{s.t + dt, s.g, s.zero_mode};
    for (std::size_t k = 0; k < out.g.c.size(); ++k) out.g.c[k] += dt / 6 * (k1.c[k] + 2.0 * k2.c[k] + 2.0 * k3.c[k] + k4.c[k]);
    // m = 0: the frequency factor vanishes
    for (int i = 0; i < sys.n_nodes(); ++i) out.zero_mode[i] += cplx(0, -TWO_PI * 0 * sys.omega(i)) * dt * out.zero_mode[i];
    return out;
}

double RunOutput::antonov_drift() const
{
    double d = 0;
    for (double a : antonov) d = std::max(d, std::abs(a - antonov.front()) / std::abs(antonov.front()));
    return d;
}

RunOutput run(const LinearizedSystem& sys, const ModeField& f0, const RunOptions& opt)
{
    if (!(opt.t_end > 0)) throw ConfigError("linearized: t_end must be positive");
    double dt = opt.dt > 0 ? opt.dt : sys.dt_default();
    if (opt.dt <= 0 && dt < 1) dt = 1.0 / std::ceil(1.0 / dt);
    if (dt > sys.dt_limit())
        throw ConfigError("linearized: dt = " + std::to_string(dt) + " violates the stability limit " +
                          std::to_string(sys.dt_limit()));
    RunOutput out;
    out.dt = dt;
    out.steps = static_cast<int>(std::llround(opt.t_end / dt));
    int fe = std::max(1, static_cast<int>(std::llround(opt.force_every / dt)));
    int de = std::max(1, static_cast<int>(std::llround(opt.diag_every / dt)));
    for (const auto& sh : sys.grid().shells()) out.radii.push_back(sh.R);

    auto state = initial_state(sys, f0);
    auto observe = [&](int k) {
        double t = state.t;
        if (k % fe == 0) {
            auto F = sys.grid().force(state.g, t);
            double mx = 0;
            for (double v : F) mx = std::max(mx, std::abs(v));
            out.force_times.push_back(t);
            out.force.push_back(std::move(F));
            out.sup.push_back(mx);
        }
        if (k % de == 0 || k == out.steps) {
            double u0 = 0;
            sys.potential_modes(state.g, t, &u0);
            out.max_u0 = std::max(out.max_u0, u0);
            out.diag_times.push_back(t);
            out.antonov.push_back(sys.antonov_norm(state.g, t));
            out.mass.push_back(sys.mass(state.g, t));
            double z = 0;
            for (const auto& c : state.zero_mode) z = std::max(z, std::abs(c));
            out.zero_mode.push_back(z);
        }
        for (double ts : opt.snapshot_times)
            if (std::abs(ts - t) < 0.5 * dt) out.snapshots[ts] = state.g;
    };
    observe(0);
    for (int k = 1; k <= out.steps; ++k) {
        state = step(sys, state, dt);
        state.t = k * dt;
        observe(k);
    }
    return out;
}

GapCheck spectral_gap_check(const std::vector<double>& times, const std::vector<double>& signal, double lambda_min,
                            double cut_factor)
{
    const std::size_t N = signal.size();
    if (N < 8 || times.size() != N) throw DomainError("spectral_gap_check: need at least 8 uniform samples");
    double h = (times.back() - times.front()) / (N - 1);
    std::vector<double> x(N);
    for (std::size_t k = 0; k < N; ++k) x[k] = signal[k] * sqr(std::sin(PI * k / (N - 1)));
    GapCheck g;
    g.lambda_min = lambda_min;
    g.cut = cut_factor * lambda_min;
    double inside = 0, total = 0;
    for (std::size_t j = 0; j < N; ++j) {
        long jj = j <= N / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(N);
        double lam = TWO_PI * jj / (N * h);
        cplx s = 0;
        for (std::size_t k = 0; k < N; ++k) s += x[k] * std::polar(1.0, -TWO_PI * double((j * k) % N) / N);
        double p = std::norm(s);
        total += p;
        if (std::abs(lam) < g.cut) inside += p;
    }
    g.fraction = total > 0 ? inside / total : 0;
    return g;
}

std::vector<double> scattering_profile(const LinearizedSystem& sys, const RunOutput& out, const std::vector<double>& ts)
{
    std::vector<double> d;
    for (double t : ts) {
        auto a = out.snapshots.find(t), b = out.snapshots.find(2 * t);
        if (a == out.snapshots.end() || b == out.snapshots.end())
            throw DomainError("scattering_profile: missing snapshot at t = " + std::to_string(t));
        ModeField diff = b->second;
        for (std::size_t k = 0; k < diff.c.size(); ++k) diff.c[k] -= a->second.c[k];
        d.push_back(std::sqrt(sys.weighted_norm(diff)));
    }
    return d;
}

}  // namespace shellvp
