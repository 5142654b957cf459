#include "shellvp/transport.hpp"

#include <algorithm>
#include <cmath>

namespace shellvp {

ModeField evolve_pure_transport(const ModeField& f0, const std::vector<double>& omega, double t)
{
    if (t < 0) throw DomainError("evolve_pure_transport: t must be nonnegative");
    if (static_cast<int>(omega.size()) != f0.n) throw DomainError("evolve_pure_transport: frequency count mismatch");
    ModeField f = f0;
    parallel_for(static_cast<std::size_t>(f0.n), [&](std::size_t i) {
        cplx ph = std::polar(1.0, -TWO_PI * omega[i] * t), p = 1;
        for (int m = 1; m <= f0.M; ++m) {
            p *= ph;
            f.at(static_cast<int>(i), m) *= p;
        }
    });
    return f;
}

double transport_norm(const ShellGrid& grid, const ModeField& f)
{
    std::vector<double> G(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) {
        double s = 0;
        for (int m = 1; m <= f.M; ++m) s += 2 * std::norm(f.at(i, m));
        G[i] = grid.nodes()[i].dphi * s;
    }
    return grid.phase_space_sum(G);
}

ForceSeries transport_force_series(const ShellGrid& grid, const ModeField& f0, const std::vector<double>& times)
{
    if (f0.n != grid.n_nodes()) throw DomainError("transport_force_series: field does not live on this grid");
    ForceSeries s;
    s.times = times;
    for (const auto& sh : grid.shells()) s.radii.push_back(sh.R);
    s.force.assign(times.size(), std::vector<double>(s.radii.size()));
    s.sup.assign(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t k) {
        if (times[k] < 0) throw DomainError("transport_force_series: negative time");
        double mx = 0;
        for (int j = 0; j < grid.n_shells(); ++j) {
            s.force[k][j] = grid.force_at(j, f0, times[k]);
            mx = std::max(mx, std::abs(s.force[k][j]));
        }
        s.sup[k] = mx;
    });
    return s;
}

std::vector<double> geometric_times(double t0, double t1, double rho)
{
    if (!(t0 > 0) || !(t1 >= t0) || !(rho > 1)) throw DomainError("geometric_times: need 0 < t0 <= t1, rho > 1");
    std::vector<double> t;
    for (double x = t0; x <= t1 * (1 + 1e-12); x *= rho) t.push_back(x);
    return t;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, const DecayFitOptions& opt)
{
    if (times.size() != values.size()) throw DomainError("fit_decay_rate: size mismatch");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= opt.t_lo && times[k] <= opt.t_hi) {
            if (!(values[k] > 0)) throw DomainError("fit_decay_rate: series must be positive over the window");
            x.push_back(1 + times[k]);
            y.push_back(values[k]);
        }
    if (x.size() < 2) throw DomainError("fit_decay_rate: fewer than two samples in the window");
    auto raw = fit_loglog(x, y);
    DecayFit out{-raw.slope, raw.residual, false, static_cast<int>(x.size())};
    if (raw.residual <= opt.residual_threshold) return out;

    std::vector<double> ex, ey;
    for (double tj : geometric_times(opt.t_lo, opt.t_hi, opt.rho)) {
        double hw = opt.half_window > 0 ? opt.half_window : 0.5 * (opt.rho - 1) * tj;
        double mx = 0;
        for (std::size_t k = 0; k < times.size(); ++k)
            if (std::abs(times[k] - tj) <= hw) mx = std::max(mx, values[k]);
        if (mx > 0) {
            ex.push_back(1 + tj);
            ey.push_back(mx);
        }
    }
    if (ex.size() < 2) return out;
    auto env = fit_loglog(ex, ey);
    return {-env.slope, env.residual, true, static_cast<int>(ex.size())};
}

TransportResult run_transport(const PolytropeModel& m, const InitialData& data, const TransportSetup& setup)
{
    ShellGrid grid(m, setup.grid);
    auto cache = OrbitCache::build(m, grid.points(), setup.n_theta);
    auto f0 = analyze(cache, data.f, setup.M_max, setup.analyze);
    double Tmin = 1e300, Tmax = 0;
    for (const auto& nd : grid.nodes()) {
        Tmin = std::min(Tmin, nd.T);
        Tmax = std::max(Tmax, nd.T);
    }
    double dt = setup.dt > 0 ? setup.dt : Tmin / 8;
    double hw = 0.5 * Tmax;
    std::vector<double> times;
    for (double t = std::max(0.0, setup.t_lo - hw); t <= setup.t_hi + hw; t += dt) times.push_back(t);

    TransportResult r;
    r.series = transport_force_series(grid, f0, times);
    DecayFitOptions fo;
    fo.t_lo = setup.t_lo;
    fo.t_hi = setup.t_hi;
    fo.half_window = hw;
    r.half_window = hw;
    r.fit = fit_decay_rate(r.series.times, r.series.sup, fo);
    r.predicted_K = std::min({m.params.mu - 1, m.params.nu, data.k});
    std::vector<double> om(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) om[i] = grid.nodes()[i].omega;
    r.norm0 = transport_norm(grid, f0);
    r.norm_end = transport_norm(grid, evolve_pure_transport(f0, om, setup.t_hi));
    return r;
}

}  // namespace shellvp
