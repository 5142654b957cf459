#pragma once

#include <map>
#include <vector>

#include "shellvp/spectral_field.hpp"

namespace shellvp {

enum class Coupling {
    filon,   // U(R) from the shell-grid force, sampled along the orbits
    kernel,  // symmetric radial kernel -1/max(r, r') over all orbit samples
};

struct LinearizedSetup {
    ShellGridSpec grid{17, 61, 12, 3.0};
    Coupling coupling = Coupling::filon;
    int M_max = 8;
    int n_theta = 0;           // 0 selects 4 M_max
    double dt_fraction = 0.2;  // dt = dt_fraction / (M_max omega_max)
};

// mode-space linearized Vlasov-Poisson operator on the nodes of a shell grid
class LinearizedSystem {
public:
    LinearizedSystem(const PolytropeModel& m, const LinearizedSetup& setup = {});

    const PolytropeModel& model() const { return *model_; }
    const ShellGrid& grid() const { return grid_; }
    const OrbitCache& cache() const { return cache_; }
    const LinearizedSetup& setup() const { return setup_; }
    int M() const { return setup_.M_max; }
    int n_nodes() const { return grid_.n_nodes(); }
    double eta() const { return model_->params.eta; }
    double omega(int node) const { return grid_.nodes()[node].omega; }
    double omega_max() const { return omega_max_; }
    double omega_min() const { return omega_min_; }
    // Antonov weight |phi'| T dI per node
    double weight(int node) const { return weight_[node]; }

    ModeField project(const PhaseFunction& f0, const AnalyzeOptions& opt = {}) const;

    // real samples f(theta_k, I) of a mode field
    std::vector<double> synthesize(const ModeField& f) const;
    // U_{|phi'| f} at every orbit sample by the radial kernel
    std::vector<double> potential_samples(const ModeField& f) const;
    // U_{|phi'| f} on the radial grid from the shell-grid force, f = exp(-2 pi i m omega t) g
    RadialProfile potential_profile(const ModeField& g, double t = 0) const;
    // U hat(m, I), m = 1..M, of the field f = exp(-2 pi i m omega t) g; u0 receives the largest |U hat(0, I)|
    ModeField potential_modes(const ModeField& g, double t = 0, double* u0 = nullptr) const;
    // df/dt = -2 pi i m omega (f + eta U hat)
    ModeField rhs(const ModeField& f) const;

    // sum_m int |phi'| |f|^2 T dI + eta <f, U_f>
    double antonov_norm(const ModeField& g, double t = 0) const;
    // int |phi'| f T dtheta dI
    double mass(const ModeField& g, double t = 0) const;
    // sum_m int |phi'| |f|^2 T dI
    double weighted_norm(const ModeField& f) const;

    double dt_default() const;
    double dt_limit() const;

private:
    const PolytropeModel* model_;
    LinearizedSetup setup_;
    ShellGrid grid_;
    OrbitCache cache_;
    std::vector<double> weight_;
    std::vector<std::uint32_t> order_;  // samples sorted by radius
    std::vector<double> cos_, sin_;     // [k * M + m - 1]
    std::vector<cplx> proj_;            // [(node * (M + 1) + m) * n_radial + j]: DFT of the radial interpolation rows
    double omega_max_ = 0, omega_min_ = 0;
};

// state in the interaction picture: f(t) = exp(-2 pi i m omega t) g(t)
struct SimState {
    double t = 0;
    ModeField g;
    std::vector<cplx> zero_mode;  // m = 0 channel, evolved by the same step
};

ModeField rotate(const LinearizedSystem& sys, const ModeField& g, double t);
ModeField field_of(const LinearizedSystem& sys, const SimState& s);
SimState initial_state(const LinearizedSystem& sys, const ModeField& f0);

// one RK4 step of the interaction-picture equation (Lawson scheme)
SimState step(const LinearizedSystem& sys, const SimState& s, double dt);

struct RunOptions {
    double t_end = 200;
    double dt = 0;               // 0 selects the default rule, rounded so integer times are hit
    double force_every = 0.25;   // force sampling interval
    double diag_every = 1.0;     // conservation diagnostics interval
    std::vector<double> snapshot_times;
};

struct RunOutput {
    double dt = 0;
    int steps = 0;
    std::vector<double> diag_times, antonov, mass, zero_mode;
    std::vector<double> force_times;
    std::vector<double> radii;
    std::vector<std::vector<double>> force;  // [time][radius]
    std::vector<double> sup;
    std::map<double, ModeField> snapshots;  // g at snapshot times
    double max_u0 = 0;                      // largest U hat(0) seen
    double antonov_drift() const;           // max relative deviation from the initial value
};

RunOutput run(const LinearizedSystem& sys, const ModeField& f0, const RunOptions& opt);

struct GapCheck {
    double fraction = 0;  // power fraction with |lambda| < cut
    double lambda_min = 0;
    double cut = 0;
};

// Hann-windowed DFT of a uniformly sampled signal
GapCheck spectral_gap_check(const std::vector<double>& times, const std::vector<double>& signal, double lambda_min,
                            double cut_factor = 0.9);

// ||g(2t) - g(t)|| in the weighted norm for each t with both snapshots present
std::vector<double> scattering_profile(const LinearizedSystem& sys, const RunOutput& out, const std::vector<double>& ts);

}  // namespace shellvp
