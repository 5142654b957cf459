#pragma once

#include <vector>

#include "shellvp/initial_data.hpp"
#include "shellvp/spectral_field.hpp"

namespace shellvp {

// f(t, m, I) = exp(-2 pi i m omega(I) t) f0(m, I), omega per node
ModeField evolve_pure_transport(const ModeField& f0, const std::vector<double>& omega, double t);

// weighted norm sum_m int |phi'| |f|^2 T dI on the shell grid nodes
double transport_norm(const ShellGrid& grid, const ModeField& f);

struct ForceSeries {
    std::vector<double> times;
    std::vector<double> radii;
    std::vector<std::vector<double>> force;  // [time][radius]
    std::vector<double> sup;                 // sup over radii of |d_R U|
};

ForceSeries transport_force_series(const ShellGrid& grid, const ModeField& f0, const std::vector<double>& times);

// t_j = t0 rho^j up to t1
std::vector<double> geometric_times(double t0, double t1, double rho = 1.15);

struct DecayFit {
    double exponent = 0;  // slope magnitude of log sup|F| against log(1+t)
    double residual = 0;
    bool envelope = false;
    int points = 0;
};

struct DecayFitOptions {
    double t_lo = 20, t_hi = 200;
    double residual_threshold = 0.05;
    double rho = 1.15;        // geometric spacing of the envelope samples
    double half_window = 0;   // local maxima within +-half_window of each envelope sample
};

// least squares on the raw series; if the residual exceeds the threshold, fit the envelope of local maxima
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, const DecayFitOptions& opt);

struct TransportSetup {
    ShellGridSpec grid;
    int M_max = 16;
    int n_theta = 64;
    double t_lo = 20, t_hi = 200;
    double dt = 0;  // dense sampling step; 0 selects T_min / 8
    AnalyzeOptions analyze;
};

struct TransportResult {
    ForceSeries series;
    DecayFit fit;
    double predicted_K = 0;
    double half_window = 0;  // envelope window used by the fit
    double norm0 = 0, norm_end = 0;
};

TransportResult run_transport(const PolytropeModel& m, const InitialData& data, const TransportSetup& setup);

}  // namespace shellvp
