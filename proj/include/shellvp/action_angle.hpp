#pragma once

#include <utility>
#include <vector>

#include "json.hpp"
#include "shellvp/steady_state.hpp"

namespace shellvp {

struct OrbitPoint {
    double E;
    double L;
};

struct TurningPoints {
    double rm;
    double rp;
};

// below this energy gap the harmonic closed forms are used
inline constexpr double HARMONIC_CUTOFF = 1e-10;

// everything needed to evaluate orbit integrals at one I = (E, L)
struct OrbitGeometry {
    double E = 0, L = 0;
    double rL = 0, Emin = 0, alpha = 0;
    double rm = 0, rp = 0;
    double T = 0;
    double U_rL = 0, dU_rL = 0;
    bool harmonic = false;
    double gap() const { return E - Emin; }
    double omega() const { return 1.0 / T; }
};

OrbitGeometry orbit_geometry(const PolytropeModel& m, OrbitPoint I);

// Psi_L(r) - E_min^L and E - Psi_L(r), evaluated without cancellation near r_L
double psi_above_min(const PolytropeModel& m, const OrbitGeometry& g, double r);
double kinetic(const PolytropeModel& m, const OrbitGeometry& g, double r);

TurningPoints turning_points(const PolytropeModel& m, OrbitPoint I);
double period(const PolytropeModel& m, OrbitPoint I);
double area(const PolytropeModel& m, OrbitPoint I);
double orbit_area(const PolytropeModel& m, const OrbitGeometry& g);
double frequency(const PolytropeModel& m, OrbitPoint I);

// theta in [0,1)
double angle(const PolytropeModel& m, double r, double w, double L);
// theta in [0, 1/2] of the outgoing passage through R, clamped at the turning points
double angle_at_radius(const PolytropeModel& m, const OrbitGeometry& g, double R);

std::pair<double, double> orbit_position(const PolytropeModel& m, double theta, OrbitPoint I);
std::pair<double, double> orbit_position(const PolytropeModel& m, double theta, const OrbitGeometry& g);

// r, w at theta_k = k/n, k = 0..n-1 (n even)
void sample_orbit(const PolytropeModel& m, const OrbitGeometry& g, int n, double* r, double* w);

struct FrequencyDerivatives {
    double omega;
    double dE;
    double dL;
};
// finite differences of the quadrature frequency
FrequencyDerivatives frequency_derivatives(const PolytropeModel& m, OrbitPoint I);

struct ChartSpec {
    int n_E = 257;
    int n_L = 129;
};

class ActionChart {
public:
    ActionChart() = default;
    ActionChart(const PolytropeModel& m, const ChartSpec& spec = {});

    const PolytropeModel& model() const { return *model_; }
    int nE() const { return nE_; }
    int nL() const { return nL_; }
    // node accessors, i along E (s-coordinate), j along L
    double s_node(int i) const { return s_[i]; }
    double L_node(int j) const { return L_[j]; }
    double Emin_node(int j) const { return Emin_[j]; }
    double E(int i, int j) const { return Emin_[j] + s_[i] * (model_->E0 - Emin_[j]); }
    double rm(int i, int j) const { return rm_[idx(i, j)]; }
    double rp(int i, int j) const { return rp_[idx(i, j)]; }
    double T(int i, int j) const { return T_[idx(i, j)]; }
    double A(int i, int j) const { return A_[idx(i, j)]; }
    double omega(int i, int j) const { return 1.0 / T_[idx(i, j)]; }

    double omega_min() const { return omega_min_; }
    double omega_max() const { return omega_max_; }
    double lambda_min() const { return TWO_PI * omega_min_; }
    double T_min() const { return 1.0 / omega_max_; }
    double T_max() const { return 1.0 / omega_min_; }
    // min over the grid of -d omega / dE
    double c0() const { return c0_; }
    bool omega_monotone() const { return monotone_; }

    // bicubic interpolation in (s, L)
    double interp_T(double E, double L) const;
    double interp_A(double E, double L) const;
    double interp_omega(double E, double L) const;

    nlohmann::json to_json() const;

private:
    int idx(int i, int j) const { return j * nE_ + i; }
    double interp(const std::vector<double>& f, double E, double L) const;
    const PolytropeModel* model_ = nullptr;
    int nE_ = 0, nL_ = 0;
    std::vector<double> s_, L_, Emin_;
    std::vector<double> rm_, rp_, T_, A_;
    double omega_min_ = 0, omega_max_ = 0, c0_ = 0;
    bool monotone_ = false;
};

}  // namespace shellvp
