#pragma once

#include <vector>

#include "json.hpp"

#include "shellvp/common.hpp"

namespace shellvp {

struct PolytropeParams {
    double mu = 3.5;
    double nu = 2.0;
    double eta = 0.0;
    double kappa = -0.25;
    double M = 1.0;
    double L0 = 1.0;
    double eta_max = 0.05;

    // throws DomainError
    void validate() const;
};

// quintic Hermite table of the potential on [ra, rb]; constant for r < ra,
// c/r for r > rb
class RadialTable {
public:
    RadialTable() = default;
    RadialTable(std::vector<double> r, std::vector<double> u, std::vector<double> du,
                std::vector<double> d2u, double exterior_c);
    bool empty() const { return r_.empty(); }
    double value(double r) const;
    double deriv(double r) const;
    double deriv2(double r) const;
    double exterior_c() const { return c_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& du() const { return du_; }
    const std::vector<double>& d2u() const { return d2u_; }

private:
    void eval(double r, double& f, double& df, double& d2f) const;
    std::vector<double> r_, u_, du_, d2u_;
    double c_ = 0;
};

struct MinimumPoint {
    double rL;
    double Emin;
    double alpha;  // Psi_L''(r_L)
};

struct SelfConsistentOptions {
    int n_radial = 2048;
    double tol = 1e-13;
    int max_iter = 200;
    double relaxation = 1.0;
};

struct PolytropeModel {
    PolytropeParams params;
    RadialTable U_table;
    double E0 = 0, Lmax = 0, Rmin = 0, Rmax = 0;
    int N = 0;
    int Kdefault = 0;
    double c_munu = 0;
    int iterations = 0;
    double contraction = 0;
    double last_update = 0;

    bool kepler() const { return U_table.empty(); }
    double U(double r) const;
    double dU(double r) const;
    double d2U(double r) const;
    double psi(double r, double L) const;
    double dpsi(double r, double L) const;
    double d2psi(double r, double L) const;
    double density(double r) const;
    double mass() const;
    // phi(E,L) / eta and its E-derivative / eta
    double phi_shape(double E, double L) const;
    double dphi_shape(double E, double L) const;
    // L such that r_L = R
    double L_of_rL(double R) const;
};

PolytropeModel build_kepler(const PolytropeParams& p);
PolytropeModel build_selfconsistent(const PolytropeParams& p, const SelfConsistentOptions& opt = {});

double effective_potential(const PolytropeModel& m, double r, double L);
MinimumPoint minimum_point(const PolytropeModel& m, double L);

// c_{mu,nu} = pi 2^{nu+3/2} B(mu+1,nu+1) B(1/2,mu+nu+2)
double density_constant(double mu, double nu);
int regularity_N(double mu, double nu);
int decay_index_K(double mu, double nu, double k);

// sup |U_new - U| after one more Poisson solve from the model's own density
double selfconsistency_residual(const PolytropeModel& m);

void to_json(nlohmann::json& j, const PolytropeParams& p);
void from_json(const nlohmann::json& j, PolytropeParams& p);
void to_json(nlohmann::json& j, const PolytropeModel& m);
void from_json(const nlohmann::json& j, PolytropeModel& m);

}  // namespace shellvp
