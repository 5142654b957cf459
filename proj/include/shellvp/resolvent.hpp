#pragma once

#include <vector>

#include "shellvp/spectral_field.hpp"

namespace shellvp {

// denominator y + (lambda + sign i epsilon) / (2 pi m)
struct SpectralPoint {
    double lambda = 0;
    double epsilon = 1e-2;
    int sign = 1;
};

struct ResolventGridSpec {
    int n_radial = 13;
    int n_z = 12;
    int n_y = 49;
    int M_max = 8;
    int n_theta = 0;  // 0 selects 4 M_max
};

// per radius R: z-lines z = z_max v^2 (Gauss-Legendre in v), uniform energy nodes along each line,
// ordered by ascending y = omega
class ResolventGrid {
public:
    struct Line {
        int shell = 0;
        double z = 0, wz = 0;
        int n0 = 0, n1 = 0;
    };
    struct Node {
        double E = 0, L = 0, y = 0, q = 0, T = 0, theta = 0;
    };

    ResolventGrid() = default;
    ResolventGrid(const PolytropeModel& m, const ResolventGridSpec& spec = {});

    const PolytropeModel& model() const { return *model_; }
    const ResolventGridSpec& spec() const { return spec_; }
    const ChebGrid& radial() const { return radial_; }
    int M() const { return spec_.M_max; }
    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Line>& lines() const { return lines_; }
    // line range of shell j
    std::pair<int, int> shell_lines(int j) const { return {shell_first_[j], shell_first_[j + 1]}; }
    const OrbitCache& cache() const { return cache_; }
    double omega_min() const { return omega_min_; }
    double omega_max() const { return omega_max_; }

    double sin_m(int node, int m) const;  // sin(2 pi m theta_R), any m != 0
    // U hat(m, node) of a radial profile on the grid, any m
    cplx project_profile(int node, int m, const std::vector<cplx>& U) const;
    const cplx* projection_row(int node, int m) const;  // m >= 0

    ModeField project(const PhaseFunction& f0, const AnalyzeOptions& opt = {}) const;

private:
    const PolytropeModel* model_ = nullptr;
    ResolventGridSpec spec_;
    ChebGrid radial_;
    std::vector<Line> lines_;
    std::vector<int> shell_first_;
    std::vector<Node> nodes_;
    OrbitCache cache_;
    std::vector<double> sinm_;
    std::vector<cplx> proj_;
    double omega_min_ = 0, omega_max_ = 0;
};

// int_{J_R} values / (y + (lambda + sign i eps)/(2 pi m)) d(y, z) on shell j, values per node
cplx plemelj(const ResolventGrid& g, int shell, int m, const SpectralPoint& sp, const std::vector<cplx>& values);

// (1/2 pi i) int g(y) / (y - x - i eps) dy for g = 1/(1+y^2) by piecewise-linear log weights,
// against the limit (g(x) + i Hg(x)) / 2, Hg(x) = x / (1 + x^2)
struct PlemeljCheck {
    cplx value, limit;
    double error = 0;
};
PlemeljCheck plemelj_model_check(double x, double eps, int n = 40001, double Y = 2000);

// {m : exists I, |omega(I) + lambda/(2 pi m)| < mu omega_min}, 1 <= |m| <= M_max
std::vector<int> near_resonant_set(double omega_min, double omega_max, double lambda, double mu_tilde, int M_max);
double default_mu_tilde(double omega_min, double omega_max);

// source force and potential on the radial grid
struct SourceTerm {
    std::vector<cplx> force;
    std::vector<cplx> potential;
};
SourceTerm source_term(const ResolventGrid& g, const ModeField& f0, const SpectralPoint& sp);

struct SolveOptions {
    double tol = 1e-13;
    int max_iter = 60;
};

struct ResolventSolution {
    SpectralPoint sp;
    std::vector<cplx> U;         // U_eps on the radial grid
    std::vector<cplx> force_src;  // d_R of the source potential
    std::vector<cplx> force_K;    // coupling force -4 pi eta / R^2 sum (1/m) Pl[q, U hat S_m]
    int iterations = 0;
    double contraction = 0;  // ratio of the last two Neumann updates
    double op_norm = 0;      // induced sup norm of K
};

ResolventSolution solve_F(const ResolventGrid& g, const ModeField& f0, const SpectralPoint& sp,
                          const SolveOptions& opt = {});

// symmetric lambda grid, geometric from lambda_min to lambda_cut, n points per side
std::vector<double> lambda_grid(double lambda_min, double lambda_cut, int n_per_side);

struct BoundRow {
    double lambda = 0, epsilon = 0;
    double plus = 0, minus = 0;  // |lambda| ||U^+-||_inf
    double diff = 0;             // |lambda|^2 ||U^+ - U^-||_inf
    double contraction = 0;
};
struct BoundReport {
    std::vector<BoundRow> rows;
    double growth_slope = 0;       // log-log slope of max(plus, minus) against |lambda|
    double diff_growth_slope = 0;  // same for diff
    double eps_ratio = 0;          // sup over lambda at eps/2 divided by sup at eps, worst of both metrics
    double max_contraction = 0;
};
BoundReport resolvent_bound_sweep(const ResolventGrid& g, const ModeField& f0, const std::vector<double>& lambdas,
                                  double epsilon);

struct StoneOptions {
    std::vector<double> eps_schedule{4e-2, 2e-2};
    double spacing = 1.0;  // lambda step in units of eps
    double lambda_cut = 0; // 0 selects 2 pi M_max omega_max + 20 eps
};

struct StoneResult {
    std::vector<double> times, radii;
    // [time][radius]: lambda-integral reconstructions, Richardson extrapolated in eps
    std::vector<std::vector<double>> coupling, source;
    std::vector<std::vector<std::vector<double>>> coupling_by_eps, source_by_eps;  // [eps][time][radius]
};

// e^{eps t} / (2 pi) int e^{i lambda t} [F^-(lambda) - F^+(lambda)] d lambda, coupling and source parts
StoneResult stone_reconstruct(const ResolventGrid& g, const ModeField& f0, const std::vector<double>& times,
                              const StoneOptions& opt = {});

}  // namespace shellvp
