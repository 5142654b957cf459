#pragma once

#include <functional>
#include <vector>

#include "shellvp/action_angle.hpp"
#include "shellvp/quadrature.hpp"

namespace shellvp {

using PhaseFunction = std::function<double(double, double, double)>;

// orbit samples r(theta_k), w(theta_k), theta_k = k/n_theta, per node
struct OrbitCache {
    int n_theta = 0;
    std::vector<OrbitGeometry> geo;
    std::vector<double> r, w;

    int size() const { return static_cast<int>(geo.size()); }
    const double* r_of(int node) const { return r.data() + static_cast<std::size_t>(node) * n_theta; }
    const double* w_of(int node) const { return w.data() + static_cast<std::size_t>(node) * n_theta; }

    static OrbitCache build(const PolytropeModel& m, const std::vector<OrbitPoint>& pts, int n_theta);
};

// Fourier coefficients for m = 1..M; negative m by conjugation (real data)
struct ModeField {
    int M = 0;
    int n = 0;
    std::vector<cplx> c;
    double m0_max = 0;  // largest |f(0, I)| removed by the projection

    ModeField() = default;
    ModeField(int n_nodes, int M_max) : M(M_max), n(n_nodes), c(static_cast<std::size_t>(n_nodes) * M_max) {}
    cplx& at(int node, int m) { return c[static_cast<std::size_t>(node) * M + (m - 1)]; }
    const cplx& at(int node, int m) const { return c[static_cast<std::size_t>(node) * M + (m - 1)]; }
    cplx get(int node, int m) const { return m > 0 ? at(node, m) : std::conj(at(node, -m)); }
};

struct AnalyzeOptions {
    bool strict = false;
    double m0_tol = 1e-8;
};

ModeField analyze(const OrbitCache& cache, const PhaseFunction& f0, int M_max, const AnalyzeOptions& opt = {});

// (1/(pi m)) sin(2 pi m theta(R, I)) for E >= Psi_L(R), else 0
double greens_mode(const PolytropeModel& m, double R, int mode, OrbitPoint I);

struct RadialProfile {
    ChebGrid grid;
    std::vector<double> values;
    double exterior_c = 0;
    double operator()(double R) const;
};

// U(R) = -int_R^{Rmax} F + c/Rmax
RadialProfile potential_from_force(const ChebGrid& grid, const std::vector<double>& force, double exterior_c = 0);

struct ShellGridSpec {
    int n_radial = 25;
    int n_columns = 97;
    int n_L = 16;
    double grading = 3.0;
};

// per-radius quadrature of {E >= Psi_L(R)} in the support: graded energy columns
// with Filon weights in y = omega(E, L0), Gauss-Legendre in L along each column
class ShellGrid {
public:
    struct Shell {
        double R = 0;
        int c0 = 0, c1 = 0;  // column range, ascending energy
        FilonLine filon;     // nodes y of the columns in ascending order
    };
    struct Column {
        double E = 0, y = 0, dEdy = 0, wE = 0;
        int n0 = 0, n1 = 0;
        int shell = 0;
    };
    struct Node {
        double E = 0, L = 0, omega = 0, T = 0, theta = 0;
        double dphi = 0;    // |phi'|
        double wforce = 0;  // L-weight * |phi'| * T
        double wps = 0;     // phase-space weight: sum wps G(I) ~ int G T dI
        int column = 0;
    };

    ShellGrid() = default;
    ShellGrid(const PolytropeModel& m, const ShellGridSpec& spec = {});

    const PolytropeModel& model() const { return *model_; }
    const ChebGrid& radial() const { return radial_; }
    const ShellGridSpec& spec() const { return spec_; }
    int n_shells() const { return static_cast<int>(shells_.size()); }
    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Shell>& shells() const { return shells_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::vector<OrbitPoint> points() const;

    // d_R U of |phi'| f at every shell, f(t) = exp(-2 pi i m omega t) a; modes m_lo..M
    std::vector<double> force(const ModeField& a, double t, int m_lo = 1) const;
    double force_at(int shell, const ModeField& a, double t, int m_lo = 1) const;
    // static force of a mode field (t = 0)
    std::vector<double> static_force(const ModeField& a) const { return force(a, 0.0); }

    // sum_nodes wps G(node)
    double phase_space_sum(const std::vector<double>& G) const;

private:
    const PolytropeModel* model_ = nullptr;
    ShellGridSpec spec_;
    ChebGrid radial_;
    std::vector<Shell> shells_;
    std::vector<Column> columns_;
    std::vector<Node> nodes_;
    std::vector<double> sinm_;  // [node*M_cap + m-1]
    int M_cap_ = 64;
};

// P[(node * (M + 1) + m) * n + j] = (1/n_theta) sum_k row_j(r_k) exp(-2 pi i m k / n_theta), m = 0..M:
// U hat(m, I) of a radial profile given by its values on the grid
std::vector<cplx> radial_projection(const OrbitCache& cache, const ChebGrid& grid, int M);

// points on the slice L = const with E - E_min^L = gaps
std::vector<OrbitPoint> slice_points(const PolytropeModel& m, double L, const std::vector<double>& gaps);

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // rms of log residuals
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// slope of log|f(m)| against log gap along a slice
SlopeFit mode_scaling_exponent(const ModeField& f, const std::vector<double>& gaps, int mode);

}  // namespace shellvp
