#include "shellvp/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace shellvp {

Rule gauss_legendre(int n, double a, double b)
{
    if (n < 1) throw DomainError("gauss_legendre: n < 1");
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(PI * (i + 0.75) / (n + 0.5)), pp = 1;
        bool done = false;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1, p2 = 0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (done) break;
            if (std::abs(dz) < 1e-15) done = true;
        }
        double w = 2.0 / ((1 - z * z) * pp * pp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = w;
    }
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = c + h * r.x[i];
        r.w[i] *= h;
    }
    return r;
}

ChebGrid::ChebGrid(double a, double b, int n) : a_(a), b_(b)
{
    if (n < 3) throw DomainError("ChebGrid: need at least 3 nodes");
    const int N = n - 1;
    const double half = 0.5 * (b - a);
    std::vector<double> t(n);
    x_.resize(n);
    for (int j = 0; j < n; ++j) {
        t[j] = -std::cos(PI * j / N);
        x_[j] = a + half * (1.0 + t[j]);
    }
    x_.front() = a;
    x_.back() = b;

    bw_.resize(n);
    for (int j = 0; j < n; ++j) bw_[j] = (j % 2 ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);

    // T_k(t_j) = cos(k pi (N - j) / N)
    auto Tk = [&](int k, int j) { return std::cos(k * PI * (N - j) / N); };

    // Clenshaw-Curtis
    w_.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k <= N; k += 2) {
            double ck = (k == 0 || k == N) ? 0.5 : 1.0;
            s += ck * Tk(k, j) * 2.0 / (1.0 - k * k);
        }
        double cj = (j == 0 || j == N) ? 0.5 : 1.0;
        w_[j] = cj * 2.0 / N * s * half;
    }

    // tail integration matrix via Chebyshev coefficients
    tail_.assign(n * n, 0.0);
    std::vector<double> ak(n + 2), bk(n + 2);
    for (int col = 0; col < n; ++col) {
        for (int k = 0; k <= N; ++k) {
            double s = 0;
            for (int j = 0; j <= N; ++j) {
                double cj = (j == 0 || j == N) ? 0.5 : 1.0;
                s += cj * (j == col ? 1.0 : 0.0) * Tk(k, j);
            }
            ak[k] = 2.0 / N * s;
        }
        ak[0] *= 0.5;
        ak[N] *= 0.5;
        ak[N + 1] = 0;
        std::fill(bk.begin(), bk.end(), 0.0);
        bk[1] = ak[0] - (N >= 2 ? ak[2] : 0.0) / 2.0;
        for (int k = 2; k <= N + 1; ++k) bk[k] = (ak[k - 1] - (k + 1 <= N ? ak[k + 1] : 0.0)) / (2.0 * k);
        double F1 = 0;
        for (int k = 0; k <= N + 1; ++k) F1 += bk[k];
        for (int i = 0; i < n; ++i) {
            double Fi = 0;
            for (int k = 0; k <= N + 1; ++k) Fi += bk[k] * Tk(k, i);
            tail_[i * n + col] = (F1 - Fi) * half;
        }
    }
}

std::vector<double> ChebGrid::interp_row(double x) const
{
    int n = size();
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < n; ++j)
        if (x == x_[j]) {
            row[j] = 1.0;
            return row;
        }
    double den = 0;
    for (int j = 0; j < n; ++j) {
        row[j] = bw_[j] / (x - x_[j]);
        den += row[j];
    }
    for (auto& r : row) r /= den;
    return row;
}

std::array<cplx, 4> filon_moments(double a)
{
    std::array<cplx, 4> J;
    const cplx I(0, 1);
    if (std::abs(a) < 2.0) {
        for (int n = 0; n < 4; ++n) {
            cplx s = 0, term = 1;  // (-i a)^j / j!
            for (int j = 0; j < 40; ++j) {
                if ((n + j) % 2 == 0) s += term * (2.0 / (n + j + 1));
                term *= -I * a / double(j + 1);
            }
            J[n] = s;
        }
        return J;
    }
    cplx em = std::exp(-I * a), ep = std::exp(I * a);
    J[0] = 2.0 * std::sin(a) / a;
    for (int n = 1; n < 4; ++n) {
        double sgn = (n % 2) ? -1.0 : 1.0;
        J[n] = (em - sgn * ep) / (-I * a) + (double(n) / (I * a)) * J[n - 1];
    }
    return J;
}

FilonLine::FilonLine(std::vector<double> y) : y_(std::move(y))
{
    int n = size();
    if (n < 4 || (n - 1) % 3 != 0) throw DomainError("FilonLine: need 3P+1 nodes");
    int P = (n - 1) / 3;
    c_.resize(P);
    h_.resize(P);
    lag_.resize(P);
    for (int p = 0; p < P; ++p) {
        double y0 = y_[3 * p], y3 = y_[3 * p + 3];
        c_[p] = 0.5 * (y0 + y3);
        h_[p] = 0.5 * (y3 - y0);
        lag_[p].fill(0.0);
        if (h_[p] <= 0) continue;
        Eigen::Matrix4d V;
        for (int k = 0; k < 4; ++k) {
            double u = (y_[3 * p + k] - c_[p]) / h_[p];
            for (int m = 0; m < 4; ++m) V(k, m) = std::pow(u, m);
        }
        Eigen::Matrix4d A = V.inverse();  // l_k(u) = sum_m A(m,k) u^m
        for (int m = 0; m < 4; ++m)
            for (int k = 0; k < 4; ++k) lag_[p][m * 4 + k] = A(m, k);
    }
}

void FilonLine::weights(double kappa, std::vector<cplx>& w) const
{
    w.assign(y_.size(), cplx(0));
    const cplx I(0, 1);
    for (std::size_t p = 0; p < c_.size(); ++p) {
        if (h_[p] <= 0) continue;
        auto J = filon_moments(kappa * h_[p]);
        cplx pre = h_[p] * std::exp(-I * kappa * c_[p]);
        for (int k = 0; k < 4; ++k) {
            cplx s = 0;
            for (int m = 0; m < 4; ++m) s += lag_[p][m * 4 + k] * J[m];
            w[3 * p + k] += pre * s;
        }
    }
}

std::vector<cplx> FilonLine::weights(double kappa) const
{
    std::vector<cplx> w;
    weights(kappa, w);
    return w;
}

void plemelj_log_weights(const std::vector<double>& y, cplx s, std::vector<cplx>& w)
{
    int n = static_cast<int>(y.size());
    w.assign(n, cplx(0));
    cplx lk = 0;
    bool have = false;
    for (int k = 0; k + 1 < n; ++k) {
        double d = y[k + 1] - y[k];
        if (d <= 0) {
            have = false;
            continue;
        }
        cplx x = d / (y[k] - s);
        cplx ell, A;
        if (std::abs(x) < 0.1) {
            // ell = log(1+x), A = 1 - ell/x
            cplx p = x;
            ell = 0;
            A = 0;
            for (int j = 1; j < 18; ++j) {
                double sg = (j % 2) ? 1.0 : -1.0;
                ell += sg * p / double(j);
                A += sg * p / double(j + 1);
                p *= x;
            }
            have = false;
        } else {
            if (!have) lk = std::log(cplx(y[k]) - s);
            cplx l1 = std::log(cplx(y[k + 1]) - s);
            ell = l1 - lk;
            lk = l1;
            have = true;
            A = 1.0 + (s - y[k]) * ell / d;
        }
        w[k] += ell - A;
        w[k + 1] += A;
    }
}

std::vector<cplx> plemelj_log_weights(const std::vector<double>& y, cplx s)
{
    std::vector<cplx> w;
    plemelj_log_weights(y, s, w);
    return w;
}

std::vector<double> three_eighths_weights(int n)
{
    if (n < 4 || (n - 1) % 3) throw DomainError("three_eighths_weights: need 3P+1 points");
    double h = 1.0 / (n - 1);
    std::vector<double> w(n, 0.0);
    for (int p = 0; p + 3 < n; p += 3) {
        w[p] += 3.0 * h / 8.0;
        w[p + 1] += 9.0 * h / 8.0;
        w[p + 2] += 9.0 * h / 8.0;
        w[p + 3] += 3.0 * h / 8.0;
    }
    return w;
}

double graded(double u, double p)
{
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    double a = std::pow(u, p), b = std::pow(1 - u, p);
    return a / (a + b);
}

double graded_deriv(double u, double p)
{
    if (u <= 0 || u >= 1) return p == 1 ? 1.0 : 0.0;
    double a = std::pow(u, p), b = std::pow(1 - u, p);
    double da = p * std::pow(u, p - 1), db = -p * std::pow(1 - u, p - 1);
    return (da * b - a * db) / sqr(a + b);
}

UniformGrid::UniformGrid(double a, double b, int n) : a_(a), b_(b), h_((b - a) / (n - 1)), n_(n)
{
    if (n < 4) throw DomainError("UniformGrid: need at least 4 points");
}

void UniformGrid::stencil(double x, int& i0, std::array<double, 4>& w) const
{
    double s = (x - a_) / h_;
    int i = static_cast<int>(std::floor(s)) - 1;
    i0 = std::clamp(i, 0, n_ - 4);
    double u = s - i0;  // position relative to node i0, nodes at 0,1,2,3
    w[0] = -(u - 1) * (u - 2) * (u - 3) / 6.0;
    w[1] = u * (u - 2) * (u - 3) / 2.0;
    w[2] = -u * (u - 1) * (u - 3) / 2.0;
    w[3] = u * (u - 1) * (u - 2) / 6.0;
}

}  // namespace shellvp
