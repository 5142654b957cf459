#pragma once

#include <array>
#include <vector>

#include "shellvp/common.hpp"

namespace shellvp {

struct Rule {
    std::vector<double> x, w;
    int size() const { return static_cast<int>(x.size()); }
};

// Gauss-Legendre rule on [a, b]
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Chebyshev-Lobatto nodes on [a, b] in ascending order
class ChebGrid {
public:
    ChebGrid() = default;
    ChebGrid(double a, double b, int n);

    int size() const { return static_cast<int>(x_.size()); }
    double a() const { return a_; }
    double b() const { return b_; }
    const std::vector<double>& nodes() const { return x_; }
    double node(int i) const { return x_[i]; }
    // Clenshaw-Curtis weights
    const std::vector<double>& weights() const { return w_; }

    // barycentric interpolation row at x
    std::vector<double> interp_row(double x) const;
    template <class T>
    T interp(const std::vector<T>& f, double x) const
    {
        auto row = interp_row(x);
        T s{};
        for (int j = 0; j < size(); ++j) s += row[j] * f[j];
        return s;
    }
    // (C f)_i = int_{x_i}^{b} f, row-major n x n
    const std::vector<double>& tail_matrix() const { return tail_; }
    template <class T>
    std::vector<T> tail_integral(const std::vector<T>& f) const
    {
        int n = size();
        std::vector<T> out(n, T{});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[i] += tail_[i * n + j] * f[j];
        return out;
    }

private:
    double a_ = 0, b_ = 1;
    std::vector<double> x_, w_, bw_, tail_;
};

// Filon rule on a nondecreasing node set y_0..y_{3P}: piecewise cubic
// interpolation of the amplitude, exact moments of exp(-i kappa y)
class FilonLine {
public:
    FilonLine() = default;
    explicit FilonLine(std::vector<double> y);
    int size() const { return static_cast<int>(y_.size()); }
    const std::vector<double>& nodes() const { return y_; }
    // w_k with sum_k w_k g(y_k) ~ int g(y) exp(-i kappa y) dy
    std::vector<cplx> weights(double kappa) const;
    void weights(double kappa, std::vector<cplx>& out) const;

private:
    std::vector<double> y_;
    std::vector<double> c_, h_;
    std::vector<std::array<double, 16>> lag_;  // [n*4 + k]
};

// J_n(a) = int_{-1}^{1} u^n exp(-i a u) du for n = 0..3
std::array<cplx, 4> filon_moments(double a);

// weights for int_{y_0}^{y_{n-1}} h(y)/(y - s) dy with h piecewise linear,
// Im s != 0
std::vector<cplx> plemelj_log_weights(const std::vector<double>& y, cplx s);
void plemelj_log_weights(const std::vector<double>& y, cplx s, std::vector<cplx>& out);

// composite 3/8 rule weights on n = 3P+1 uniform points of spacing 1/(n-1)
std::vector<double> three_eighths_weights(int n);

// end-clustered map of [0,1]: u^p / (u^p + (1-u)^p)
double graded(double u, double p);
double graded_deriv(double u, double p);

// cubic Lagrange interpolation on a uniform grid
class UniformGrid {
public:
    UniformGrid() = default;
    UniformGrid(double a, double b, int n);
    int size() const { return n_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double x(int i) const { return a_ + h_ * i; }
    // 4-point stencil (clamped at the ends)
    void stencil(double x, int& i0, std::array<double, 4>& w) const;
    template <class T>
    T eval(const std::vector<T>& f, double x) const
    {
        int i0;
        std::array<double, 4> w;
        stencil(x, i0, w);
        T s{};
        for (int k = 0; k < 4; ++k) s += w[k] * f[i0 + k];
        return s;
    }

private:
    double a_ = 0, b_ = 1, h_ = 1;
    int n_ = 0;
};

}  // namespace shellvp
