#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shellvp {

using cplx = std::complex<double>;
inline constexpr double PI = std::numbers::pi;
inline constexpr double TWO_PI = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// parameters outside the admissible range (mu <= 3, N < 4, kappa out of range, ...)
class DomainError : public Error {
public:
    using Error::Error;
};

// radius outside the shell, empty D_R, point outside the support
class GeometryError : public Error {
public:
    using Error::Error;
};

// non-convergence, NaN, failed bracketing
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// number of worker threads; SHELLVP_THREADS sets the default
int thread_count();
void set_thread_count(int n);

// static contiguous chunking, so results do not depend on scheduling
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

inline double sqr(double x) { return x * x; }

// uniform grid a..b with n points
std::vector<double> linspace(double a, double b, int n);

}  // namespace shellvp
