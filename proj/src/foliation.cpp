#include "shellvp/foliation.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

namespace shellvp {

FoliationPoint to_yz(const PolytropeModel& m, double R, OrbitPoint I)
{
    double z = I.E - m.psi(R, I.L);
    if (z < 0) throw GeometryError("to_yz: E < Psi_L(R), point outside J_R");
    return {R, frequency(m, I), z};
}

double zline_L(const PolytropeModel& m, double R, double z, double E)
{
    return 2 * R * R * (E - z - m.U(R) + m.params.M / R);
}

std::pair<double, double> zline_energy_range(const PolytropeModel& m, double R, double z)
{
    double Ea = m.psi(R, m.params.L0);
    return {Ea + z, m.E0};
}

OrbitPoint from_yz(const PolytropeModel& m, double R, double y, double z)
{
    if (z < 0) throw GeometryError("from_yz: z < 0");
    auto [lo, hi] = zline_energy_range(m, R, z);
    if (lo > hi) throw GeometryError("from_yz: z-line misses the support");
    auto f = [&](double E) { return frequency(m, {E, zline_L(m, R, z, E)}) - y; };
    double pad = 1e-6 * (1 + hi - lo);
    double a = lo - pad, b = std::min(hi + pad, -1e-12);
    if (zline_L(m, R, z, a) <= 0) a = lo;
    double fa = f(a), fb = f(b);
    if ((fa > 0) == (fb > 0)) throw GeometryError("from_yz: y outside the frequency range of the z-line");
    boost::uintmax_t it = 100;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), it);
    if (it >= 100) throw NumericalError("from_yz: no convergence");
    double E = 0.5 * (r.first + r.second);
    return {E, zline_L(m, R, z, E)};
}

double jacobian(double R, const FrequencyDerivatives& d) { return -(d.dE / (2 * R * R) + d.dL); }

double jacobian(const PolytropeModel& m, double R, OrbitPoint I)
{
    return jacobian(R, frequency_derivatives(m, I));
}

double weight_q(const PolytropeModel& m, double R, OrbitPoint I)
{
    double dphi = m.dphi_shape(I.E, I.L);
    if (dphi == 0) return 0;
    double j = jacobian(m, R, I);
    if (!(j > 0)) throw GeometryError("weight_q: P_R omega is not sign-definite");
    return std::abs(dphi) / j;
}

double L_R(const PolytropeModel& m, double R) { return m.L_of_rL(R); }

}  // namespace shellvp
