#pragma once

#include "shellvp/action_angle.hpp"

namespace shellvp {

struct FoliationPoint {
    double R;
    double y;
    double z;
};

// y = omega(I), z = E - Psi_L(R)
FoliationPoint to_yz(const PolytropeModel& m, double R, OrbitPoint I);

// inverse along the line L = 2R^2 (E - z - U(R) + M/R)
OrbitPoint from_yz(const PolytropeModel& m, double R, double y, double z);

// L on the z-line through (R, z) at energy E
double zline_L(const PolytropeModel& m, double R, double z, double E);

// -P_R omega = -(d_E omega / (2R^2) + d_L omega)
double jacobian(const PolytropeModel& m, double R, OrbitPoint I);
double jacobian(double R, const FrequencyDerivatives& d);

// q = |phi'| / |P_R omega|, zero outside the support
double weight_q(const PolytropeModel& m, double R, OrbitPoint I);

// L with r_L = R
double L_R(const PolytropeModel& m, double R);

// E-range [E_a + z, E0] of the z-line inside the support
std::pair<double, double> zline_energy_range(const PolytropeModel& m, double R, double z);

}  // namespace shellvp
