#include "shellvp/initial_data.hpp"

#include <cmath>

namespace shellvp {

std::vector<std::string> initial_data_names() { return {"smooth", "bump", "odd", "k1", "jump", "el"}; }

InitialData make_initial_data(const std::string& name, const PolytropeModel& m)
{
    const double r0 = 0.5 * (m.Rmin + m.Rmax);
    const double Ec = m.E0 - 0.3 * (m.E0 - minimum_point(m, m.params.L0).Emin);
    const PolytropeModel* mp = &m;
    InitialData d;
    d.name = name;
    if (name == "smooth") {
        d.f = [r0](double r, double w, double) {
            double x = r - r0;
            return x + 0.8 * w + 0.3 * x * x * w;
        };
    } else if (name == "bump") {
        d.f = [r0](double r, double w, double L) {
            return std::exp(-(sqr(r - r0 + 0.3) + sqr(w)) / 0.16) * (1 + 0.2 * L);
        };
    } else if (name == "odd") {
        d.f = [r0](double r, double w, double L) { return w * (1 + 0.5 * (r - r0) + 0.2 * w * w) * std::exp(-sqr(L - 1.4)); };
    } else if (name == "k1") {
        d.f = [mp, Ec](double r, double w, double L) {
            double e = 0.5 * w * w + mp->psi(r, L) - Ec;
            return w * std::abs(e) * 10.0;
        };
        d.k = 1;
    } else if (name == "jump") {
        d.f = [mp, Ec](double r, double w, double L) {
            double e = 0.5 * w * w + mp->psi(r, L) - Ec;
            return e > 0 ? w : 0.0;
        };
        d.k = 0;
    } else if (name == "el") {
        d.f = [mp](double r, double w, double L) {
            double E = 0.5 * w * w + mp->psi(r, L);
            return std::sin(7 * E) * L;
        };
    } else {
        throw ConfigError("unknown initial data: " + name);
    }
    return d;
}

}  // namespace shellvp
