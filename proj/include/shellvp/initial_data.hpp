#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shellvp/steady_state.hpp"

namespace shellvp {

struct InitialData {
    std::string name;
    // f0(r, w, L)
    std::function<double(double, double, double)> f;
    // regularity index k (large for smooth data)
    double k = 1e9;
};

// smooth | bump | odd | k1 | jump | el  (el depends on (E, L) only)
InitialData make_initial_data(const std::string& name, const PolytropeModel& m);
std::vector<std::string> initial_data_names();

}  // namespace shellvp
