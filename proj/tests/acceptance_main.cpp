#include <iostream>
#include <set>
#include <string>

#include "shellvp/acceptance.hpp"

int main(int argc, char** argv)
{
    shellvp::AcceptanceOptions opt;
    for (int k = 1; k < argc; ++k) opt.only.insert(std::stoi(argv[k]));
    auto results = shellvp::run_acceptance(std::cout, opt);
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
