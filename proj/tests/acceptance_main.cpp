#include "igkit/acceptance.hpp"

#include <cstdio>

int main() {
    igkit::AcceptanceReport rep = igkit::run_acceptance(42);
    for (const auto& c : rep.criteria)
        std::printf("criterion %2d %-28s %s  (%s)\n", c.id, c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.detail.c_str());
    return rep.all_passed() ? 0 : 1;
}
