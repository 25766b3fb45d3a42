#include "turbogp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "turbogp/error.hpp"

namespace turbogp {

GridSpec::GridSpec(int n) : n_(n) {
    if (n < 8 || n % 2 != 0) {
        throw InvalidArgument("grid size N must be even and at least 8, got " + std::to_string(n));
    }
}

double torus_distance(const GridSpec& grid, GridPoint a, GridPoint b) {
    const int n = grid.n();
    int d1 = std::abs(a.i1 - b.i1) % n;
    int d2 = std::abs(a.i2 - b.i2) % n;
    d1 = std::min(d1, n - d1);
    d2 = std::min(d2, n - d2);
    return grid.spacing() * std::hypot(double(d1), double(d2));
}

}  // namespace turbogp
