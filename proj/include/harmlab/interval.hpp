#pragma once

#include <limits>

namespace harmlab {

// Closed value interval [lo, hi]; either end may be infinite.
struct Interval {
    double lo;
    double hi;

    bool contains(double v) const { return v >= lo && v <= hi; }
    static Interval ray(double u) { return {u, std::numeric_limits<double>::infinity()}; }
    static Interval all() {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }
};

}  // namespace harmlab
