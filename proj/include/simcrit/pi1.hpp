#pragma once

#include <vector>

#include "simcrit/tstats.hpp"

namespace simcrit {

// Truncation levels for the alternative-proportion estimate: log-spaced grid.
struct GridSpec {
    double c_min = 0.5;
    double c_max = 50.0;
    int points = 200;
};

struct Pi1Estimate {
    double pi1_hat = 0.0;
    double c_star = 0.0;   // maximizing truncation level, smallest on ties
    bool clamped = false;  // raw supremum fell outside [0, 1]
    struct GridPoint {
        double c, g_hat, e_gc, ratio;
    };
    std::vector<GridPoint> grid;
};

// (1/m) sum of min(|T_i|, c)/c over valid features.
double g_hat(const TStatVector& tv, double c);

// sup over the grid of (g_hat(c) - E g_c(Z)) / (1 - E g_c(Z)), clamped
// to [0, 1]. Deterministic: ties in the argmax break toward the smallest c.
Pi1Estimate estimate_pi1(const TStatVector& tv, const GridSpec& grid = {});

}  // namespace simcrit
