#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "vds/delay.hpp"

namespace vds {

// Interior damping coefficient a0 and delayed-feedback coefficient a1.
// a1 may take either sign; only |a1| enters the stability condition.
struct DampingPair {
    double a0;
    double a1;

    DampingPair(double a0_, double a1_) : a0(a0_), a1(a1_)
    {
        if (a0 < 0.0)
            throw std::invalid_argument("damping: a0 must be >= 0");
        if (!std::isfinite(a0) || !std::isfinite(a1))
            throw std::invalid_argument("damping: coefficients must be finite");
    }
};

// Verdict on |a1| < sqrt(1-d) * a0 together with the admissible ranges of the
// two auxiliary constants of the energy functional: the weight xi of the
// delay history term and the exponential rate lambda inside it.
struct FeasibilityCertificate {
    bool feasible = false;
    double margin = 0.0;       // sqrt(1-d)*a0 - |a1|; positive iff feasible
    double xi_lo = 0.0;        // |a1| / sqrt(1-d)
    double xi_hi = 0.0;        // 2*a0 - |a1| / sqrt(1-d)
    double xi = 0.0;           // interval midpoint (= a0), the chosen weight
    double lambda_bound = 0.0; // (1/tau_max) |log(|a1| / (xi sqrt(1-d)))|, +inf for a1 = 0
    double lambda_cap = 0.0;   // 10 / tau_max, applied when the bound is infinite
    double lambda = 0.0;       // half of min(bound, cap)
    double d = 0.0;            // delay slope bound
    double tau_max = 0.0;      // sup of the delay
};

inline FeasibilityCertificate certify(const DampingPair& pair, const DelayProfile& profile)
{
    FeasibilityCertificate c;
    c.d = profile.slope_bound();
    c.tau_max = profile.upper();
    const double root = std::sqrt(1.0 - c.d);
    const double abs_a1 = std::abs(pair.a1);

    c.margin = root * pair.a0 - abs_a1;
    c.feasible = c.margin > 0.0;
    c.xi_lo = abs_a1 / root;
    c.xi_hi = 2.0 * pair.a0 - abs_a1 / root;
    c.xi = 0.5 * (c.xi_lo + c.xi_hi); // midpoint convention; always equals a0

    c.lambda_cap = 10.0 / c.tau_max;
    if (abs_a1 == 0.0 || c.xi <= 0.0) {
        c.lambda_bound = std::numeric_limits<double>::infinity();
        c.lambda = 0.5 * c.lambda_cap;
    } else {
        c.lambda_bound = std::abs(std::log(abs_a1 / (c.xi * root))) / c.tau_max;
        c.lambda = 0.5 * std::min(c.lambda_bound, c.lambda_cap);
    }
    return c;
}

struct BoundarySample {
    double a1 = 0.0;
    bool feasible = false;
    double margin = 0.0;
};

// Map the stability boundary along a1 at fixed a0 and slope bound d.
// The verdict flips exactly at |a1| = sqrt(1-d)*a0.
inline std::vector<BoundarySample> sweep_boundary(double a0, double d,
                                                  std::span<const double> a1_values)
{
    if (a0 < 0.0)
        throw std::invalid_argument("sweep_boundary: a0 must be >= 0");
    if (d >= 1.0)
        throw std::invalid_argument("sweep_boundary: slope bound must satisfy d < 1");
    const double root = std::sqrt(1.0 - d);
    std::vector<BoundarySample> out;
    out.reserve(a1_values.size());
    for (double a1 : a1_values) {
        BoundarySample s;
        s.a1 = a1;
        s.margin = root * a0 - std::abs(a1);
        s.feasible = s.margin > 0.0;
        out.push_back(s);
    }
    return out;
}

} // namespace vds
