#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amcf {

/// Inputs of the squared error-amplification bound: representative exact
/// normal speed (max |v_j| of the current step), curve length, the point
/// counts of the two discrete representations, and the time step.
struct StabilityInputs {
    double v_star = 0.0;
    double length = 0.0;
    int n1 = 0;
    int n2 = 0;
    double dt = 0.0;

    void validate() const {
        if (length <= 0.0) throw std::invalid_argument("StabilityInputs: length must be positive");
        if (n1 < 5 || n2 < 5) throw std::invalid_argument("StabilityInputs: point counts must be >= 5");
        if (dt <= 0.0) throw std::invalid_argument("StabilityInputs: dt must be positive");
    }
};

/// Time-step policy of the uniform-redistribution scheme: dt = 1/N^2.
inline double dt_policy(int n) {
    if (n < 5) throw std::invalid_argument("dt_policy: need at least 5 points");
    return 1.0 / (static_cast<double>(n) * n);
}

/// Squared worst-case eigenvalue modulus of the per-step error propagator,
/// with the quadrature-error term dropped:
///   2 dt^2 ( |v*| / (3L) * (2 max(N1, 4 N2) + 3 N2) )^2
inline double eigen_bound(const StabilityInputs& in) {
    in.validate();
    double reach = 2.0 * std::max(static_cast<double>(in.n1), 4.0 * in.n2) + 3.0 * in.n2;
    double factor = std::abs(in.v_star) / (3.0 * in.length) * reach;
    return 2.0 * in.dt * in.dt * factor * factor;
}

/// The bound certifies non-amplification for the next time step only; it
/// says nothing about the whole run.
struct StabilityReport {
    double bound = 0.0;            // squared-modulus bound
    bool stable_next_step = false; // sqrt(bound) < 1
    std::vector<std::pair<int, double>> candidate_bounds;  // per supplied N2
};

inline StabilityReport stability_report(const StabilityInputs& in,
                                        const std::vector<int>& candidate_n2 = {}) {
    StabilityReport report;
    report.bound = eigen_bound(in);
    report.stable_next_step = std::sqrt(report.bound) < 1.0;
    report.candidate_bounds.reserve(candidate_n2.size());
    for (int n2 : candidate_n2) {
        StabilityInputs alt = in;
        alt.n2 = n2;
        report.candidate_bounds.emplace_back(n2, eigen_bound(alt));
    }
    return report;
}

}  // namespace amcf
