#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amcf/boundary.hpp"
#include "amcf/geometry.hpp"
#include "amcf/image.hpp"
#include "amcf/stability.hpp"

namespace amcf {

struct CurveBlowUp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Optional clamp on the normal speed, active in pure-MCF mode only.
enum class VelocityClamp { none, min0, max0 };

struct FlowConfig {
    int point_count = 64;
    double dt = 0.0;  // 0 resolves to 1/N^2
    double mu = 0.15;
    double match_threshold = 0.90;
    long max_iterations = 50000;
    int pixel_black_cutoff = 0;
    long trace_every = 100;
    VelocityClamp clamp = VelocityClamp::none;
    bool record_stability = false;

    double resolved_dt() const { return dt > 0.0 ? dt : dt_policy(point_count); }

    void validate() const {
        if (point_count < 5) throw std::invalid_argument("FlowConfig: N >= 5 required");
        if (dt < 0.0) throw std::invalid_argument("FlowConfig: dt must be positive (0 = 1/N^2)");
        if (resolved_dt() <= 0.0) throw std::invalid_argument("FlowConfig: dt must be positive");
        if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("FlowConfig: mu must lie in [0,1]");
        if (match_threshold <= 0.0 || match_threshold > 1.0)
            throw std::invalid_argument("FlowConfig: match_threshold must lie in (0,1]");
        if (max_iterations < 0) throw std::invalid_argument("FlowConfig: max_iterations < 0");
        if (trace_every < 1) throw std::invalid_argument("FlowConfig: trace_every >= 1 required");
        if (pixel_black_cutoff < 0 || pixel_black_cutoff > 255)
            throw std::invalid_argument("FlowConfig: pixel_black_cutoff must lie in [0,255]");
    }
};

enum class StopReason { matched, max_iterations, charge_exited, blow_up, singular_system };

inline const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::matched: return "matched";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::charge_exited: return "charge_exited";
        case StopReason::blow_up: return "blow_up";
        case StopReason::singular_system: return "singular_system";
    }
    return "unknown";
}

struct FlowSnapshot {
    long iteration = 0;
    DiscreteCurve curve;
    double matched_fraction = 0.0;
    double enclosed_area = 0.0;
    double max_normal_speed = 0.0;
    double cond_stage1 = 0.0;  // 0 when no system was assembled (pure MCF)
    double cond_stage2 = 0.0;
    double stability_bound = 0.0;
};

struct FlowTrace {
    std::vector<FlowSnapshot> snapshots;
    StopReason reason = StopReason::max_iterations;
    long iterations = 0;
    DiscreteCurve final_curve;
    std::string detail;
};

/// Explicit update phi_j <- phi_j + dt (a_j T_j + v_j n_j). A displacement
/// larger than half the perimeter signals instability and aborts.
inline DiscreteCurve step(const DiscreteCurve& curve, const LocalFrames& frames,
                          const TangentialCoefficients& tangential,
                          const std::vector<double>& normal_speed, double dt) {
    int n = curve.size();
    if (frames.size() != n || tangential.size() != n ||
        static_cast<int>(normal_speed.size()) != n)
        throw std::invalid_argument("step: input sizes disagree");
    double limit = perimeter(curve) / 2.0;
    std::vector<Vec2> next(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        Vec2 disp = dt * (tangential[j] * frames[j].tangent +
                          normal_speed[static_cast<size_t>(j)] * frames[j].normal);
        double d = norm(disp);
        if (d > limit)
            throw CurveBlowUp("step: node " + std::to_string(j) + " moved " + std::to_string(d) +
                              " (> half perimeter " + std::to_string(limit) + ")");
        next[static_cast<size_t>(j)] = curve[j] + disp;
    }
    return DiscreteCurve::from_points_unchecked(std::move(next));
}

/// Fraction of nodes whose pixel value is at or below the cutoff.
/// Without a field nothing can match.
inline double matched_fraction(const DiscreteCurve& curve, const PixelField* field, int cutoff) {
    if (field == nullptr) return 0.0;
    int count = 0;
    for (const Vec2& p : curve.points())
        if (pix(*field, p) <= cutoff) ++count;
    return static_cast<double>(count) / curve.size();
}

/// 100 * min(A_black, A_curve) / max(A_black, A_curve), the contour-detection
/// accuracy of a finished run.
inline double area_accuracy(const DiscreteCurve& curve, const PixelField& field, int cutoff = 0) {
    double black = black_pixel_area(field, cutoff);
    double inside = enclosed_area(curve);
    double lo = std::min(black, inside);
    double hi = std::max(black, inside);
    if (hi <= 0.0) return 100.0;
    return 100.0 * lo / hi;
}

/// Centroid of the nodes; a per-run charge placement helper (it maximizes
/// the distance to a convex curve).
inline Vec2 centroid_charge(const DiscreteCurve& curve) { return centroid(curve); }

/// Everything one step computed, handed to an observer before the curve is
/// replaced. Useful for diagnostics the trace does not carry.
struct StepContext {
    long iteration;
    const DiscreteCurve& before;
    const LocalFrames& frames;
    const std::vector<double>& tangential;
    const std::vector<double>& mask;
    const std::vector<double>& normal_speed;
    const DiscreteCurve& after;
};

using StepObserver = std::function<void(const StepContext&)>;

namespace detail {

inline std::vector<double> node_masks(const DiscreteCurve& curve, const PixelField* field) {
    std::vector<double> mask(static_cast<size_t>(curve.size()), 1.0);
    if (field != nullptr)
        for (int j = 0; j < curve.size(); ++j)
            mask[static_cast<size_t>(j)] = mask_factor(*field, curve[j]);
    return mask;
}

inline double max_abs(const std::vector<double>& v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
}

}  // namespace detail

/// The contour parametrization loop: per iteration check charge containment,
/// build frames and tangential coefficients, mask the curvature with the
/// pixel field, run the two-stage boundary solve, and update the nodes.
/// Stops when the matched fraction reaches the threshold, the iteration
/// budget runs out, a charge leaves the curve, a step blows up, or a solve
/// goes singular; the terminal reason and iteration land in the trace.
/// With no field and no charges this is pure isotropic MCF (v = kappa).
inline FlowTrace run(const DiscreteCurve& initial, const ChargeSet& charges,
                     const PixelField* field, const FlowConfig& config,
                     const StepObserver& observer = {}) {
    config.validate();
    if (initial.size() < 5) throw std::invalid_argument("run: initial curve needs >= 5 points");
    const double dt = config.resolved_dt();
    const bool pure = (field == nullptr && charges.empty());

    FlowTrace trace;
    DiscreteCurve curve = initial;
    long k = 0;
    StopReason reason = StopReason::max_iterations;
    std::string detail_msg;
    double last_max_v = 0.0, last_cond1 = 0.0, last_cond2 = 0.0;

    while (k < config.max_iterations) {
        bool contained = true;
        for (const PointCharge& charge : charges)
            if (!point_in_polygon(curve, charge.position)) { contained = false; break; }
        if (!contained) {
            reason = StopReason::charge_exited;
            detail_msg = "charge left the curve at iteration " + std::to_string(k);
            break;
        }

        LocalFrames frames = local_frames(curve, config.mu);
        TangentialCoefficients tangential = tangential_coefficients(curve, dt);
        std::vector<double> mask = detail::node_masks(curve, field);
        bool record = (k % config.trace_every == 0);

        std::vector<double> v(static_cast<size_t>(curve.size()), 0.0);
        double cond1 = 0.0, cond2 = 0.0;
        try {
            if (pure) {
                for (int j = 0; j < curve.size(); ++j) {
                    double kappa = frames[j].curvature;
                    if (config.clamp == VelocityClamp::min0) kappa = std::min(kappa, 0.0);
                    if (config.clamp == VelocityClamp::max0) kappa = std::max(kappa, 0.0);
                    v[static_cast<size_t>(j)] = kappa;
                }
            } else {
                BoundarySystem sys = assemble_boundary_system(curve, frames);
                std::vector<double> kappa_masked(static_cast<size_t>(curve.size()));
                for (int j = 0; j < curve.size(); ++j)
                    kappa_masked[static_cast<size_t>(j)] =
                        frames[j].curvature * mask[static_cast<size_t>(j)];
                BoundarySolution sol = solve_boundary(sys, curve, kappa_masked, charges, mask);
                v = std::move(sol.normal_velocity);
                if (record) {
                    cond1 = stage1_condition(sys).condition;
                    cond2 = stage2_condition(sys, curve, charges, mask).condition;
                }
            }
        } catch (const SingularSystem& e) {
            reason = StopReason::singular_system;
            detail_msg = std::string(e.what()) + " at iteration " + std::to_string(k);
            break;
        }
        last_max_v = detail::max_abs(v);
        last_cond1 = cond1 > 0.0 ? cond1 : last_cond1;
        last_cond2 = cond2 > 0.0 ? cond2 : last_cond2;

        if (record) {
            FlowSnapshot snap;
            snap.iteration = k;
            snap.curve = curve;
            snap.matched_fraction = matched_fraction(curve, field, config.pixel_black_cutoff);
            snap.enclosed_area = enclosed_area(curve);
            snap.max_normal_speed = last_max_v;
            snap.cond_stage1 = cond1;
            snap.cond_stage2 = cond2;
            if (config.record_stability)
                snap.stability_bound = eigen_bound({last_max_v, perimeter(curve),
                                                    curve.size(), curve.size(), dt});
            trace.snapshots.push_back(std::move(snap));
        }

        DiscreteCurve next;
        try {
            next = step(curve, frames, tangential, v, dt);
        } catch (const CurveBlowUp& e) {
            reason = StopReason::blow_up;
            detail_msg = std::string(e.what()) + " at iteration " + std::to_string(k);
            break;
        }
        if (observer)
            observer(StepContext{k, curve, frames, tangential.values, mask, v, next});
        curve = std::move(next);
        ++k;

        if (field != nullptr &&
            matched_fraction(curve, field, config.pixel_black_cutoff) >= config.match_threshold) {
            reason = StopReason::matched;
            break;
        }
    }

    trace.reason = reason;
    trace.iterations = k;
    trace.detail = detail_msg;
    trace.final_curve = curve;
    if (trace.snapshots.empty() || trace.snapshots.back().iteration != k) {
        FlowSnapshot snap;
        snap.iteration = k;
        snap.curve = curve;
        snap.matched_fraction = matched_fraction(curve, field, config.pixel_black_cutoff);
        snap.enclosed_area = enclosed_area(curve);
        snap.max_normal_speed = last_max_v;
        snap.cond_stage1 = last_cond1;
        snap.cond_stage2 = last_cond2;
        if (config.record_stability)
            snap.stability_bound = eigen_bound({last_max_v, perimeter(curve),
                                                curve.size(), curve.size(), dt});
        trace.snapshots.push_back(std::move(snap));
    }
    return trace;
}

}  // namespace amcf
