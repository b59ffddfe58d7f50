#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amcf/geometry.hpp"
#include "amcf/linalg.hpp"

namespace amcf {

struct SingularEvaluation : std::domain_error {
    using std::domain_error::domain_error;
};

struct ChargeOutsideCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChargeTooClose : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point charge (c_i, p_i) of the source density rho(y) = sum_i c_i delta(y - p_i).
/// The canonical single attracting charge is c = -1.
struct PointCharge {
    double strength = -1.0;
    Vec2 position{0.0, 0.0};
};

using ChargeSet = std::vector<PointCharge>;

/// Free-space Laplace kernel Phi(r) = (1/2pi) log(1/r).
inline double fundamental_solution(double r) {
    if (r <= 0.0)
        throw SingularEvaluation("fundamental_solution: r must be positive, got " +
                                 std::to_string(r));
    return std::log(1.0 / r) / (2.0 * std::numbers::pi);
}

/// Directional derivative of Phi(x - y) along the unit normal at y:
/// <x - y, n_y> / (2 pi |x - y|^2).
inline double kernel_dphi_dn(Vec2 x, Vec2 y, Vec2 unit_normal_y) {
    Vec2 d = x - y;
    double r2 = norm2(d);
    if (r2 == 0.0) throw SingularEvaluation("kernel_dphi_dn: x == y");
    return dot(d, unit_normal_y) / (2.0 * std::numbers::pi * r2);
}

/// One Gauss node on a panel chord. hat_right is the linear-interpolation
/// weight of the panel's right endpoint (the left endpoint gets 1 - hat_right).
struct PanelNode {
    Vec2 point;
    double weight = 0.0;
    Vec2 outward_normal;
    double hat_right = 0.0;
};

/// 3-point Gauss-Legendre discretization of the arcs (phi_j, phi_j+1).
/// Quadrature nodes lie strictly inside each chord; their weights sum to the
/// chord length; outward normals are linear interpolants of the nodal
/// outward normals, renormalized to unit length.
struct PanelQuadrature {
    std::vector<std::array<PanelNode, 3>> panels;

    int size() const { return static_cast<int>(panels.size()); }
};

inline PanelQuadrature build_panels(const DiscreteCurve& curve, const LocalFrames& frames) {
    static constexpr double g = 0.7745966692414834;  // sqrt(3/5)
    static constexpr std::array<double, 3> abscissae{-g, 0.0, g};
    static constexpr std::array<double, 3> gauss_weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    int n = curve.size();
    PanelQuadrature quad;
    quad.panels.resize(static_cast<size_t>(n));
    for (int p = 0; p < n; ++p) {
        Vec2 a = curve[p];
        Vec2 b = curve.node(p + 1);
        Vec2 chord = b - a;
        double chord_len = norm(chord);
        Vec2 na = -frames[p].normal;                  // outward at left node
        Vec2 nb = -frames[cyc(p + 1, n)].normal;      // outward at right node
        for (int k = 0; k < 3; ++k) {
            double t = 0.5 * (abscissae[static_cast<size_t>(k)] + 1.0);
            PanelNode& node = quad.panels[static_cast<size_t>(p)][static_cast<size_t>(k)];
            node.point = a + t * chord;
            node.weight = gauss_weights[static_cast<size_t>(k)] * chord_len / 2.0;
            node.outward_normal = normalized((1.0 - t) * na + t * nb);
            node.hat_right = t;
        }
    }
    return quad;
}

/// Assembled collocation system for one curve:
///   single_layer(i,j)      = int hat_j(y) Phi(x_i - y) ds_y
///   double_layer_half(i,j) = int hat_j(y) dPhi/dn_out(x_i - y) ds_y + (1/2) delta_ij
///
/// The double-layer kernel is continuous on a smooth curve, but sampling it
/// on the two chords meeting at the collocation node sees the polygon's
/// vertex angle instead of the curve, an O(1/N) defect that dominates the
/// discretization error. On those two panels the kernel is evaluated at its
/// on-curve limit -kappa_i/(4 pi).
struct BoundarySystem {
    PanelQuadrature quadrature;
    SquareMatrix single_layer;
    SquareMatrix double_layer_half;
};

inline BoundarySystem assemble_boundary_system(const DiscreteCurve& curve,
                                               const LocalFrames& frames) {
    int n = curve.size();
    if (frames.size() != n)
        throw std::invalid_argument("assemble_boundary_system: frames/curve size mismatch");
    BoundarySystem sys;
    sys.quadrature = build_panels(curve, frames);
    sys.single_layer = SquareMatrix(n);
    sys.double_layer_half = SquareMatrix(n);
    const double inv_4pi = 1.0 / (4.0 * std::numbers::pi);

    for (int p = 0; p < n; ++p) {
        int left = p;
        int right = cyc(p + 1, n);
        for (const PanelNode& node : sys.quadrature.panels[static_cast<size_t>(p)]) {
            double wl = node.weight * (1.0 - node.hat_right);
            double wr = node.weight * node.hat_right;
            for (int i = 0; i < n; ++i) {
                double r = norm(curve[i] - node.point);
                if (r <= 0.0)
                    throw SingularEvaluation(
                        "assemble_boundary_system: quadrature node coincides with collocation node " +
                        std::to_string(i));
                double phi = fundamental_solution(r);
                sys.single_layer(i, left) += wl * phi;
                sys.single_layer(i, right) += wr * phi;
                double dphi = (i == left || i == right)
                                  ? -frames[i].curvature * inv_4pi
                                  : kernel_dphi_dn(curve[i], node.point, node.outward_normal);
                sys.double_layer_half(i, left) += wl * dphi;
                sys.double_layer_half(i, right) += wr * dphi;
            }
        }
    }
    for (int i = 0; i < n; ++i) sys.double_layer_half(i, i) += 0.5;
    return sys;
}

/// Stage 1 of the flow solve: collocate
///   -int Phi(x - y) kappa*(y) dy = int u dPhi/dn dy + (1/2) u(x)
/// at every node and solve the dense system for the boundary potential u.
inline std::vector<double> solve_stage1_boundary_potential(const BoundarySystem& sys,
                                                           const std::vector<double>& kappa_masked) {
    std::vector<double> rhs = sys.single_layer.apply(kappa_masked);
    for (double& v : rhs) v = -v;
    return solve(sys.double_layer_half, rhs);
}

inline std::vector<double> solve_stage1_boundary_potential(const DiscreteCurve& curve,
                                                           const LocalFrames& frames,
                                                           const std::vector<double>& kappa_masked) {
    return solve_stage1_boundary_potential(assemble_boundary_system(curve, frames), kappa_masked);
}

/// Charges must lie strictly inside the curve and clear of its discrete
/// tubular neighborhood (two mean node spacings).
inline constexpr double charge_clearance_spacings = 2.0;

inline void check_charges(const DiscreteCurve& curve, const ChargeSet& charges) {
    double spacing = perimeter(curve) / curve.size();
    for (size_t i = 0; i < charges.size(); ++i) {
        const PointCharge& charge = charges[i];
        if (!point_in_polygon(curve, charge.position))
            throw ChargeOutsideCurve("charge " + std::to_string(i) + " is not inside the curve");
        for (int j = 0; j < curve.size(); ++j) {
            double d = norm(curve[j] - charge.position);
            if (d <= charge_clearance_spacings * spacing)
                throw ChargeTooClose("charge " + std::to_string(i) + " is within " +
                                     std::to_string(d) + " of node " + std::to_string(j) +
                                     " (limit " +
                                     std::to_string(charge_clearance_spacings * spacing) + ")");
        }
    }
}

/// Per-row charge forcing: g_i = mask_i * sum_l c_l Phi(|x_i - p_l|).
/// The delta-function volume integral collapses to point evaluations of Phi.
inline std::vector<double> charge_column(const DiscreteCurve& curve, const ChargeSet& charges,
                                         const std::vector<double>& mask) {
    int n = curve.size();
    std::vector<double> g(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const PointCharge& charge : charges)
            acc += charge.strength * fundamental_solution(norm(curve[i] - charge.position));
        g[static_cast<size_t>(i)] = mask[static_cast<size_t>(i)] * acc;
    }
    return g;
}

/// Stage 2: with u from stage 1, solve the first-kind system
///   S q = -g - (D + I/2) u
/// for the normal velocity q = du/dn (the charge column g enters with the
/// Green-identity sign, so c < 0 charges pull the curve inward), then damp
/// each node by its pixel mask: v_j = mask_j * q_j. With mask identically 1
/// and no charges this returns q = kappa* exactly, recovering the MCF.
inline std::vector<double> solve_stage2_normal_velocity(const BoundarySystem& sys,
                                                        const DiscreteCurve& curve,
                                                        const std::vector<double>& u,
                                                        const ChargeSet& charges,
                                                        const std::vector<double>& mask) {
    check_charges(curve, charges);
    std::vector<double> rhs = sys.double_layer_half.apply(u);
    std::vector<double> g = charge_column(curve, charges, mask);
    int n = curve.size();
    for (int i = 0; i < n; ++i)
        rhs[static_cast<size_t>(i)] = -g[static_cast<size_t>(i)] - rhs[static_cast<size_t>(i)];
    std::vector<double> q = solve(sys.single_layer, rhs);
    for (int i = 0; i < n; ++i) q[static_cast<size_t>(i)] *= mask[static_cast<size_t>(i)];
    return q;
}

inline std::vector<double> solve_stage2_normal_velocity(const DiscreteCurve& curve,
                                                        const LocalFrames& frames,
                                                        const std::vector<double>& u,
                                                        const ChargeSet& charges,
                                                        const std::vector<double>& mask) {
    return solve_stage2_normal_velocity(assemble_boundary_system(curve, frames), curve, u,
                                        charges, mask);
}

/// Boundary values and normal velocities of one coupled solve.
struct BoundarySolution {
    std::vector<double> potential;        // u_j
    std::vector<double> normal_velocity;  // v_j = du/dn_j, mask-damped
};

inline BoundarySolution solve_boundary(const BoundarySystem& sys, const DiscreteCurve& curve,
                                       const std::vector<double>& kappa_masked,
                                       const ChargeSet& charges, const std::vector<double>& mask) {
    BoundarySolution sol;
    sol.potential = solve_stage1_boundary_potential(sys, kappa_masked);
    sol.normal_velocity = solve_stage2_normal_velocity(sys, curve, sol.potential, charges, mask);
    return sol;
}

/// Both sides of the discretized boundary identity for known data, per node:
///   residual_i = -(S q)_i - ((D + I/2) u)_i
/// where q is the normal derivative along the frames' (inward) normals.
/// Exact harmonic data drives this to zero at the quadrature level; it is
/// the assembly correctness oracle.
inline std::vector<double> representation_residual(const DiscreteCurve& curve,
                                                   const LocalFrames& frames,
                                                   const std::vector<double>& u_exact,
                                                   const std::vector<double>& dudn_exact) {
    BoundarySystem sys = assemble_boundary_system(curve, frames);
    std::vector<double> sq = sys.single_layer.apply(dudn_exact);
    std::vector<double> bu = sys.double_layer_half.apply(u_exact);
    int n = curve.size();
    std::vector<double> res(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        res[static_cast<size_t>(i)] = -sq[static_cast<size_t>(i)] - bu[static_cast<size_t>(i)];
    return res;
}

/// Condition of the stage-1 matrix D + I/2.
inline ConditionReport stage1_condition(const BoundarySystem& sys) {
    return condition_inf(sys.double_layer_half);
}

/// Condition of the stage-2 matrix. With charges present the charge column
/// is adjoined as an extra unknown pinned to one, [[S, g], [0, 1]], so the
/// reported C(A) grows as a charge approaches the curve; without charges
/// this is C(S).
inline ConditionReport stage2_condition(const BoundarySystem& sys, const DiscreteCurve& curve,
                                        const ChargeSet& charges, const std::vector<double>& mask) {
    if (charges.empty()) return condition_inf(sys.single_layer);
    int n = sys.single_layer.size();
    std::vector<double> g = charge_column(curve, charges, mask);
    SquareMatrix bordered(n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) bordered(i, j) = sys.single_layer(i, j);
        bordered(i, n) = g[static_cast<size_t>(i)];
    }
    bordered(n, n) = 1.0;
    return condition_inf(bordered);
}

inline void dump_matrix_csv(const std::string& path, const SquareMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_matrix_csv: cannot write " + path);
    out.precision(17);
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < m.size(); ++j) out << (j ? "," : "") << m(i, j);
        out << "\n";
    }
}

inline void dump_vector_csv(const std::string& path, const std::vector<double>& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_vector_csv: cannot write " + path);
    out.precision(17);
    for (double x : v) out << x << "\n";
}

}  // namespace amcf
