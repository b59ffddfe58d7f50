#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amcf {

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense square matrix, row major. Systems here stay small (N <= 512 for
/// anything that gets inverted), so storage and solves are kept plain.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
        if (n <= 0) throw std::invalid_argument("SquareMatrix: size must be positive");
    }

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

    static SquareMatrix identity(int n) {
        SquareMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(static_cast<size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n_; ++j) acc += (*this)(i, j) * x[static_cast<size_t>(j)];
            y[static_cast<size_t>(i)] = acc;
        }
        return y;
    }

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// Max absolute row sum.
inline double norm_inf(const SquareMatrix& m) {
    double best = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        double row = 0.0;
        for (int j = 0; j < m.size(); ++j) row += std::abs(m(i, j));
        best = std::max(best, row);
    }
    return best;
}

/// Row-pivoted LU. A pivot below 1e-14 of its row's original scale fails the
/// factorization.
struct LuFactors {
    SquareMatrix lu;
    std::vector<int> perm;
};

inline LuFactors lu_factor(SquareMatrix a) {
    int n = a.size();
    std::vector<double> scale(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            scale[static_cast<size_t>(i)] = std::max(scale[static_cast<size_t>(i)], std::abs(a(i, j)));

    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;

    for (int k = 0; k < n; ++k) {
        int pivot_row = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(a(i, k));
            if (v > best) { best = v; pivot_row = i; }
        }
        if (pivot_row != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(pivot_row, j));
            std::swap(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(pivot_row)]);
        }
        double row_scale = scale[static_cast<size_t>(perm[static_cast<size_t>(k)])];
        if (std::abs(a(k, k)) < 1e-14 * row_scale || a(k, k) == 0.0)
            throw SingularSystem("lu_factor: pivot " + std::to_string(a(k, k)) +
                                 " below tolerance at column " + std::to_string(k));
        for (int i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return LuFactors{std::move(a), std::move(perm)};
}

inline std::vector<double> lu_solve(const LuFactors& f, const std::vector<double>& rhs) {
    int n = f.lu.size();
    std::vector<double> x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = rhs[static_cast<size_t>(f.perm[static_cast<size_t>(i)])];
    for (int i = 1; i < n; ++i) {
        double acc = x[static_cast<size_t>(i)];
        for (int j = 0; j < i; ++j) acc -= f.lu(i, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = x[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) acc -= f.lu(i, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] = acc / f.lu(i, i);
    }
    return x;
}

inline std::vector<double> solve(const SquareMatrix& a, const std::vector<double>& rhs) {
    return lu_solve(lu_factor(a), rhs);
}

/// Explicit inverse, column by column. Condition reporting is the only
/// consumer; curve systems are capped at N = 512, plus one bordered row for
/// the stage-2 charge column.
inline SquareMatrix invert(const SquareMatrix& a) {
    int n = a.size();
    if (n > 513) throw std::invalid_argument("invert: N <= 512 enforced, got " + std::to_string(n));
    LuFactors f = lu_factor(a);
    SquareMatrix inv(n);
    std::vector<double> e(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[static_cast<size_t>(j)] = 1.0;
        std::vector<double> col = lu_solve(f, e);
        e[static_cast<size_t>(j)] = 0.0;
        for (int i = 0; i < n; ++i) inv(i, j) = col[static_cast<size_t>(i)];
    }
    return inv;
}

struct ConditionReport {
    double norm_inf = 0.0;
    double norm_inv_inf = 0.0;
    double condition = 0.0;
};

/// C(A) = ||A||_inf * ||A^-1||_inf, floored at 1 (the exact product cannot
/// drop below 1; rounding in the computed inverse can).
inline ConditionReport condition_inf(const SquareMatrix& a) {
    ConditionReport report;
    report.norm_inf = norm_inf(a);
    report.norm_inv_inf = norm_inf(invert(a));
    report.condition = std::max(1.0, report.norm_inf * report.norm_inv_inf);
    return report;
}

}  // namespace amcf
