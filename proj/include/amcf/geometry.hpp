#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amcf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }

/// Rotation by the matrix J = [[0,-1],[1,0]]; maps a CCW tangent to the inward normal.
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 normalized(Vec2 v) {
    double n = norm(v);
    if (n == 0.0) throw std::domain_error("normalized: zero-length vector");
    return v / n;
}

/// Cyclic index into an N-element ring.
inline int cyc(long j, int n) {
    long m = j % n;
    return static_cast<int>(m < 0 ? m + n : m);
}

struct DegenerateStencil : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed polyline in world coordinates, counterclockwise.
///
/// Validated construction enforces at least 3 nodes, distinct consecutive
/// nodes, and nonzero area; clockwise input is silently reversed to CCW.
/// Frame estimation and the flow engine additionally require N >= 5
/// (their stencils reach offsets +-1, +-2).
class DiscreteCurve {
public:
    /// Empty placeholder; every operation requires a populated curve.
    DiscreteCurve() = default;

    static DiscreteCurve from_points(std::vector<Vec2> pts) {
        validate(pts);
        if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
        return DiscreteCurve(std::move(pts));
    }

    /// Trusted construction for the time stepper; skips validation so that
    /// transient states (e.g. the step right before a blow-up is detected)
    /// do not get reordered or rejected here.
    static DiscreteCurve from_points_unchecked(std::vector<Vec2> pts) {
        return DiscreteCurve(std::move(pts));
    }

    static DiscreteCurve circle(Vec2 center, double radius, int n) {
        if (radius <= 0.0) throw std::invalid_argument("circle: radius must be positive");
        if (n < 3) throw std::invalid_argument("circle: need at least 3 points");
        std::vector<Vec2> pts(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            double th = 2.0 * std::numbers::pi * j / n;
            pts[static_cast<size_t>(j)] = {center.x + radius * std::cos(th),
                                           center.y + radius * std::sin(th)};
        }
        return DiscreteCurve(std::move(pts));
    }

    int size() const { return static_cast<int>(pts_.size()); }
    const std::vector<Vec2>& points() const { return pts_; }
    const Vec2& operator[](int j) const { return pts_[static_cast<size_t>(j)]; }

    /// Node with cyclic index.
    const Vec2& node(long j) const { return pts_[static_cast<size_t>(cyc(j, size()))]; }

private:
    explicit DiscreteCurve(std::vector<Vec2> pts) : pts_(std::move(pts)) {}

    static void validate(const std::vector<Vec2>& pts) {
        if (pts.size() < 3) throw std::invalid_argument("DiscreteCurve: need at least 3 points");
        int n = static_cast<int>(pts.size());
        for (int j = 0; j < n; ++j) {
            Vec2 d = pts[static_cast<size_t>((j + 1) % n)] - pts[static_cast<size_t>(j)];
            if (norm(d) == 0.0)
                throw std::invalid_argument("DiscreteCurve: consecutive points coincide at index " +
                                            std::to_string(j));
        }
        if (signed_area(pts) == 0.0)
            throw std::invalid_argument("DiscreteCurve: degenerate polygon (zero area)");
    }

    static double signed_area(const std::vector<Vec2>& pts) {
        double a = 0.0;
        int n = static_cast<int>(pts.size());
        for (int j = 0; j < n; ++j)
            a += cross(pts[static_cast<size_t>(j)], pts[static_cast<size_t>((j + 1) % n)]);
        return 0.5 * a;
    }

    std::vector<Vec2> pts_;
};

/// Cyclic polygon perimeter, sum of chord lengths including the wrap segment.
inline double perimeter(const DiscreteCurve& curve) {
    double total = 0.0;
    int n = curve.size();
    for (int j = 0; j < n; ++j) total += norm(curve.node(j + 1) - curve[j]);
    return total;
}

/// Positive shoelace area of the (CCW) polygon.
inline double enclosed_area(const DiscreteCurve& curve) {
    double a = 0.0;
    int n = curve.size();
    for (int j = 0; j < n; ++j) a += cross(curve[j], curve.node(j + 1));
    return 0.5 * a;
}

/// Arithmetic mean of the nodes.
inline Vec2 centroid(const DiscreteCurve& curve) {
    Vec2 c{0.0, 0.0};
    for (const Vec2& p : curve.points()) c += p;
    return c / static_cast<double>(curve.size());
}

/// Even-odd ray-crossing test. Points within 1e-12 of an edge count as
/// not inside.
inline bool point_in_polygon(const DiscreteCurve& curve, Vec2 p) {
    constexpr double edge_band = 1e-12;
    int n = curve.size();
    for (int j = 0; j < n; ++j) {
        Vec2 a = curve[j];
        Vec2 b = curve.node(j + 1);
        Vec2 ab = b - a;
        double t = dot(p - a, ab) / norm2(ab);
        t = std::clamp(t, 0.0, 1.0);
        if (norm(p - (a + t * ab)) <= edge_band) return false;
    }
    bool inside = false;
    for (int j = 0; j < n; ++j) {
        Vec2 a = curve[j];
        Vec2 b = curve.node(j + 1);
        if ((a.y > p.y) != (b.y > p.y)) {
            double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

/// Per-node frames from the 4th-order chord stencil.
///
/// Stencil data is indexed by offset i in {-2,-1,+1,+2} (slots 0..3):
/// dist[i] = |phi_{j+i} - phi_j| and chord[i] = sign(i)(phi_{j+i} - phi_j)/dist[i].
/// The raw tangent (-tau_2 + 4 tau_1 + 4 tau_-1 - tau_-2)/6 is normalized to
/// unit length, the normal is its J-rotation (inward for CCW curves), and the
/// scalar curvature is the projection of the curvature vector
///   K = mu * 2(tau_1 - tau_-1)/(d_1 + d_-1) + (1-mu) * 2(tau_2 - tau_-2)/(d_2 + d_-2)
/// onto the normal, so a CCW convex curve gets kappa > 0.
struct NodeFrame {
    Vec2 tangent;
    Vec2 normal;
    double curvature = 0.0;
    std::array<double, 4> dist{};  // offsets -2, -1, +1, +2
    std::array<Vec2, 4> chord{};
};

struct LocalFrames {
    std::vector<NodeFrame> nodes;
    double mu = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }
    const NodeFrame& operator[](int j) const { return nodes[static_cast<size_t>(j)]; }
};

inline LocalFrames local_frames(const DiscreteCurve& curve, double mu) {
    if (curve.size() < 5)
        throw std::invalid_argument("local_frames: need at least 5 points");
    if (mu < 0.0 || mu > 1.0)
        throw std::invalid_argument("local_frames: mu must lie in [0,1]");

    static constexpr std::array<int, 4> offsets{-2, -1, 1, 2};
    int n = curve.size();
    LocalFrames frames;
    frames.mu = mu;
    frames.nodes.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        NodeFrame& f = frames.nodes[static_cast<size_t>(j)];
        for (size_t s = 0; s < offsets.size(); ++s) {
            int i = offsets[s];
            Vec2 d = curve.node(j + i) - curve[j];
            double len = norm(d);
            if (len == 0.0)
                throw DegenerateStencil("local_frames: coincident stencil points at node " +
                                        std::to_string(j) + ", offset " + std::to_string(i));
            f.dist[s] = len;
            f.chord[s] = (i > 0 ? d : -d) / len;
        }
        const Vec2& tm2 = f.chord[0];
        const Vec2& tm1 = f.chord[1];
        const Vec2& tp1 = f.chord[2];
        const Vec2& tp2 = f.chord[3];
        Vec2 raw = (-tp2 + 4.0 * tp1 + 4.0 * tm1 - tm2) / 6.0;
        f.tangent = normalized(raw);
        f.normal = perp(f.tangent);
        Vec2 curvature_vec = 2.0 * mu * (tp1 - tm1) / (f.dist[2] + f.dist[1]) +
                             2.0 * (1.0 - mu) * (tp2 - tm2) / (f.dist[3] + f.dist[0]);
        f.curvature = dot(curvature_vec, f.normal);
    }
    return frames;
}

/// Tangential speeds a_j of the uniform-redistribution system
///   a_{j+1} - a_j = (l/N - d_j)/dt,   sum_j a_j = 0,
/// solved exactly by cumulative sums plus mean removal.
struct TangentialCoefficients {
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int j) const { return values[static_cast<size_t>(j)]; }
};

inline TangentialCoefficients tangential_coefficients(const DiscreteCurve& curve, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("tangential_coefficients: dt must be positive");
    int n = curve.size();
    std::vector<double> d(static_cast<size_t>(n));
    double ell = 0.0;
    for (int j = 0; j < n; ++j) {
        d[static_cast<size_t>(j)] = norm(curve.node(j + 1) - curve[j]);
        ell += d[static_cast<size_t>(j)];
    }
    double target = ell / n;
    std::vector<double> a(static_cast<size_t>(n));
    a[0] = 0.0;
    for (int j = 1; j < n; ++j)
        a[static_cast<size_t>(j)] = a[static_cast<size_t>(j - 1)] +
                                    (target - d[static_cast<size_t>(j - 1)]) / dt;
    double mean = 0.0;
    for (double v : a) mean += v;
    mean /= n;
    for (double& v : a) v -= mean;
    return TangentialCoefficients{std::move(a)};
}

/// Resample onto n points uniformly spaced in chord length, starting at node 0.
inline DiscreteCurve resample_uniform(const DiscreteCurve& curve, int n) {
    if (n < 3) throw std::invalid_argument("resample_uniform: need at least 3 points");
    int m = curve.size();
    std::vector<double> cumulative(static_cast<size_t>(m) + 1, 0.0);
    for (int j = 0; j < m; ++j)
        cumulative[static_cast<size_t>(j) + 1] =
            cumulative[static_cast<size_t>(j)] + norm(curve.node(j + 1) - curve[j]);
    double total = cumulative.back();
    std::vector<Vec2> out(static_cast<size_t>(n));
    int seg = 0;
    for (int k = 0; k < n; ++k) {
        double s = total * k / n;
        while (seg + 1 < m && cumulative[static_cast<size_t>(seg) + 1] <= s) ++seg;
        double seg_len = cumulative[static_cast<size_t>(seg) + 1] - cumulative[static_cast<size_t>(seg)];
        double t = seg_len > 0.0 ? (s - cumulative[static_cast<size_t>(seg)]) / seg_len : 0.0;
        out[static_cast<size_t>(k)] = curve[seg] + t * (curve.node(seg + 1) - curve[seg]);
    }
    return DiscreteCurve::from_points(std::move(out));
}

/// Curve file format: one `x,y` pair per line, world units, no header.
/// Rejects fewer than 5 points; clockwise files are reversed on load.
inline DiscreteCurve read_curve_csv(std::istream& in) {
    std::vector<Vec2> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t start = line.find_first_not_of(" \t\r\n");
        if (start == std::string::npos) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("curve csv: missing comma on line " + std::to_string(lineno));
        char* end = nullptr;
        std::string xs = line.substr(0, comma);
        std::string ys = line.substr(comma + 1);
        double x = std::strtod(xs.c_str(), &end);
        if (end == xs.c_str())
            throw std::runtime_error("curve csv: bad x value on line " + std::to_string(lineno));
        double y = std::strtod(ys.c_str(), &end);
        if (end == ys.c_str())
            throw std::runtime_error("curve csv: bad y value on line " + std::to_string(lineno));
        pts.push_back({x, y});
    }
    if (pts.size() < 5)
        throw std::runtime_error("curve csv: need at least 5 points, got " +
                                 std::to_string(pts.size()));
    return DiscreteCurve::from_points(std::move(pts));
}

inline DiscreteCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("curve csv: cannot open " + path);
    return read_curve_csv(in);
}

}  // namespace amcf
