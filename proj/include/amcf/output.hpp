#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "amcf/flow.hpp"
#include "amcf/geometry.hpp"
#include "amcf/image.hpp"

namespace amcf {

/// Shortest decimal that round-trips a double.
inline std::string fmt_full(double v) {
    char buf[32];
    for (int precision = 15; precision < 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// One snapshot as `iteration,x,y` rows.
inline void write_snapshot_csv(const std::string& path, const FlowSnapshot& snap) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_snapshot_csv: cannot write " + path);
    out << "iteration,x,y\n";
    for (const Vec2& p : snap.curve.points())
        out << snap.iteration << "," << fmt_full(p.x) << "," << fmt_full(p.y) << "\n";
}

inline void write_summary_csv(const std::string& path, const FlowTrace& trace,
                              bool with_stability) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_summary_csv: cannot write " + path);
    out << "iteration,matched_fraction,area,max_v,cond_stage1,cond_stage2";
    if (with_stability) out << ",stability_bound";
    out << "\n";
    for (const FlowSnapshot& s : trace.snapshots) {
        out << s.iteration << "," << fmt_full(s.matched_fraction) << ","
            << fmt_full(s.enclosed_area) << "," << fmt_full(s.max_normal_speed) << ","
            << fmt_full(s.cond_stage1) << "," << fmt_full(s.cond_stage2);
        if (with_stability) out << "," << fmt_full(s.stability_bound);
        out << "\n";
    }
}

/// Snapshots as curve-only closed paths, stroke fading red to green over the
/// recording order.
inline void write_trace_svg(const std::string& path, const FlowTrace& trace) {
    double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
    double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
    for (const FlowSnapshot& s : trace.snapshots)
        for (const Vec2& p : s.curve.points()) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
    if (trace.snapshots.empty()) { lo_x = lo_y = -1.0; hi_x = hi_y = 1.0; }
    double span = std::max(hi_x - lo_x, hi_y - lo_y);
    if (span <= 0.0) span = 1.0;
    double margin = 0.05 * span;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_svg: cannot write " + path);
    out.precision(10);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << lo_x - margin << " "
        << -(hi_y + margin) << " " << (hi_x - lo_x) + 2 * margin << " "
        << (hi_y - lo_y) + 2 * margin << "\">\n";
    size_t count = trace.snapshots.size();
    for (size_t i = 0; i < count; ++i) {
        double t = count > 1 ? static_cast<double>(i) / (count - 1) : 1.0;
        int red = static_cast<int>(255 * (1.0 - t));
        int green = static_cast<int>(255 * t);
        out << "  <polygon fill=\"none\" stroke=\"rgb(" << red << "," << green
            << ",0)\" stroke-width=\"" << span / 400.0 << "\" points=\"";
        for (const Vec2& p : trace.snapshots[i].curve.points())
            out << p.x << "," << -p.y << " ";  // svg y axis points down
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

/// Copy of the raster with the curve's nodes burned in as mid-gray pixels.
inline PixelField overlay_curve(const PixelField& field, const DiscreteCurve& curve) {
    PixelField out = field;
    for (const Vec2& p : curve.points()) {
        auto [col, row] = out.pixel_of(p);
        if (col >= 0 && col < out.width && row >= 0 && row < out.height)
            out.at(static_cast<int>(col), static_cast<int>(row)) = 128;
    }
    return out;
}

}  // namespace amcf
