#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amcf/geometry.hpp"

namespace amcf {

struct MalformedImage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grayscale raster with a world transform. The image center maps to
/// `origin` (world units); `scale` is world units per pixel. Row 0 is the
/// top of the image, so world y increases upward.
struct PixelField {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> values;  // row major, row 0 at top
    double scale = 0.001;
    Vec2 origin{0.0, 0.0};

    uint8_t at(int col, int row) const {
        return values[static_cast<size_t>(row) * width + col];
    }
    uint8_t& at(int col, int row) {
        return values[static_cast<size_t>(row) * width + col];
    }

    /// Column/row of the pixel containing a world point (may be out of range).
    std::pair<long, long> pixel_of(Vec2 p) const {
        long col = static_cast<long>(std::floor((p.x - origin.x) / scale + width / 2.0));
        long row = static_cast<long>(std::floor(height / 2.0 - (p.y - origin.y) / scale));
        return {col, row};
    }

    Vec2 pixel_center_world(int col, int row) const {
        return {origin.x + (col + 0.5 - width / 2.0) * scale,
                origin.y + (height / 2.0 - row - 0.5) * scale};
    }
};

/// Nearest-neighbor sample; points outside the raster read as background
/// white (255).
inline double pix(const PixelField& field, Vec2 p) {
    auto [col, row] = field.pixel_of(p);
    if (col < 0 || col >= field.width || row < 0 || row >= field.height) return 255.0;
    return static_cast<double>(field.at(static_cast<int>(col), static_cast<int>(row)));
}

/// Pix(y)/255: 0 on pure black, 1 on pure white. Multiplies both the
/// curvature data and the charge rows of the boundary solve.
inline double mask_factor(const PixelField& field, Vec2 p) {
    return pix(field, p) / 255.0;
}

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& token) {
    token.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c != EOF) in.unget();  // the terminator stays in the stream
    return token.empty() ? EOF : 0;
}

inline long pgm_int(std::istream& in, const char* what) {
    std::string tok;
    if (pgm_next_token(in, tok) == EOF)
        throw MalformedImage(std::string("pgm: missing ") + what + " at byte offset " +
                             std::to_string(static_cast<long>(in.tellg())));
    try {
        size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MalformedImage(std::string("pgm: bad ") + what + " token '" + tok +
                             "' near byte offset " + std::to_string(static_cast<long>(in.tellg())));
    }
}

}  // namespace detail

/// PGM reader, P2 (ASCII) and P5 (binary), maxval <= 255.
inline PixelField load_pgm(std::istream& in, double scale = 0.001, Vec2 origin = {0.0, 0.0}) {
    std::string magic;
    if (detail::pgm_next_token(in, magic) == EOF || (magic != "P2" && magic != "P5"))
        throw MalformedImage("pgm: bad magic '" + magic + "' at byte offset 0");
    long width = detail::pgm_int(in, "width");
    long height = detail::pgm_int(in, "height");
    long maxval = detail::pgm_int(in, "maxval");
    if (width <= 0 || height <= 0)
        throw MalformedImage("pgm: nonpositive dimensions at byte offset " +
                             std::to_string(static_cast<long>(in.tellg())));
    if (maxval <= 0 || maxval > 255)
        throw MalformedImage("pgm: maxval " + std::to_string(maxval) +
                             " unsupported (must be 1..255), byte offset " +
                             std::to_string(static_cast<long>(in.tellg())));

    PixelField field;
    field.width = static_cast<int>(width);
    field.height = static_cast<int>(height);
    field.scale = scale;
    field.origin = origin;
    field.values.resize(static_cast<size_t>(width) * height);

    if (magic == "P5") {
        int sep = in.get();  // single whitespace between header and payload
        if (sep == EOF || !std::isspace(sep))
            throw MalformedImage("pgm: missing payload separator at byte offset " +
                                 std::to_string(static_cast<long>(in.tellg())));
        in.read(reinterpret_cast<char*>(field.values.data()),
                static_cast<std::streamsize>(field.values.size()));
        if (in.gcount() != static_cast<std::streamsize>(field.values.size()))
            throw MalformedImage("pgm: truncated P5 payload, expected " +
                                 std::to_string(field.values.size()) + " bytes, got " +
                                 std::to_string(in.gcount()) + " (byte offset " +
                                 std::to_string(static_cast<long>(in.tellg())) + ")");
    } else {
        for (size_t i = 0; i < field.values.size(); ++i) {
            long v = detail::pgm_int(in, "pixel");
            if (v < 0 || v > maxval)
                throw MalformedImage("pgm: pixel value " + std::to_string(v) +
                                     " out of range, byte offset " +
                                     std::to_string(static_cast<long>(in.tellg())));
            field.values[i] = static_cast<uint8_t>(v);
        }
    }
    if (maxval != 255)
        for (uint8_t& v : field.values)
            v = static_cast<uint8_t>(v * 255L / maxval);
    return field;
}

inline PixelField load_pgm(const std::string& path, double scale = 0.001,
                           Vec2 origin = {0.0, 0.0}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedImage("pgm: cannot open " + path);
    return load_pgm(in, scale, origin);
}

inline void save_pgm(std::ostream& out, const PixelField& field) {
    out << "P5\n" << field.width << " " << field.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size()));
}

inline void save_pgm(const std::string& path, const PixelField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pgm: cannot write " + path);
    save_pgm(out, field);
}

/// Synthetic fixture: centered black disk on white background. A pixel is
/// black iff its center lies within `disk_radius_px` of the image center.
inline PixelField make_disk_field(int width, int height, double disk_radius_px, double scale) {
    PixelField field;
    field.width = width;
    field.height = height;
    field.scale = scale;
    field.values.assign(static_cast<size_t>(width) * height, 255);
    double cx = width / 2.0;
    double cy = height / 2.0;
    for (int row = 0; row < height; ++row)
        for (int col = 0; col < width; ++col) {
            double dx = col + 0.5 - cx;
            double dy = row + 0.5 - cy;
            if (dx * dx + dy * dy <= disk_radius_px * disk_radius_px) field.at(col, row) = 0;
        }
    return field;
}

/// Area of the pixels at or below `cutoff`, in world units squared.
inline double black_pixel_area(const PixelField& field, int cutoff = 0) {
    long count = 0;
    for (uint8_t v : field.values)
        if (v <= cutoff) ++count;
    return static_cast<double>(count) * field.scale * field.scale;
}

}  // namespace amcf
