#include <doctest.h>

#include <sstream>
#include <string>

#include "amcf/image.hpp"

using namespace amcf;

TEST_SUITE("image") {

TEST_CASE("P2 parse of a 2x2 image") {
    std::istringstream in("P2\n# tiny checker\n2 2\n255\n0 255\n255 0\n");
    PixelField f = load_pgm(in);
    REQUIRE(f.width == 2);
    REQUIRE(f.height == 2);
    CHECK(f.at(0, 0) == 0);
    CHECK(f.at(1, 0) == 255);
    CHECK(f.at(0, 1) == 255);
    CHECK(f.at(1, 1) == 0);
}

TEST_CASE("P5 payload matches the equivalent P2") {
    std::string p5 = "P5\n2 2\n255\n";
    p5 += '\x00';
    p5 += '\xff';
    p5 += '\xff';
    p5 += '\x00';
    std::istringstream bin(p5, std::ios::binary);
    PixelField f5 = load_pgm(bin);
    std::istringstream asc("P2\n2 2\n255\n0 255 255 0\n");
    PixelField f2 = load_pgm(asc);
    CHECK(f5.values == f2.values);
}

TEST_CASE("truncated P5 payload is malformed") {
    std::string p5 = "P5\n2 2\n255\n";
    p5 += '\x00';
    p5 += '\xff';
    std::istringstream bin(p5, std::ios::binary);
    CHECK_THROWS_AS(load_pgm(bin), MalformedImage);
}

TEST_CASE("bad magic and oversized maxval are malformed") {
    std::istringstream bad_magic("P6\n2 2\n255\n");
    CHECK_THROWS_AS(load_pgm(bad_magic), MalformedImage);
    std::istringstream big_maxval("P2\n2 2\n65535\n0 0 0 0\n");
    CHECK_THROWS_AS(load_pgm(big_maxval), MalformedImage);
}

TEST_CASE("pgm round trip through save_pgm") {
    PixelField f = make_disk_field(32, 16, 5.0, 0.01);
    std::ostringstream out(std::ios::binary);
    save_pgm(out, f);
    std::istringstream in(out.str(), std::ios::binary);
    PixelField g = load_pgm(in, f.scale);
    CHECK(g.width == f.width);
    CHECK(g.height == f.height);
    CHECK(g.values == f.values);
}

TEST_CASE("pix sampling: all-black center, background outside") {
    PixelField black;
    black.width = black.height = 4;
    black.scale = 1.0;
    black.values.assign(16, 0);
    CHECK(pix(black, {0.0, 0.0}) == 0.0);
    CHECK(pix(black, {100.0, 0.0}) == 255.0);
    CHECK(pix(black, {0.0, -100.0}) == 255.0);
}

TEST_CASE("disk fixture: radial black/white structure") {
    // black disk of 100 px in a 256x256 raster
    PixelField f = make_disk_field(256, 256, 100.0, 0.001);
    CHECK(pix(f, {0.050, 0.0}) == 0.0);    // 50 px from center
    CHECK(pix(f, {0.150, 0.0}) == 255.0);  // 150 px from center
    CHECK(pix(f, {0.0, 0.050}) == 0.0);
    CHECK(pix(f, {0.0, 0.150}) == 255.0);
}

TEST_CASE("mask_factor endpoints and linearity") {
    PixelField f;
    f.width = 3;
    f.height = 1;
    f.scale = 1.0;
    f.values = {255, 0, 127};
    CHECK(mask_factor(f, f.pixel_center_world(0, 0)) == doctest::Approx(1.0));
    CHECK(mask_factor(f, f.pixel_center_world(1, 0)) == doctest::Approx(0.0));
    CHECK(mask_factor(f, f.pixel_center_world(2, 0)) == doctest::Approx(127.0 / 255.0));
    CHECK(mask_factor(f, {1e6, 0.0}) == doctest::Approx(1.0));  // outside reads white
}

TEST_CASE("mask_factor is monotone in intensity and bounded") {
    PixelField f;
    f.width = 256;
    f.height = 1;
    f.scale = 1.0;
    f.values.resize(256);
    for (int i = 0; i < 256; ++i) f.values[static_cast<size_t>(i)] = static_cast<uint8_t>(i);
    double prev = -1.0;
    for (int i = 0; i < 256; ++i) {
        double m = mask_factor(f, f.pixel_center_world(i, 0));
        CHECK(m >= 0.0);
        CHECK(m <= 1.0);
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("world to pixel round trip at every pixel center") {
    PixelField f = make_disk_field(31, 17, 4.0, 0.003);  // odd sizes on purpose
    for (int row = 0; row < f.height; ++row)
        for (int col = 0; col < f.width; ++col) {
            auto [c, r] = f.pixel_of(f.pixel_center_world(col, row));
            CHECK(c == col);
            CHECK(r == row);
        }
}

TEST_CASE("black pixel area of the disk fixture approximates the disk") {
    PixelField f = make_disk_field(256, 256, 40.0, 0.008);
    double exact = 3.14159265358979 * (40.0 * 0.008) * (40.0 * 0.008);
    CHECK(std::abs(black_pixel_area(f) - exact) / exact < 0.02);
}

}  // TEST_SUITE
