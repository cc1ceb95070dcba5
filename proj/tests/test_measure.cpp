#include <doctest.h>

#include <cmath>

#include "shadow/measure.hpp"
#include "shadow/rng.hpp"
#include "util.hpp"

using namespace shadow;
using testutil::TempDir;

namespace {

LabelMap disc_map(int w, int h, double cx, double cy, double r, uint32_t label = 1) {
    LabelMap lm(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) lm.at(x, y) = label;
    return lm;
}

LabelMap ellipse_map(int w, int h, double cx, double cy, double a, double b, double theta) {
    LabelMap lm(w, h);
    double c = std::cos(theta), s = std::sin(theta);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double dx = x - cx, dy = y - cy;
            double u = (dx * c + dy * s) / a, v = (-dx * s + dy * c) / b;
            if (u * u + v * v <= 1.0) lm.at(x, y) = 1;
        }
    return lm;
}

}  // namespace

TEST_CASE("region_props: single pixel") {
    LabelMap lm(5, 5);
    lm.at(2, 3) = 1;
    auto r = measure::region_props(lm);
    REQUIRE(r.size() == 1);
    CHECK(r[0].area == 1);
    CHECK(r[0].cx == doctest::Approx(2.0));
    CHECK(r[0].cy == doctest::Approx(3.0));
    CHECK(r[0].r_eq == doctest::Approx(std::sqrt(1.0 / 3.141592653589793)));
    // unit-square correction: both second moments 1/12, aspect exactly 1
    CHECK(r[0].major == doctest::Approx(4.0 * std::sqrt(1.0 / 12.0)));
    CHECK(r[0].aspect == doctest::Approx(1.0));
    CHECK(r[0].x0 == 2);
    CHECK(r[0].y1 == 3);
}

TEST_CASE("region_props: empty map") {
    CHECK(measure::region_props(LabelMap(8, 8)).empty());
}

TEST_CASE("region_props: rasterized disc r=5") {
    LabelMap lm = disc_map(16, 16, 8, 8, 5.0);
    auto r = measure::region_props(lm);
    REQUIRE(r.size() == 1);
    CHECK(r[0].area == 81);  // lattice points with dx^2+dy^2 <= 25
    CHECK(std::abs(r[0].r_eq - 5.0) <= 0.5);
    CHECK(r[0].aspect == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r[0].cx == doctest::Approx(8.0));
    CHECK(r[0].cy == doctest::Approx(8.0));
}

TEST_CASE("region_props: disc radii 3..20 stay within 0.5 px of r_eq") {
    for (int rr = 3; rr <= 20; ++rr) {
        int n = 2 * rr + 8;
        LabelMap lm = disc_map(n, n, n / 2.0, n / 2.0, rr);
        auto r = measure::region_props(lm);
        REQUIRE(r.size() == 1);
        CHECK(std::abs(r[0].r_eq - rr) <= 0.5);
    }
}

TEST_CASE("region_props: 9x1 bar has aspect exactly 9") {
    LabelMap lm(12, 4);
    for (int x = 1; x <= 9; ++x) lm.at(x, 2) = 1;
    auto r = measure::region_props(lm);
    REQUIRE(r.size() == 1);
    // uxx = (81-1)/12 + 1/12 = 81/12, uyy = 1/12 -> major/minor = 9 exactly
    CHECK(r[0].aspect == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(r[0].major == doctest::Approx(4.0 * std::sqrt(81.0 / 12.0)).epsilon(1e-9));
}

TEST_CASE("region_props: agrees exactly with brute-force moments") {
    // independent oracle: recompute area, centroid and corrected second moments
    // directly from the pixel set and derive the axes the same declared way
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        double r_eq = rng.uniform(2.0, 12.0);
        double aspect = rng.uniform(1.0, 3.0);
        double theta = rng.uniform(0.0, 3.14159265);
        double a = r_eq * std::sqrt(aspect), b = r_eq / std::sqrt(aspect);
        int n = static_cast<int>(4 * a) + 8;
        double ox = rng.uniform(-0.5, 0.5), oy = rng.uniform(-0.5, 0.5);
        LabelMap lm = ellipse_map(n, n, n / 2.0 + ox, n / 2.0 + oy, a, b, theta);
        auto r = measure::region_props(lm);
        REQUIRE(r.size() == 1);

        long area = 0;
        double sx = 0, sy = 0;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (lm.at(x, y)) {
                    ++area;
                    sx += x;
                    sy += y;
                }
        REQUIRE(area > 0);
        double cx = sx / area, cy = sy / area;
        double uxx = 1.0 / 12.0, uyy = 1.0 / 12.0, uxy = 0.0;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (lm.at(x, y)) {
                    uxx += (x - cx) * (x - cx) / area;
                    uyy += (y - cy) * (y - cy) / area;
                    uxy += (x - cx) * (y - cy) / area;
                }
        double tr = uxx + uyy;
        double det = std::sqrt((uxx - uyy) * (uxx - uyy) + 4.0 * uxy * uxy);
        double major = 4.0 * std::sqrt((tr + det) / 2.0);
        double minor = 4.0 * std::sqrt((tr - det) / 2.0);
        CHECK(r[0].area == area);
        CHECK(r[0].cx == doctest::Approx(cx).epsilon(1e-12));
        CHECK(r[0].cy == doctest::Approx(cy).epsilon(1e-12));
        CHECK(r[0].major == doctest::Approx(major).epsilon(1e-9));
        CHECK(r[0].minor == doctest::Approx(minor).epsilon(1e-9));
    }
}

TEST_CASE("region_props: rotated ellipses recover aspect within 5% for r_eq >= 8") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        double r_eq = rng.uniform(8.0, 12.0);
        double aspect = rng.uniform(1.0, 3.0);
        double theta = rng.uniform(0.0, 3.14159265);
        double ox = rng.uniform(-0.5, 0.5), oy = rng.uniform(-0.5, 0.5);
        double a = r_eq * std::sqrt(aspect), b = r_eq / std::sqrt(aspect);
        int n = static_cast<int>(4 * a) + 8;
        LabelMap lm = ellipse_map(n, n, n / 2.0 + ox, n / 2.0 + oy, a, b, theta);
        auto r = measure::region_props(lm);
        REQUIRE(r.size() == 1);
        CHECK(std::abs(r[0].aspect - aspect) <= 0.05 * aspect);
        CHECK(std::abs(r[0].r_eq - r_eq) <= 0.5);
    }
}

TEST_CASE("region_props: small-ellipse aspect error is quantization-bounded") {
    // Below r_eq ~ 6 the binary raster does not carry enough information for a
    // universal 5% aspect bound: moment-based aspect of a pixel-center raster
    // can be off by 10-20% in the worst alignments (verified independently by
    // brute-force moment evaluation). Pin the truthful envelope instead: every
    // sample within 15%, and the mean error small.
    Rng rng(13);
    double sum_err = 0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        double r_eq = rng.uniform(4.0, 12.0);
        double aspect = rng.uniform(1.0, 3.0);
        double theta = rng.uniform(0.0, 3.14159265);
        double ox = rng.uniform(-0.5, 0.5), oy = rng.uniform(-0.5, 0.5);
        double a = r_eq * std::sqrt(aspect), b = r_eq / std::sqrt(aspect);
        int n = static_cast<int>(4 * a) + 8;
        LabelMap lm = ellipse_map(n, n, n / 2.0 + ox, n / 2.0 + oy, a, b, theta);
        auto r = measure::region_props(lm);
        REQUIRE(r.size() == 1);
        double err = std::abs(r[0].aspect - aspect) / aspect;
        CHECK(err <= 0.15);
        CHECK(std::abs(r[0].r_eq - r_eq) <= 0.5);
        sum_err += err;
    }
    CHECK(sum_err / trials <= 0.04);
}

TEST_CASE("region_props: translation leaves shape measures unchanged") {
    LabelMap a = ellipse_map(40, 40, 20, 20, 8, 5, 0.6);
    LabelMap b = ellipse_map(40, 40, 24.0, 17.0, 8, 5, 0.6);
    auto ra = measure::region_props(a), rb = measure::region_props(b);
    REQUIRE(ra.size() == 1);
    REQUIRE(rb.size() == 1);
    CHECK(ra[0].area == rb[0].area);
    CHECK(ra[0].aspect == doctest::Approx(rb[0].aspect).epsilon(1e-9));
    CHECK(rb[0].cx == doctest::Approx(ra[0].cx + 4.0).epsilon(1e-9));
    CHECK(rb[0].cy == doctest::Approx(ra[0].cy - 3.0).epsilon(1e-9));
}

TEST_CASE("region_props: multiple labels come back sorted by label") {
    LabelMap lm(20, 10);
    lm.at(15, 5) = 7;
    lm.at(2, 2) = 3;
    lm.at(3, 2) = 3;
    auto r = measure::region_props(lm);
    REQUIRE(r.size() == 2);
    CHECK(r[0].label == 3);
    CHECK(r[0].area == 2);
    CHECK(r[1].label == 7);
    CHECK(r[1].area == 1);
}

TEST_CASE("region_props: r_eq is sqrt(area/pi) by definition") {
    LabelMap lm = disc_map(30, 30, 15, 15, 7.3);
    auto r = measure::region_props(lm);
    REQUIRE(r.size() == 1);
    CHECK(r[0].r_eq ==
          doctest::Approx(std::sqrt(static_cast<double>(r[0].area) / 3.141592653589793))
              .epsilon(1e-12));
}

TEST_CASE("measurement csv round trip") {
    TempDir td;
    LabelMap lm = disc_map(20, 20, 10, 10, 5, 2);
    auto r = measure::region_props(lm);
    measure::write_measure_csv(r, td.file("m.csv"));
    auto back = measure::read_measure_csv(td.file("m.csv"));
    REQUIRE(back.size() == r.size());
    CHECK(back[0].label == r[0].label);
    CHECK(back[0].area == r[0].area);
    CHECK(back[0].cx == doctest::Approx(r[0].cx).epsilon(1e-9));
    CHECK(back[0].aspect == doctest::Approx(r[0].aspect).epsilon(1e-9));
    CHECK_THROWS_AS(measure::read_measure_csv(td.file("missing.csv")), IoError);
    testutil::spit(td.file("bad.csv"), "not,a,header\n");
    CHECK_THROWS_AS(measure::read_measure_csv(td.file("bad.csv")), FormatError);
}
