#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "scenegest/io.hpp"
#include "scenegest/maskgeo.hpp"

using namespace scenegest;

namespace {

BinaryMask blank(int w, int h) {
    BinaryMask m;
    m.width = w;
    m.height = h;
    m.data.assign(static_cast<size_t>(w) * h, 0);
    return m;
}

void fill_rect(BinaryMask &m, int x0, int y0, int w, int h) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) m.set(x, y, true);
}

// Analytic disk: pixel centers inside x^2 + y^2 <= r^2.
void fill_circle(BinaryMask &m, double cx, double cy, double r) {
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
}

// Analytic triangle: consistent half-plane sign for all three edges.
void fill_triangle(BinaryMask &m, Vec2 a, Vec2 b, Vec2 c) {
    auto edge = [](const Vec2 &p, const Vec2 &q, double x, double y) {
        return (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
    };
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            double e0 = edge(a, b, x, y), e1 = edge(b, c, x, y), e2 = edge(c, a, x, y);
            bool inside = (e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0);
            if (inside) m.set(x, y, true);
        }
}

// Analytic ellipse: quadratic form at pixel centers.
void fill_ellipse(BinaryMask &m, double cx, double cy, double a, double b, double angle) {
    double cs = std::cos(angle), sn = std::sin(angle);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            double dx = x - cx, dy = y - cy;
            double u = cs * dx + sn * dy, v = -sn * dx + cs * dy;
            if (u * u / (a * a) + v * v / (b * b) <= 1.0) m.set(x, y, true);
        }
}

// Upright w x h rectangle spun by `deg`, painted with the same inverse-map
// convention the sweep uses, so the sweep must undo it with -deg.
BinaryMask spun_rect(int size, double half_w, double half_h, double deg) {
    BinaryMask m = blank(size, size);
    double c = (size - 1) / 2.0;
    double rad = deg2rad(deg), cs = std::cos(-rad), sn = std::sin(-rad);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double dx = x - c, dy = y - c;
            double sx = cs * dx - sn * dy, sy = sn * dx + cs * dy;
            if (std::abs(sx) <= half_w && std::abs(sy) <= half_h) m.set(x, y, true);
        }
    return m;
}

BinaryMask mirror_x(const BinaryMask &m) {
    BinaryMask out = m;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.set(x, y, m.at(m.width - 1 - x, y));
    return out;
}

// Oracle: largest 4-connected component by flood fill, as a pixel set.
std::set<std::pair<int, int>> largest_component(const BinaryMask &m) {
    std::vector<int> label(static_cast<size_t>(m.width) * m.height, -1);
    int next = 0;
    std::vector<long> sizes;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y) || label[static_cast<size_t>(y) * m.width + x] >= 0) continue;
            std::vector<std::pair<int, int>> stack{{x, y}};
            long count = 0;
            label[static_cast<size_t>(y) * m.width + x] = next;
            while (!stack.empty()) {
                auto [px, py] = stack.back();
                stack.pop_back();
                ++count;
                const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    int nx = px + dx[k], ny = py + dy[k];
                    if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
                    size_t idx = static_cast<size_t>(ny) * m.width + nx;
                    if (!m.at(nx, ny) || label[idx] >= 0) continue;
                    label[idx] = next;
                    stack.push_back({nx, ny});
                }
            }
            sizes.push_back(count);
            ++next;
        }
    int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::set<std::pair<int, int>> out;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y) && label[static_cast<size_t>(y) * m.width + x] == best)
                out.insert({x, y});
    return out;
}

// Oracle: distance from a point to a closed polyline.
double point_segment_dist(const Vec2 &p, const Vec2 &a, const Vec2 &b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return dist(p, a + ab * t);
}

double dist_to_polyline(const Vec2 &p, const std::vector<Vec2> &poly, bool closed) {
    double best = std::numeric_limits<double>::infinity();
    size_t n = poly.size();
    size_t edges = closed ? n : n - 1;
    for (size_t i = 0; i < edges; ++i)
        best = std::min(best, point_segment_dist(p, poly[i], poly[(i + 1) % n]));
    return best;
}

// Oracle: algebraic least-squares circle through a point set.
Circle kasa_fit(const std::vector<Vec2> &pts) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxz = 0, syz = 0, sz = 0;
    for (const Vec2 &p : pts) {
        double z = p.x * p.x + p.y * p.y;
        sx += p.x; sy += p.y; sxx += p.x * p.x; syy += p.y * p.y;
        sxy += p.x * p.y; sxz += p.x * z; syz += p.y * z; sz += z;
    }
    double n = static_cast<double>(pts.size());
    double a11 = sxx - sx * sx / n, a12 = sxy - sx * sy / n, a22 = syy - sy * sy / n;
    double b1 = 0.5 * (sxz - sx * sz / n), b2 = 0.5 * (syz - sy * sz / n);
    double det = a11 * a22 - a12 * a12;
    Circle c;
    c.center = {(b1 * a22 - b2 * a12) / det, (b2 * a11 - b1 * a12) / det};
    double r2 = 0.0;
    for (const Vec2 &p : pts) r2 += dot(p - c.center, p - c.center);
    c.radius = std::sqrt(r2 / n);
    return c;
}

double contour_perimeter(const Contour &c) {
    double len = 0.0;
    for (size_t i = 0; i < c.size(); ++i) len += dist(c[i], c[(i + 1) % c.size()]);
    return len;
}

}  // namespace

TEST_CASE("resize policy lands the longest edge on 1024") {
    ResizeDims d = resize_policy(2048, 1024);
    CHECK(d.scale == 0.5);
    CHECK(d.width == 1024);
    CHECK(d.height == 512);

    d = resize_policy(1024, 768);
    CHECK(d.scale == 1.0);
    CHECK(d.width == 1024);
    CHECK(d.height == 768);

    d = resize_policy(640, 480);
    CHECK(d.scale == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(d.width == 1024);
    CHECK(d.height == 768);
}

TEST_CASE("full square traces its eight boundary pixels") {
    BinaryMask m = blank(5, 5);
    fill_rect(m, 1, 1, 3, 3);
    Contour c = extract_contour(m);
    CHECK(c.size() == 8);
    CHECK(signed_area(c) > 0.0);  // canonical counterclockwise winding
    // Every point is a boundary pixel of the square; the center pixel is not.
    for (const Vec2 &p : c) {
        int col = static_cast<int>(std::lround(p.x));
        int row = m.height - 1 - static_cast<int>(std::lround(p.y));
        CHECK(m.at(col, row));
        CHECK(!(col == 2 && row == 2));
    }
}

TEST_CASE("contour follows the largest component only") {
    BinaryMask m = blank(20, 12);
    fill_rect(m, 2, 2, 10, 5);  // 50 pixels
    fill_rect(m, 16, 8, 3, 1);  // 3 pixels, detached
    auto big = largest_component(m);
    REQUIRE(big.size() == 50);
    Contour c = extract_contour(m);
    for (const Vec2 &p : c) {
        int col = static_cast<int>(std::lround(p.x));
        int row = m.height - 1 - static_cast<int>(std::lround(p.y));
        CHECK(big.count({col, row}) == 1);
    }
}

TEST_CASE("degenerate masks cannot produce a contour") {
    BinaryMask m = blank(5, 5);
    m.set(2, 2, true);
    CHECK_THROWS(extract_contour(m));
    CHECK_THROWS(extract_contour(blank(4, 4)));
}

TEST_CASE("contour area tracks the pixel count within a perimeter band") {
    std::vector<BinaryMask> shapes;
    shapes.push_back(blank(5, 5));
    fill_rect(shapes.back(), 1, 1, 3, 3);
    shapes.push_back(blank(120, 120));
    fill_circle(shapes.back(), 60, 60, 50);
    shapes.push_back(blank(80, 40));
    fill_rect(shapes.back(), 5, 5, 70, 30);
    for (const BinaryMask &m : shapes) {
        Contour c = extract_contour(m);
        double area = std::abs(signed_area(c));
        double band = contour_perimeter(c) + 1.0;
        CHECK(std::abs(area - static_cast<double>(m.count())) <= band);
    }
}

TEST_CASE("collinear runs simplify to their endpoints") {
    std::vector<Vec2> line;
    for (int i = 0; i < 10; ++i) line.push_back({static_cast<double>(i), 2.0 * i});
    std::vector<Vec2> out = simplify_rdp(line, 0.5, false);
    REQUIRE(out.size() == 2);
    CHECK(out.front() == line.front());
    CHECK(out.back() == line.back());
}

TEST_CASE("epsilon zero keeps the input untouched") {
    std::vector<Vec2> pts{{0, 0}, {1, 0.4}, {2, 0}, {1, -2}};
    CHECK(simplify_rdp(pts, 0.0) == pts);
    CHECK_THROWS(simplify_rdp(pts, -1.0));
}

TEST_CASE("jittered square midpoints vanish at epsilon one") {
    std::vector<Vec2> sq{{0, 0},  {5, -0.3}, {10, 0},  {10.3, 5},
                         {10, 10}, {5, 10.3}, {0, 10}, {-0.3, 5}};
    std::vector<Vec2> out = simplify_rdp(sq, 1.0, true);
    REQUIRE(out.size() == 4);
    std::set<std::pair<double, double>> corners{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    for (const Vec2 &p : out) CHECK(corners.count({p.x, p.y}) == 1);
    // Every dropped point stays within epsilon of the simplified outline.
    for (const Vec2 &p : sq) CHECK(dist_to_polyline(p, out, true) <= 1.0 + 1e-12);
}

TEST_CASE("simplification is idempotent and bounds the deviation") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec2> noisy;
        int n = 40;
        for (int i = 0; i < n; ++i) {
            double t = 2.0 * kPi * i / n;
            double r = 30.0 + 4.0 * u(rng);
            noisy.push_back({r * std::cos(t), r * std::sin(t)});
        }
        double eps = 1.5;
        std::vector<Vec2> once = simplify_rdp(noisy, eps, true);
        std::vector<Vec2> twice = simplify_rdp(once, eps, true);
        CHECK(once == twice);
        for (const Vec2 &p : noisy)
            CHECK(dist_to_polyline(p, once, true) <= eps + 1e-9);
    }
}

TEST_CASE("smoothing keeps circle points on a circle of equal radius") {
    for (int count : {24, 60}) {
        std::vector<Vec2> ring;
        for (int i = 0; i < count; ++i) {
            double t = 2.0 * kPi * i / count;
            ring.push_back({50.0 * std::cos(t) + 7.0, 50.0 * std::sin(t) - 3.0});
        }
        Circle before = kasa_fit(ring);
        std::vector<Vec2> smooth = smooth_ccma(ring, 5, true);
        REQUIRE(smooth.size() == ring.size());
        Circle after = kasa_fit(smooth);
        CHECK(std::abs(after.radius - before.radius) <= 0.01 * before.radius);
        // The smoothed ring stays round, not merely same-sized.
        for (const Vec2 &p : smooth)
            CHECK(std::abs(dist(p, after.center) - after.radius) <= 0.01 * after.radius);
    }
}

TEST_CASE("straight runs pass through the smoother unchanged") {
    std::vector<Vec2> line;
    for (int i = 0; i < 12; ++i) line.push_back({1.5 * i, -0.5 * i + 2.0});
    std::vector<Vec2> out = smooth_ccma(line, 5, false);
    REQUIRE(out.size() == line.size());
    for (size_t i = 0; i < line.size(); ++i) CHECK(dist(out[i], line[i]) < 1e-9);
}

TEST_CASE("smoother rejects bad windows") {
    std::vector<Vec2> pts{{0, 0}, {1, 0}, {2, 1}, {3, 0}, {4, 0}};
    CHECK_THROWS(smooth_ccma(pts, 4, false));   // even
    CHECK_THROWS(smooth_ccma(pts, 1, false));   // too small
    CHECK_THROWS(smooth_ccma(pts, 5, false));   // window not below point count
    CHECK_THROWS(smooth_ccma(pts, 7, false));   // larger than the contour
}

TEST_CASE("upright rectangle scores symmetric at angle zero") {
    BinaryMask m = blank(64, 64);
    fill_rect(m, 10, 20, 44, 24);
    SymmetryResult r = symmetry_sweep(m);
    CHECK(r.angle_deg == 0.0);
    CHECK(r.score >= 0.99);
}

TEST_CASE("spun rectangle is recovered at the opposite angle") {
    for (double deg : {10.0, -25.0, 40.0}) {
        BinaryMask m = spun_rect(101, 30.0, 12.0, deg);
        SymmetryResult r = symmetry_sweep(m);
        CHECK(std::abs(r.angle_deg + deg) <= 1.0);
        CHECK(r.score >= 0.95);
    }
}

TEST_CASE("lopsided L never reaches the symmetry gate") {
    BinaryMask m = blank(100, 100);
    fill_rect(m, 10, 5, 14, 80);   // tall thin stroke
    fill_rect(m, 24, 70, 50, 15);  // short fat foot
    SymmetryResult r = symmetry_sweep(m);
    CHECK(r.score < 0.9);
}

TEST_CASE("mirroring a mask negates its best symmetry angle") {
    BinaryMask m = spun_rect(81, 25.0, 9.0, 18.0);
    SymmetryResult r = symmetry_sweep(m);
    SymmetryResult rm = symmetry_sweep(mirror_x(m));
    CHECK(std::abs(rm.angle_deg + r.angle_deg) <= 1.0);
}

TEST_CASE("rasterized primitives classify as themselves above 0.85") {
    BinaryMask disk = blank(220, 220);
    fill_circle(disk, 110, 110, 100);
    PrimitiveFit f = fit_primitives(disk);
    CHECK(f.kind == PrimitiveKind::Circle);
    CHECK(f.overlap >= 0.95);

    BinaryMask square = blank(120, 120);
    fill_rect(square, 10, 10, 100, 100);
    f = fit_primitives(square);
    CHECK(f.kind == PrimitiveKind::Rectangle);
    CHECK(f.overlap >= 0.95);

    BinaryMask tri = blank(140, 120);
    fill_triangle(tri, {10, 110}, {130, 110}, {70, 10});
    f = fit_primitives(tri);
    CHECK(f.kind == PrimitiveKind::Triangle);
    CHECK(f.overlap >= 0.9);

    BinaryMask ell = blank(200, 140);
    fill_ellipse(ell, 100, 70, 90, 40, 0.3);
    f = fit_primitives(ell);
    CHECK(f.kind == PrimitiveKind::Ellipse);
    CHECK(f.overlap >= 0.9);
}

TEST_CASE("a thin spiral fits no primitive") {
    BinaryMask m = blank(200, 200);
    for (double t = 0.0; t < 6.0 * kPi; t += 0.01) {
        double r = 8.0 + 4.5 * t;
        int x = static_cast<int>(std::lround(100 + r * std::cos(t)));
        int y = static_cast<int>(std::lround(100 + r * std::sin(t)));
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                if (x + dx >= 0 && y + dy >= 0 && x + dx < 200 && y + dy < 200)
                    m.set(x + dx, y + dy, true);
    }
    PrimitiveFit f = fit_primitives(m);
    CHECK(f.kind == PrimitiveKind::None);
    CHECK(f.overlap_rect <= 0.85);
    CHECK(f.overlap_triangle <= 0.85);
    CHECK(f.overlap_circle <= 0.85);
    CHECK(f.overlap_ellipse <= 0.85);
}

TEST_CASE("primitive overlap is stable under doubling the raster") {
    BinaryMask small = blank(120, 120);
    fill_circle(small, 60, 60, 45);
    BinaryMask big = blank(240, 240);
    fill_circle(big, 120, 120, 90);
    PrimitiveFit fs = fit_primitives(small);
    PrimitiveFit fb = fit_primitives(big);
    CHECK(fs.kind == fb.kind);
    CHECK(std::abs(fs.overlap - fb.overlap) <= 0.02);
}

TEST_CASE("elongation of a square is isotropic") {
    BinaryMask m = blank(60, 60);
    fill_rect(m, 5, 5, 50, 50);
    Elongation e = elongation_ratio(m);
    CHECK(e.ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(!e.abnormal);
}

TEST_CASE("bar ratios match the closed-form uniform-grid variance") {
    // Variance of 0..n-1 is (n^2 - 1) / 12, so a w x h bar has
    // ratio sqrt((w^2 - 1) / (h^2 - 1)).
    BinaryMask bar = blank(310, 30);
    fill_rect(bar, 5, 5, 300, 20);
    Elongation e = elongation_ratio(bar);
    double expect = std::sqrt((300.0 * 300.0 - 1.0) / (20.0 * 20.0 - 1.0));
    CHECK(e.ratio == doctest::Approx(expect).epsilon(1e-9));
    CHECK(e.abnormal);
    CHECK(std::abs(e.axis.x) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(e.axis.y) < 1e-9);

    BinaryMask stub = blank(50, 30);
    fill_rect(stub, 5, 5, 40, 20);
    e = elongation_ratio(stub);
    expect = std::sqrt((40.0 * 40.0 - 1.0) / (20.0 * 20.0 - 1.0));
    CHECK(e.ratio == doctest::Approx(expect).epsilon(1e-9));
    CHECK(!e.abnormal);

    Elongation eb = elongation_from_box(300, 20);
    CHECK(eb.abnormal);
    CHECK(eb.ratio == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("collinear pixels are flagged as infinitely elongated") {
    BinaryMask m = blank(30, 5);
    fill_rect(m, 2, 2, 25, 1);
    Elongation e = elongation_ratio(m);
    CHECK(std::isinf(e.ratio));
    CHECK(e.abnormal);
}

TEST_CASE("pgm files round-trip and reject empties") {
    BinaryMask m = blank(7, 4);
    fill_rect(m, 1, 1, 3, 2);
    m.set(6, 3, true);
    std::string path = "mask_roundtrip.tmp.pgm";
    save_pgm(m, path);
    BinaryMask back = load_pgm(path);
    CHECK(back.width == m.width);
    CHECK(back.height == m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) CHECK(back.at(x, y) == m.at(x, y));
    std::remove(path.c_str());

    BinaryMask empty = blank(4, 4);
    save_pgm(empty, path);
    CHECK_THROWS(load_pgm(path));
    std::remove(path.c_str());
}
