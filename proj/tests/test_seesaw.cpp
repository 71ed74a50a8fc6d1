#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "scenegest/seesaw.hpp"

using namespace scenegest;

namespace {

// Oracle: lockstep descent, written from the split's contract rather than its
// code. Two walkers eat the contour away from the cut in opposite cyclic
// directions; the eating side hands over as soon as its newest point moves
// past the other side's frontier in the travel direction, equal heights
// changing nothing. Travel direction is the first forward height change.
HandPathPair split_oracle(const Contour &c, int cut, Hand dominant) {
    const int n = static_cast<int>(c.size());
    int travel = 0;
    for (int k = 1; k < n && travel == 0; ++k)
        travel = signum(c[(cut + k) % n].y - c[cut].y);
    if (travel == 0) travel = -1;

    std::vector<Vec2> side[2] = {{c[cut]}, {c[cut]}};  // 0 forward, 1 backward
    int step[2] = {1, 1};
    int eat = 0;
    for (int remaining = n - 1; remaining > 0; --remaining) {
        int idx = eat == 0 ? (cut + step[0]++) % n : ((cut - step[1]++) % n + n) % n;
        side[eat].push_back(c[idx]);
        if (signum(c[idx].y - side[1 - eat].back().y) == travel) eat = 1 - eat;
    }
    HandPathPair out;
    out.right = dominant == Hand::Right ? side[0] : side[1];
    out.left = dominant == Hand::Right ? side[1] : side[0];
    return out;
}

Contour star(std::mt19937 &rng, int n) {
    std::uniform_real_distribution<double> ur(30.0, 100.0);
    Contour c;
    for (int i = 0; i < n; ++i) {
        double t = 2.0 * kPi * i / n;
        double r = ur(rng);
        c.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return c;
}

// Mirror-symmetric polygon: apex on the axis, strictly descending right side,
// exact reflection on the way back up. Ordered top -> right -> bottom -> left.
Contour mirror_poly(std::mt19937 &rng, int m) {
    std::uniform_real_distribution<double> ux(5.0, 60.0);
    std::uniform_real_distribution<double> uy(-80.0, 80.0);
    std::set<double> heights;
    while (static_cast<int>(heights.size()) < m) heights.insert(uy(rng));
    std::vector<Vec2> right;
    for (auto it = heights.rbegin(); it != heights.rend(); ++it)
        right.push_back({ux(rng), *it});
    Contour c{{0.0, 100.0}};
    for (const Vec2 &p : right) c.push_back(p);
    c.push_back({0.0, -100.0});
    for (int i = m - 1; i >= 0; --i) c.push_back({-right[i].x, right[i].y});
    return c;
}

bool same_paths(const std::vector<Vec2> &a, const std::vector<Vec2> &b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (dist(a[i], b[i]) > 1e-12) return false;
    return true;
}

bool non_increasing_y(const std::vector<Vec2> &path) {
    for (size_t i = 1; i < path.size(); ++i)
        if (path[i].y > path[i - 1].y + 1e-12) return false;
    return true;
}

}  // namespace

TEST_CASE("cutting point sits at the apex with the local tangent slope") {
    Contour tri{{-1, 0}, {1, 0}, {0, 2}};
    CuttingPoint cp = find_cutting_point(tri);
    CHECK(cp.index == 2);
    CHECK(cp.point.x == 0.0);
    CHECK(cp.point.y == 2.0);
    // tangent runs from (1,0) to (-1,0)
    CHECK(cp.slope == doctest::Approx(kPi));
}

TEST_CASE("flat-top plateau keeps the first corner, slope follows the diagonal") {
    Contour sq{{-1, 1}, {1, 1}, {1, -1}, {-1, -1}};
    CuttingPoint cp = find_cutting_point(sq);
    CHECK(cp.index == 0);
    CHECK(cp.slope == doctest::Approx(kPi / 4.0));
}

TEST_CASE("plateau ties resolve toward the centroid") {
    Contour ridge{{0, 0}, {2, 1}, {3, 1}, {4, 1}, {5, 0}, {2, -2}};
    // vertex mean x = 16/6, so the middle plateau point is nearest
    CuttingPoint cp = find_cutting_point(ridge);
    CHECK(cp.index == 2);
    CHECK(cp.point.x == 3.0);
}

TEST_CASE("tiny contours are rejected") {
    Contour two{{0, 0}, {1, 1}};
    CHECK_THROWS_AS(find_cutting_point(two), std::invalid_argument);
    CuttingPoint cp;
    cp.index = 0;
    cp.point = {0, 0};
    CHECK_THROWS_AS(seesaw_split(two, cp, Hand::Right), std::invalid_argument);
}

TEST_CASE("a cut off the contour is rejected") {
    Contour tri{{-1, 0}, {1, 0}, {0, 2}};
    CuttingPoint cp;
    cp.index = 7;
    cp.point = {0, 2};
    CHECK_THROWS_AS(seesaw_split(tri, cp, Hand::Right), std::invalid_argument);
    cp.index = 1;  // valid index, wrong point
    cp.point = {0, 2};
    CHECK_THROWS_AS(seesaw_split(tri, cp, Hand::Right), std::invalid_argument);
}

TEST_CASE("a twelve-point circle splits into two mirrored descending arcs") {
    Contour c;
    for (int k = 0; k < 12; ++k) {
        double t = kPi / 2.0 - 2.0 * kPi * k / 12.0;  // start at the top, go right
        c.push_back({100.0 * std::cos(t), 100.0 * std::sin(t)});
    }
    CuttingPoint cp = find_cutting_point(c);
    CHECK(cp.index == 0);
    HandPathPair hp = seesaw_split(c, cp, Hand::Right);
    CHECK(hp.right.size() == 6);
    CHECK(hp.left.size() == 7);
    CHECK(hp.right.size() + hp.left.size() == c.size() + 1);
    CHECK(non_increasing_y(hp.right));
    CHECK(non_increasing_y(hp.left));
    // left arc is the right arc reflected through the vertical axis
    for (size_t i = 0; i < hp.right.size(); ++i) {
        CHECK(hp.left[i].x == doctest::Approx(-hp.right[i].x).epsilon(1e-9));
        CHECK(hp.left[i].y == doctest::Approx(hp.right[i].y).epsilon(1e-9));
    }
}

TEST_CASE("a diamond sends one flank each way and the floor backward") {
    Contour d{{0, 1}, {1, 0}, {0, -1}, {-1, 0}};
    CuttingPoint cp = find_cutting_point(d);
    HandPathPair hp = seesaw_split(d, cp, Hand::Right);
    REQUIRE(hp.right.size() == 2);
    REQUIRE(hp.left.size() == 3);
    CHECK(hp.right[1].x == 1.0);
    CHECK(hp.left[1].x == -1.0);
    CHECK(hp.left[2].y == -1.0);
}

TEST_CASE("a triangle splits into its two edges") {
    Contour tri{{0, 2}, {1, 0}, {-1, 0}};
    CuttingPoint cp = find_cutting_point(tri);
    HandPathPair hp = seesaw_split(tri, cp, Hand::Right);
    REQUIRE(hp.right.size() == 2);
    REQUIRE(hp.left.size() == 2);
    CHECK(hp.right[1].x == 1.0);
    CHECK(hp.left[1].x == -1.0);
}

TEST_CASE("a flat contour all goes forward") {
    Contour flat{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    CuttingPoint cp;
    cp.index = 0;
    cp.point = {0, 0};
    HandPathPair hp = seesaw_split(flat, cp, Hand::Right);
    CHECK(hp.right.size() == 4);
    CHECK(hp.left.size() == 1);
}

TEST_CASE("every point lands in exactly one path, the cut in both") {
    std::mt19937 rng(29);
    std::uniform_int_distribution<int> un(8, 40);
    for (int trial = 0; trial < 50; ++trial) {
        int n = un(rng);
        Contour c = star(rng, n);
        CuttingPoint cp = find_cutting_point(c);
        HandPathPair hp = seesaw_split(c, cp, Hand::Right);
        REQUIRE(hp.right.size() + hp.left.size() == c.size() + 1);
        CHECK(hp.right[0].x == cp.point.x);
        CHECK(hp.left[0].x == cp.point.x);

        std::multiset<std::pair<double, double>> want, got;
        for (const Vec2 &p : c) want.insert({p.x, p.y});
        want.insert({cp.point.x, cp.point.y});
        for (const Vec2 &p : hp.right) got.insert({p.x, p.y});
        for (const Vec2 &p : hp.left) got.insert({p.x, p.y});
        CHECK(want == got);
    }
}

TEST_CASE("the split agrees with the lockstep oracle on random contours") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> un(8, 40);
    for (int trial = 0; trial < 50; ++trial) {
        Contour c = star(rng, un(rng));
        CuttingPoint cp = find_cutting_point(c);
        HandPathPair hp = seesaw_split(c, cp, Hand::Right);
        HandPathPair want = split_oracle(c, cp.index, Hand::Right);
        CHECK(same_paths(hp.right, want.right));
        CHECK(same_paths(hp.left, want.left));
    }
}

TEST_CASE("symmetric contours produce mirror-image hand paths") {
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> um(3, 12);
    for (int trial = 0; trial < 10; ++trial) {
        Contour c = mirror_poly(rng, um(rng));
        CuttingPoint cp = find_cutting_point(c);
        REQUIRE(cp.index == 0);
        HandPathPair hp = seesaw_split(c, cp, Hand::Right);
        CHECK(hp.right.size() + hp.left.size() == c.size() + 1);
        size_t shared = std::min(hp.right.size(), hp.left.size());
        CHECK(hp.right.size() - shared + (hp.left.size() - shared) == 1);
        for (size_t i = 0; i < shared; ++i) {
            CHECK(std::abs(hp.left[i].x + hp.right[i].x) <= 1.0);
            CHECK(std::abs(hp.left[i].y - hp.right[i].y) <= 1.0);
        }
    }
}

TEST_CASE("relisting the contour from another start changes nothing") {
    std::mt19937 rng(41);
    Contour c = star(rng, 17);
    CuttingPoint cp = find_cutting_point(c);
    HandPathPair base = seesaw_split(c, cp, Hand::Right);
    for (int shift : {1, 5, 16}) {
        Contour r = c;
        std::rotate(r.begin(), r.begin() + shift, r.end());
        CuttingPoint rcp = find_cutting_point(r);
        CHECK(rcp.point.x == cp.point.x);
        CHECK(rcp.point.y == cp.point.y);
        HandPathPair hp = seesaw_split(r, rcp, Hand::Right);
        CHECK(same_paths(hp.right, base.right));
        CHECK(same_paths(hp.left, base.left));
    }
}

TEST_CASE("the dominant hand takes the forward walk") {
    std::mt19937 rng(43);
    Contour c = star(rng, 15);
    CuttingPoint cp = find_cutting_point(c);
    HandPathPair r = seesaw_split(c, cp, Hand::Right);
    HandPathPair l = seesaw_split(c, cp, Hand::Left);
    CHECK(same_paths(r.right, l.left));
    CHECK(same_paths(r.left, l.right));
}
