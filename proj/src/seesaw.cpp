#include "scenegest/seesaw.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegest {

CuttingPoint find_cutting_point(const Contour &contour) {
    const int n = static_cast<int>(contour.size());
    if (n < 3) throw std::invalid_argument("find_cutting_point: contour too small");
    Vec2 c = centroid(contour);
    int best = 0;
    for (int i = 1; i < n; ++i) {
        const Vec2 &p = contour[i], &b = contour[best];
        if (p.y > b.y ||
            (p.y == b.y && std::abs(p.x - c.x) < std::abs(b.x - c.x)))
            best = i;
    }
    // walk uphill while a neighbor still gains height; from the global
    // maximum this stops immediately, on plateaus it follows the local slope
    int cur = best;
    for (int guard = 0; guard < n; ++guard) {
        int fwd = (cur + 1) % n, bwd = (cur - 1 + n) % n;
        int next = cur;
        if (contour[fwd].y > contour[cur].y) next = fwd;
        else if (contour[bwd].y > contour[cur].y) next = bwd;
        if (next == cur) break;
        cur = next;
    }
    CuttingPoint cp;
    cp.index = cur;
    cp.point = contour[cur];
    Vec2 tangent = contour[(cur + 1) % n] - contour[(cur - 1 + n) % n];
    cp.slope = std::atan2(tangent.y, tangent.x);
    return cp;
}

HandPathPair seesaw_split(const Contour &contour, const CuttingPoint &cut, Hand dominant) {
    const int n = static_cast<int>(contour.size());
    if (n < 3) throw std::invalid_argument("seesaw_split: contour too small");
    if (cut.index < 0 || cut.index >= n || !(contour[cut.index] == cut.point))
        throw std::invalid_argument("seesaw_split: cut is not on the contour");

    const Vec2 start = contour[cut.index];
    // travel sign from the first forward neighbor whose height differs
    int dy_sign = 0;
    for (int k = 1; k < n && dy_sign == 0; ++k)
        dy_sign = signum(contour[(cut.index + k) % n].y - start.y);
    if (dy_sign == 0) dy_sign = -1;  // flat contour, arbitrary but fixed

    std::vector<Vec2> fwd_list{start}, bwd_list{start};
    std::vector<Vec2> *active = &fwd_list, *inactive = &bwd_list;
    int fi = 1, bi = 1;  // cyclic steps taken from the cut in each direction
    for (int consumed = 0; consumed < n - 1; ++consumed) {
        Vec2 p;
        if (active == &fwd_list) {
            p = contour[(cut.index + fi++) % n];
        } else {
            p = contour[(cut.index - bi++ + n * 2) % n];
        }
        active->push_back(p);
        double diff = p.y - inactive->back().y;
        // swap once the new point crosses past the inactive tip in the
        // travel direction; equal heights are no event
        if (signum(diff) == dy_sign) {
            std::swap(active, inactive);
            dy_sign = signum(diff);
        }
    }

    HandPathPair out;
    if (dominant == Hand::Right) {
        out.right = std::move(fwd_list);
        out.left = std::move(bwd_list);
    } else {
        out.left = std::move(fwd_list);
        out.right = std::move(bwd_list);
    }
    return out;
}

}  // namespace scenegest
