#pragma once

#include "scenegest/maskgeo.hpp"

namespace scenegest {

struct CuttingPoint {
    int index = 0;       // into the contour
    Vec2 point;
    double slope = 0.0;  // local tangent angle at the cut, radians
};

/// Top anchor for splitting a contour into two hand paths: the point with the
/// maximum y (ties resolved toward the contour centroid's x, then the lowest
/// index), walked further uphill while a neighbor keeps strictly gaining y.
CuttingPoint find_cutting_point(const Contour &contour);

/// Two hand paths that both start at the cut. `dominant` consumes the contour
/// forward along its winding, the other hand backward; every remaining point
/// lands in exactly one list, so the sizes sum to contour size + 1.
struct HandPathPair {
    std::vector<Vec2> left;
    std::vector<Vec2> right;
};

enum class Hand { Left, Right };

/// Alternating descent split: the active list consumes points until its newest
/// point crosses below the inactive list's tip, then the roles swap. Equal
/// heights are no event. The result does not depend on where the contour's
/// point list happens to start.
HandPathPair seesaw_split(const Contour &contour, const CuttingPoint &cut,
                          Hand dominant = Hand::Right);

}  // namespace scenegest
