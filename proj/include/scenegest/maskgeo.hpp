#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scenegest/geom.hpp"

namespace scenegest {

/// Per-object occupancy raster. `data` is row-major with row 0 at the image
/// top, nonzero = foreground. The origin box places this crop inside the
/// unit-normalized resized image frame.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;
    double box_x = 0.0, box_y = 0.0, box_w = 1.0, box_h = 1.0;

    bool at(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 255 : 0; }
    long count() const;
};

/// PGM binary (P5) files, maxval 255. Loading rejects empty masks.
BinaryMask load_pgm(const std::string &path);
void save_pgm(const BinaryMask &mask, const std::string &path);

struct ResizeDims {
    int width = 0;
    int height = 0;
    double scale = 1.0;
};

/// Scales so the longest edge lands exactly on `longest` (1024 by default),
/// up or down, preserving aspect within rounding.
ResizeDims resize_policy(int width, int height, int longest = 1024);

/// Closed polygon over mask coordinates. Points live in a y-up frame: x is
/// the pixel column, y is (height-1 - row), so "up" in these coordinates is
/// up in the image. Canonical winding is counterclockwise (positive shoelace
/// area). Closure is implicit between the last and first point.
using Contour = std::vector<Vec2>;

double signed_area(const Contour &c);
Vec2 centroid(const std::vector<Vec2> &pts);

/// Outer boundary of the largest 4-connected foreground component, traced
/// through boundary pixel centers. Throws if the boundary has fewer than
/// 3 points.
Contour extract_contour(const BinaryMask &mask);

/// Ramer-Douglas-Peucker. Closed mode anchors the recursion at the point
/// farthest from the centroid and the point farthest from that anchor; open
/// mode anchors at the endpoints. epsilon 0 returns the input unchanged.
/// Internally iterates to a fixpoint so a second pass is always a no-op.
std::vector<Vec2> simplify_rdp(const std::vector<Vec2> &points, double epsilon,
                               bool closed = true);

/// Curvature-corrected moving average: each point is replaced by the window
/// mean, then pushed back out along the local radial direction by the exact
/// shrink factor a moving average applies to a circle of the locally
/// estimated curvature. Window must be odd and smaller than the point count.
/// Open mode pins the endpoints and shrinks the window near them.
std::vector<Vec2> smooth_ccma(const std::vector<Vec2> &points, int window,
                              bool closed = true);

struct SymmetryResult {
    double angle_deg = 0.0;  // rotation applied to the mask that maximizes the score
    double score = 0.0;      // |left n mirror(right)| / max(|left|, |right|)
};

/// Sweeps integer rotations from -90 to +90 degrees, rotating the cropped
/// mask with nearest-neighbor sampling and scoring the vertical-axis mirror
/// overlap. Ties prefer the smallest |angle|, then the negative one.
SymmetryResult symmetry_sweep(const BinaryMask &mask);

enum class PrimitiveKind { None, Rectangle, Triangle, Circle, Ellipse };

std::string primitive_kind_name(PrimitiveKind k);

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

struct EllipseFit {
    Vec2 center;
    double a = 0.0;      // semi-axes, a >= b
    double b = 0.0;
    double angle = 0.0;  // radians, orientation of the a axis
};

struct PrimitiveFit {
    PrimitiveKind kind = PrimitiveKind::None;
    double overlap = 0.0;                         // winning score, 0 for none
    double overlap_rect = 0.0, overlap_triangle = 0.0;
    double overlap_circle = 0.0, overlap_ellipse = 0.0;
    std::vector<Vec2> rect;                       // 4 corners
    std::vector<Vec2> triangle;                   // 3 corners
    Circle circle;
    EllipseFit ellipse;
};

/// Fits a minimum-area rectangle, an enclosing triangle, the minimum
/// enclosing circle and the second-moment ellipse, rasterizes each at mask
/// resolution and scores overlap = |mask n primitive| / max(|mask|,
/// |primitive|). kind is the best scorer strictly above the threshold
/// (earlier kind wins exact ties, in the order rect, triangle, circle,
/// ellipse); at or below the threshold the kind is None.
PrimitiveFit fit_primitives(const BinaryMask &mask, double threshold = 0.85);

struct Elongation {
    double ratio = 1.0;  // sqrt(lambda1 / lambda2), +inf when collinear
    Vec2 axis{1.0, 0.0};  // principal direction, same y-up frame as contours
    bool abnormal = false;
};

/// Eigendecomposition of the 2x2 covariance of foreground pixel coordinates.
Elongation elongation_ratio(const BinaryMask &mask, double threshold = 3.0);
/// Closed-form variant for an axis-aligned box of the given extent.
Elongation elongation_from_box(double w, double h, double threshold = 3.0);

// Exposed for reuse and cross-checking.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);        // CCW, no
                                                             // collinear interior points
std::vector<Vec2> min_area_rect(const std::vector<Vec2> &hull);
Circle min_enclosing_circle(const std::vector<Vec2> &pts);
std::vector<Vec2> enclosing_triangle(const std::vector<Vec2> &hull);

}  // namespace scenegest
