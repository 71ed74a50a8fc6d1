#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenegest/maskgeo.hpp"

namespace scenegest {

/// One detected object in the resized image frame (pixels, y down). Boxes are
/// integer (x, y, w, h); the mask file is a crop exactly matching the box.
struct ObjectRecord {
    int id = 0;
    std::string label;  // lemmatized
    int box_x = 0, box_y = 0, box_w = 0, box_h = 0;
    std::string mask_path;  // relative to the scene file
    double confidence = 1.0;
    int group = -1;  // alignment group id after analysis

    Vec2 center() const { return {box_x + box_w / 2.0, box_y + box_h / 2.0}; }
};

struct AlignmentGroup {
    enum class Kind { Linear, Circular, Scattered };
    int id = 0;
    Kind kind = Kind::Linear;
    std::vector<int> members;  // object ids, linear ones ordered along the line
    Vec2 anchor;               // linear: a point on the line
    Vec2 dir;                  // linear: unit direction
    Vec2 center;               // circular
    double radius = 0.0;       // circular
};

std::string group_kind_name(AlignmentGroup::Kind k);

/// Geometry summary attached to each object once its mask was analyzed.
struct ObjectAnalysis {
    SymmetryResult symmetry;
    PrimitiveFit primitive;
    Elongation elongation;
    Contour contour;  // simplified then smoothed, crop-local y-up coordinates
};

struct Scene {
    int pre_width = 0, pre_height = 0;  // capture resolution
    int width = 0, height = 0;          // after the resize policy
    double scale = 1.0;
    std::vector<ObjectRecord> objects;
    std::vector<AlignmentGroup> groups;
    std::vector<std::optional<ObjectAnalysis>> analyses;  // parallel to objects
    std::string dir;  // directory of the scene file, for mask paths

    const ObjectRecord *find(int id) const;
    const AlignmentGroup *find_group(int id) const;
};

/// Scene files are JSON. Loading validates that the recorded resized
/// dimensions match the resize policy, that boxes stay in frame and that ids
/// are unique; analysis fields from an earlier augmentation pass are ignored
/// and recomputed.
Scene load_scene(const std::string &path);
/// Writes the scene back with per-object analysis summaries and groups.
void save_scene(const Scene &scene, const std::string &path);

BinaryMask load_object_mask(const Scene &scene, const ObjectRecord &obj);

struct AnalysisParams {
    double rdp_epsilon = 2.0;
    int ccma_window = 5;
    double primitive_threshold = 0.85;
    double elongation_threshold = 3.0;
    double linear_tol_deg = 5.0;
    double circular_tol = 0.05;
    int scattered_threshold = 20;
};

ObjectAnalysis analyze_object(const BinaryMask &mask, const AnalysisParams &params);

struct LinearGroup {
    std::vector<int> members;  // indices into the center list, ordered along the line
    Vec2 anchor;
    Vec2 dir;                  // unit direction
    double mean_dev_deg = 0.0;
};

/// Exhaustive seed-pair search: a candidate joins a seed line when the angle
/// at the seed's first point stays within the tolerance. The largest group
/// wins (ties: smaller mean deviation, then member order), its members leave
/// the pool, and the search repeats. Groups need at least 3 members.
std::vector<LinearGroup> detect_linear_groups(const std::vector<Vec2> &centers,
                                              double tol_deg);

struct CircleGroup {
    Vec2 center;
    double radius = 0.0;
};

/// All-or-nothing circle test over at least 5 centers: a least-squares circle
/// is accepted only if every center sits within tol*radius of it.
std::optional<CircleGroup> detect_circular_group(const std::vector<Vec2> &centers,
                                                 double tol);

/// More than `threshold` leftover objects count as one scattered arrangement.
bool classify_scattered(int remaining, int threshold = 20);

/// Runs mask analysis for every object and the per-label linear/circular
/// passes plus the scene-wide scattered fallback; fills analyses, groups and
/// object group ids.
void analyze_scene(Scene &scene, const AnalysisParams &params);

}  // namespace scenegest
