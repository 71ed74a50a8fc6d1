#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenegest/ik.hpp"
#include "scenegest/scene.hpp"
#include "scenegest/seesaw.hpp"
#include "scenegest/semantics.hpp"

namespace scenegest {

enum class PlanCategory {
    SingleTrajectory,
    TwoTrajectory,
    AbnormalShape,
    Alignment,
    Position,
    Size,
};
enum class PlanSource { Automatic, Manual };
enum class HandSet { Left, Right, Both };
enum class HandShape { Flat, Point, Cup };

std::string plan_category_name(PlanCategory c);
std::string plan_source_name(PlanSource s);
std::string hand_set_name(HandSet h);
std::string hand_shape_name(HandShape s);

struct PhaseCounts {
    int prep = 0, stroke = 0, hold = 0, retract = 0;
    int total() const { return prep + stroke + hold + retract; }
};

// prep/stroke/hold/retract shares; tracing gestures carry a long stroke,
// pointing-style gestures replace it with a long hold.
extern const std::array<double, 4> kTrajectoryShares;  // 20/55/5/20
extern const std::array<double, 4> kPointingShares;    // 40/-/40/20

/// Splits `total` frames by the given shares with largest-remainder rounding:
/// each phase lands within one frame of its exact share and the counts sum to
/// `total` exactly. Remainder ties go to the larger share, then earlier phase.
PhaseCounts allocate_phases(int total, const std::array<double, 4> &shares);

/// One hand's spatial course in world meters.
struct HandPath {
    Hand hand = Hand::Right;
    std::vector<Vec3> points;
};

struct GesturePlan {
    PlanCategory category = PlanCategory::SingleTrajectory;
    PlanSource source = PlanSource::Automatic;
    HandSet hands = HandSet::Right;
    HandShape shape = HandShape::Point;
    // Palm facing during the stroke (hold for size plans). Two-handed plans
    // store the LEFT palm's facing; the right hand mirrors it.
    Vec3 palm_dir{0.0, 0.0, 1.0};
    std::vector<HandPath> paths;
    std::optional<Vec3> point_dir;  // index direction for position plans
    bool pointing_style = false;    // no stroke phase; hold carries the meaning
    double separation = 0.0;        // size plans, meters between palms
    double focus_time = 0.0;        // seconds; stroke/hold onset syncs here
    double duration_seconds = 0.0;  // 0 = the category minimum
    double importance = 0.0;
    double priority = 0.0;  // automatic plans sit 1000 above manual ones
    int object_id = -1;
    int group_id = -1;
    std::string text;  // source phrase, for reports

    // Filled by schedule():
    bool scheduled = false;
    int start_frame = 0;
    PhaseCounts phases;
    std::vector<std::string> warnings;
};

/// Everything the realizer reads from configuration.
struct RealizeParams {
    double fps = 30.0;
    Hand dominant = Hand::Right;
    double symmetry_gate = 0.9;
    double min_auto_seconds = 3.0;
    double min_manual_seconds = 2.0;
    double max_plan_seconds = 6.0;
    double stroke_speed = 0.35;  // m/s; trajectory plans stretch to stay under it
    std::array<double, 4> trajectory_shares = kTrajectoryShares;
    std::array<double, 4> pointing_shares = kPointingShares;
    double percent_range = 0.25;
    std::map<std::string, double> size_separations;
    std::map<std::string, Vec2> position_anchors;  // shoulder-relative x/y, meters
    double path_depth = 0.35;                      // z for paths and anchors
    std::map<std::string, std::string> effector_roles;  // wrist/palm/tip per side -> bone
    Vec3 palm_normal_axis{0.0, 0.0, 1.0};  // palm-local axis facing out of the palm
    double point_curl_deg = 80.0;          // curl of non-index fingers when pointing
    double cup_curl_deg = 25.0;
    ObjectiveWeights ik_weights;
    SolveOptions ik_options;
    int seam_frames = 5;
    double idle_share = 0.25;
    double beat_share = 0.75;
    double grace_seconds = 0.5;
    double fade_seconds = 2.0;
};

/// Defaults whose role names match the bundled chain file.
RealizeParams default_realize_params();

/// Uniformly scales and centers a path into the gesture volume: x spans at
/// most [-0.5, 0.5], y at most [-0.5, 0.3] (shoulder-relative meters), aspect
/// preserved, at the constant given depth. Input points use the mask/contour
/// frame (y already up); a single point maps to the volume center.
std::vector<Vec3> normalize_path(const std::vector<Vec2> &path, double depth = 0.35);

/// Same mapping applied jointly, so several paths keep their relative layout.
std::vector<std::vector<Vec3>> normalize_paths_common(
    const std::vector<std::vector<Vec2>> &paths, double depth = 0.35);

/// Rest-pose world position of the left or right shoulder bone.
Vec3 shoulder_world(const KinematicChain &chain, Hand hand);

/// Expands one scored phrase into zero or more gesture plans: an automatic
/// plan for a bound group or object (alignment, disproportion, two-handed or
/// one-handed outline — first match in that order), plus manual position and
/// size plans for dictionary attributes. Phrases below the importance gate
/// yield nothing.
std::vector<GesturePlan> plan_from_annotation(const PhraseAnnotation &annotation,
                                              const Scene &scene,
                                              const KinematicChain &chain,
                                              const RealizeParams &params);

/// Assigns each plan its frame window: the span is the category's minimum
/// duration, phases split per the share table, and the stroke (or hold)
/// onset lands on the focus word's start frame, shifted only to stay inside
/// the clip. Plans that cannot fit are left unscheduled with a warning.
void schedule(std::vector<GesturePlan> &plans, double fps, int clip_frames,
              const RealizeParams &params);

struct SpeechActivity {
    std::vector<std::pair<double, double>> intervals;  // seconds, sorted, disjoint
};

/// Speech files are JSON: {"intervals": [[start, end], ...]}.
SpeechActivity load_speech(const std::string &path);

/// Per-frame beat weight in [0, 1]: 1 while speech is active or within the
/// grace period after it, sliding toward 0 (and back) at a rate that spans
/// the full range over `fade` seconds. The clip starts at full weight.
std::vector<double> blend_schedule(const SpeechActivity &speech, int frames, double fps,
                                   double grace = 0.5, double fade = 2.0);

/// Mixes beat into the idle pose frame by frame: idle + w*beat_share*(beat-idle),
/// so weight 1 gives the (1-beat_share) idle / beat_share beat blend and
/// weight 0 gives pure idle.
MotionClip composite_base(const MotionClip &beat, const Pose &idle,
                          const std::vector<double> &weights, double beat_share = 0.75);

struct TimingSummary {
    int original_frames = 0;
    int chosen_frames = 0;
    double score = 0.0;
    int candidates = 0;
    bool fell_back = false;  // no beat window fit any candidate length
};

struct TimingResult {
    std::vector<Pose> frames;
    TimingSummary summary;
};

/// Brute-force duration search: linear-stretches the segment to every frame
/// count within the percent range, scores mean |velocity| + |acceleration| +
/// |jerk| differences against the equal-length beat window at `start_frame`,
/// and keeps the lowest score (ties: fewest frames). An empty mask scores all
/// DOFs.
TimingResult timing_optimize(const std::vector<Pose> &segment, const MotionClip &beat,
                             int start_frame, double percent_range,
                             const std::vector<char> &dof_mask = {});

struct PlanDiagnostics {
    int plan_index = -1;  // into the input plan list
    double priority = 0.0;
    bool solved = false;
    bool skipped = false;
    std::string skip_reason;
    int start_frame = 0;
    int frames = 0;
    PhaseCounts phases;
    int iterations = 0;
    bool converged = false;
    double cost_total = 0.0;
    double mean_residual = 0.0;  // meters, over distance-constrained frames
    double max_residual = 0.0;
    double hold_max_residual = 0.0;  // worst tracking inside the hold window
    TimingSummary timing;
};

/// Gesture motion laid over the base animation: a clip (initialized from the
/// beat) plus a per-frame per-DOF mask of what the plans actually wrote.
struct Overlay {
    MotionClip clip;
    std::vector<std::vector<char>> written;
    std::vector<PlanDiagnostics> plans;
};

/// Solves scheduled plans in ascending priority so later (higher-priority)
/// writes win overlapping frames. Each plan becomes one IK problem over its
/// window (anchored to the base animation at entry and exit, targets along
/// its paths, palm or pointing direction constraints), gets its duration
/// tuned against the beat, and is written with a short seam blend toward the
/// base at both ends. Plans whose solve tracks worse than 2 cm are skipped.
Overlay solve_plans(const std::vector<GesturePlan> &plans, const MotionClip &base,
                    const MotionClip &beat, const KinematicChain &chain,
                    const RealizeParams &params);

/// Base animation with overlay values replacing every written DOF.
MotionClip apply_overlay(const MotionClip &base, const Overlay &overlay);

/// Full assembly: speech-weighted beat/idle blend, then the overlay on top.
MotionClip composite(const MotionClip &beat, const Pose &idle, const SpeechActivity &speech,
                     const Overlay &overlay, const RealizeParams &params);

}  // namespace scenegest
