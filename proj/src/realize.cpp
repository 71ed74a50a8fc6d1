#include "scenegest/realize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "scenegest/io.hpp"

namespace scenegest {

using nlohmann::json;

const std::array<double, 4> kTrajectoryShares{0.20, 0.55, 0.05, 0.20};
const std::array<double, 4> kPointingShares{0.40, 0.0, 0.40, 0.20};

std::string plan_category_name(PlanCategory c) {
    switch (c) {
        case PlanCategory::SingleTrajectory: return "single_trajectory";
        case PlanCategory::TwoTrajectory: return "two_trajectory";
        case PlanCategory::AbnormalShape: return "abnormal_shape";
        case PlanCategory::Alignment: return "alignment";
        case PlanCategory::Position: return "position";
        default: return "size";
    }
}

std::string plan_source_name(PlanSource s) {
    return s == PlanSource::Automatic ? "automatic" : "manual";
}

std::string hand_set_name(HandSet h) {
    switch (h) {
        case HandSet::Left: return "left";
        case HandSet::Right: return "right";
        default: return "both";
    }
}

std::string hand_shape_name(HandShape s) {
    switch (s) {
        case HandShape::Flat: return "flat";
        case HandShape::Point: return "point";
        default: return "cup";
    }
}

PhaseCounts allocate_phases(int total, const std::array<double, 4> &shares) {
    if (total < 0) throw std::invalid_argument("allocate_phases: negative total");
    double sum = 0.0;
    for (double s : shares) {
        if (s < 0.0) throw std::invalid_argument("allocate_phases: negative share");
        sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("allocate_phases: shares must sum to 1");

    int base[4];
    double rem[4];
    int used = 0;
    for (int i = 0; i < 4; ++i) {
        double exact = total * shares[i];
        base[i] = static_cast<int>(std::floor(exact));
        rem[i] = exact - base[i];
        used += base[i];
    }
    int leftover = total - used;
    int order[4] = {0, 1, 2, 3};
    std::sort(order, order + 4, [&](int a, int b) {
        if (rem[a] != rem[b]) return rem[a] > rem[b];
        if (shares[a] != shares[b]) return shares[a] > shares[b];
        return a < b;
    });
    for (int i = 0; i < leftover; ++i) base[order[i]] += 1;
    return PhaseCounts{base[0], base[1], base[2], base[3]};
}

/*---- spatial normalization ----*/

// The gesture volume spans 1.0 m in x and 0.8 m in y, centered at (0, -0.1)
// relative to the shoulder: x in [-0.5, 0.5], y in [-0.5, 0.3].
static std::vector<std::vector<Vec3>> map_into_volume(
    const std::vector<std::vector<Vec2>> &paths, double depth) {
    double minx = std::numeric_limits<double>::infinity(), maxx = -minx;
    double miny = minx, maxy = maxx;
    size_t count = 0;
    for (const auto &path : paths)
        for (const Vec2 &p : path) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
            ++count;
        }
    if (count == 0) return std::vector<std::vector<Vec3>>(paths.size());
    double w = maxx - minx, h = maxy - miny;
    double scale = std::numeric_limits<double>::infinity();
    if (w > 0.0) scale = std::min(scale, 1.0 / w);
    if (h > 0.0) scale = std::min(scale, 0.8 / h);
    if (!std::isfinite(scale)) scale = 1.0;  // single point: extent zero
    double cx = (minx + maxx) / 2.0, cy = (miny + maxy) / 2.0;
    std::vector<std::vector<Vec3>> out(paths.size());
    for (size_t i = 0; i < paths.size(); ++i) {
        out[i].reserve(paths[i].size());
        for (const Vec2 &p : paths[i])
            out[i].push_back({(p.x - cx) * scale, (p.y - cy) * scale - 0.1, depth});
    }
    return out;
}

std::vector<Vec3> normalize_path(const std::vector<Vec2> &path, double depth) {
    if (path.empty()) throw std::invalid_argument("normalize_path: empty path");
    return map_into_volume({path}, depth)[0];
}

std::vector<std::vector<Vec3>> normalize_paths_common(
    const std::vector<std::vector<Vec2>> &paths, double depth) {
    return map_into_volume(paths, depth);
}

Vec3 shoulder_world(const KinematicChain &chain, Hand hand) {
    const std::string &name =
        hand == Hand::Left ? chain.shoulder_left : chain.shoulder_right;
    int bone = chain.require_bone(name);
    Pose rest = Pose::zeros(chain.dof_count());
    return bone_position(chain, rest, bone);
}

/*---- planning ----*/

static std::vector<Vec3> offset_path(std::vector<Vec3> pts, const Vec3 &off) {
    for (Vec3 &p : pts) p += off;
    return pts;
}

static GesturePlan seed_plan(const PhraseAnnotation &a) {
    GesturePlan p;
    p.focus_time = a.focus_time;
    p.importance = a.importance;
    p.object_id = a.object_id;
    p.group_id = a.group_id;
    p.text = a.text;
    return p;
}

static void finish_plan(GesturePlan &p, PlanSource source) {
    p.source = source;
    p.priority = (source == PlanSource::Automatic ? 1000.0 : 0.0) + p.importance;
}

// Long sweeps get more time so the stroke keeps a comfortable hand speed;
// the category minimum and an upper cap still bound the result.
static void fit_duration_to_path(GesturePlan &p, const RealizeParams &params) {
    double longest = 0.0;
    for (const HandPath &hp : p.paths) {
        double len = 0.0;
        for (size_t i = 1; i < hp.points.size(); ++i)
            len += dist(hp.points[i - 1], hp.points[i]);
        longest = std::max(longest, len);
    }
    double stroke_share = params.trajectory_shares[1];
    if (longest <= 0.0 || params.stroke_speed <= 0.0 || stroke_share <= 0.0) return;
    double want = longest / params.stroke_speed / stroke_share;
    p.duration_seconds = clamp(want, params.min_auto_seconds, params.max_plan_seconds);
}

static int object_index(const Scene &scene, int id) {
    for (size_t i = 0; i < scene.objects.size(); ++i)
        if (scene.objects[i].id == id) return static_cast<int>(i);
    return -1;
}

// Group centers are stored in image pixels (y down); flip to the y-up frame
// the volume mapping expects. Recentring makes the flip's origin irrelevant.
static Vec2 flip_y(const Vec2 &p) { return {p.x, -p.y}; }

static std::optional<GesturePlan> automatic_plan(const PhraseAnnotation &a,
                                                 const Scene &scene,
                                                 const KinematicChain &chain,
                                                 const RealizeParams &params) {
    const AlignmentGroup *group =
        a.group_id >= 0 ? scene.find_group(a.group_id) : nullptr;
    if (group && group->kind != AlignmentGroup::Kind::Scattered) {
        std::vector<Vec2> pts;
        if (group->kind == AlignmentGroup::Kind::Linear) {
            for (int id : group->members) {
                const ObjectRecord *o = scene.find(id);
                if (o) pts.push_back(flip_y(o->center()));
            }
        } else {
            // Trace the circle from its top, 32 steps around.
            Vec2 c = flip_y(group->center);
            for (int i = 0; i <= 32; ++i) {
                double t = 2.0 * kPi * i / 32.0;
                pts.push_back(c + Vec2{std::sin(t), std::cos(t)} * group->radius);
            }
        }
        if (pts.size() >= 2) {
            GesturePlan p = seed_plan(a);
            p.category = PlanCategory::Alignment;
            p.hands = params.dominant == Hand::Left ? HandSet::Left : HandSet::Right;
            p.shape = HandShape::Point;
            p.paths.push_back({params.dominant,
                               offset_path(normalize_path(pts, params.path_depth),
                                           shoulder_world(chain, params.dominant))});
            fit_duration_to_path(p, params);
            finish_plan(p, PlanSource::Automatic);
            return p;
        }
    }

    if (a.object_id < 0) return std::nullopt;
    int idx = object_index(scene, a.object_id);
    if (idx < 0 || !scene.analyses[idx]) return std::nullopt;
    const ObjectAnalysis &an = *scene.analyses[idx];
    if (an.contour.size() < 3) return std::nullopt;

    if (an.elongation.abnormal) {
        // A sweep along the principal axis, low endpoint first.
        Vec2 c = centroid(an.contour);
        Vec2 axis = an.elongation.axis;
        double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
        for (const Vec2 &p : an.contour) {
            double t = dot(p - c, axis);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
        Vec2 e0 = c + axis * tmin, e1 = c + axis * tmax;
        if (e1.x < e0.x || (e1.x == e0.x && e1.y < e0.y)) std::swap(e0, e1);
        GesturePlan p = seed_plan(a);
        p.category = PlanCategory::AbnormalShape;
        p.hands = params.dominant == Hand::Left ? HandSet::Left : HandSet::Right;
        p.shape = HandShape::Flat;
        p.paths.push_back({params.dominant,
                           offset_path(normalize_path({e0, e1}, params.path_depth),
                                       shoulder_world(chain, params.dominant))});
        fit_duration_to_path(p, params);
        finish_plan(p, PlanSource::Automatic);
        return p;
    }

    if (an.symmetry.score >= params.symmetry_gate) {
        CuttingPoint cut = find_cutting_point(an.contour);
        HandPathPair pair = seesaw_split(an.contour, cut, params.dominant);
        // Trace each half with the hand on its own side of the body
        // (smaller x is the viewer's left, the agent's right arm).
        auto mean_x = [](const std::vector<Vec2> &pts) {
            double s = 0.0;
            for (const Vec2 &p : pts) s += p.x;
            return pts.empty() ? 0.0 : s / pts.size();
        };
        std::vector<Vec2> right_pts = pair.right, left_pts = pair.left;
        if (mean_x(left_pts) < mean_x(right_pts)) std::swap(left_pts, right_pts);
        std::vector<std::vector<Vec3>> mapped =
            normalize_paths_common({right_pts, left_pts}, params.path_depth);
        Vec3 mid = (shoulder_world(chain, Hand::Left) +
                    shoulder_world(chain, Hand::Right)) * 0.5;
        GesturePlan p = seed_plan(a);
        p.category = PlanCategory::TwoTrajectory;
        p.hands = HandSet::Both;
        p.shape = HandShape::Point;
        p.palm_dir = {-1.0, 0.0, 0.0};  // palms bracket the traced shape
        p.paths.push_back({Hand::Right, offset_path(mapped[0], mid)});
        p.paths.push_back({Hand::Left, offset_path(mapped[1], mid)});
        fit_duration_to_path(p, params);
        finish_plan(p, PlanSource::Automatic);
        return p;
    }

    std::vector<Vec2> closed = an.contour;
    closed.push_back(closed.front());
    GesturePlan p = seed_plan(a);
    p.category = PlanCategory::SingleTrajectory;
    p.hands = params.dominant == Hand::Left ? HandSet::Left : HandSet::Right;
    p.shape = HandShape::Point;
    p.paths.push_back({params.dominant,
                       offset_path(normalize_path(closed, params.path_depth),
                                   shoulder_world(chain, params.dominant))});
    fit_duration_to_path(p, params);
    finish_plan(p, PlanSource::Automatic);
    return p;
}

std::vector<GesturePlan> plan_from_annotation(const PhraseAnnotation &a,
                                              const Scene &scene,
                                              const KinematicChain &chain,
                                              const RealizeParams &params) {
    std::vector<GesturePlan> plans;
    if (!a.gated) return plans;

    if (std::optional<GesturePlan> auto_plan = automatic_plan(a, scene, chain, params))
        plans.push_back(std::move(*auto_plan));

    if (!a.position_class.empty()) {
        auto it = params.position_anchors.find(a.position_class);
        if (it != params.position_anchors.end()) {
            // Point with the arm on the indicated side; the viewer's left is
            // the agent's right hand.
            Hand hand = params.dominant;
            if (a.position_class.find("left") != std::string::npos) hand = Hand::Right;
            else if (a.position_class.find("right") != std::string::npos) hand = Hand::Left;
            Vec3 shoulder = shoulder_world(chain, hand);
            Vec3 target = shoulder + Vec3{it->second.x, it->second.y, params.path_depth};
            GesturePlan p = seed_plan(a);
            p.category = PlanCategory::Position;
            p.hands = hand == Hand::Left ? HandSet::Left : HandSet::Right;
            p.shape = HandShape::Point;
            p.pointing_style = true;
            p.paths.push_back({hand, {target}});
            p.point_dir = normalized(target - shoulder);
            finish_plan(p, PlanSource::Manual);
            plans.push_back(std::move(p));
        }
    }

    if (!a.size_class.empty()) {
        auto it = params.size_separations.find(a.size_class);
        if (it != params.size_separations.end()) {
            double sep = it->second;
            Vec3 mid = (shoulder_world(chain, Hand::Left) +
                        shoulder_world(chain, Hand::Right)) * 0.5;
            GesturePlan p = seed_plan(a);
            p.category = PlanCategory::Size;
            p.hands = HandSet::Both;
            p.shape = HandShape::Flat;
            p.pointing_style = true;
            p.separation = sep;
            p.palm_dir = {-1.0, 0.0, 0.0};  // left palm faces the midline
            p.paths.push_back({Hand::Left, {mid + Vec3{sep / 2.0, -0.10, params.path_depth}}});
            p.paths.push_back({Hand::Right, {mid + Vec3{-sep / 2.0, -0.10, params.path_depth}}});
            finish_plan(p, PlanSource::Manual);
            plans.push_back(std::move(p));
        }
    }
    return plans;
}

void schedule(std::vector<GesturePlan> &plans, double fps, int clip_frames,
              const RealizeParams &params) {
    if (fps <= 0.0) throw std::invalid_argument("schedule: fps must be positive");
    for (GesturePlan &p : plans) {
        double min_s = p.source == PlanSource::Automatic ? params.min_auto_seconds
                                                         : params.min_manual_seconds;
        double span_s = std::max(min_s, p.duration_seconds);
        int n = static_cast<int>(std::lround(span_s * fps));
        if (n <= 0 || n > clip_frames) {
            p.scheduled = false;
            p.warnings.push_back("clip too short for the minimum gesture duration");
            continue;
        }
        p.phases = allocate_phases(
            n, p.pointing_style ? params.pointing_shares : params.trajectory_shares);
        int focus_frame = static_cast<int>(std::lround(p.focus_time * fps));
        int start = focus_frame - p.phases.prep;
        if (start < 0) {
            p.warnings.push_back("focus word too early, plan shifted right");
            start = 0;
        }
        if (start + n > clip_frames) {
            p.warnings.push_back("focus word too late, plan shifted left");
            start = clip_frames - n;
        }
        p.start_frame = start;
        p.scheduled = true;
    }
}

/*---- speech and blending ----*/

SpeechActivity load_speech(const std::string &path) {
    json j = json::parse(read_file(path));
    SpeechActivity s;
    double prev_end = -std::numeric_limits<double>::infinity();
    for (const json &ji : j.at("intervals")) {
        double a = ji.at(0).get<double>(), b = ji.at(1).get<double>();
        if (b < a) throw std::runtime_error(path + ": interval ends before it starts");
        if (a < prev_end)
            throw std::runtime_error(path + ": intervals must be sorted and disjoint");
        s.intervals.emplace_back(a, b);
        prev_end = b;
    }
    return s;
}

std::vector<double> blend_schedule(const SpeechActivity &speech, int frames, double fps,
                                   double grace, double fade) {
    if (frames < 0 || fps <= 0.0) throw std::invalid_argument("blend_schedule: bad shape");
    std::vector<double> w(frames);
    double prev = 1.0;  // the clip opens at the full blend
    double step = fade > 0.0 ? 1.0 / (fps * fade) : 2.0;
    for (int f = 0; f < frames; ++f) {
        double t = f / fps;
        double target = 0.0;
        for (auto [a, b] : speech.intervals)
            if (t >= a && t <= b + grace) {
                target = 1.0;
                break;
            }
        prev += clamp(target - prev, -step, step);
        w[f] = prev;
    }
    return w;
}

MotionClip composite_base(const MotionClip &beat, const Pose &idle,
                          const std::vector<double> &weights, double beat_share) {
    if (static_cast<int>(weights.size()) != beat.frame_count())
        throw std::invalid_argument("composite_base: one weight per frame required");
    MotionClip out = beat;
    for (int f = 0; f < out.frame_count(); ++f) {
        if (idle.size() != static_cast<int>(out.frames[f].q.size()))
            throw std::invalid_argument("composite_base: idle pose size mismatch");
        for (int d = 0; d < idle.size(); ++d)
            out.frames[f].q[d] = idle[d] + weights[f] * beat_share * (beat.frames[f][d] - idle[d]);
    }
    return out;
}

/*---- timing optimization ----*/

// Endpoint-preserving linear resample of a pose sequence.
static std::vector<Pose> resample_frames(const std::vector<Pose> &in, int count) {
    int n = static_cast<int>(in.size());
    std::vector<Pose> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        double u = count > 1 ? static_cast<double>(i) * (n - 1) / (count - 1) : 0.0;
        int k = std::min(static_cast<int>(std::floor(u)), n - 1);
        int k1 = std::min(k + 1, n - 1);
        double a = u - k;
        Pose p = in[k];
        for (size_t d = 0; d < p.q.size(); ++d)
            p.q[d] = (1.0 - a) * in[k].q[d] + a * in[k1].q[d];
        out.push_back(std::move(p));
    }
    return out;
}

// Mean |velocity| + |acceleration| + |jerk| gap between two equal-length
// windows, forward differences scaled by fps, over the masked DOFs.
static double kinematic_score(const std::vector<Pose> &seg, const MotionClip &beat,
                              int start, double fps, const std::vector<int> &dofs) {
    int n = static_cast<int>(seg.size());
    int m = static_cast<int>(dofs.size());
    if (m == 0) return 0.0;
    std::vector<double> a(static_cast<size_t>(n) * m), b(a.size());
    for (int f = 0; f < n; ++f)
        for (int d = 0; d < m; ++d) {
            a[static_cast<size_t>(f) * m + d] = seg[f][dofs[d]];
            b[static_cast<size_t>(f) * m + d] = beat.frames[start + f][dofs[d]];
        }
    double total = 0.0;
    int rows = n;
    for (int order = 0; order < 3; ++order) {
        if (rows < 2) break;
        for (int f = 0; f + 1 < rows; ++f)
            for (int d = 0; d < m; ++d) {
                size_t i = static_cast<size_t>(f) * m + d, j = i + m;
                a[i] = (a[j] - a[i]) * fps;
                b[i] = (b[j] - b[i]) * fps;
            }
        --rows;
        double acc = 0.0;
        for (int f = 0; f < rows; ++f)
            for (int d = 0; d < m; ++d) {
                size_t i = static_cast<size_t>(f) * m + d;
                acc += std::abs(a[i] - b[i]);
            }
        total += acc / (static_cast<double>(rows) * m);
    }
    return total;
}

TimingResult timing_optimize(const std::vector<Pose> &segment, const MotionClip &beat,
                             int start_frame, double percent_range,
                             const std::vector<char> &dof_mask) {
    TimingResult res;
    int T = static_cast<int>(segment.size());
    res.summary.original_frames = T;
    res.summary.chosen_frames = T;
    if (T < 2 || percent_range <= 0.0 || percent_range >= 1.0) {
        res.frames = segment;
        res.summary.fell_back = true;
        return res;
    }
    int nd = segment.front().size();
    if (!dof_mask.empty() && static_cast<int>(dof_mask.size()) != nd)
        throw std::invalid_argument("timing_optimize: mask size mismatch");
    std::vector<int> dofs;
    for (int d = 0; d < nd; ++d)
        if (dof_mask.empty() || dof_mask[d]) dofs.push_back(d);

    int lo = static_cast<int>(std::ceil(T * (1.0 - percent_range)));
    int hi = static_cast<int>(std::floor(T * (1.0 + percent_range)));
    lo = std::max(lo, 2);

    double best = std::numeric_limits<double>::infinity();
    int best_len = -1;
    std::vector<Pose> best_frames;
    for (int len = lo; len <= hi; ++len) {
        if (start_frame < 0 || start_frame + len > beat.frame_count()) continue;
        ++res.summary.candidates;
        std::vector<Pose> stretched = resample_frames(segment, len);
        double score = kinematic_score(stretched, beat, start_frame, beat.fps, dofs);
        if (score < best) {
            best = score;
            best_len = len;
            best_frames = std::move(stretched);
        }
    }
    if (best_len < 0) {
        res.frames = segment;
        res.summary.fell_back = true;
        res.summary.score = std::numeric_limits<double>::infinity();
        return res;
    }
    res.frames = std::move(best_frames);
    res.summary.chosen_frames = best_len;
    res.summary.score = best;
    return res;
}

/*---- solving ----*/

namespace {
struct ArmInfo {
    Hand hand = Hand::Right;
    int wrist = -1, palm = -1, tip = -1;
    std::vector<int> arm_bones;    // wrist up to just below the root
    std::vector<int> finger_dofs;  // every DOF under the palm
    std::vector<int> index_dofs;   // the chain from palm to the tip
};
}  // namespace

static int role_bone(const KinematicChain &chain, const RealizeParams &params,
                     const std::string &role) {
    auto it = params.effector_roles.find(role);
    if (it == params.effector_roles.end())
        throw std::runtime_error("realize: effector role not configured: " + role);
    return chain.require_bone(it->second);
}

static bool has_ancestor(const KinematicChain &chain, int bone, int ancestor) {
    for (int c = chain.bones[bone].parent; c >= 0; c = chain.bones[c].parent)
        if (c == ancestor) return true;
    return false;
}

static ArmInfo arm_info(const KinematicChain &chain, const RealizeParams &params, Hand hand) {
    ArmInfo arm;
    arm.hand = hand;
    std::string side = hand == Hand::Left ? "left" : "right";
    arm.wrist = role_bone(chain, params, "wrist_" + side);
    arm.palm = role_bone(chain, params, "palm_" + side);
    arm.tip = role_bone(chain, params, "tip_" + side);
    for (int c = arm.wrist; c >= 0 && chain.bones[c].parent >= 0; c = chain.bones[c].parent)
        arm.arm_bones.push_back(c);
    for (size_t b = 0; b < chain.bones.size(); ++b) {
        if (!has_ancestor(chain, static_cast<int>(b), arm.palm)) continue;
        const Bone &bone = chain.bones[b];
        for (size_t k = 0; k < bone.dofs.size(); ++k)
            arm.finger_dofs.push_back(bone.dof_begin + static_cast<int>(k));
    }
    for (int c = arm.tip; c >= 0 && c != arm.palm; c = chain.bones[c].parent) {
        const Bone &bone = chain.bones[c];
        for (size_t k = 0; k < bone.dofs.size(); ++k)
            arm.index_dofs.push_back(bone.dof_begin + static_cast<int>(k));
    }
    return arm;
}

// Curl bends toward whichever limit allows the bigger swing, so the same
// preset works for mirrored finger conventions.
static double curl_value(const KinematicChain &chain, int slot, double magnitude) {
    const Bone &b = chain.bones[chain.dof_bone(slot)];
    const Dof &d = b.dofs[slot - b.dof_begin];
    double v = std::abs(d.min) > std::abs(d.max) ? -magnitude : magnitude;
    return clamp(v, d.min, d.max);
}

static void finger_preset(const KinematicChain &chain, const ArmInfo &arm, HandShape shape,
                          const RealizeParams &params, std::map<int, double> &out) {
    double point = deg2rad(params.point_curl_deg);
    double cup = deg2rad(params.cup_curl_deg);
    for (int slot : arm.finger_dofs) {
        bool index = std::find(arm.index_dofs.begin(), arm.index_dofs.end(), slot) !=
                     arm.index_dofs.end();
        double v = 0.0;
        switch (shape) {
            case HandShape::Flat: v = curl_value(chain, slot, 0.0); break;
            case HandShape::Cup: v = curl_value(chain, slot, cup); break;
            default: v = index ? curl_value(chain, slot, 0.0) : curl_value(chain, slot, point);
        }
        out[slot] = v;
    }
}

// Evenly spaced points along the path by arc length, endpoints included.
static std::vector<Vec3> resample_arc(const std::vector<Vec3> &path, int count) {
    std::vector<Vec3> out;
    if (count <= 0 || path.empty()) return out;
    std::vector<double> cum{0.0};
    for (size_t i = 1; i < path.size(); ++i)
        cum.push_back(cum.back() + dist(path[i - 1], path[i]));
    double total = cum.back();
    for (int i = 0; i < count; ++i) {
        if (total <= 0.0) {
            out.push_back(path.back());
            continue;
        }
        double t = count > 1 ? total * i / (count - 1) : total;
        size_t k = 1;
        while (k < cum.size() - 1 && cum[k] < t) ++k;
        double seg = cum[k] - cum[k - 1];
        double a = seg > 0.0 ? (t - cum[k - 1]) / seg : 0.0;
        out.push_back(path[k - 1] + (path[k] - path[k - 1]) * a);
    }
    return out;
}

Overlay solve_plans(const std::vector<GesturePlan> &plans, const MotionClip &base,
                    const MotionClip &beat, const KinematicChain &chain,
                    const RealizeParams &params) {
    if (base.frame_count() != beat.frame_count() || base.fps != beat.fps)
        throw std::invalid_argument("solve_plans: base and beat clips must match");
    int total = beat.frame_count();
    int nd = chain.dof_count();
    for (const Pose &q : beat.frames)
        if (q.size() != nd) throw std::invalid_argument("solve_plans: beat does not fit chain");

    Overlay ov;
    ov.clip = beat;
    ov.written.assign(total, std::vector<char>(nd, 0));

    std::vector<int> order;
    for (size_t i = 0; i < plans.size(); ++i)
        if (plans[i].scheduled) order.push_back(static_cast<int>(i));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return plans[a].priority < plans[b].priority;
    });

    for (int pi : order) {
        const GesturePlan &plan = plans[pi];
        PlanDiagnostics diag;
        diag.plan_index = pi;
        diag.priority = plan.priority;
        diag.phases = plan.phases;
        diag.start_frame = plan.start_frame;
        int n = plan.phases.total();
        int start = plan.start_frame;
        diag.frames = n;

        std::vector<ArmInfo> arms;
        if (plan.hands != HandSet::Right) arms.push_back(arm_info(chain, params, Hand::Left));
        if (plan.hands != HandSet::Left) arms.push_back(arm_info(chain, params, Hand::Right));

        std::vector<char> free(nd, 0);
        for (const ArmInfo &arm : arms)
            for (int b : arm.arm_bones) {
                const Bone &bone = chain.bones[b];
                for (size_t k = 0; k < bone.dofs.size(); ++k)
                    free[bone.dof_begin + static_cast<int>(k)] = 1;
            }

        IKProblem prob;
        prob.chain = &chain;
        prob.frame_count = n;
        prob.weights = params.ik_weights;
        prob.free_dofs = free;
        prob.init.assign(n, beat.frames[start]);
        prob.known.push_back({0, base.frames[start].q});
        prob.known.push_back({n - 1, base.frames[start + n - 1].q});

        const PhaseCounts &ph = plan.phases;
        int stroke_begin = ph.prep;
        int hold_begin = ph.prep + ph.stroke;
        int retract_begin = hold_begin + ph.hold;
        // Targets extend a few frames past the phase boundaries so the
        // transition transients settle outside the stroke and hold windows;
        // frames 0 and n-1 stay free for the entry/exit anchors.
        int pad = std::min(3, ph.retract > 0 ? ph.retract - 1 : 0);
        int lead = std::min(3, ph.prep > 1 ? ph.prep - 2 : 0);

        for (const ArmInfo &arm : arms) {
            const HandPath *hp = nullptr;
            for (const HandPath &cand : plan.paths)
                if (cand.hand == arm.hand) hp = &cand;
            if (!hp || hp->points.empty()) continue;

            int eff = arm.tip;
            if (plan.category == PlanCategory::Position) eff = arm.wrist;
            if (plan.category == PlanCategory::Size) eff = arm.palm;

            if (ph.prep > 0)
                for (int f = ph.prep - 1 - lead; f < ph.prep; ++f)
                    prob.targets.push_back({f, eff, hp->points.front()});
            if (ph.stroke > 0) {
                std::vector<Vec3> samples = resample_arc(hp->points, ph.stroke);
                for (int i = 0; i < ph.stroke; ++i)
                    prob.targets.push_back({stroke_begin + i, eff, samples[i]});
            }
            for (int f = hold_begin; f < retract_begin + pad; ++f)
                prob.targets.push_back({f, eff, hp->points.back()});

            if (plan.pointing_style) {
                if (plan.category == PlanCategory::Position && plan.point_dir) {
                    // Align the distal index segment with the pointing ray.
                    int seg = chain.bones[arm.tip].parent;
                    Vec3 local = chain.bones[arm.tip].offset;
                    if (seg >= 0 && norm(local) > 1e-12)
                        for (int f = hold_begin; f < retract_begin; ++f)
                            prob.directions.push_back({f, seg, local, *plan.point_dir});
                } else if (plan.category == PlanCategory::Size) {
                    Vec3 dir = arm.hand == Hand::Left ? plan.palm_dir : plan.palm_dir * -1.0;
                    for (int f = hold_begin; f < retract_begin; ++f)
                        prob.directions.push_back({f, arm.palm, params.palm_normal_axis, dir});
                }
            } else {
                Vec3 dir = plan.hands == HandSet::Both && arm.hand == Hand::Right
                               ? plan.palm_dir * -1.0
                               : plan.palm_dir;
                for (int f = stroke_begin; f < hold_begin; ++f)
                    prob.directions.push_back({f, arm.palm, params.palm_normal_axis, dir});
            }
        }

        SolveResult sr = solve_ik(prob, params.ik_options);
        diag.iterations = sr.report.iterations;
        diag.converged = sr.report.converged;
        diag.cost_total = sr.report.total;

        // Tracking residuals on the solved (unstretched) frames.
        double sum = 0.0, worst = 0.0, hold_worst = 0.0;
        if (!prob.targets.empty()) {
            std::map<int, std::vector<const DistanceTarget *>> by_frame;
            for (const DistanceTarget &t : prob.targets) by_frame[t.frame].push_back(&t);
            int count = 0;
            for (const auto &[f, list] : by_frame) {
                std::vector<Transform> world = forward_kinematics(chain, sr.trajectory[f]);
                for (const DistanceTarget *t : list) {
                    double d = dist(t->point, world[t->bone].pos);
                    sum += d;
                    worst = std::max(worst, d);
                    if (f >= hold_begin && f < retract_begin) hold_worst = std::max(hold_worst, d);
                    ++count;
                }
            }
            diag.mean_residual = count > 0 ? sum / count : 0.0;
            diag.max_residual = worst;
            diag.hold_max_residual = hold_worst;
        }
        if (diag.mean_residual >= 0.02) {
            diag.skipped = true;
            diag.skip_reason = "ik tracking above 2 cm";
            ov.plans.push_back(diag);
            continue;
        }

        std::vector<Pose> frames = std::move(sr.trajectory);
        int new_start = start;
        if (params.percent_range > 0.0 && n >= 2) {
            TimingResult tr = timing_optimize(frames, beat, start, params.percent_range, free);
            diag.timing = tr.summary;
            if (!tr.summary.fell_back) {
                int len = tr.summary.chosen_frames;
                // Shift so the stroke onset stays on the focus word.
                int rel = n > 1 ? static_cast<int>(std::lround(
                                      static_cast<double>(ph.prep) * (len - 1) / (n - 1)))
                                : 0;
                new_start = start + ph.prep - rel;
                frames = std::move(tr.frames);
                if (new_start < 0) new_start = 0;
                if (new_start + len > total) new_start = total - len;
            }
        }
        int m = static_cast<int>(frames.size());

        std::map<int, double> preset;
        for (const ArmInfo &arm : arms) finger_preset(chain, arm, plan.shape, params, preset);

        for (int i = 0; i < m; ++i) {
            int f = new_start + i;
            if (f < 0 || f >= total) continue;
            int edge = std::min(i + 1, m - i);
            double u = 1.0;
            if (edge <= params.seam_frames) {
                double t = static_cast<double>(edge) / (params.seam_frames + 1);
                u = t * t * (3.0 - 2.0 * t);
            }
            auto put = [&](int d, double v) {
                double bv = base.frames[f][d];
                ov.clip.frames[f][d] = bv + u * (v - bv);
                ov.written[f][d] = 1;
            };
            for (int d = 0; d < nd; ++d)
                if (free[d]) put(d, frames[i][d]);
            for (const auto &[slot, v] : preset) put(slot, v);
        }
        diag.solved = true;
        diag.start_frame = new_start;
        diag.frames = m;
        ov.plans.push_back(diag);
    }
    return ov;
}

MotionClip apply_overlay(const MotionClip &base, const Overlay &overlay) {
    if (overlay.clip.frame_count() != base.frame_count())
        throw std::invalid_argument("apply_overlay: clip lengths differ");
    MotionClip out = base;
    for (int f = 0; f < out.frame_count(); ++f)
        for (size_t d = 0; d < out.frames[f].q.size(); ++d)
            if (overlay.written[f][d]) out.frames[f].q[d] = overlay.clip.frames[f][d];
    return out;
}

MotionClip composite(const MotionClip &beat, const Pose &idle, const SpeechActivity &speech,
                     const Overlay &overlay, const RealizeParams &params) {
    std::vector<double> w = blend_schedule(speech, beat.frame_count(), beat.fps,
                                           params.grace_seconds, params.fade_seconds);
    MotionClip base = composite_base(beat, idle, w, params.beat_share);
    return apply_overlay(base, overlay);
}

RealizeParams default_realize_params() {
    RealizeParams p;
    p.size_separations = {
        {"tiny", 0.05}, {"small", 0.15}, {"medium", 0.25}, {"large", 0.38}, {"huge", 0.50}};
    p.position_anchors = {
        {"left", {-0.45, -0.10}},          {"right", {0.45, -0.10}},
        {"top", {0.0, 0.25}},              {"bottom", {0.0, -0.35}},
        {"middle", {0.0, -0.10}},          {"top_left", {-0.35, 0.25}},
        {"top_right", {0.35, 0.25}},       {"middle_left", {-0.35, -0.10}},
        {"middle_right", {0.35, -0.10}},   {"bottom_left", {-0.35, -0.35}},
        {"bottom_right", {0.35, -0.35}},
    };
    p.effector_roles = {
        {"wrist_left", "wrist_l"},   {"wrist_right", "wrist_r"},
        {"palm_left", "palm_l"},     {"palm_right", "palm_r"},
        {"tip_left", "index_tip_l"}, {"tip_right", "index_tip_r"},
    };
    return p;
}

}  // namespace scenegest
