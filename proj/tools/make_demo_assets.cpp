// Generates the bundled demo inputs: the upper-body chain, the default
// pipeline config, and an example scene (masks, transcript, speech, beat).
// Everything is procedural and deterministic so the files can be regenerated
// byte-identically at any time.
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenegest/io.hpp"
#include "scenegest/maskgeo.hpp"
#include "scenegest/realize.hpp"
#include "scenegest/skeleton.hpp"

using namespace scenegest;
using nlohmann::json;
namespace fs = std::filesystem;

/*---- kinematic chain ----*/

static Dof make_dof(Axis a, double min_deg, double max_deg) {
    return Dof{a, deg2rad(min_deg), deg2rad(max_deg)};
}

static void add_bone(KinematicChain &c, const std::string &name, const std::string &parent,
                     Vec3 offset, std::vector<Dof> dofs = {}) {
    Bone b;
    b.name = name;
    b.parent = parent.empty() ? -1 : c.bone_index(parent);
    if (!parent.empty() && b.parent < 0)
        throw std::runtime_error("demo chain: parent not declared: " + parent);
    b.offset = offset;
    b.dofs = std::move(dofs);
    c.bones.push_back(std::move(b));
}

static void add_fingers(KinematicChain &c, const std::string &side, double sx) {
    // Finger curl uses one z joint per segment; the mirrored side gets the
    // mirrored limit range.
    double lo = sx > 0 ? -100.0 : -10.0;
    double hi = sx > 0 ? 10.0 : 100.0;
    struct FingerSpec {
        const char *name;
        double z;
        double len[3];
    };
    const FingerSpec fingers[] = {
        {"thumb", 0.035, {0.035, 0.030, 0.022}},
        {"index", 0.018, {0.045, 0.040, 0.028}},
        {"middle", 0.000, {0.047, 0.041, 0.029}},
        {"ring", -0.018, {0.044, 0.038, 0.027}},
        {"pinky", -0.035, {0.038, 0.032, 0.024}},
    };
    std::string palm = "palm_" + side;
    for (const FingerSpec &f : fingers) {
        std::string base = std::string(f.name) + "_" + side;
        add_bone(c, base + "1", palm, {sx * f.len[0], 0.0, f.z},
                 {make_dof(Axis::Z, lo, hi)});
        add_bone(c, base + "2", base + "1", {sx * f.len[1], 0.0, 0.0},
                 {make_dof(Axis::Z, lo, hi)});
        add_bone(c, base + "3", base + "2", {sx * f.len[2], 0.0, 0.0},
                 {make_dof(Axis::Z, lo, hi)});
    }
    add_bone(c, "index_tip_" + side, "index_" + side + "3", {sx * 0.024, 0.0, 0.0});
}

static KinematicChain build_chain() {
    KinematicChain c;
    c.id = "upper_body_v1";
    add_bone(c, "spine", "", {0.0, 0.0, 0.0},
             {make_dof(Axis::X, -25, 25), make_dof(Axis::Y, -25, 25),
              make_dof(Axis::Z, -25, 25)});
    add_bone(c, "neck", "spine", {0.0, 0.50, 0.0},
             {make_dof(Axis::X, -25, 25), make_dof(Axis::Z, -25, 25)});
    for (double sx : {1.0, -1.0}) {
        std::string side = sx > 0 ? "l" : "r";
        add_bone(c, "collar_" + side, "spine", {sx * 0.03, 0.44, 0.0},
                 {make_dof(Axis::Y, -25, 25), make_dof(Axis::Z, -25, 25)});
        add_bone(c, "shoulder_" + side, "collar_" + side, {sx * 0.16, 0.02, 0.0},
                 {make_dof(Axis::X, -150, 150), make_dof(Axis::Y, -150, 150),
                  make_dof(Axis::Z, -150, 150)});
        add_bone(c, "elbow_" + side, "shoulder_" + side, {sx * 0.33, 0.0, 0.0},
                 {make_dof(Axis::Y, -90, 90), make_dof(Axis::Z, -145, 145)});
        add_bone(c, "wrist_" + side, "elbow_" + side, {sx * 0.31, 0.0, 0.0},
                 {make_dof(Axis::X, -90, 90), make_dof(Axis::Y, -60, 60),
                  make_dof(Axis::Z, -80, 80)});
        add_bone(c, "palm_" + side, "wrist_" + side, {sx * 0.09, 0.0, 0.0});
        add_fingers(c, side, sx);
    }
    c.effectors = {"wrist_l", "wrist_r", "palm_l", "palm_r", "index_tip_l", "index_tip_r"};
    c.shoulder_left = "shoulder_l";
    c.shoulder_right = "shoulder_r";
    c.finalize();
    return c;
}

/*---- masks ----*/

static BinaryMask blank(int w, int h) {
    BinaryMask m;
    m.width = w;
    m.height = h;
    m.data.assign(static_cast<size_t>(w) * h, 0);
    return m;
}

// Mirror-symmetric silhouette: narrow neck, round belly, flared base.
static BinaryMask vase_mask(int w, int h) {
    BinaryMask m = blank(w, h);
    double cx = w / 2.0;
    for (int y = 0; y < h; ++y) {
        double v = (y + 0.5) / h;  // 0 at the rim, 1 at the base
        double r = 20.0 + 42.0 * std::pow(std::sin(kPi * (0.15 + 0.75 * v)), 1.5);
        if (v > 0.9) r += 140.0 * (v - 0.9);
        for (int x = 0; x < w; ++x)
            if (std::abs(x + 0.5 - cx) <= r) m.set(x, y, true);
    }
    return m;
}

static BinaryMask circle_mask(int size, double radius) {
    BinaryMask m = blank(size, size);
    double c = size / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double dx = x + 0.5 - c, dy = y + 0.5 - c;
            if (dx * dx + dy * dy <= radius * radius) m.set(x, y, true);
        }
    return m;
}

// A thick slanted rod: clearly elongated, nothing else.
static BinaryMask rod_mask(int w, int h, Vec2 a, Vec2 b, double half_width) {
    BinaryMask m = blank(w, h);
    Vec2 d = b - a;
    double len2 = dot(d, d);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            Vec2 p{x + 0.5, y + 0.5};
            double t = clamp(dot(p - a, d) / len2, 0.0, 1.0);
            if (dist(p, a + d * t) <= half_width) m.set(x, y, true);
        }
    return m;
}

/*---- scene ----*/

static json scene_json() {
    json objects = json::array();
    auto object = [&](int id, const char *label, int x, int y, int w, int h,
                      const char *mask, double conf) {
        objects.push_back({{"id", id},
                           {"label", label},
                           {"box", {x, y, w, h}},
                           {"mask", mask},
                           {"confidence", conf}});
    };
    object(1, "vase", 430, 250, 160, 220, "masks/vase.pgm", 0.97);
    object(2, "apple", 144, 564, 72, 72, "masks/apple_0.pgm", 0.95);
    object(3, "apple", 476, 564, 72, 72, "masks/apple_1.pgm", 0.94);
    object(4, "apple", 808, 564, 72, 72, "masks/apple_2.pgm", 0.96);
    object(5, "banana", 700, 120, 240, 90, "masks/banana.pgm", 0.93);
    return {{"image",
             {{"width", 1024}, {"height", 768}, {"resized_width", 1024},
              {"resized_height", 768}}},
            {"objects", objects}};
}

/*---- transcript and speech ----*/

static json transcript_json() {
    struct W {
        const char *text;
        double start, end;
    };
    const std::vector<W> words = {
        // sentence 1: the vase, whole-sentence phrase, "center" position word
        {"look", 0.20, 0.55},    {"at", 0.60, 0.80},      {"the", 0.85, 1.00},
        {"tall", 1.05, 1.45},    {"vase", 1.50, 2.05},    {"standing", 2.15, 2.75},
        {"in", 2.85, 3.00},      {"the", 3.05, 3.20},     {"center", 3.30, 3.85},
        {"of", 3.95, 4.10},      {"the", 4.15, 4.30},     {"table", 4.40, 5.00},
        // sentence 2: the apple row, alignment phrase, "left" position word
        {"three", 15.00, 15.40}, {"ripe", 15.45, 15.80},  {"apples", 15.85, 16.45},
        {"sit", 16.55, 16.85},   {"lined", 16.95, 17.35}, {"up", 17.40, 17.55},
        {"in", 17.65, 17.80},    {"a", 17.85, 17.95},     {"row", 18.00, 18.40},
        {"on", 18.50, 18.65},    {"the", 18.70, 18.85},   {"left", 18.90, 19.35},
        // sentence 3: the banana, "huge" size and "top right" position words
        {"and", 22.50, 22.70},   {"that", 22.75, 23.00},  {"huge", 23.10, 23.60},
        {"banana", 23.70, 24.35},{"up", 24.45, 24.60},    {"in", 24.65, 24.80},
        {"the", 24.85, 25.00},   {"top", 25.10, 25.45},   {"right", 25.50, 25.95},
        {"corner", 26.05, 26.60},{"looks", 26.70, 27.10}, {"amazing", 27.20, 27.90},
    };
    json jwords = json::array();
    for (const W &w : words)
        jwords.push_back({{"text", w.text}, {"start", w.start}, {"end", w.end}});
    json phrases = json::array();
    phrases.push_back({{"first", 0}, {"last", 11}, {"focus", 4}, {"focus_lemma", "vase"}});
    phrases.push_back({{"first", 12},
                       {"last", 23},
                       {"focus", 14},
                       {"focus_lemma", "apple"},
                       {"alignment", true}});
    phrases.push_back(
        {{"first", 24}, {"last", 35}, {"focus", 27}, {"focus_lemma", "banana"}});
    return {{"words", jwords},
            {"sentences", {0, 12, 24}},
            {"phrases", phrases},
            {"object_spans", {{2, 4}, {12, 14}, {25, 27}}}};
}

static json speech_json() {
    return {{"intervals", {{0.2, 12.0}, {15.0, 29.5}}}};
}

/*---- beat clip ----*/

static MotionClip build_beat(const KinematicChain &chain) {
    MotionClip clip;
    clip.chain_id = chain.id;
    clip.fps = 30.0;
    int frames = 900;  // 30 seconds

    Pose idle = Pose::zeros(chain.dof_count());
    auto set_idle = [&](const char *bone, Axis a, double deg) {
        idle[chain.dof_slot(bone, a)] = deg2rad(deg);
    };
    set_idle("shoulder_l", Axis::Z, -65);
    set_idle("shoulder_r", Axis::Z, 65);
    set_idle("shoulder_l", Axis::Y, -25);
    set_idle("shoulder_r", Axis::Y, 25);
    set_idle("elbow_l", Axis::Z, 80);
    set_idle("elbow_r", Axis::Z, -80);

    // Gentle deterministic sway on the arm joints plus a little torso motion
    // that the pipeline is expected to strip.
    std::vector<int> arm_slots;
    for (const char *bone : {"shoulder_l", "shoulder_r", "elbow_l", "elbow_r", "wrist_l",
                             "wrist_r"}) {
        int b = chain.require_bone(bone);
        for (size_t k = 0; k < chain.bones[b].dofs.size(); ++k)
            arm_slots.push_back(chain.bones[b].dof_begin + static_cast<int>(k));
    }
    int spine_sway = chain.dof_slot("spine", Axis::Y);
    int neck_sway = chain.dof_slot("neck", Axis::Z);

    for (int f = 0; f < frames; ++f) {
        double t = f / clip.fps;
        Pose q = idle;
        for (int slot : arm_slots) {
            double amp = deg2rad(3.0 + slot % 4);
            double freq = 0.4 + 0.11 * (slot % 7);
            double value = q[slot] + amp * std::sin(2.0 * kPi * freq * t + 0.9 * slot);
            const Bone &b = chain.bones[chain.dof_bone(slot)];
            const Dof &d = b.dofs[slot - b.dof_begin];
            q[slot] = clamp(value, d.min, d.max);
        }
        q[spine_sway] = deg2rad(2.5) * std::sin(2.0 * kPi * 0.2 * t);
        q[neck_sway] = deg2rad(1.5) * std::sin(2.0 * kPi * 0.3 * t + 1.0);
        clip.frames.push_back(std::move(q));
    }
    return clip;
}

/*---- configuration ----*/

static json config_json() {
    RealizeParams d = default_realize_params();
    json separations, anchors, roles;
    for (const auto &[k, v] : d.size_separations) separations[k] = v;
    for (const auto &[k, v] : d.position_anchors) anchors[k] = {v.x, v.y};
    for (const auto &[k, v] : d.effector_roles) roles[k] = v;
    return {
        {"chain", "chain_upper_body.json"},
        {"fps", 30.0},
        {"dominant", "right"},
        {"analysis",
         {{"rdp_epsilon", 2.0},
          {"ccma_window", 5},
          {"primitive_threshold", 0.85},
          {"elongation_threshold", 3.0},
          {"linear_tol_deg", 5.0},
          {"circular_tol", 0.05},
          {"scattered_threshold", 20}}},
        {"ik",
         {{"weights",
           {{"distance", 1.0},
            {"known", 0.5},
            {"derivative", {0.1, 0.05, 0.01}},
            {"direction", 0.3}}},
          {"solver",
           {{"max_iterations", 500},
            {"tolerance", 1e-6},
            {"armijo_c", 1e-4},
            {"backtrack", 0.5},
            {"initial_step", 1.0}}}}},
        {"realize",
         {{"symmetry_gate", 0.9},
          {"min_auto_seconds", 3.0},
          {"min_manual_seconds", 2.0},
          {"max_plan_seconds", 6.0},
          {"stroke_speed", 0.35},
          {"percent_range", 0.25},
          {"path_depth", 0.35},
          {"seam_frames", 5},
          {"point_curl_deg", 80.0},
          {"cup_curl_deg", 25.0},
          {"palm_normal_axis", {0.0, 0.0, 1.0}},
          {"size_separations", separations},
          {"position_anchors", anchors},
          {"effector_roles", roles}}},
        {"blend",
         {{"idle_share", 0.25},
          {"beat_share", 0.75},
          {"grace_seconds", 0.5},
          {"fade_seconds", 2.0}}},
        {"zeroed_bones", {"spine", "neck"}},
        {"idle_pose",
         {{"shoulder_l", {{"ry", -25.0}, {"rz", -65.0}}},
          {"shoulder_r", {{"ry", 25.0}, {"rz", 65.0}}},
          {"elbow_l", {{"rz", 80.0}}},
          {"elbow_r", {{"rz", -80.0}}}}},
    };
}

int main(int argc, char **argv) {
    std::string out = argc > 1 ? argv[1] : "data";
    try {
        fs::create_directories(fs::path(out) / "example" / "masks");

        KinematicChain chain = build_chain();
        save_chain(chain, (fs::path(out) / "chain_upper_body.json").string());
        write_file_atomic((fs::path(out) / "pipeline_default.json").string(),
                          config_json().dump(2) + "\n");

        fs::path ex = fs::path(out) / "example";
        save_pgm(vase_mask(160, 220), (ex / "masks/vase.pgm").string());
        save_pgm(circle_mask(72, 34.0), (ex / "masks/apple_0.pgm").string());
        save_pgm(circle_mask(72, 34.0), (ex / "masks/apple_1.pgm").string());
        save_pgm(circle_mask(72, 34.0), (ex / "masks/apple_2.pgm").string());
        save_pgm(rod_mask(240, 90, {12.0, 72.0}, {228.0, 22.0}, 17.0),
                 (ex / "masks/banana.pgm").string());
        write_file_atomic((ex / "scene.json").string(), scene_json().dump(2) + "\n");
        write_file_atomic((ex / "transcript.json").string(),
                          transcript_json().dump(2) + "\n");
        write_file_atomic((ex / "speech.json").string(), speech_json().dump(2) + "\n");
        save_clip(build_beat(chain), (ex / "beat.clip").string());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "demo assets written to " << out << "\n";
    return 0;
}
