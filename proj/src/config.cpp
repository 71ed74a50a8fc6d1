#include "scenegest/config.hpp"

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>

#include "json.hpp"
#include "scenegest/io.hpp"

namespace scenegest {

using nlohmann::json;

PipelineConfig default_config() {
    PipelineConfig c;
    c.realize = default_realize_params();
    return c;
}

static void check_keys(const json &j, std::initializer_list<const char *> allowed,
                       const std::string &where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char *a : allowed)
            if (it.key() == a) {
                known = true;
                break;
            }
        if (!known)
            throw std::runtime_error("config: unknown key \"" + it.key() + "\" in " + where);
    }
}

static double get_num(const json &j, const char *key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw std::runtime_error(std::string("config: ") + key + " must be a number");
    return j.at(key).get<double>();
}

static int get_int(const json &j, const char *key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw std::runtime_error(std::string("config: ") + key + " must be an integer");
    return j.at(key).get<int>();
}

static Vec3 get_vec3(const json &j, const char *key, const Vec3 &fallback) {
    if (!j.contains(key)) return fallback;
    const json &a = j.at(key);
    if (!a.is_array() || a.size() != 3)
        throw std::runtime_error(std::string("config: ") + key + " must be [x, y, z]");
    return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}

static std::array<double, 4> get_shares(const json &j, const char *key,
                                        const std::array<double, 4> &fallback) {
    if (!j.contains(key)) return fallback;
    const json &a = j.at(key);
    if (!a.is_array() || a.size() != 4)
        throw std::runtime_error(std::string("config: ") + key +
                                 " must list four phase shares");
    std::array<double, 4> out{};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        out[i] = a.at(i).get<double>();
        if (out[i] < 0.0)
            throw std::runtime_error(std::string("config: ") + key + " has a negative share");
        sum += out[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::runtime_error(std::string("config: ") + key + " must sum to 1");
    return out;
}

static std::string resolve(const std::filesystem::path &base, const std::string &rel) {
    if (rel.empty()) return rel;
    std::filesystem::path p(rel);
    if (p.is_absolute()) return rel;
    return (base / p).string();
}

PipelineConfig load_config(const std::string &path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error &e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(path + ": config root must be an object");
    std::filesystem::path base = std::filesystem::path(path).parent_path();

    check_keys(j,
               {"chain", "fps", "dominant", "analysis", "ik", "realize", "blend",
                "zeroed_bones", "idle_pose", "embedding", "embedding_dim"},
               "the top level");

    PipelineConfig c = default_config();
    if (j.contains("chain")) c.chain_path = resolve(base, j.at("chain").get<std::string>());
    c.fps = get_num(j, "fps", c.fps);
    if (c.fps <= 0.0) throw std::runtime_error("config: fps must be positive");
    c.realize.fps = c.fps;

    if (j.contains("dominant")) {
        std::string d = j.at("dominant").get<std::string>();
        if (d == "left") c.realize.dominant = Hand::Left;
        else if (d == "right") c.realize.dominant = Hand::Right;
        else throw std::runtime_error("config: dominant must be \"left\" or \"right\"");
    }

    if (j.contains("analysis")) {
        const json &a = j.at("analysis");
        check_keys(a,
                   {"rdp_epsilon", "ccma_window", "primitive_threshold",
                    "elongation_threshold", "linear_tol_deg", "circular_tol",
                    "scattered_threshold"},
                   "analysis");
        AnalysisParams &p = c.analysis;
        p.rdp_epsilon = get_num(a, "rdp_epsilon", p.rdp_epsilon);
        p.ccma_window = get_int(a, "ccma_window", p.ccma_window);
        p.primitive_threshold = get_num(a, "primitive_threshold", p.primitive_threshold);
        p.elongation_threshold = get_num(a, "elongation_threshold", p.elongation_threshold);
        p.linear_tol_deg = get_num(a, "linear_tol_deg", p.linear_tol_deg);
        p.circular_tol = get_num(a, "circular_tol", p.circular_tol);
        p.scattered_threshold = get_int(a, "scattered_threshold", p.scattered_threshold);
        if (p.rdp_epsilon < 0.0) throw std::runtime_error("config: rdp_epsilon must be >= 0");
        if (p.ccma_window < 1 || p.ccma_window % 2 == 0)
            throw std::runtime_error("config: ccma_window must be odd and positive");
    }

    if (j.contains("ik")) {
        const json &ik = j.at("ik");
        check_keys(ik, {"weights", "solver"}, "ik");
        if (ik.contains("weights")) {
            const json &w = ik.at("weights");
            check_keys(w, {"distance", "known", "derivative", "direction"}, "ik.weights");
            ObjectiveWeights &ow = c.realize.ik_weights;
            ow.distance = get_num(w, "distance", ow.distance);
            ow.known = get_num(w, "known", ow.known);
            ow.direction = get_num(w, "direction", ow.direction);
            if (w.contains("derivative")) {
                const json &d = w.at("derivative");
                if (!d.is_array() || d.size() != 3)
                    throw std::runtime_error(
                        "config: ik.weights.derivative must list three orders");
                for (int i = 0; i < 3; ++i) ow.derivative[i] = d.at(i).get<double>();
            }
        }
        if (ik.contains("solver")) {
            const json &s = ik.at("solver");
            check_keys(s, {"max_iterations", "tolerance", "armijo_c", "backtrack",
                           "initial_step"},
                       "ik.solver");
            SolveOptions &so = c.realize.ik_options;
            so.max_iterations = get_int(s, "max_iterations", so.max_iterations);
            so.tolerance = get_num(s, "tolerance", so.tolerance);
            so.armijo_c = get_num(s, "armijo_c", so.armijo_c);
            so.backtrack = get_num(s, "backtrack", so.backtrack);
            so.initial_step = get_num(s, "initial_step", so.initial_step);
            if (so.max_iterations < 1)
                throw std::runtime_error("config: ik.solver.max_iterations must be >= 1");
            if (so.backtrack <= 0.0 || so.backtrack >= 1.0)
                throw std::runtime_error("config: ik.solver.backtrack must be in (0, 1)");
        }
    }

    if (j.contains("realize")) {
        const json &r = j.at("realize");
        check_keys(r,
                   {"symmetry_gate", "min_auto_seconds", "min_manual_seconds",
                    "max_plan_seconds", "stroke_speed",
                    "trajectory_shares", "pointing_shares", "percent_range", "path_depth",
                    "seam_frames", "point_curl_deg", "cup_curl_deg", "palm_normal_axis",
                    "size_separations", "position_anchors", "effector_roles"},
                   "realize");
        RealizeParams &p = c.realize;
        p.symmetry_gate = get_num(r, "symmetry_gate", p.symmetry_gate);
        p.min_auto_seconds = get_num(r, "min_auto_seconds", p.min_auto_seconds);
        p.min_manual_seconds = get_num(r, "min_manual_seconds", p.min_manual_seconds);
        p.max_plan_seconds = get_num(r, "max_plan_seconds", p.max_plan_seconds);
        p.stroke_speed = get_num(r, "stroke_speed", p.stroke_speed);
        p.trajectory_shares = get_shares(r, "trajectory_shares", p.trajectory_shares);
        p.pointing_shares = get_shares(r, "pointing_shares", p.pointing_shares);
        p.percent_range = get_num(r, "percent_range", p.percent_range);
        p.path_depth = get_num(r, "path_depth", p.path_depth);
        p.seam_frames = get_int(r, "seam_frames", p.seam_frames);
        p.point_curl_deg = get_num(r, "point_curl_deg", p.point_curl_deg);
        p.cup_curl_deg = get_num(r, "cup_curl_deg", p.cup_curl_deg);
        p.palm_normal_axis = get_vec3(r, "palm_normal_axis", p.palm_normal_axis);
        if (p.percent_range < 0.0 || p.percent_range >= 1.0)
            throw std::runtime_error("config: realize.percent_range must be in [0, 1)");
        if (p.seam_frames < 0)
            throw std::runtime_error("config: realize.seam_frames must be >= 0");
        if (p.min_auto_seconds <= 0.0 || p.min_manual_seconds <= 0.0)
            throw std::runtime_error("config: minimum durations must be positive");
        if (p.max_plan_seconds < p.min_auto_seconds || p.max_plan_seconds < p.min_manual_seconds)
            throw std::runtime_error("config: max_plan_seconds must cover both minimums");
        if (p.stroke_speed <= 0.0)
            throw std::runtime_error("config: stroke_speed must be positive");
        if (r.contains("size_separations")) {
            p.size_separations.clear();
            for (auto it = r.at("size_separations").begin();
                 it != r.at("size_separations").end(); ++it) {
                double v = it.value().get<double>();
                if (v <= 0.0)
                    throw std::runtime_error("config: size separations must be positive");
                p.size_separations[it.key()] = v;
            }
        }
        if (r.contains("position_anchors")) {
            p.position_anchors.clear();
            for (auto it = r.at("position_anchors").begin();
                 it != r.at("position_anchors").end(); ++it) {
                const json &a = it.value();
                if (!a.is_array() || a.size() != 2)
                    throw std::runtime_error("config: position anchors must be [x, y]");
                p.position_anchors[it.key()] = {a.at(0).get<double>(), a.at(1).get<double>()};
            }
        }
        if (r.contains("effector_roles")) {
            p.effector_roles.clear();
            for (auto it = r.at("effector_roles").begin(); it != r.at("effector_roles").end();
                 ++it)
                p.effector_roles[it.key()] = it.value().get<std::string>();
        }
    }

    if (j.contains("blend")) {
        const json &b = j.at("blend");
        check_keys(b, {"idle_share", "beat_share", "grace_seconds", "fade_seconds"}, "blend");
        RealizeParams &p = c.realize;
        p.idle_share = get_num(b, "idle_share", p.idle_share);
        p.beat_share = get_num(b, "beat_share", p.beat_share);
        p.grace_seconds = get_num(b, "grace_seconds", p.grace_seconds);
        p.fade_seconds = get_num(b, "fade_seconds", p.fade_seconds);
        if (p.beat_share < 0.0 || p.beat_share > 1.0)
            throw std::runtime_error("config: blend.beat_share must be in [0, 1]");
        if (std::abs(p.idle_share + p.beat_share - 1.0) > 1e-9)
            throw std::runtime_error("config: blend shares must sum to 1");
        if (p.grace_seconds < 0.0 || p.fade_seconds < 0.0)
            throw std::runtime_error("config: blend times must be >= 0");
    }

    if (j.contains("zeroed_bones")) {
        c.zeroed_bones.clear();
        for (const json &b : j.at("zeroed_bones")) c.zeroed_bones.push_back(b.get<std::string>());
    }

    if (j.contains("idle_pose")) {
        c.idle_pose_deg.clear();
        for (auto bone = j.at("idle_pose").begin(); bone != j.at("idle_pose").end(); ++bone) {
            if (!bone.value().is_object())
                throw std::runtime_error("config: idle_pose entries must map axes to degrees");
            for (auto ax = bone.value().begin(); ax != bone.value().end(); ++ax) {
                if (ax.key() != "rx" && ax.key() != "ry" && ax.key() != "rz")
                    throw std::runtime_error("config: idle_pose axis must be rx, ry or rz");
                c.idle_pose_deg[bone.key()][ax.key()] = ax.value().get<double>();
            }
        }
    }

    if (j.contains("embedding"))
        c.embedding_path = resolve(base, j.at("embedding").get<std::string>());
    c.embedding_dim = get_int(j, "embedding_dim", c.embedding_dim);
    if (c.embedding_dim < 1) throw std::runtime_error("config: embedding_dim must be >= 1");
    return c;
}

Pose build_idle_pose(const PipelineConfig &config, const KinematicChain &chain) {
    Pose pose = Pose::zeros(chain.dof_count());
    for (const auto &[bone_name, axes] : config.idle_pose_deg) {
        int bone = chain.bone_index(bone_name);
        if (bone < 0)
            throw std::runtime_error("config: idle_pose names unknown bone \"" + bone_name +
                                     "\"");
        for (const auto &[axis_name_str, degrees] : axes) {
            Axis axis = axis_name_str == "rx" ? Axis::X
                        : axis_name_str == "ry" ? Axis::Y
                                                : Axis::Z;
            int slot = chain.dof_slot(bone_name, axis);
            if (slot < 0)
                throw std::runtime_error("config: idle_pose bone \"" + bone_name +
                                         "\" has no " + axis_name_str + " joint");
            const Bone &b = chain.bones[bone];
            const Dof &d = b.dofs[slot - b.dof_begin];
            pose[slot] = clamp(deg2rad(degrees), d.min, d.max);
        }
    }
    return pose;
}

}  // namespace scenegest
