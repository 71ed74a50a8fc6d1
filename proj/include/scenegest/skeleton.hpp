#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenegest/geom.hpp"

namespace scenegest {

enum class Axis { X, Y, Z };

struct Dof {
    Axis axis = Axis::X;
    double min = -kPi;  // radians
    double max = kPi;
};

struct Bone {
    std::string name;
    int parent = -1;        // index into bones, -1 for the root
    Vec3 offset;            // rest offset from the parent origin, meters
    std::vector<Dof> dofs;  // applied in declared order after the offset
    int dof_begin = 0;      // first slot in the flat pose vector
};

/// Bone hierarchy with a flat DOF layout: pose slot i belongs to the bone and
/// axis reachable via dof_bone/dof_axis. Loaded from a config file, never
/// hard-coded into algorithms.
class KinematicChain {
public:
    std::string id;
    std::vector<Bone> bones;
    std::vector<std::string> effectors;  // bone names valid as IK effectors
    std::string shoulder_left;
    std::string shoulder_right;

    int dof_count() const { return total_dofs_; }
    int bone_index(const std::string &name) const;        // -1 if absent
    int require_bone(const std::string &name) const;      // throws if absent
    int dof_bone(int slot) const { return slot_bone_[slot]; }
    Axis dof_axis(int slot) const;
    int dof_slot(const std::string &bone, Axis axis) const;  // -1 if absent

    // Call after filling bones; assigns dof_begin slots and checks parents
    // precede children.
    void finalize();

private:
    int total_dofs_ = 0;
    std::vector<int> slot_bone_;
};

/// Flat vector of joint angles in radians, one entry per chain DOF.
struct Pose {
    std::vector<double> q;

    static Pose zeros(int n) { return Pose{std::vector<double>(n, 0.0)}; }
    int size() const { return static_cast<int>(q.size()); }
    double &operator[](int i) { return q[i]; }
    double operator[](int i) const { return q[i]; }
};

/// Fixed-rate pose sequence.
struct MotionClip {
    std::string chain_id;
    double fps = 30.0;
    std::vector<Pose> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    double duration() const { return fps > 0 ? frames.size() / fps : 0.0; }
};

/// World transform per bone. Root bones sit at their rest offset from the
/// world origin; each child composes its parent's transform with its own
/// offset and DOF rotations in declared axis order.
std::vector<Transform> forward_kinematics(const KinematicChain &chain, const Pose &pose);

/// Convenience: world position of one bone's origin.
Vec3 bone_position(const KinematicChain &chain, const Pose &pose, int bone);

/// Zeroes every DOF whose bone is not in the retained set. Returns the zeroed
/// pose plus a delta pose holding the removed values; adding the delta back
/// restores the original exactly.
struct ZeroResult {
    Pose pose;
    Pose removed;
};
ZeroResult zero_lower_body(const KinematicChain &chain, const Pose &pose,
                           const std::vector<std::string> &retained_bones);

/// Chain config file: JSON with bones (offsets in meters, limits in degrees,
/// converted to radians on load), effector and shoulder declarations.
KinematicChain load_chain(const std::string &path);
void save_chain(const KinematicChain &chain, const std::string &path);

/// Clip files are line-oriented text: a fixed header (format tag, chain id,
/// fps, dof count, frame count) followed by one whitespace-separated DOF
/// vector per line.
MotionClip load_clip(const std::string &path);
void save_clip(const MotionClip &clip, const std::string &path);

Axis parse_axis(const std::string &s);
std::string axis_name(Axis a);

}  // namespace scenegest
