#include "scenegest/skeleton.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "scenegest/io.hpp"

namespace scenegest {

using nlohmann::json;

Axis parse_axis(const std::string &s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw std::runtime_error("bad axis: " + s);
}

std::string axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "z";
    }
}

int KinematicChain::bone_index(const std::string &name) const {
    for (size_t i = 0; i < bones.size(); ++i)
        if (bones[i].name == name) return static_cast<int>(i);
    return -1;
}

int KinematicChain::require_bone(const std::string &name) const {
    int i = bone_index(name);
    if (i < 0) throw std::runtime_error("chain " + id + " has no bone " + name);
    return i;
}

Axis KinematicChain::dof_axis(int slot) const {
    const Bone &b = bones[dof_bone(slot)];
    return b.dofs[slot - b.dof_begin].axis;
}

int KinematicChain::dof_slot(const std::string &bone, Axis axis) const {
    int bi = bone_index(bone);
    if (bi < 0) return -1;
    const Bone &b = bones[bi];
    for (size_t k = 0; k < b.dofs.size(); ++k)
        if (b.dofs[k].axis == axis) return b.dof_begin + static_cast<int>(k);
    return -1;
}

void KinematicChain::finalize() {
    total_dofs_ = 0;
    slot_bone_.clear();
    std::set<std::string> names;
    for (size_t i = 0; i < bones.size(); ++i) {
        Bone &b = bones[i];
        if (!names.insert(b.name).second)
            throw std::runtime_error("duplicate bone name: " + b.name);
        if (b.parent >= static_cast<int>(i))
            throw std::runtime_error("bone " + b.name + " declared before its parent");
        if (b.parent < -1 || b.parent >= static_cast<int>(bones.size()))
            throw std::runtime_error("bone " + b.name + " has invalid parent index");
        b.dof_begin = total_dofs_;
        for (const Dof &d : b.dofs) {
            if (d.min > d.max)
                throw std::runtime_error("bone " + b.name + " has inverted limits");
            slot_bone_.push_back(static_cast<int>(i));
            ++total_dofs_;
        }
    }
    for (const std::string &e : effectors) require_bone(e);
    if (!shoulder_left.empty()) require_bone(shoulder_left);
    if (!shoulder_right.empty()) require_bone(shoulder_right);
}

static Mat3 axis_rot(Axis a, double angle) {
    switch (a) {
        case Axis::X: return Mat3::rot_x(angle);
        case Axis::Y: return Mat3::rot_y(angle);
        default: return Mat3::rot_z(angle);
    }
}

std::vector<Transform> forward_kinematics(const KinematicChain &chain, const Pose &pose) {
    if (pose.size() != chain.dof_count())
        throw std::runtime_error("pose size does not match chain DOF count");
    std::vector<Transform> world(chain.bones.size());
    for (size_t i = 0; i < chain.bones.size(); ++i) {
        const Bone &b = chain.bones[i];
        Transform local{Mat3::identity(), b.offset};
        for (size_t k = 0; k < b.dofs.size(); ++k) {
            Mat3 r = axis_rot(b.dofs[k].axis, pose[b.dof_begin + static_cast<int>(k)]);
            local.rot = local.rot * r;
        }
        world[i] = b.parent < 0 ? local : world[b.parent] * local;
    }
    return world;
}

Vec3 bone_position(const KinematicChain &chain, const Pose &pose, int bone) {
    return forward_kinematics(chain, pose)[bone].pos;
}

ZeroResult zero_lower_body(const KinematicChain &chain, const Pose &pose,
                           const std::vector<std::string> &retained_bones) {
    if (pose.size() != chain.dof_count())
        throw std::runtime_error("pose size does not match chain DOF count");
    std::set<int> keep;
    for (const std::string &name : retained_bones) keep.insert(chain.require_bone(name));
    ZeroResult r{pose, Pose::zeros(pose.size())};
    for (int s = 0; s < pose.size(); ++s) {
        if (!keep.count(chain.dof_bone(s))) {
            r.removed[s] = pose[s];
            r.pose[s] = 0.0;
        }
    }
    return r;
}

KinematicChain load_chain(const std::string &path) {
    json j = json::parse(read_file(path));
    KinematicChain c;
    c.id = j.at("id").get<std::string>();
    for (const json &jb : j.at("bones")) {
        Bone b;
        b.name = jb.at("name").get<std::string>();
        if (jb.at("parent").is_null()) {
            b.parent = -1;
        } else {
            std::string pname = jb.at("parent").get<std::string>();
            b.parent = c.bone_index(pname);
            if (b.parent < 0)
                throw std::runtime_error("bone " + b.name + ": parent " + pname +
                                         " not declared earlier");
        }
        auto off = jb.at("offset");
        b.offset = {off.at(0).get<double>(), off.at(1).get<double>(), off.at(2).get<double>()};
        if (jb.contains("dofs")) {
            for (const json &jd : jb.at("dofs")) {
                Dof d;
                d.axis = parse_axis(jd.at("axis").get<std::string>());
                d.min = deg2rad(jd.at("min").get<double>());
                d.max = deg2rad(jd.at("max").get<double>());
                b.dofs.push_back(d);
            }
        }
        c.bones.push_back(std::move(b));
    }
    if (j.contains("effectors"))
        c.effectors = j.at("effectors").get<std::vector<std::string>>();
    if (j.contains("shoulders")) {
        c.shoulder_left = j.at("shoulders").at("left").get<std::string>();
        c.shoulder_right = j.at("shoulders").at("right").get<std::string>();
    }
    c.finalize();
    return c;
}

void save_chain(const KinematicChain &chain, const std::string &path) {
    json j;
    j["id"] = chain.id;
    j["effectors"] = chain.effectors;
    if (!chain.shoulder_left.empty())
        j["shoulders"] = {{"left", chain.shoulder_left}, {"right", chain.shoulder_right}};
    json jbones = json::array();
    for (const Bone &b : chain.bones) {
        json jb;
        jb["name"] = b.name;
        if (b.parent < 0)
            jb["parent"] = nullptr;
        else
            jb["parent"] = chain.bones[b.parent].name;
        jb["offset"] = {b.offset.x, b.offset.y, b.offset.z};
        json jdofs = json::array();
        for (const Dof &d : b.dofs)
            jdofs.push_back({{"axis", axis_name(d.axis)},
                             {"min", rad2deg(d.min)},
                             {"max", rad2deg(d.max)}});
        jb["dofs"] = jdofs;
        jbones.push_back(jb);
    }
    j["bones"] = jbones;
    write_file_atomic(path, j.dump(2) + "\n");
}

MotionClip load_clip(const std::string &path) {
    std::istringstream in(read_file(path));
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "CLIP" || version != 1)
        throw std::runtime_error(path + ": not a CLIP 1 file");
    MotionClip clip;
    std::string key;
    int dofs = -1, frames = -1;
    for (int i = 0; i < 4; ++i) {
        in >> key;
        if (key == "chain") in >> clip.chain_id;
        else if (key == "fps") in >> clip.fps;
        else if (key == "dofs") in >> dofs;
        else if (key == "frames") in >> frames;
        else throw std::runtime_error(path + ": unexpected header key " + key);
    }
    if (!in || clip.fps <= 0 || dofs < 0 || frames < 0)
        throw std::runtime_error(path + ": malformed clip header");
    clip.frames.reserve(frames);
    for (int f = 0; f < frames; ++f) {
        Pose p = Pose::zeros(dofs);
        for (int d = 0; d < dofs; ++d) in >> p[d];
        if (!in) throw std::runtime_error(path + ": truncated frame data");
        clip.frames.push_back(std::move(p));
    }
    return clip;
}

void save_clip(const MotionClip &clip, const std::string &path) {
    std::string out;
    int dofs = clip.frames.empty() ? 0 : clip.frames[0].size();
    out += "CLIP 1\n";
    out += "chain " + clip.chain_id + "\n";
    out += "fps " + format_double(clip.fps) + "\n";
    out += "dofs " + std::to_string(dofs) + "\n";
    out += "frames " + std::to_string(clip.frames.size()) + "\n";
    for (const Pose &p : clip.frames) {
        if (p.size() != dofs) throw std::runtime_error("ragged clip frames");
        for (int d = 0; d < dofs; ++d) {
            if (d) out += ' ';
            out += format_double(p[d]);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

}  // namespace scenegest
