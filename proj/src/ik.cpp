#include "scenegest/ik.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegest {

double ObjectiveBreakdown::total(const ObjectiveWeights &w) const {
    double t = w.distance * distance + w.known * known + w.direction * direction;
    for (int n = 0; n < 3; ++n) t += w.derivative[n] * derivative[n];
    return t;
}

static Mat3 axis_rot(Axis a, double angle) {
    switch (a) {
        case Axis::X: return Mat3::rot_x(angle);
        case Axis::Y: return Mat3::rot_y(angle);
        default: return Mat3::rot_z(angle);
    }
}

static Vec3 axis_vec(Axis a) {
    switch (a) {
        case Axis::X: return {1.0, 0.0, 0.0};
        case Axis::Y: return {0.0, 1.0, 0.0};
        default: return {0.0, 0.0, 1.0};
    }
}

// Forward pass with the extras the Jacobians need: besides the usual world
// transform per bone, the world direction of every DOF's rotation axis.
// Rotations of a bone happen about that bone's own origin, so the axis origin
// of slot s is world[dof_bone(s)].pos.
namespace {
struct FrameKin {
    std::vector<Transform> world;
    std::vector<Vec3> axis;
};
}  // namespace

static FrameKin frame_kin(const KinematicChain &chain, const Pose &pose) {
    FrameKin fk;
    fk.world.resize(chain.bones.size());
    fk.axis.resize(chain.dof_count());
    for (size_t i = 0; i < chain.bones.size(); ++i) {
        const Bone &b = chain.bones[i];
        Transform parent = b.parent >= 0 ? fk.world[b.parent] : Transform{};
        Vec3 origin = parent * b.offset;
        Mat3 rot = parent.rot;
        for (size_t k = 0; k < b.dofs.size(); ++k) {
            int slot = b.dof_begin + static_cast<int>(k);
            fk.axis[slot] = rot * axis_vec(b.dofs[k].axis);
            rot = rot * axis_rot(b.dofs[k].axis, pose[slot]);
        }
        fk.world[i] = Transform{rot, origin};
    }
    return fk;
}

static void validate(const IKProblem &p, const std::vector<Pose> &traj) {
    if (!p.chain) throw std::invalid_argument("ik: missing chain");
    if (p.frame_count < 1) throw std::invalid_argument("ik: frame count must be positive");
    int nd = p.chain->dof_count();
    int nb = static_cast<int>(p.chain->bones.size());
    if (static_cast<int>(traj.size()) != p.frame_count)
        throw std::invalid_argument("ik: trajectory frame count does not match the problem");
    for (const Pose &q : traj)
        if (q.size() != nd) throw std::invalid_argument("ik: pose size does not match chain");
    auto check_frame = [&](int f) {
        if (f < 0 || f >= p.frame_count) throw std::invalid_argument("ik: frame out of range");
    };
    auto check_bone = [&](int b) {
        if (b < 0 || b >= nb) throw std::invalid_argument("ik: bone out of range");
    };
    for (const DistanceTarget &t : p.targets) {
        check_frame(t.frame);
        check_bone(t.bone);
    }
    for (const KnownPose &k : p.known) {
        check_frame(k.frame);
        if (static_cast<int>(k.values.size()) != nd)
            throw std::invalid_argument("ik: known pose size does not match chain");
    }
    for (const DirectionTarget &d : p.directions) {
        check_frame(d.frame);
        check_bone(d.bone);
        if (norm(d.local_axis) < 1e-12 || norm(d.dir) < 1e-12)
            throw std::invalid_argument("ik: zero-length direction vector");
    }
    const ObjectiveWeights &w = p.weights;
    double sum = w.distance + w.known + w.direction;
    for (int n = 0; n < 3; ++n) sum += w.derivative[n];
    if (w.distance < 0 || w.known < 0 || w.direction < 0 || w.derivative[0] < 0 ||
        w.derivative[1] < 0 || w.derivative[2] < 0 || sum <= 0)
        throw std::invalid_argument("ik: weights must be non-negative with at least one positive");
    if (!p.free_dofs.empty() && static_cast<int>(p.free_dofs.size()) != nd)
        throw std::invalid_argument("ik: free-DOF mask size does not match chain");
}

// Coefficients of the n-th forward difference, applied to theta[t0+n-k].
static const double kDiffCoef[3][4] = {
    {1.0, -1.0, 0.0, 0.0},
    {1.0, -2.0, 1.0, 0.0},
    {1.0, -3.0, 3.0, -1.0},
};

// Computes FK only for frames that carry a target or direction constraint.
static std::vector<FrameKin> needed_kinematics(const IKProblem &p,
                                               const std::vector<Pose> &traj,
                                               std::vector<char> &has) {
    has.assign(p.frame_count, 0);
    for (const DistanceTarget &t : p.targets) has[t.frame] = 1;
    for (const DirectionTarget &d : p.directions) has[d.frame] = 1;
    std::vector<FrameKin> fk(p.frame_count);
    for (int f = 0; f < p.frame_count; ++f)
        if (has[f]) fk[f] = frame_kin(*p.chain, traj[f]);
    return fk;
}

ObjectiveBreakdown eval_objectives(const IKProblem &p, const std::vector<Pose> &traj) {
    validate(p, traj);
    const int T = p.frame_count;
    const int nd = p.chain->dof_count();
    std::vector<char> has;
    std::vector<FrameKin> fk = needed_kinematics(p, traj, has);

    ObjectiveBreakdown bd;
    for (const DistanceTarget &t : p.targets)
        bd.distance += dist(t.point, fk[t.frame].world[t.bone].pos);

    if (!p.known.empty()) {
        double acc = 0.0;
        for (const KnownPose &k : p.known)
            for (int d = 0; d < nd; ++d) {
                double e = traj[k.frame][d] - k.values[d];
                acc += e * e;
            }
        bd.known = acc / static_cast<double>(p.known.size());
    }

    for (int n = 1; n <= 3; ++n) {
        if (T <= n) continue;
        double acc = 0.0;
        for (int t0 = 0; t0 + n < T; ++t0)
            for (int d = 0; d < nd; ++d) {
                double r = 0.0;
                for (int k = 0; k <= n; ++k) r += kDiffCoef[n - 1][k] * traj[t0 + n - k][d];
                acc += r * r;
            }
        bd.derivative[n - 1] = acc;
    }

    for (const DirectionTarget &d : p.directions) {
        Vec3 dir = fk[d.frame].world[d.bone].rot * normalized(d.local_axis);
        double c = clamp(dot(dir, normalized(d.dir)), -1.0, 1.0);
        double a = std::acos(c);
        bd.direction += a * a;
    }
    return bd;
}

std::vector<std::vector<double>> objective_gradient(const IKProblem &p,
                                                    const std::vector<Pose> &traj) {
    validate(p, traj);
    const int T = p.frame_count;
    const int nd = p.chain->dof_count();
    const ObjectiveWeights &w = p.weights;
    const KinematicChain &chain = *p.chain;
    std::vector<char> has;
    std::vector<FrameKin> fk = needed_kinematics(p, traj, has);
    std::vector<std::vector<double>> g(T, std::vector<double>(nd, 0.0));

    // d(bone origin)/d(slot) = axis x (origin - slot origin); a bone's own
    // rotations never move its own origin, so the walk starts at the parent.
    if (w.distance != 0.0) {
        for (const DistanceTarget &t : p.targets) {
            const FrameKin &k = fk[t.frame];
            Vec3 pe = k.world[t.bone].pos;
            Vec3 r = t.point - pe;
            double nr = norm(r);
            if (nr <= 1e-12) continue;
            Vec3 rn = r * (1.0 / nr);
            for (int c = chain.bones[t.bone].parent; c >= 0; c = chain.bones[c].parent) {
                const Bone &cb = chain.bones[c];
                Vec3 o = k.world[c].pos;
                for (size_t s = 0; s < cb.dofs.size(); ++s) {
                    int slot = cb.dof_begin + static_cast<int>(s);
                    Vec3 dp = cross(k.axis[slot], pe - o);
                    g[t.frame][slot] += w.distance * -dot(rn, dp);
                }
            }
        }
    }

    if (!p.known.empty() && w.known != 0.0) {
        double scale = w.known * 2.0 / static_cast<double>(p.known.size());
        for (const KnownPose &k : p.known)
            for (int d = 0; d < nd; ++d)
                g[k.frame][d] += scale * (traj[k.frame][d] - k.values[d]);
    }

    for (int n = 1; n <= 3; ++n) {
        if (T <= n || w.derivative[n - 1] == 0.0) continue;
        double wn = w.derivative[n - 1];
        for (int t0 = 0; t0 + n < T; ++t0)
            for (int d = 0; d < nd; ++d) {
                double r = 0.0;
                for (int k = 0; k <= n; ++k) r += kDiffCoef[n - 1][k] * traj[t0 + n - k][d];
                for (int k = 0; k <= n; ++k)
                    g[t0 + n - k][d] += wn * 2.0 * r * kDiffCoef[n - 1][k];
            }
    }

    // A bone-fixed axis rotates rigidly with the bone, so its own DOFs count
    // here, unlike the position case. At |dot| = 1 the subgradient is zero.
    if (w.direction != 0.0) {
        for (const DirectionTarget &d : p.directions) {
            const FrameKin &k = fk[d.frame];
            Vec3 dir = k.world[d.bone].rot * normalized(d.local_axis);
            Vec3 u = normalized(d.dir);
            double c = clamp(dot(dir, u), -1.0, 1.0);
            double s2 = 1.0 - c * c;
            if (s2 <= 1e-12) continue;
            double dldc = -2.0 * std::acos(c) / std::sqrt(s2);
            for (int cb = d.bone; cb >= 0; cb = chain.bones[cb].parent) {
                const Bone &b = chain.bones[cb];
                for (size_t s = 0; s < b.dofs.size(); ++s) {
                    int slot = b.dof_begin + static_cast<int>(s);
                    double dc = dot(u, cross(k.axis[slot], dir));
                    g[d.frame][slot] += w.direction * dldc * dc;
                }
            }
        }
    }
    return g;
}

SolveResult solve_ik(const IKProblem &p, const SolveOptions &opt) {
    std::vector<Pose> traj = p.init;
    if (traj.empty() && p.chain)
        traj.assign(p.frame_count, Pose::zeros(p.chain->dof_count()));
    validate(p, traj);
    const int T = p.frame_count;
    const int nd = p.chain->dof_count();
    const KinematicChain &chain = *p.chain;

    auto dof_limits = [&](int slot, double &lo, double &hi) {
        const Bone &b = chain.bones[chain.dof_bone(slot)];
        const Dof &d = b.dofs[slot - b.dof_begin];
        lo = d.min;
        hi = d.max;
    };
    auto project = [&](std::vector<Pose> &t) {
        for (int f = 0; f < T; ++f)
            for (int d = 0; d < nd; ++d) {
                double lo, hi;
                dof_limits(d, lo, hi);
                t[f][d] = clamp(t[f][d], lo, hi);
            }
    };
    auto is_free = [&](int d) { return p.free_dofs.empty() || p.free_dofs[d]; };

    project(traj);
    double L = eval_objectives(p, traj).total(p.weights);
    if (!std::isfinite(L)) throw std::runtime_error("ik: non-finite cost at the initial guess");

    SolveResult res;
    res.report.iterations = 0;
    res.report.converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        std::vector<std::vector<double>> g = objective_gradient(p, traj);
        double gn2 = 0.0;
        for (int f = 0; f < T; ++f)
            for (int d = 0; d < nd; ++d) {
                if (!is_free(d)) g[f][d] = 0.0;
                gn2 += g[f][d] * g[f][d];
            }
        if (std::sqrt(gn2) < opt.tolerance) {
            res.report.converged = true;
            break;
        }

        double step = opt.initial_step;
        bool accepted = false;
        std::vector<Pose> cand;
        double Lc = L;
        while (step > 1e-14) {
            cand = traj;
            for (int f = 0; f < T; ++f)
                for (int d = 0; d < nd; ++d)
                    if (is_free(d)) cand[f][d] -= step * g[f][d];
            project(cand);
            Lc = eval_objectives(p, cand).total(p.weights);
            if (!std::isfinite(Lc))
                throw std::runtime_error("ik: cost turned non-finite during line search");
            double dd = 0.0;  // <g, cand - traj>, never positive after projection
            for (int f = 0; f < T; ++f)
                for (int d = 0; d < nd; ++d) dd += g[f][d] * (cand[f][d] - traj[f][d]);
            if (Lc <= L + opt.armijo_c * dd) {
                accepted = true;
                break;
            }
            step *= opt.backtrack;
        }
        if (!accepted) {
            // No measurable descent left at the smallest step.
            res.report.converged = true;
            break;
        }
        ++res.report.iterations;
        double drop = L - Lc;
        traj.swap(cand);
        L = Lc;
        if (drop < opt.tolerance) {
            res.report.converged = true;
            break;
        }
    }
    res.report.cost = eval_objectives(p, traj);
    res.report.total = res.report.cost.total(p.weights);
    res.trajectory = std::move(traj);
    return res;
}

}  // namespace scenegest
