#pragma once

#include <vector>

#include "scenegest/skeleton.hpp"

namespace scenegest {

/// Term weights of the combined objective. All must be non-negative and at
/// least one positive.
struct ObjectiveWeights {
    double distance = 1.0;
    double known = 0.5;
    double derivative[3] = {0.1, 0.05, 0.01};  // orders 1, 2, 3
    double direction = 0.3;
};

/// Pulls one bone origin toward a world point at one frame.
struct DistanceTarget {
    int frame = 0;
    int bone = 0;
    Vec3 point;
};

/// Anchors a whole frame to a reference DOF vector.
struct KnownPose {
    int frame = 0;
    std::vector<double> values;
};

/// Aligns the world direction of a bone-fixed axis with a target direction.
/// `local_axis` is expressed in the bone's frame (for a segment pointing at
/// its child, use the child's rest offset).
struct DirectionTarget {
    int frame = 0;
    int bone = 0;
    Vec3 local_axis{1.0, 0.0, 0.0};
    Vec3 dir{0.0, 0.0, 1.0};
};

/// A trajectory optimization over `frame_count` poses of one chain. DOFs not
/// marked free keep their initial values; an empty mask frees everything.
struct IKProblem {
    const KinematicChain *chain = nullptr;
    int frame_count = 1;
    std::vector<DistanceTarget> targets;
    std::vector<KnownPose> known;
    std::vector<DirectionTarget> directions;
    ObjectiveWeights weights;
    std::vector<char> free_dofs;
    std::vector<Pose> init;  // initial guess, one pose per frame
};

struct ObjectiveBreakdown {
    double distance = 0.0;      // sum of Euclidean gaps, meters
    double known = 0.0;         // mean squared DOF deviation over anchors
    double derivative[3] = {0.0, 0.0, 0.0};  // summed squared forward differences
    double direction = 0.0;     // summed squared angles, radians^2

    double total(const ObjectiveWeights &w) const;
};

/// Cost of a candidate trajectory, term by term. Throws on shape mismatches
/// and zero-length direction vectors.
ObjectiveBreakdown eval_objectives(const IKProblem &problem,
                                   const std::vector<Pose> &trajectory);

/// Analytic gradient of the weighted total, laid out [frame][dof]. Verified
/// against central differences in the tests.
std::vector<std::vector<double>> objective_gradient(const IKProblem &problem,
                                                    const std::vector<Pose> &trajectory);

struct SolveOptions {
    int max_iterations = 500;
    double tolerance = 1e-6;   // on gradient norm and per-step cost decrease
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
};

struct SolveReport {
    int iterations = 0;
    bool converged = false;  // stopped on tolerance, not the iteration cap
    ObjectiveBreakdown cost;
    double total = 0.0;
};

struct SolveResult {
    std::vector<Pose> trajectory;
    SolveReport report;
};

/// Projected gradient descent with Armijo backtracking. Every pose it
/// returns is inside the joint limits, and the cost never increases across
/// accepted steps. Throws if the cost turns non-finite.
SolveResult solve_ik(const IKProblem &problem, const SolveOptions &options = {});

}  // namespace scenegest
