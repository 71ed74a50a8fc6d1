#pragma once

#include <map>
#include <string>
#include <vector>

#include "scenegest/realize.hpp"
#include "scenegest/scene.hpp"

namespace scenegest {

/// Everything the pipeline reads from its JSON configuration file. Paths are
/// resolved relative to the config file's directory at load time.
struct PipelineConfig {
    std::string chain_path;
    double fps = 30.0;
    AnalysisParams analysis;
    RealizeParams realize;
    std::vector<std::string> zeroed_bones{"spine", "neck"};
    // bone -> axis name ("rx"/"ry"/"rz") -> degrees
    std::map<std::string, std::map<std::string, double>> idle_pose_deg;
    std::string embedding_path;  // empty: hashed embeddings
    int embedding_dim = 128;
};

/// Built-in defaults, matching the bundled demo assets.
PipelineConfig default_config();

/// Parses and validates a config file. Unknown keys anywhere in the document
/// are an error, as are out-of-range values, so typos fail loudly instead of
/// silently falling back.
PipelineConfig load_config(const std::string &path);

/// Builds the idle pose from the config's per-bone angle table, clamped to
/// the chain's joint limits. Unknown bone or axis names are an error.
Pose build_idle_pose(const PipelineConfig &config, const KinematicChain &chain);

}  // namespace scenegest
